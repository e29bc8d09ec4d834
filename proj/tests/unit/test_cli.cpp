#include <gtest/gtest.h>

#include <nlbc/cli.hpp>

#include <cstdio>
#include <fstream>
#include <sstream>

using namespace nlbc;

namespace {

struct result {
  int code;
  std::string out, err;
  json doc() const { return json::parse(out); }
};

result invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "nlbc");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::run(int(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string temp_path(const std::string& name) { return std::string(NLBC_TEST_DATA_DIR) + "/" + name; }

}  // namespace

TEST(Cli, GapForPointJumpNearOneThird) {
  auto r = invoke({"gap", "--dim", "1", "--measure", "delta:0.3333333333"});
  ASSERT_EQ(r.code, cli::exit_ok) << r.err;
  auto j = r.doc();
  EXPECT_EQ(j["command"], "gap");
  EXPECT_NEAR(j["gap_over_pi2"].get<double>(), -2.0, 1e-8);
  EXPECT_TRUE(j["certified"].get<bool>());
  EXPECT_TRUE(j.contains("metadata"));
}

TEST(Cli, GapAsCsv) {
  auto r = invoke({"gap", "--dim", "1", "--measure", "qs", "--format", "csv"});
  ASSERT_EQ(r.code, cli::exit_ok) << r.err;
  std::istringstream in(r.out);
  std::string header, row;
  std::getline(in, header);
  std::getline(in, row);
  EXPECT_EQ(header, "gap,half_width,certified");
  EXPECT_NEAR(std::stod(row.substr(0, row.find(','))), -2.0 * pi2, 1e-9);
  EXPECT_NE(row.find("true"), std::string::npos);
}

TEST(Cli, SpectrumReport) {
  auto r = invoke({"spectrum", "--dim", "2", "--measure", "qs", "--floor", "-6pi2"});
  ASSERT_EQ(r.code, cli::exit_ok) << r.err;
  auto j = r.doc();
  EXPECT_DOUBLE_EQ(j["inputs"]["floor"].get<double>(), -6.0 * pi2);
  EXPECT_TRUE(j["report"].is_object());
}

TEST(Cli, HdTableAndFlip) {
  auto r = invoke({"hd", "--from", "1", "--to", "3", "--format", "csv"});
  ASSERT_EQ(r.code, cli::exit_ok) << r.err;
  std::istringstream in(r.out);
  std::string line;
  int lines = 0;
  std::getline(in, line);
  EXPECT_EQ(line, "d,value_lo,value_hi,method,verdict");
  while (std::getline(in, line)) ++lines;
  EXPECT_EQ(lines, 3);
  auto f = invoke({"hd", "--from", "8", "--to", "12"});
  ASSERT_EQ(f.code, cli::exit_ok) << f.err;
  EXPECT_EQ(f.doc()["first_strictly_above"].get<int>(), 10);
  EXPECT_EQ(f.doc()["rows"].size(), 5u);
}

TEST(Cli, StraddlingEnclosureIsIndeterminate) {
  auto r = invoke({"hd", "--from", "9", "--to", "9", "--method", "enumeration", "--hd-cutoff", "3"});
  EXPECT_EQ(r.code, cli::exit_indeterminate) << r.out;
  EXPECT_TRUE(r.doc()["first_strictly_above"].is_null());
}

TEST(Cli, CubeCheckLowDimensions) {
  auto r = invoke({"cube-check", "--from", "1", "--to", "3"});
  ASSERT_EQ(r.code, cli::exit_ok) << r.err;
  EXPECT_TRUE(r.doc()["reproduced"].get<bool>());
}

TEST(Cli, PointJumpFamiliesInOneDimension) {
  auto r = invoke({"prop-1d"});
  ASSERT_EQ(r.code, cli::exit_ok) << r.err;
  EXPECT_TRUE(r.doc()["reproduced"].get<bool>());
}

TEST(Cli, CompareAgainstOracle) {
  auto r = invoke({"compare", "--dim", "1", "--measure", "lebesgue", "--grids", "100,200,400"});
  ASSERT_EQ(r.code, cli::exit_ok) << r.err;
  auto j = r.doc();
  EXPECT_TRUE(j["all_within_tolerance"].get<bool>());
  EXPECT_EQ(j["rows"].size(), 3u);
}

TEST(Cli, OracleWritesMatrixAndEigenvalues) {
  const auto path = temp_path("cli_matrix.coo");
  auto r = invoke({"oracle", "--dim", "1", "--measure", "delta:1/3", "--grids", "50,100", "--count", "2",
                   "--export-matrix", path});
  ASSERT_EQ(r.code, cli::exit_ok) << r.err;
  auto j = r.doc();
  EXPECT_EQ(j["grids"].size(), 2u);
  EXPECT_FALSE(j["richardson"].empty());
  std::ifstream f(path);
  EXPECT_TRUE(f.good());
  std::remove(path.c_str());
}

TEST(Cli, UsageErrors) {
  EXPECT_EQ(invoke({}).code, cli::exit_usage);
  EXPECT_EQ(invoke({"nope"}).code, cli::exit_usage);
  EXPECT_EQ(invoke({"gap", "--bogus", "1"}).code, cli::exit_usage);
  EXPECT_EQ(invoke({"gap", "--measure", "delta:0.5", "--dim", "2"}).code, cli::exit_usage);
  EXPECT_EQ(invoke({"gap", "--format", "xml"}).code, cli::exit_usage);
  EXPECT_EQ(invoke({"gap", "--dim", "2", "--drift", "1,2,3"}).code, cli::exit_usage);
  EXPECT_EQ(invoke({"hd", "--from", "5", "--to", "2"}).code, cli::exit_usage);
  EXPECT_EQ(invoke({"gap", "--config"}).code, cli::exit_usage);
  EXPECT_EQ(invoke({"gap", "--threads", "0"}).code, cli::exit_usage);
  EXPECT_EQ(invoke({"--help"}).code, cli::exit_ok);
}

TEST(Cli, ConfigFileWithCommandLineOverride) {
  const auto path = temp_path("cli_config.txt");
  {
    std::ofstream f(path);
    f << "# spectral gap settings\n"
      << "dim = 1\n"
      << "measure = qs\n";
  }
  auto a = invoke({"gap", "--config", path});
  ASSERT_EQ(a.code, cli::exit_ok) << a.err;
  EXPECT_EQ(a.doc()["inputs"]["measure"], "qs");
  EXPECT_NEAR(a.doc()["gap_over_pi2"].get<double>(), -2.0, 1e-8);
  auto b = invoke({"gap", "--config", path, "--dim", "2"});
  ASSERT_EQ(b.code, cli::exit_ok) << b.err;
  EXPECT_EQ(b.doc()["inputs"]["domain"]["dim"], 2);
  EXPECT_NEAR(b.doc()["gap_over_pi2"].get<double>(), -2.5, 1e-8);
  {
    std::ofstream f(path);
    f << "colour = blue\n";
  }
  EXPECT_EQ(invoke({"gap", "--config", path}).code, cli::exit_usage);
  std::remove(path.c_str());
}

TEST(Cli, OutputFileMatchesStdout) {
  const auto path = temp_path("cli_out.json");
  auto a = invoke({"hd", "--from", "1", "--to", "2", "--out", path});
  ASSERT_EQ(a.code, cli::exit_ok);
  EXPECT_TRUE(a.out.empty());
  std::ifstream f(path);
  std::stringstream ss;
  ss << f.rdbuf();
  auto b = invoke({"hd", "--from", "1", "--to", "2"});
  EXPECT_EQ(without_metadata(json::parse(ss.str())), without_metadata(b.doc()));
  std::remove(path.c_str());
}

TEST(Cli, SimulationIsReproducibleForAFixedSeed) {
  const std::vector<std::string> args = {"simulate", "--dim",  "1",        "--measure", "qs",   "--horizon",
                                         "1",        "--steps", "10000", "--replicates", "2", "--seed", "42"};
  auto a = invoke(args), b = invoke(args);
  ASSERT_EQ(a.code, cli::exit_ok) << a.err;
  EXPECT_EQ(without_metadata(a.doc()), without_metadata(b.doc()));
  EXPECT_DOUBLE_EQ(a.doc()["inputs"]["step"].get<double>(), 1e-4);
  auto c = args;
  c.back() = "43";
  EXPECT_NE(without_metadata(invoke(c).doc())["result"], without_metadata(a.doc())["result"]);
}
