#pragma once

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "basis.hpp"
#include "efunction.hpp"
#include "fd_oracle.hpp"
#include "io.hpp"
#include "measures.hpp"
#include "series.hpp"
#include "simulation.hpp"
#include "spectrum.hpp"

namespace nlbc::cli {

inline constexpr int exit_ok = 0;
inline constexpr int exit_error = 1;
inline constexpr int exit_indeterminate = 2;
inline constexpr int exit_usage = 64;

struct options {
  int dim = 1;
  std::string drift;
  std::string measure = "lebesgue";
  int cutoff = 0;
  std::string floor;
  std::string grids;
  long long steps = 0;
  double horizon = 0.0;
  int replicates = 0;
  std::uint64_t seed = 1;
  int threads = 1;
  std::string out;
  std::string format = "json";
  // hd and cube-check
  int from = 1, to = 15;
  std::string method = "transform";
  int hd_cutoff = 0;
  // simulate / oracle / compare extras
  std::string observable;
  double start = 0.25;
  int count = 6;
  std::string export_matrix;
  bool with_sim = false;
};

// thrown for bad user input discovered after flag parsing
struct usage_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

namespace detail {

inline std::vector<std::string> split(const std::string& s, char sep = ',') {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(item);
  return out;
}

inline double parse_number(const std::string& s) {
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &pos);
  } catch (const std::exception&) {
    throw usage_error("not a number: '" + s + "'");
  }
  if (pos != s.size()) throw usage_error("not a number: '" + s + "'");
  return v;
}

// "-50pi2" means -50 pi^2
inline double parse_scaled(const std::string& s) {
  if (s.size() > 3 && s.compare(s.size() - 3, 3, "pi2") == 0) return parse_number(s.substr(0, s.size() - 3)) * pi2;
  return parse_number(s);
}

inline domain_spec make_domain(const options& o) {
  if (o.dim < 1) throw usage_error("--dim must be >= 1");
  std::vector<double> b(std::size_t(o.dim), 0.0);
  if (!o.drift.empty()) {
    auto parts = split(o.drift);
    if (parts.size() == 1)
      std::fill(b.begin(), b.end(), parse_number(parts[0]));
    else if (parts.size() == std::size_t(o.dim))
      for (std::size_t j = 0; j < parts.size(); ++j) b[j] = parse_number(parts[j]);
    else
      throw usage_error("--drift needs 1 or " + std::to_string(o.dim) + " values");
  }
  return domain_spec::with_drifts(b);
}

inline jump_measure make_measure(const options& o, std::size_t d) {
  try {
    return parse_measure(o.measure, d);
  } catch (const nlbc::invalid_argument& e) {
    throw usage_error(std::string("--measure: ") + e.what());
  }
}

inline std::vector<int> make_grids(const options& o, std::vector<int> fallback) {
  if (o.grids.empty()) return fallback;
  std::vector<int> g;
  for (const auto& s : split(o.grids)) {
    const double v = parse_number(s);
    if (v != std::floor(v) || v < 1) throw usage_error("--grids takes positive integers");
    g.push_back(int(v));
  }
  return g;
}

inline int default_cutoff(int d) {
  switch (d) {
    case 1: return 64;
    case 2: return 40;
    case 3: return 24;
    default: return 4;
  }
}

inline eigen_basis make_basis(const options& o, const domain_spec& dom, double floor) {
  const int d = int(dom.dim());
  const int cutoff = o.cutoff > 0 ? o.cutoff : default_cutoff(d);
  if (d <= 3) return eigen_basis(dom, cutoff);
  // higher dimension: every level down to the floor plus a margin
  const int level = int(std::ceil((-floor - dom.drift_shift()) / alpha)) + 8;
  return eigen_basis(dom, std::max(cutoff, int(std::ceil(std::sqrt(double(level))))), level);
}

inline double default_floor(const domain_spec& dom) {
  return -dom.drift_shift() - alpha * (double(dom.dim()) + 40.0);
}

inline double make_floor(const options& o, const domain_spec& dom) {
  return o.floor.empty() ? default_floor(dom) : parse_scaled(o.floor);
}

inline void emit(const options& o, const json& doc, const std::function<void(std::ostream&)>& csv, std::ostream& out) {
  auto write = [&](std::ostream& os) {
    if (o.format == "csv" && csv)
      csv(os);
    else
      os << doc.dump(2) << '\n';
  };
  if (o.out.empty()) {
    write(out);
    return;
  }
  std::ofstream f(o.out);
  if (!f) throw nlbc::invalid_argument("cannot open output file " + o.out);
  write(f);
}

inline json inputs_json(const options& o, const domain_spec& dom) {
  return json{{"domain", to_json(dom)}, {"measure", o.measure}};
}

// eigenvalues repeated by multiplicity, truncated to k
inline std::vector<cplx> top_expanded(const spectrum_report& r, std::size_t k) {
  auto v = r.expanded();
  if (v.size() > k) v.resize(k);
  return v;
}

}  // namespace detail

// ---- commands ----

inline int cmd_spectrum(const options& o, std::ostream& out, bool gap_only) {
  auto dom = detail::make_domain(o);
  auto nu = detail::make_measure(o, dom.dim());
  const double floor = detail::make_floor(o, dom);
  auto basis = detail::make_basis(o, dom, floor);
  auto rep = spectrum_report_for(basis, nu, floor);
  json doc = make_document(gap_only ? "gap" : "spectrum");
  doc["inputs"] = detail::inputs_json(o, dom);
  doc["inputs"]["cutoff"] = basis.cutoff();
  doc["inputs"]["floor"] = floor;
  if (gap_only) {
    doc["gap"] = rep.gap ? json(*rep.gap) : json(nullptr);
    doc["gap_over_pi2"] = rep.gap ? json(*rep.gap / pi2) : json(nullptr);
    double hw = 0.0;
    if (!rep.eigenvalues.empty()) hw = rep.eigenvalues.front().half_width;
    doc["half_width"] = hw;
    doc["lambda1"] = rep.lambda1;
    doc["certified"] = rep.certified();
    doc["real_maximizer"] = rep.real_maximizer;
    doc["issues"] = rep.issues;
  } else {
    doc["report"] = to_json(rep);
  }
  for (const auto& w : nu.warnings()) doc["warnings"].push_back(w);
  attach_metadata(doc);
  detail::emit(o, doc,
               [&](std::ostream& os) {
                 if (gap_only) {
                   os.precision(17);
                   os << "gap,half_width,certified\n";
                   os << (rep.gap ? *rep.gap : std::nan("")) << ','
                      << (rep.eigenvalues.empty() ? 0.0 : rep.eigenvalues.front().half_width) << ','
                      << (rep.certified() ? "true" : "false") << '\n';
                 } else {
                   write_csv(rep, os);
                 }
               },
               out);
  return rep.certified() ? exit_ok : exit_indeterminate;
}

inline int cmd_hd(const options& o, std::ostream& out) {
  if (o.from < 1 || o.to < o.from) throw usage_error("need 1 <= --from <= --to");
  if (o.method != "transform" && o.method != "enumeration") throw usage_error("--method is transform or enumeration");
  std::vector<hd_result> rows;
  for (int d = o.from; d <= o.to; ++d) {
    if (o.method == "transform")
      rows.push_back(hd_transform(d));
    else
      rows.push_back(hd_enumerate(d, o.hd_cutoff > 0 ? o.hd_cutoff : 101));
  }
  json doc = make_document("hd");
  json arr = json::array();
  bool all = true;
  std::optional<int> flip;
  for (const auto& h : rows) {
    arr.push_back(to_json(h));
    auto v = h.verdict_or_none();
    all &= v != hd_verdict::none;
    if (!flip && v == hd_verdict::gap_strictly_above) flip = h.d;
  }
  doc["rows"] = std::move(arr);
  doc["first_strictly_above"] = flip ? json(*flip) : json(nullptr);
  attach_metadata(doc);
  detail::emit(o, doc, [&](std::ostream& os) { write_csv(rows, os); }, out);
  return all ? exit_ok : exit_indeterminate;
}

// cube gap from the lattice-transform E, checked against the expected dichotomy at threshold 11
inline int cmd_cube_check(const options& o, std::ostream& out) {
  if (o.from < 1 || o.to < o.from) throw usage_error("need 1 <= --from <= --to");
  json doc = make_document("cube-check");
  json rows = json::array();
  bool certified = true, reproduced = true;
  std::ostringstream csv;
  csv.precision(17);
  csv << std::boolalpha << "d,gap,lambda1,gap_above_lambda1,expected_above,agrees\n";
  for (int d = o.from; d <= o.to; ++d) {
    auto ef = make_cube_reversible_efunction(d);
    auto rep = spectrum_report_for(ef, cube_search_floor(d));
    certified &= rep.certified();
    const bool above = rep.gap && *rep.gap > rep.lambda1 + 1e-9 * std::abs(rep.lambda0);
    const bool expected = d >= 11;
    reproduced &= above == expected;
    rows.push_back({{"d", d},
                    {"gap", rep.gap ? json(*rep.gap) : json(nullptr)},
                    {"lambda1", rep.lambda1},
                    {"gap_above_lambda1", above},
                    {"expected_above", expected},
                    {"agrees", above == expected},
                    {"certified", rep.certified()}});
    csv << d << ',' << (rep.gap ? *rep.gap : std::nan("")) << ',' << rep.lambda1 << ',' << above << ',' << expected
        << ',' << (above == expected) << '\n';
  }
  doc["rows"] = std::move(rows);
  doc["reproduced"] = reproduced;
  attach_metadata(doc);
  detail::emit(o, doc, [&](std::ostream& os) { os << csv.str(); }, out);
  if (!certified) return exit_indeterminate;
  return reproduced ? exit_ok : exit_error;
}

// closed-form eigenvalue families for a single point jump at p, above the floor
inline std::vector<double> point_jump_families(double p, double floor) {
  std::vector<double> v;
  for (double scale : {1.0 / ((1.0 - p) * (1.0 - p)), 1.0, 1.0 / (p * p)})
    for (int n = 1;; ++n) {
      const double x = -2.0 * pi2 * n * n * scale;
      if (x <= floor + 1e-12 * std::abs(floor)) break;  // values on the floor are excluded
      v.push_back(x);
    }
  std::sort(v.begin(), v.end(), std::greater<>());
  std::vector<double> u;
  for (double x : v)
    if (u.empty() || std::abs(u.back() - x) > 1e-9) u.push_back(x);
  return u;
}

inline int cmd_prop_1d(const options& o, std::ostream& out) {
  const double floor = o.floor.empty() ? -50.0 * pi2 : detail::parse_scaled(o.floor);
  json doc = make_document("prop-1d");
  json cases = json::array();
  bool ok = true, certified = true;
  for (const char* p : {"1/3", "1/2", "2/5"}) {
    auto r = *rational::parse(p);
    auto dom = domain_spec::cube(1);
    eigen_basis basis(dom, o.cutoff > 0 ? o.cutoff : 64);
    auto rep = spectrum_report_for(basis, jump_measure::delta(std::vector<rational>{r}), floor);
    certified &= rep.certified();
    auto expect = point_jump_families(r.to_double(), floor);
    std::vector<double> got;
    for (const auto& e : rep.eigenvalues) got.push_back(e.value.real());
    double worst = 0.0;
    bool match = got.size() == expect.size();
    for (std::size_t i = 0; match && i < got.size(); ++i) worst = std::max(worst, std::abs(got[i] - expect[i]));
    match = match && worst <= 1e-8;
    const bool gap_ok = rep.gap && std::abs(*rep.gap + 2.0 * pi2) <= 1e-8;
    ok &= match && gap_ok;
    cases.push_back({{"p", p},
                     {"gap", rep.gap ? json(*rep.gap) : json(nullptr)},
                     {"distinct_eigenvalues", got.size()},
                     {"expected_distinct", expect.size()},
                     {"max_abs_deviation", match ? json(worst) : json(nullptr)},
                     {"families_match", match},
                     {"gap_is_minus_2pi2", gap_ok},
                     {"report", to_json(rep)}});
  }
  doc["floor"] = floor;
  doc["cases"] = std::move(cases);
  doc["reproduced"] = ok;
  attach_metadata(doc);
  detail::emit(o, doc, nullptr, out);
  if (!certified) return exit_indeterminate;
  return ok ? exit_ok : exit_error;
}

inline int cmd_prop_2d(const options& o, std::ostream& out) {
  json doc = make_document("prop-2d");
  const double lam = -2.5 * pi2;
  auto bracket = enu0_sum(lam, 2000);
  const double E = enu0_constant * bracket.value, Eerr = -enu0_constant * bracket.error;
  const bool negative = E < 0.0 && Eerr < std::abs(E);
  doc["enu0"] = {{"lambda", lam}, {"bracket", bracket.value}, {"bracket_error", bracket.error}, {"E", E}, {"E_error", Eerr}, {"certified_negative", negative}};

  auto dom = domain_spec::cube(2);
  auto nu = jump_measure::delta(std::vector<rational>{*rational::parse("1/9"), *rational::parse("1/9")});
  eigen_basis basis(dom, o.cutoff > 0 ? o.cutoff : 40);
  auto rep = spectrum_report_for(basis, nu, -12.0 * pi2);
  std::optional<double> root;
  for (const auto& e : rep.eigenvalues)
    if (e.origin == provenance::e_root && e.value.real() > -2.5 * pi2 && e.value.real() < -pi2) root = e.value.real();
  const bool gap_above = rep.gap && *rep.gap > -2.5 * pi2;
  doc["report"] = to_json(rep);
  doc["root_in_window"] = root ? json(*root) : json(nullptr);
  doc["gap_above_lambda1"] = gap_above;

  auto grids = detail::make_grids(o, {32, 48});
  bool fd_ok = true;
  if (grids.size() >= 2 && root) {
    auto ex = extrapolated_spectrum(dom, nu, grids[0], grids[1], 1);
    const double diff = std::abs(ex.front().real() - *root);
    fd_ok = diff <= 1e-2 * pi2;
    doc["oracle"] = {{"grids", grids}, {"extrapolated_top", to_json(ex.front())}, {"difference", diff}, {"within_tolerance", fd_ok}};
  }
  const bool ok = negative && root.has_value() && gap_above && fd_ok;
  doc["reproduced"] = ok;
  attach_metadata(doc);
  detail::emit(o, doc, nullptr, out);
  if (!rep.certified()) return exit_indeterminate;
  return ok ? exit_ok : exit_error;
}

inline int cmd_prop_pm(const options& o, std::ostream& out) {
  options q = o;
  if (q.drift.empty()) q.drift = "1";
  q.dim = 1;
  auto dom = detail::make_domain(q);
  eigen_basis basis(dom, o.cutoff > 0 ? o.cutoff : 64);
  const double eps_max = max_safe_epsilon(basis);
  const double eps = 0.5 * eps_max;
  auto grids = detail::make_grids(o, {200, 400});
  json doc = make_document("prop-pm");
  doc["drift"] = dom.factors[0].drift;
  doc["max_safe_epsilon"] = eps_max;
  doc["epsilon"] = eps;
  doc["lambda1"] = basis.lambda1();
  bool ok = true, certified = true;
  const double tol = 1e-3 * std::abs(basis.lambda0());
  for (int sign : {+1, -1}) {
    auto nu = jump_measure::mixture(eps, sign);
    auto rep = spectrum_report_for(basis, nu, detail::default_floor(dom));
    certified &= rep.certified();
    const bool side = rep.gap && (sign > 0 ? *rep.gap > basis.lambda1() : *rep.gap < basis.lambda1());
    json c{{"sign", sign > 0 ? "+" : "-"}, {"gap", rep.gap ? json(*rep.gap) : json(nullptr)}, {"expected_side_holds", side}};
    bool fd_ok = true;
    if (grids.size() >= 2 && rep.gap) {
      auto ex = extrapolated_spectrum(dom, nu, grids[0], grids[1], 1);
      const double diff = std::abs(ex.front().real() - *rep.gap);
      fd_ok = diff <= tol;
      c["oracle"] = {{"grids", grids}, {"extrapolated_top", to_json(ex.front())}, {"difference", diff}, {"within_tolerance", fd_ok}};
    }
    c["report"] = to_json(rep);
    ok &= side && fd_ok;
    doc["cases"].push_back(std::move(c));
  }
  doc["reproduced"] = ok;
  attach_metadata(doc);
  detail::emit(o, doc, nullptr, out);
  if (!certified) return exit_indeterminate;
  return ok ? exit_ok : exit_error;
}

inline sim_config make_sim_config(const options& o, const domain_spec& dom, const jump_measure& nu, bool mixing) {
  sim_config c;
  c.domain = dom;
  c.measure = nu;
  c.horizon = o.horizon > 0.0 ? o.horizon : (mixing ? 0.3 : 80.0);
  c.step = o.steps > 0 ? c.horizon / double(o.steps) : (mixing ? 1e-4 : 1e-5);
  c.replicates = o.replicates > 0 ? o.replicates : (mixing ? 10000 : 100);
  c.seed = o.seed;
  c.threads = o.threads;
  if (mixing) {
    c.start = sim_config::start_kind::point;
    c.start_point.assign(dom.dim(), 0.5);
    c.start_point[0] = o.start;
  }
  return c;
}

// invariant density used as the reference for histograms (d = 1)
inline std::function<double(double)> reference_density(const domain_spec& dom, const jump_measure& nu) {
  eigen_basis basis(dom, 64);
  auto mode = dom.zero_drift() ? green_density::mode::exact : green_density::mode::series;
  auto g = std::make_shared<green_density>(basis, nu, mode);
  return [g](double y) { return (*g)(y).value; };
}

inline int cmd_simulate(const options& o, std::ostream& out) {
  auto dom = detail::make_domain(o);
  if (dom.dim() > 2) throw usage_error("simulate supports --dim 1 or 2");
  auto nu = detail::make_measure(o, dom.dim());
  json doc = make_document("simulate");
  doc["inputs"] = detail::inputs_json(o, dom);
  if (!o.observable.empty()) {
    auto f = observable(o.observable);
    auto cfg = make_sim_config(o, dom, nu, true);
    doc["inputs"]["observable"] = o.observable;
    doc["inputs"]["step"] = cfg.step;
    doc["inputs"]["horizon"] = cfg.horizon;
    doc["inputs"]["replicates"] = cfg.replicates;
    doc["inputs"]["seed"] = cfg.seed;
    // mu(f) from the reference density by quadrature
    double mean = 0.0;
    if (dom.dim() == 1) {
      auto rho = reference_density(dom, nu);
      using gk = boost::math::quadrature::gauss_kronrod<double, 61>;
      mean = gk::integrate([&](double y) { return f(std::span<const double>(&y, 1)) * rho(y); }, 0.0, 1.0, 8, 1e-12);
    } else {
      throw usage_error("mixing-rate estimation needs --dim 1");
    }
    auto m = estimate_mixing_rate(cfg, f, mean);
    doc["invariant_mean"] = mean;
    doc["mixing"] = to_json(m);
    attach_metadata(doc);
    detail::emit(o, doc,
                 [&](std::ostream& os) {
                   os.precision(17);
                   os << "t,mean,std_error\n";
                   for (std::size_t k = 0; k < m.times.size(); ++k)
                     os << m.times[k] << ',' << m.means[k] << ',' << m.std_errors[k] << '\n';
                 },
                 out);
    return exit_ok;
  }
  auto cfg = make_sim_config(o, dom, nu, false);
  auto r = simulate(cfg);
  doc["inputs"]["step"] = cfg.step;
  doc["inputs"]["horizon"] = cfg.horizon;
  doc["inputs"]["replicates"] = cfg.replicates;
  doc["inputs"]["seed"] = cfg.seed;
  doc["result"] = to_json(r);
  if (dom.dim() == 1) doc["l1_vs_green"] = histogram_l1(r, reference_density(dom, nu));
  attach_metadata(doc);
  detail::emit(o, doc, [&](std::ostream& os) { write_csv(r, os); }, out);
  return exit_ok;
}

inline int cmd_oracle(const options& o, std::ostream& out) {
  auto dom = detail::make_domain(o);
  auto nu = detail::make_measure(o, dom.dim());
  auto grids = detail::make_grids(o, dom.dim() == 1 ? std::vector<int>{200, 400} : std::vector<int>{24, 48});
  json doc = make_document("oracle");
  doc["inputs"] = detail::inputs_json(o, dom);
  std::vector<std::vector<cplx>> spectra;
  json per = json::array();
  for (std::size_t i = 0; i < grids.size(); ++i) {
    auto M = build_nonlocal_matrix(dom, grids[i], nu);
    if (i == 0 && !o.export_matrix.empty()) {
      std::ofstream f(o.export_matrix);
      if (!f) throw nlbc::invalid_argument("cannot open " + o.export_matrix);
      write_coordinates(M, f);
    }
    auto r = oracle_spectrum(M, std::size_t(std::max(1, o.count)));
    per.push_back({{"n", grids[i]}, {"size", M.size}, {"kernel_residual", kernel_residual(M)}, {"removed_zero", to_json(r.removed_zero)}, {"eigenvalues", to_json(r.eigenvalues)}});
    spectra.push_back(r.eigenvalues);
  }
  doc["grids"] = std::move(per);
  std::vector<cplx> best = spectra.back();
  json rich = json::array();
  for (std::size_t i = 0; i + 1 < spectra.size(); ++i) {
    auto ex = richardson(spectra[i], spectra[i + 1], double(grids[i + 1]) / grids[i]);
    rich.push_back({{"coarse", grids[i]}, {"fine", grids[i + 1]}, {"eigenvalues", to_json(ex)}});
    best = ex;
  }
  doc["richardson"] = std::move(rich);
  attach_metadata(doc);
  detail::emit(o, doc, [&](std::ostream& os) { write_eigenvalues_csv(best, os); }, out);
  return exit_ok;
}

inline int cmd_compare(const options& o, std::ostream& out) {
  auto dom = detail::make_domain(o);
  if (dom.dim() > 2) throw usage_error("compare supports --dim 1 or 2");
  auto nu = detail::make_measure(o, dom.dim());
  const double floor = detail::make_floor(o, dom);
  auto basis = detail::make_basis(o, dom, floor);
  auto rep = spectrum_report_for(basis, nu, floor);
  auto grids = detail::make_grids(o, dom.dim() == 1 ? std::vector<int>{200, 400} : std::vector<int>{24, 48});
  if (grids.size() < 2) throw usage_error("compare needs at least two --grids");
  const std::size_t k = 3;
  std::vector<std::vector<cplx>> spectra;
  for (int n : grids) spectra.push_back(oracle_spectrum(build_nonlocal_matrix(dom, n, nu), k).eigenvalues);
  const std::size_t last = spectra.size() - 1;
  auto ex = richardson(spectra[last - 1], spectra[last], double(grids[last]) / grids[last - 1]);
  auto series = detail::top_expanded(rep, k);
  const double tol = 1e-3 * std::abs(rep.lambda0);
  json doc = make_document("compare");
  doc["inputs"] = detail::inputs_json(o, dom);
  doc["inputs"]["grids"] = grids;
  doc["tolerance"] = tol;
  json rows = json::array();
  bool all = series.size() == k && ex.size() == k;
  std::ostringstream csv;
  csv.precision(17);
  csv << "k,series_re,series_im,oracle_re,oracle_im,difference,tolerance,ok\n";
  for (std::size_t i = 0; i < std::min(series.size(), ex.size()); ++i) {
    const double diff = std::abs(series[i] - ex[i]);
    const bool ok = diff <= tol;
    all &= ok;
    rows.push_back({{"k", i + 1}, {"series", to_json(series[i])}, {"oracle", to_json(ex[i])}, {"difference", diff}, {"ok", ok}});
    csv << i + 1 << ',' << series[i].real() << ',' << series[i].imag() << ',' << ex[i].real() << ',' << ex[i].imag()
        << ',' << diff << ',' << tol << ',' << (ok ? "true" : "false") << '\n';
  }
  doc["rows"] = std::move(rows);
  doc["all_within_tolerance"] = all;
  doc["series_certified"] = rep.certified();
  if (o.with_sim && dom.dim() == 1) {
    auto cfg = make_sim_config(o, dom, nu, false);
    auto r = simulate(cfg);
    doc["simulation"] = {{"l1_vs_green", histogram_l1(r, reference_density(dom, nu))}, {"jumps_observed", r.jumps_observed}};
  }
  attach_metadata(doc);
  detail::emit(o, doc, [&](std::ostream& os) { os << csv.str(); }, out);
  if (!rep.certified()) return exit_indeterminate;
  return all ? exit_ok : exit_error;
}

// ---- argument handling ----

// Reads "key = value" lines; '#' starts a comment.
inline std::vector<std::pair<std::string, std::string>> read_config_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw usage_error("cannot read config file " + path);
  std::vector<std::pair<std::string, std::string>> kv;
  std::string line;
  int lineno = 0;
  auto trim = [](std::string s) {
    const char* ws = " \t\r";
    s.erase(0, s.find_first_not_of(ws));
    s.erase(s.find_last_not_of(ws) + 1);
    return s;
  };
  while (std::getline(f, line)) {
    ++lineno;
    if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
    line = trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos) throw usage_error(path + ":" + std::to_string(lineno) + ": expected key=value");
    kv.push_back({trim(line.substr(0, eq)), trim(line.substr(eq + 1))});
  }
  return kv;
}

inline void add_common(CLI::App* sub, options& o) {
  sub->add_option("--dim", o.dim, "dimension d");
  sub->add_option("--drift", o.drift, "drift b1[,b2,...]");
  sub->add_option("--measure", o.measure, "jump measure kind:params");
  sub->add_option("--cutoff", o.cutoff, "modes per axis");
  sub->add_option("--floor", o.floor, "search floor (suffix pi2 for multiples of pi^2)");
  sub->add_option("--grids", o.grids, "grid sizes n1,n2,...");
  sub->add_option("--steps", o.steps, "Euler steps per replicate");
  sub->add_option("--horizon", o.horizon, "time horizon T");
  sub->add_option("--replicates", o.replicates, "independent replicates");
  sub->add_option("--seed", o.seed, "64-bit seed");
  sub->add_option("--threads", o.threads, "worker threads");
  sub->add_option("--out", o.out, "output file (default stdout)");
  sub->add_option("--format", o.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
}

inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  options o;
  CLI::App app{"Spectra of diffusions with jumps from the boundary"};
  app.require_subcommand(1);
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  std::map<std::string, CLI::App*> subs;
  auto add = [&](const std::string& name, const std::string& help) {
    auto* s = app.add_subcommand(name, help);
    add_common(s, o);
    subs[name] = s;
    return s;
  };
  add("spectrum", "certified spectrum report");
  add("gap", "spectral gap only");
  auto* hd = add("hd", "H_d enclosures and verdicts");
  hd->add_option("--from", o.from, "first dimension");
  hd->add_option("--to", o.to, "last dimension");
  hd->add_option("--method", o.method, "transform or enumeration");
  hd->add_option("--hd-cutoff", o.hd_cutoff, "odd per-axis cutoff for enumeration");
  auto* cube = add("cube-check", "cube gap from the lattice transform");
  cube->add_option("--from", o.from, "first dimension");
  cube->add_option("--to", o.to, "last dimension");
  add("prop-1d", "single point jump in one dimension");
  add("prop-2d", "point jump at (1/9, 1/9) in the square");
  add("prop-pm", "perturbed jump measures with drift");
  auto* sim = add("simulate", "Monte Carlo histogram or mixing rate");
  sim->add_option("--observable", o.observable, "observable name for the mixing-rate fit");
  sim->add_option("--start", o.start, "first coordinate of the start point");
  auto* ora = add("oracle", "finite-difference eigenvalues");
  ora->add_option("--count", o.count, "eigenvalues to report");
  ora->add_option("--export-matrix", o.export_matrix, "coordinate file for the first grid");
  auto* cmp = add("compare", "series method against the finite-difference oracle");
  cmp->add_flag("--with-sim", o.with_sim, "add a simulation row (d = 1)");

  // splice config-file entries in front of the command-line flags so that flags win
  std::vector<std::string> args;
  std::string config;
  for (int i = 1; i < argc; ++i) {
    std::string a = argv[i];
    if (a == "--config") {
      if (i + 1 >= argc) {
        err << "--config needs a path\n";
        return exit_usage;
      }
      config = argv[++i];
    } else if (a.rfind("--config=", 0) == 0) {
      config = a.substr(9);
    } else {
      args.push_back(a);
    }
  }
  try {
    if (!config.empty()) {
      if (args.empty() || !subs.count(args[0])) throw usage_error("--config needs a command first");
      auto* s = subs[args[0]];
      std::vector<std::string> injected;
      for (const auto& [k, v] : read_config_file(config)) {
        auto* opt = s->get_option_no_throw("--" + k);
        if (!opt) throw usage_error("unknown config key '" + k + "' for " + args[0]);
        if (opt->get_type_size() == 0) {
          if (v == "true" || v == "1") injected.push_back("--" + k);
          else if (v != "false" && v != "0") throw usage_error("config key '" + k + "' is a switch");
        } else {
          injected.push_back("--" + k);
          injected.push_back(v);
        }
      }
      args.insert(args.begin() + 1, injected.begin(), injected.end());
    }
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return exit_ok;
  } catch (const CLI::ParseError& e) {
    err << e.what() << "\n" << app.help();
    return exit_usage;
  } catch (const usage_error& e) {
    err << e.what() << "\n";
    return exit_usage;
  }

  try {
    if (o.threads < 1) throw usage_error("--threads must be >= 1");
    const std::string cmd = app.get_subcommands().front()->get_name();
    if (cmd == "spectrum") return cmd_spectrum(o, out, false);
    if (cmd == "gap") return cmd_spectrum(o, out, true);
    if (cmd == "hd") return cmd_hd(o, out);
    if (cmd == "cube-check") return cmd_cube_check(o, out);
    if (cmd == "prop-1d") return cmd_prop_1d(o, out);
    if (cmd == "prop-2d") return cmd_prop_2d(o, out);
    if (cmd == "prop-pm") return cmd_prop_pm(o, out);
    if (cmd == "simulate") return cmd_simulate(o, out);
    if (cmd == "oracle") return cmd_oracle(o, out);
    if (cmd == "compare") return cmd_compare(o, out);
  } catch (const usage_error& e) {
    err << "usage error: " << e.what() << "\n";
    return exit_usage;
  } catch (const no_verdict& e) {
    err << "indeterminate: " << e.what() << "\n";
    return exit_indeterminate;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return exit_error;
  }
  return exit_error;
}

}  // namespace nlbc::cli
