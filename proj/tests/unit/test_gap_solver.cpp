#include <gtest/gtest.h>

#include <nlbc/io.hpp>
#include <nlbc/series.hpp>
#include <nlbc/spectrum.hpp>

#include <cmath>

using namespace nlbc;

namespace {

jump_measure point(std::initializer_list<const char*> coords) {
  std::vector<rational> r;
  for (auto c : coords) r.push_back(*rational::parse(c));
  return jump_measure::delta(r);
}

int multiplicity_at(const spectrum_report& rep, double value, double tol = 1e-8) {
  for (const auto& e : rep.eigenvalues)
    if (std::abs(e.value - cplx(value, 0.0)) < tol) return e.multiplicity;
  return 0;
}

}  // namespace

TEST(GapSolver, ReversibleEIsSumOfSquares) {
  eigen_basis b(domain_spec::cube(2), 40);
  efunction ef(b, jump_measure::reversible(), e_options{false});
  EXPECT_EQ(ef.strategy(), e_strategy::partial_sum);
  for (double lam : {-3.0 * pi2, -1.5 * pi2, -0.2 * pi2}) {
    long double s = 0.0L;
    for (const auto& e : b.entries()) s += (long double)e.F * e.F / (e.lambda - lam);
    auto v = ef(lam);
    EXPECT_NEAR(v.value, double(s), 1e-12);
    EXPECT_GT(v.error, 0.0);
  }
}

TEST(GapSolver, QuasiStationaryEHasOneTerm) {
  const double bb[] = {0.4};
  eigen_basis b(domain_spec::with_drifts(bb), 64);
  efunction ef(b, jump_measure::quasistationary());
  EXPECT_TRUE(ef.finite_support());
  const double F0G0 = b[0].F * jump_measure::quasistationary().G(b, b[0]).value;
  EXPECT_NEAR(F0G0, 1.0, 1e-14);
  for (double lam : {-50.0, -7.0, -1.0}) {
    auto v = ef(lam);
    EXPECT_NEAR(v.value, F0G0 / (b.lambda0() - lam), 1e-13);
    EXPECT_LE(v.error, 1e-13);
  }
}

TEST(GapSolver, ClosedForm1dMatchesPartialSum) {
  eigen_basis b(domain_spec::cube(1), 64);
  auto nu = point({"1/3"});
  efunction exact(b, nu);
  efunction plain(b, nu, e_options{false});
  EXPECT_EQ(exact.strategy(), e_strategy::exact_1d);
  for (double lam : {-30.0, -13.1, -3.0}) {
    auto a = exact(lam), p = plain(lam);
    EXPECT_LE(a.error, 1e-12);
    EXPECT_NEAR(a.value, p.value, p.error + a.error);
  }
}

TEST(GapSolver, SquarePointJumpNegativeAtFirstExcitedLevel) {
  eigen_basis b(domain_spec::cube(2), 48);
  efunction ef(b, point({"1/9", "1/9"}));
  auto v = ef(-2.5 * pi2);
  EXPECT_LT(v.value, 0.0);
  EXPECT_LT(v.error, std::abs(v.value));
  // the double sum with its negative constant is an independent code path
  auto bracket = enu0_sum(-2.5 * pi2, 400);
  const double other = enu0_constant * bracket.value;
  EXPECT_NEAR(v.value, other, v.error + std::abs(enu0_constant) * bracket.error);
}

TEST(GapSolver, EvaluationAtAPoleIsRejected) {
  eigen_basis b(domain_spec::cube(1), 16);
  efunction ef(b, jump_measure::lebesgue(), e_options{false});
  EXPECT_THROW(ef(b.lambda0()), pole_error);
}

TEST(GapSolver, NoRootBetweenFirstLevelsForSquareLebesgue) {
  eigen_basis b(domain_spec::cube(2), 40);
  efunction ef(b, jump_measure::lebesgue());
  auto scan = real_roots(ef, b.lambda1(), b.lambda0());
  EXPECT_TRUE(scan.roots.empty());
  EXPECT_TRUE(scan.suspects.empty());
}

TEST(GapSolver, ElevenCubeHasOneRootBetweenFirstLevels) {
  auto ef = make_cube_reversible_efunction(11);
  const double l0 = -11 * alpha, l1 = -14 * alpha;
  auto scan = real_roots(ef, l1, l0);
  ASSERT_EQ(scan.roots.size(), 1u);
  EXPECT_TRUE(scan.roots[0].certified);
  // bisection on the monotone transform-based E
  EXPECT_NEAR(scan.roots[0].value / pi2, -6.83074116, 1e-8);
}

TEST(GapSolver, QuasiStationaryHasNoRoots) {
  eigen_basis b(domain_spec::cube(1), 64);
  efunction ef(b, jump_measure::quasistationary());
  auto scan = real_roots(ef, -200.0 * pi2, -1e-6);
  EXPECT_TRUE(scan.roots.empty());
}

TEST(GapSolver, QuasiStationarySpectrumIsShiftedDirichlet1d) {
  eigen_basis b(domain_spec::cube(1), 64);
  auto rep = spectrum_report_for(b, jump_measure::quasistationary(), -60.0 * pi2);
  ASSERT_TRUE(rep.certified());
  ASSERT_TRUE(rep.gap);
  EXPECT_NEAR(*rep.gap, -2.0 * pi2, 1e-10);
  ASSERT_GE(rep.eigenvalues.size(), 3u);
  for (std::size_t k = 0; k < rep.eigenvalues.size(); ++k) {
    const int n = int(k) + 2;
    EXPECT_NEAR(rep.eigenvalues[k].value.real(), -alpha * n * n, 1e-9);
    EXPECT_EQ(rep.eigenvalues[k].multiplicity, 1);
    EXPECT_EQ(rep.eigenvalues[k].origin, provenance::dirichlet_rule);
  }
}

TEST(GapSolver, QuasiStationarySquareMultiplicities) {
  eigen_basis b(domain_spec::cube(2), 40);
  auto rep = spectrum_report_for(b, jump_measure::quasistationary(), -14.0 * pi2);
  ASSERT_TRUE(rep.certified());
  EXPECT_NEAR(*rep.gap, -2.5 * pi2, 1e-10);
  EXPECT_EQ(multiplicity_at(rep, -2.5 * pi2), 2);
  EXPECT_EQ(multiplicity_at(rep, -4.0 * pi2), 1);
  EXPECT_EQ(multiplicity_at(rep, -5.0 * pi2), 2);
  EXPECT_EQ(multiplicity_at(rep, -6.5 * pi2), 2);
  EXPECT_EQ(multiplicity_at(rep, -8.5 * pi2), 2);
  EXPECT_EQ(multiplicity_at(rep, -9.0 * pi2), 1);
  EXPECT_EQ(multiplicity_at(rep, -pi2), 0);
}

TEST(GapSolver, PointJumpFamilies) {
  eigen_basis b(domain_spec::cube(1), 64);
  auto rep = spectrum_report_for(b, point({"1/3"}), -40.0 * pi2);
  ASSERT_TRUE(rep.certified());
  EXPECT_NEAR(*rep.gap, -2.0 * pi2, 1e-8);
  // -2 pi^2 n^2 (3/2)^2, -2 pi^2 n^2, -2 pi^2 n^2 9, all above -40 pi^2
  const double expect[] = {-2.0, -4.5, -8.0, -18.0, -32.0};
  ASSERT_EQ(rep.eigenvalues.size(), std::size(expect));
  for (std::size_t k = 0; k < std::size(expect); ++k)
    EXPECT_NEAR(rep.eigenvalues[k].value.real(), expect[k] * pi2, 1e-8);
}

// every eigenvalue -kappa^2/2 of a rational point jump solves the determinant factorization
TEST(GapSolver, PointJumpDeterminantFactorization) {
  for (const char* p : {"1/3", "2/5", "1/4", "3/7", "1/2"}) {
    eigen_basis b(domain_spec::cube(1), 64);
    const double pv = rational::parse(p)->to_double();
    auto rep = spectrum_report_for(b, point({p}), -60.0 * pi2);
    ASSERT_TRUE(rep.certified()) << p;
    for (const auto& e : rep.eigenvalues) {
      const double kappa = std::sqrt(-2.0 * e.value.real());
      const double det = 4.0 * std::sin(kappa * (1 - pv) / 2) * std::sin(kappa / 2) * std::sin(kappa * pv / 2);
      EXPECT_NEAR(det, 0.0, 1e-8) << "p = " << p << " lambda/pi^2 = " << e.value.real() / pi2;
    }
  }
}

TEST(GapSolver, RemovablePointsProvenInClosedForm) {
  // p = 1/2: at even n both clusters vanish; E(lambda_n) = 0 exactly when n/2 is even
  eigen_basis b(domain_spec::cube(1), 64);
  auto rep = spectrum_report_for(b, point({"1/2"}), -40.0 * pi2);
  ASSERT_TRUE(rep.certified());
  EXPECT_EQ(multiplicity_at(rep, -8.0 * pi2), 2);   // n = 4
  EXPECT_EQ(multiplicity_at(rep, -2.0 * pi2), 1);   // n = 2
  EXPECT_EQ(multiplicity_at(rep, -18.0 * pi2), 1);  // n = 6
  EXPECT_EQ(multiplicity_at(rep, -32.0 * pi2), 2);  // n = 8
}

TEST(GapSolver, FloatingPointAtAZeroIsIndeterminate) {
  eigen_basis b(domain_spec::cube(1), 64);
  auto rep = spectrum_report_for(b, jump_measure::delta(std::vector<double>{0.5}), -20.0 * pi2);
  EXPECT_FALSE(rep.certified());
  EXPECT_FALSE(rep.issues.empty());
}

TEST(GapSolver, MixtureSidesWithDrift) {
  const double bb[] = {1.0};
  eigen_basis b(domain_spec::with_drifts(bb), 64);
  const double eps = 0.5 * max_safe_epsilon(b);
  auto plus = spectrum_report_for(b, jump_measure::mixture(eps, +1), -30.0 * pi2);
  auto minus = spectrum_report_for(b, jump_measure::mixture(eps, -1), -30.0 * pi2);
  ASSERT_TRUE(plus.certified() && minus.certified());
  EXPECT_GT(*plus.gap, b.lambda1());
  EXPECT_LT(*minus.gap, b.lambda1());
  // fd-oracle Richardson extrapolation over grids 200/400
  EXPECT_NEAR(*plus.gap, -19.456235004929542, 1e-6);
  EXPECT_NEAR(*minus.gap, -21.11479877244844, 1e-6);
}

TEST(GapSolver, ReversibleIsIncreasingBetweenPoles) {
  for (int d : {1, 2, 3}) {
    eigen_basis b(domain_spec::cube(std::size_t(d)), d == 1 ? 64 : (d == 2 ? 40 : 24));
    efunction ef(b, jump_measure::reversible());
    const double lo = b.lambda1(), hi = b.lambda0();
    double prev = -std::numeric_limits<double>::infinity();
    for (int k = 1; k < 1000; ++k) {
      const double lam = lo + (hi - lo) * k / 1000.0;
      auto v = ef(lam);
      EXPECT_GT(v.value + v.error, prev) << "d = " << d << " k = " << k;
      prev = v.value - v.error;
    }
  }
}

TEST(GapSolver, ComplexCountsVanishOffAxis) {
  {
    eigen_basis b(domain_spec::cube(2), 40);
    efunction ef(b, jump_measure::reversible());
    auto c = complex_root_count(ef, rectangle{-7.3 * pi2, -0.3 * pi2, 2.0 * pi2});
    auto scan = real_roots(ef, -7.3 * pi2, -0.3 * pi2);
    EXPECT_TRUE(c.rouche_certified);
    EXPECT_EQ(c.zeros, int(scan.roots.size()));
  }
  {
    const double bb[] = {1.0};
    eigen_basis b(domain_spec::with_drifts(bb), 64);
    efunction ef(b, jump_measure::mixture(0.2, -1));
    auto c = complex_root_count(ef, rectangle{-12.3 * pi2, -1e-3, 10.0 * pi2});
    auto scan = real_roots(ef, -12.3 * pi2, -1e-3);
    EXPECT_EQ(c.zeros, int(scan.roots.size()));
  }
  {
    eigen_basis b(domain_spec::cube(1), 64);
    efunction ef(b, jump_measure::quasistationary());
    auto c = complex_root_count(ef, rectangle{b.lambda0() + 0.5, -0.5, 5.0});
    EXPECT_EQ(c.zeros, 0);
    EXPECT_EQ(c.poles_inside, 0);
  }
}

TEST(GapSolver, UpperBoundHoldsOnCertifiedReports) {
  const double bb[] = {0.6};
  std::vector<std::pair<eigen_basis, jump_measure>> cases = {
      {eigen_basis(domain_spec::cube(1), 64), jump_measure::lebesgue()},
      {eigen_basis(domain_spec::cube(1), 64), point({"2/7"})},
      {eigen_basis(domain_spec::with_drifts(bb), 64), jump_measure::reversible()},
      {eigen_basis(domain_spec::cube(2), 40), point({"1/5", "2/3"})},
  };
  for (const auto& [b, nu] : cases) {
    auto rep = spectrum_report_for(b, nu, b.lambda0() - 15.0 * pi2);
    ASSERT_TRUE(rep.certified()) << nu.describe();
    ASSERT_TRUE(rep.gap);
    EXPECT_LT(*rep.gap, rep.lambda0);
    EXPECT_TRUE(rep.upper_bound_holds());
  }
}

// Cube dichotomy: the explicit spectrum and the series criterion agree on every cube d <= 12
TEST(GapSolver, CubeDichotomyAgreesWithSeriesCriterion) {
  for (int d = 1; d <= 12; ++d) {
    auto rep = spectrum_report_for(make_cube_reversible_efunction(d), cube_search_floor(d));
    ASSERT_TRUE(rep.certified()) << d;
    const bool strictly_above = *rep.gap > rep.lambda1 + 1e-9 * std::abs(rep.lambda0);
    const auto verdict = hd_transform(d).verdict();
    EXPECT_EQ(strictly_above, verdict == hd_verdict::gap_strictly_above) << "d = " << d;
    if (!strictly_above) EXPECT_NEAR(*rep.gap, rep.lambda1, 1e-10);
  }
}

TEST(GapSolver, ReportJsonShape) {
  eigen_basis b(domain_spec::cube(1), 64);
  auto rep = spectrum_report_for(b, jump_measure::quasistationary(), -20.0 * pi2);
  auto j = to_json(rep);
  EXPECT_EQ(j["eigenvalues"][0]["provenance"], "dirichlet-rule");
  EXPECT_DOUBLE_EQ(j["gap"].get<double>(), *rep.gap);
  EXPECT_EQ(j["characterization"], "complete");
  std::ostringstream csv;
  write_csv(rep, csv);
  EXPECT_EQ(csv.str().substr(0, 3), "re,");
}
