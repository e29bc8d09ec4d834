#include <gtest/gtest.h>

#include <boost/math/quadrature/gauss.hpp>

#include <nlbc/basis.hpp>
#include <nlbc/io.hpp>

#include <array>
#include <cmath>

using namespace nlbc;

namespace {

// composite Gauss-Legendre on [0,1], fine enough for modes up to n = 5
template <class F>
double integrate01(F&& f, int panels = 40) {
  using gl = boost::math::quadrature::gauss<double, 20>;
  double s = 0.0;
  for (int p = 0; p < panels; ++p) s += gl::integrate(f, double(p) / panels, double(p + 1) / panels);
  return s;
}

template <class F>
double integrate_square(F&& f, int panels = 12) {
  return integrate01([&](double x) { return integrate01([&](double y) { return f(x, y); }, panels); }, panels);
}

}  // namespace

TEST(SpectralBasis, IntervalEigenvaluesZeroDrift) {
  eigen_basis b(domain_spec::cube(1), 3);
  ASSERT_EQ(b.size(), 3u);
  EXPECT_NEAR(b[0].lambda, -pi2 / 2, 1e-13);
  EXPECT_NEAR(b[1].lambda, -2 * pi2, 1e-13);
  EXPECT_NEAR(b[2].lambda, -4.5 * pi2, 1e-13);
}

TEST(SpectralBasis, CubeGroundAndFirstExcitedLevels) {
  eigen_basis sq(domain_spec::cube(2), 4);
  EXPECT_NEAR(sq[0].lambda, -pi2, 1e-13);
  for (int d = 1; d <= 6; ++d) {
    eigen_basis b(domain_spec::cube(std::size_t(d)), 2);
    EXPECT_NEAR(b.lambda0(), -d * pi2 / 2, 1e-12);
    EXPECT_NEAR(b.lambda1(), -(d + 3) * pi2 / 2, 1e-12);
    EXPECT_NEAR(b[0].lambda, b.lambda0(), 1e-12);
    EXPECT_NEAR(b[1].lambda, b.lambda1(), 1e-12);
  }
}

TEST(SpectralBasis, DriftedGroundStateMatchesFiniteDifferences) {
  // Richardson-extrapolated tridiagonal eigensolve of u''/2 + u' on grids 1000/2000
  const double fd_lambda0 = -5.434802200538009;
  const double b1[] = {1.0};
  eigen_basis b(domain_spec::with_drifts(b1), 4);
  EXPECT_NEAR(b.lambda0(), fd_lambda0, 1e-8);
  EXPECT_NEAR(b.lambda0(), -0.5 - pi2 / 2, 1e-13);
}

TEST(SpectralBasis, OrderingIsNonincreasingWithLexicographicTies) {
  eigen_basis b(domain_spec::cube(3), 5);
  for (std::size_t i = 1; i < b.size(); ++i) {
    EXPECT_GE(b[i - 1].lambda, b[i].lambda);
    if (b[i - 1].level == b[i].level) EXPECT_LT(b[i - 1].index, b[i].index);
    EXPECT_LT(b[i].lambda, 0.0);
  }
  // the (1,1,2) triple comes in the order (1,1,2), (1,2,1), (2,1,1)
  EXPECT_EQ(b[1].index, (std::vector<int>{1, 1, 2}));
  EXPECT_EQ(b[2].index, (std::vector<int>{1, 2, 1}));
  EXPECT_EQ(b[3].index, (std::vector<int>{2, 1, 1}));
}

TEST(SpectralBasis, CubeCoefficientsClosedForm) {
  eigen_basis sq(domain_spec::cube(2), 6);
  EXPECT_NEAR(coefficient_F(sq, sq[0]), 8.0 / pi2, 1e-14);
  for (const auto& e : sq.entries()) {
    bool any_even = false;
    double prod = 1.0;
    for (int n : e.index) {
      any_even |= n % 2 == 0;
      prod *= n;
    }
    if (any_even) {
      EXPECT_EQ(e.F, 0.0);
      EXPECT_EQ(e.F_state, zero_state::exact_zero);
    } else {
      EXPECT_NEAR(e.F, 8.0 / (pi2 * prod), 1e-14);
    }
  }
  eigen_basis c3(domain_spec::cube(3), 3);
  EXPECT_NEAR(c3[0].F, std::pow(2.0, 4.5) / (pi2 * pi), 1e-14);
}

TEST(SpectralBasis, DriftedCoefficientMatchesQuadrature) {
  // 30-digit quadrature of the normalized e^{-x} sin(pi x) against e^{2x}/Z
  const double oracle_F1 = 0.850335055722330056;
  const double b1[] = {1.0};
  eigen_basis b(domain_spec::with_drifts(b1), 8);
  EXPECT_NEAR(b[0].F, oracle_F1, 1e-13);
  for (const auto& e : b.entries()) {
    const auto& ax = b.axis(0);
    const double q = integrate01([&](double x) { return ax.value(e.index[0], x) * ax.reversible_density(x); });
    EXPECT_NEAR(e.F, q, 1e-12) << "n = " << e.index[0];
  }
}

TEST(SpectralBasis, PointEvaluation) {
  eigen_basis sq(domain_spec::cube(2), 4);
  const double p[] = {1.0 / 9, 1.0 / 9};
  const double s = std::sin(pi / 9);
  EXPECT_NEAR(evaluate_eigenfunction(sq, sq[0], p), 2 * s * s, 1e-15);
  const double half[] = {0.5, 0.5};
  for (const auto& e : sq.entries())
    if (e.index[0] % 2 == 0 || e.index[1] % 2 == 0) EXPECT_NEAR(sq.evaluate(e, half), 0.0, 1e-14);
  eigen_basis line(domain_spec::cube(1), 2);
  const double mid[] = {0.5};
  EXPECT_NEAR(line.evaluate(line[0], mid), std::sqrt(2.0), 1e-15);
}

TEST(SpectralBasis, BoundaryEvaluationIsRejected) {
  eigen_basis sq(domain_spec::cube(2), 2);
  const double edge[] = {0.0, 0.5};
  const double outside[] = {1.2, 0.5};
  EXPECT_THROW(sq.evaluate(sq[0], edge), domain_error);
  EXPECT_THROW(sq.evaluate(sq[0], outside), domain_error);
}

TEST(SpectralBasis, InvalidConstruction) {
  EXPECT_THROW(eigen_basis(domain_spec::cube(1), 0), invalid_argument);
  EXPECT_THROW(eigen_basis(domain_spec{}, 3), invalid_argument);
  const double bad[] = {std::nan("")};
  EXPECT_THROW(eigen_basis(domain_spec::with_drifts(bad), 3), invalid_argument);
}

TEST(SpectralBasis, OrthonormalInReversibleMeasure1d) {
  for (double drift : {0.0, 1.0, -2.5}) {
    const double bb[] = {drift};
    eigen_basis b(domain_spec::with_drifts(bb), 5);
    const auto& ax = b.axis(0);
    for (int m = 1; m <= 5; ++m)
      for (int n = 1; n <= 5; ++n) {
        const double q = integrate01([&](double x) { return ax.value(m, x) * ax.value(n, x) * ax.reversible_density(x); });
        EXPECT_NEAR(q, m == n ? 1.0 : 0.0, 1e-8) << "drift " << drift << " (" << m << "," << n << ")";
      }
  }
}

TEST(SpectralBasis, OrthonormalInReversibleMeasure2d) {
  const double bb[] = {0.5, -1.0};
  eigen_basis b(domain_spec::with_drifts(bb), 3);
  for (std::size_t i = 0; i < b.size(); ++i)
    for (std::size_t k = i; k < b.size(); ++k) {
      const double q = integrate_square([&](double x, double y) {
        const double p[] = {x, y};
        return b.evaluate(b[i], p) * b.evaluate(b[k], p) * b.reversible_density(p);
      });
      EXPECT_NEAR(q, i == k ? 1.0 : 0.0, 1e-8);
    }
}

TEST(SpectralBasis, EigenResidualIsNegligible) {
  const double bb[] = {0.7, -0.3};
  eigen_basis b(domain_spec::with_drifts(bb), 5);
  for (const auto& e : b.entries()) {
    const double r2 = integrate_square(
        [&](double x, double y) {
          const double p[] = {x, y};
          const double r = b.residual(e, p);
          return r * r;
        },
        4);
    EXPECT_LT(r2, 1e-6);
  }
}

TEST(SpectralBasis, ParsevalPartialSumsIncreaseTowardOne) {
  double prev = 0.0;
  for (int cutoff : {1, 3, 9, 27, 243}) {
    eigen_basis b(domain_spec::cube(2), cutoff);
    double s = 0.0;
    for (const auto& e : b.entries()) s += e.F * e.F;
    EXPECT_LE(s, 1.0);
    EXPECT_GE(s, prev);
    prev = s;
  }
  EXPECT_GT(prev, 0.99);
}

TEST(SpectralBasis, SupBoundOnCubes) {
  for (std::size_t d = 1; d <= 3; ++d) {
    eigen_basis b(domain_spec::cube(d), d == 3 ? 3 : 4);
    const double bound = std::pow(2.0, 0.5 * double(d)) + 1e-12;
    EXPECT_NEAR(b.sup_bound(), std::pow(2.0, 0.5 * double(d)), 1e-14);
    const int m = 101;
    std::array<double, 3> x{};
    double worst = 0.0;
    const std::size_t total = std::size_t(std::pow(m - 2, double(d)));
    for (const auto& e : b.entries())
      for (std::size_t k = 0; k < total; ++k) {
        std::size_t r = k;
        for (std::size_t j = 0; j < d; ++j) {
          x[j] = double(r % (m - 2) + 1) / (m - 1);
          r /= (m - 2);
        }
        worst = std::max(worst, std::abs(b.evaluate(e, std::span<const double>(x.data(), d))));
      }
    EXPECT_LE(worst, bound);
  }
}

TEST(SpectralBasis, LevelCapAndCompleteness) {
  eigen_basis capped(domain_spec::cube(3), 10, 14);
  for (const auto& e : capped.entries()) EXPECT_LE(e.level, 14);
  EXPECT_EQ(capped.complete_through_level(), 14);
  eigen_basis box(domain_spec::cube(2), 4);
  EXPECT_EQ(box.complete_through_level(), 25);
  EXPECT_TRUE(box.box_shaped());
}

TEST(SpectralBasis, JsonExportHasStableFieldOrder) {
  eigen_basis b(domain_spec::cube(1), 2);
  auto j = to_json(b);
  std::vector<std::string> keys;
  for (auto it = j.begin(); it != j.end(); ++it) keys.push_back(it.key());
  EXPECT_EQ(keys, (std::vector<std::string>{"domain", "cutoff", "complete_through_level", "entries"}));
  EXPECT_EQ(j["entries"].size(), 2u);
  EXPECT_EQ(j["entries"][1]["F_state"], "zero");
  EXPECT_DOUBLE_EQ(j["entries"][0]["lambda"].get<double>(), -pi2 / 2);
}
