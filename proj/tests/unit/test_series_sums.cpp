#include <gtest/gtest.h>

#include <nlbc/io.hpp>
#include <nlbc/series.hpp>

#include <cmath>

using namespace nlbc;

namespace {

// H_d from the exponential transform, cross-checked against an FFT convolution of the
// odd-square generating function to level 4e5 (remainder <= 1.3e-7); 12 digits frozen.
constexpr double frozen_hd[] = {
    0.024908195799, 0.051326987453, 0.079421126402, 0.109377743675, 0.141409774581,
    0.175759948581, 0.212705442646, 0.252563314156, 0.295696850455, 0.342522997224,
    0.393521057482, 0.449242888359, 0.510324864721, 0.577501928617, 0.651624102924,
};

bool contains(const hd_result& h, double v, double slack = 0.0) { return h.value_lo - slack <= v && v <= h.value_hi + slack; }

bool intersect(const hd_result& a, const hd_result& b) { return a.value_lo <= b.value_hi && b.value_lo <= a.value_hi; }

}  // namespace

TEST(SeriesSums, FirstDimensionClosedForm) {
  // 30-digit nsum of 1/(n^2 (n^2 - 4)) over odd n >= 3
  EXPECT_NEAR(hd_one_closed_form(), 0.0249081957992908764947554895872, 1e-16);
  auto e = hd_enumerate(1, 100001);
  EXPECT_TRUE(contains(e, hd_one_closed_form()));
  EXPECT_EQ(e.verdict(), hd_verdict::gap_equals_lambda1);
  auto t = hd_transform(1);
  EXPECT_TRUE(contains(t, hd_one_closed_form()));
  EXPECT_LT(t.width(), 1e-11);
}

TEST(SeriesSums, TransformTableAndEnclosureWidths) {
  for (int d = 1; d <= 15; ++d) {
    auto h = hd_transform(d);
    EXPECT_LE(h.value_lo, h.value_hi);
    EXPECT_LT(h.width(), 1e-9) << d;
    EXPECT_TRUE(contains(h, frozen_hd[d - 1], 6e-13)) << "d = " << d << " mid = " << h.midpoint();
  }
}

TEST(SeriesSums, VerdictsFollowTheOneThirdThreshold) {
  for (int d = 1; d <= 15; ++d) {
    auto h = hd_transform(d);
    EXPECT_FALSE(contains(h, 1.0 / 3.0)) << d;
    const auto v = h.verdict();
    EXPECT_EQ(v == hd_verdict::gap_strictly_above, h.value_lo > 1.0 / 3.0);
    EXPECT_EQ(v == hd_verdict::gap_equals_lambda1, h.value_hi < 1.0 / 3.0);
  }
  // the computed crossing lies between d = 9 and d = 10
  EXPECT_EQ(hd_transform(9).verdict(), hd_verdict::gap_equals_lambda1);
  EXPECT_EQ(hd_transform(10).verdict(), hd_verdict::gap_strictly_above);
}

TEST(SeriesSums, StraddlingEnclosureHasNoVerdict) {
  hd_result h{3, 0.3, 0.4, hd_method::enumeration};
  EXPECT_EQ(h.verdict_or_none(), hd_verdict::none);
  EXPECT_THROW(h.verdict(), no_verdict);
}

TEST(SeriesSums, MonotoneInDimension) {
  double prev = 0.0;
  for (int d = 1; d <= 15; ++d) {
    auto h = hd_transform(d);
    EXPECT_GT(h.value_lo, prev) << d;
    prev = h.value_lo;
  }
}

TEST(SeriesSums, EnumerationAndTransformAgree) {
  for (int d : {2, 3, 4}) {
    auto e = hd_enumerate(d, d == 2 ? 2001 : (d == 3 ? 301 : 101));
    auto t = hd_transform(d);
    EXPECT_TRUE(intersect(e, t)) << d;
    EXPECT_LE(std::abs(e.midpoint() - t.midpoint()), e.width() + t.width());
  }
}

TEST(SeriesSums, DoublingTheCutoffStaysInsideTheEnclosure) {
  for (int d : {1, 2, 3}) {
    int c = 11;
    auto prev = hd_enumerate(d, c);
    for (int k = 0; k < 4; ++k) {
      c = 2 * c + 1;
      auto next = hd_enumerate(d, c);
      EXPECT_TRUE(contains(prev, next.value_lo)) << "d = " << d << " cutoff " << c;
      EXPECT_LE(next.value_hi, prev.value_hi);
      prev = next;
    }
  }
}

TEST(SeriesSums, RestrictedBoundAtFifteen) {
  EXPECT_DOUBLE_EQ(hd_restricted_bound(15), 1.0 / 3.0);
  for (int d = 1; d <= 15; ++d) EXPECT_LT(hd_restricted_bound(d), hd_transform(d).value_lo);
  // a partial sum with cutoff 5 already clears 1/3 at d = 15
  auto e = hd_enumerate(15, 5);
  EXPECT_GT(e.value_lo, 1.0 / 3.0);
  EXPECT_EQ(e.verdict_or_none(), hd_verdict::gap_strictly_above);
}

// dropping the last axis at n = 1 reproduces the lower-dimensional sum term for term
TEST(SeriesSums, RestrictionToUnitLastIndex) {
  for (int d : {1, 2, 3}) {
    // only the d-dimensional odd indices up to 9 occur in both sums
    double low = 0.0, restricted = 0.0;
    std::vector<int> n(d, 1);
    auto walk = [&](auto&& self, int j) -> void {
      if (j == d) {
        double prod = 1.0;
        long lev = 0;
        for (int v : n) {
          prod *= double(v) * v;
          lev += long(v) * v;
        }
        if (lev == d) return;
        low += 1.0 / (prod * double(lev - d - 3));
        restricted += 1.0 / (prod * 1.0 * double(lev + 1 - (d + 1) - 3));
        return;
      }
      for (int v = 1; v <= 9; v += 2) {
        n[j] = v;
        self(self, j + 1);
      }
    };
    walk(walk, 0);
    EXPECT_DOUBLE_EQ(low, restricted);
    EXPECT_LT(hd_enumerate(d, 9).value_lo, hd_enumerate(d + 1, 9).value_lo);
  }
}

TEST(SeriesSums, EnumerationGuards) {
  EXPECT_THROW(hd_enumerate(3, 4), invalid_argument);
  EXPECT_THROW(hd_enumerate(3, 1), invalid_argument);
  EXPECT_THROW(hd_enumerate(15, 301), budget_exceeded);
  EXPECT_THROW(hd_transform(0), invalid_argument);
}

TEST(SeriesSums, LatticeTransformMatchesDirectSum) {
  // J(s, 2) at s = 1 by direct enumeration over odd pairs up to 4001 plus O(1/M) tail
  auto j = lattice_transform(cplx(1.0, 0.0), 2);
  double direct = 0.0;
  for (int a = 1; a <= 4001; a += 2)
    for (int b = 1; b <= 4001; b += 2) {
      if (a == 1 && b == 1) continue;
      direct += 1.0 / (double(a) * a * double(b) * b * (double(a) * a + double(b) * b - 1.0));
    }
  EXPECT_NEAR(j.value.real(), direct, 1e-7);
  EXPECT_EQ(j.value.imag(), 0.0);
  // conjugate symmetry
  auto up = lattice_transform(cplx(3.0, 2.0), 3), down = lattice_transform(cplx(3.0, -2.0), 3);
  EXPECT_NEAR(up.value.real(), down.value.real(), 1e-13);
  EXPECT_NEAR(up.value.imag(), -down.value.imag(), 1e-13);
  EXPECT_THROW(lattice_transform(cplx(11.0, 0.0), 3), domain_error);
}

TEST(SeriesSums, Enu0AtFirstExcitedLevel) {
  // truncations at 200 and 400 agree within their tail bounds; frozen value
  const double frozen = 0.0193546708085;
  auto a = enu0_sum(-2.5 * pi2, 200), b = enu0_sum(-2.5 * pi2, 400);
  EXPECT_NEAR(a.value, b.value, a.error + b.error);
  EXPECT_NEAR(b.value, frozen, b.error + 1e-12);
  const double E = enu0_constant * b.value;
  EXPECT_LT(E, 0.0);
  EXPECT_LT(-enu0_constant * b.error, std::abs(E));
}

TEST(SeriesSums, Enu0DivergesBelowMinusPiSquared) {
  double prev = -std::numeric_limits<double>::infinity();
  for (double gap : {1e-1, 1e-2, 1e-3, 1e-4, 1e-5}) {
    auto v = enu0_sum(-pi2 - gap * pi2, 200);
    const double E = enu0_constant * v.value;
    EXPECT_GT(E, prev);
    prev = E;
  }
  EXPECT_GT(prev, 1e3);
}

TEST(SeriesSums, Enu0Guards) {
  EXPECT_THROW(enu0_sum(-2.5 * pi2, 10), invalid_argument);
  EXPECT_THROW(enu0_sum(-5.0 * pi2, 100), pole_error);  // 1 + 9 = 10
}

TEST(SeriesSums, CsvTable) {
  std::vector<hd_result> rows = {hd_transform(1), hd_transform(2)};
  std::ostringstream os;
  write_csv(rows, os);
  const auto s = os.str();
  EXPECT_EQ(s.substr(0, s.find('\n')), "d,value_lo,value_hi,method,verdict");
  EXPECT_NE(s.find("integral-transform,gap-equals-lambda1"), std::string::npos);
}
