#pragma once

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "basis.hpp"
#include "common.hpp"
#include "efunction.hpp"
#include "measures.hpp"

namespace nlbc {

// S(t) = sum over odd n of e^{-t n^2} / n^2, for t >= 0.
// Small t uses the Poisson-summed form, which converges like e^{-pi^2 k^2 / (4t)}.
inline double odd_theta(double t) {
  if (t < 0.0) throw invalid_argument("odd_theta needs t >= 0");
  if (t < 0.5) {
    const double sp = std::sqrt(pi);
    double v = pi2 / 8.0 - 0.5 * std::sqrt(pi * t);
    for (int k = 1; k <= 8; ++k) {
      const double a = pi2 * k * k / 4.0;
      const double term = 2.0 * std::sqrt(t) * std::exp(-a / t) - 2.0 * std::sqrt(pi * a) * std::erfc(std::sqrt(a / t));
      v -= 0.5 * sp * (k % 2 ? -1.0 : 1.0) * term;
    }
    return v;
  }
  double s = 0.0;
  for (int n = 1;; n += 2) {
    const double term = std::exp(-t * n * n) / (double(n) * n);
    s += term;
    if (term < 1e-18 * s) break;
  }
  return s;
}

// e^t S(t) - 1 = sum over odd n >= 3 of e^{-t (n^2 - 1)} / n^2, computed without cancellation
inline double odd_theta_excess(double t) {
  if (t < 0.5) return std::exp(t) * odd_theta(t) - 1.0;
  double s = 0.0;
  for (int n = 3;; n += 2) {
    const double term = std::exp(-t * (double(n) * n - 1.0)) / (double(n) * n);
    s += term;
    if (term < 1e-18 * s) break;
  }
  return s;
}

// J(s, d) = sum over odd multi-indices other than (1,...,1) of 1 / (prod n_j^2 (sum n_j^2 - s)),
// valid for Re s < d + 8, via J = int_0^inf e^{(s-d)t} ((e^t S)^d - 1) dt.
inline complex_estimate lattice_transform(cplx s, int d, double tol = 1e-13) {
  if (d < 1) throw invalid_argument("dimension must be >= 1");
  const double gap = d + 8.0 - s.real();
  if (!(gap > 0.0)) throw domain_error("lattice transform needs Re s < d + 8");

  // for t >= T: (e^t S)^d - 1 <= d R (1+R)^{d-1} e^{-8t}, R = sum_{n>=3} e^{-T(n^2-9)} / n^2
  auto tail = [&](double T) {
    const double R = odd_theta_excess(T) * std::exp(8.0 * T);
    return d * R * std::pow(1.0 + R, d - 1) * std::exp(-gap * T) / gap;
  };
  double T = 1.0;
  while (tail(T) > 0.25 * tol && T < 1e4) T *= 1.5;
  if (tail(T) > 0.25 * tol) throw tolerance_unreachable("lattice transform tail does not decay");

  const double a = s.real() - d, w = s.imag();
  auto body = [&](double u) {
    const double t = u * u;
    return 2.0 * u * std::exp(a * t) * std::expm1(d * std::log1p(odd_theta_excess(t)));
  };
  using gk = boost::math::quadrature::gauss_kronrod<double, 61>;
  const double U = std::sqrt(T);
  double err_re = 0.0, err_im = 0.0, l1 = 0.0;
  double re = gk::integrate([&](double u) { return body(u) * std::cos(w * u * u); }, 0.0, U, 20, 1e-14, &err_re, &l1);
  double im = 0.0;
  if (w != 0.0) im = gk::integrate([&](double u) { return body(u) * std::sin(w * u * u); }, 0.0, U, 20, 1e-14, &err_im);
  const double qerr = std::hypot(err_re, err_im);
  if (!(qerr <= tol)) throw tolerance_unreachable("quadrature error " + std::to_string(qerr) + " above tolerance");
  const double err = tail_safety * (qerr + tail(T)) + 1e3 * eps * std::max(l1, std::hypot(re, im));
  return {cplx(re, im), err};
}

enum class hd_method { enumeration, integral_transform };
enum class hd_verdict { gap_equals_lambda1, gap_strictly_above, none };

inline const char* to_string(hd_method m) { return m == hd_method::enumeration ? "enumeration" : "integral-transform"; }
inline const char* to_string(hd_verdict v) {
  switch (v) {
    case hd_verdict::gap_equals_lambda1: return "gap-equals-lambda1";
    case hd_verdict::gap_strictly_above: return "gap-strictly-above";
    case hd_verdict::none: return "none";
  }
  return "?";
}

// Certified enclosure of H_d, the lattice sum whose comparison with 1/3 decides the cube gap.
struct hd_result {
  int d = 0;
  double value_lo = 0.0, value_hi = 0.0;
  hd_method method = hd_method::integral_transform;

  double midpoint() const { return 0.5 * (value_lo + value_hi); }
  double width() const { return value_hi - value_lo; }

  hd_verdict verdict_or_none() const {
    if (value_lo > 1.0 / 3.0) return hd_verdict::gap_strictly_above;
    if (value_hi < 1.0 / 3.0) return hd_verdict::gap_equals_lambda1;
    return hd_verdict::none;
  }

  hd_verdict verdict() const {
    auto v = verdict_or_none();
    if (v == hd_verdict::none) throw no_verdict("enclosure of H_" + std::to_string(d) + " contains 1/3");
    return v;
  }
};

inline constexpr double default_enumeration_budget = 1e9;

// Direct summation over sorted multisets of odd values <= cutoff, each weighted by its multinomial count.
inline hd_result hd_enumerate(int d, int per_axis_cutoff, double budget = default_enumeration_budget) {
  if (d < 1) throw invalid_argument("dimension must be >= 1");
  if (per_axis_cutoff < 3 || per_axis_cutoff % 2 == 0) throw invalid_argument("cutoff must be an odd integer >= 3");
  const int K = (per_axis_cutoff + 1) / 2;
  // multisets of size d from K values
  double multisets = 1.0;
  for (int i = 1; i <= d; ++i) multisets = multisets * (K + i - 1) / i;
  if (d * multisets > budget)
    throw budget_exceeded("enumeration needs about " + std::to_string(d * multisets) +
                          " operations; use the integral transform instead");

  std::vector<double> log_fact(d + 1, 0.0);
  for (int i = 1; i <= d; ++i) log_fact[i] = log_fact[i - 1] + std::log(double(i));

  compensated_sum<double> acc;
  std::vector<int> n(d, 1);
  // multiplicity run lengths are tracked incrementally
  auto rec = [&](auto&& self, int j, int lo, double inv_prod, long long level, double log_mult_den, int run) -> void {
    if (j == d) {
      const double ld = log_mult_den + log_fact[run];
      if (level == d) return;  // the all-ones index is not part of the sum
      const double weight = std::exp(log_fact[d] - ld);
      acc.add(weight * inv_prod / double(level - d - 3));
      return;
    }
    for (int v = lo; v <= per_axis_cutoff; v += 2) {
      n[j] = v;
      const bool same = j > 0 && n[j - 1] == v;
      const double lmd = same ? log_mult_den : log_mult_den + log_fact[run];
      self(self, j + 1, v, inv_prod / (double(v) * v), level + (long long)v * v, lmd, same ? run + 1 : 1);
    }
  };
  rec(rec, 0, 1, 1.0, 0, 0.0, 0);

  const double M = per_axis_cutoff;
  // some n_j > M: sum_{n > M odd} 1/n^2 <= 1/(2M); other axes <= pi^2/8; denominator >= (M+2)^2 - 4
  const double tail = d * (1.0 / (2.0 * M)) * std::pow(pi2 / 8.0, d - 1) / ((M + 2.0) * (M + 2.0) - 4.0);
  const double v = acc.value();
  // positive terms, compensated accumulation: only per-term rounding remains
  const double round = (4.0 * d + 100.0) * eps * std::abs(v);
  return {d, v - round, v + tail_safety * tail + round, hd_method::enumeration};
}

inline hd_result hd_transform(int d, double quad_tolerance = 1e-12) {
  if (d < 1) throw invalid_argument("dimension must be >= 1");
  auto j = lattice_transform(cplx(d + 3.0, 0.0), d, quad_tolerance);
  return {d, j.value.real() - j.error, j.value.real() + j.error, hd_method::integral_transform};
}

// H_1 = sum over odd n >= 3 of 1/(n^2 (n^2 - 4)) = 1/3 - pi^2/32, by partial fractions
inline double hd_one_closed_form() { return 1.0 / 3.0 - pi2 / 32.0; }

// Lower bound from the d indices with a single 3 and all other entries 1: each contributes 1/45.
inline double hd_restricted_bound(int d) { return d / 45.0; }

// Bracketed double sum over odd n1, n2 of sin(n1 pi/9) sin(n2 pi/9) / (n1 n2 (n1^2 + n2^2 - s)),
// s = -2 lambda / pi^2. E for the point mass at (1/9, 1/9) is -(32/pi^4) times this sum.
inline real_estimate enu0_sum(double lambda, int cutoff) {
  if (cutoff < 50) throw invalid_argument("enu0 cutoff must be >= 50");
  const double s = -2.0 * lambda / pi2;
  const int A = 2 * cutoff - 1;  // largest retained odd index
  const double c = 1.0 - s / ((A + 2.0) * (A + 2.0) + 1.0);
  if (!(c > 0.0)) throw invalid_argument("cutoff too small for this lambda");

  std::vector<double> sn(cutoff);
  for (int m = 0; m < cutoff; ++m) sn[m] = std::sin((2 * m + 1) * pi / 9.0) / (2 * m + 1);
  compensated_sum<double> acc;
  double magnitude = 0.0;
  double nearest = std::numeric_limits<double>::infinity();
  for (int m1 = cutoff - 1; m1 >= 0; --m1) {
    const double a = 2.0 * m1 + 1.0;
    for (int m2 = cutoff - 1; m2 >= 0; --m2) {
      const double b = 2.0 * m2 + 1.0;
      const double den = a * a + b * b - s;
      nearest = std::min(nearest, std::abs(den));
      const double term = sn[m1] * sn[m2] / den;
      acc.add(term);
      magnitude += std::abs(term);
    }
  }
  if (nearest < 1e-9 * std::max(1.0, std::abs(s))) throw pole_error("lambda is at a pole of the enu0 sum");

  // pairs with n1 > A (and the mirror): inner sum over n2 <= (5/4 + ln(n1)/2) / n1^2
  const double LA = std::log(double(A));
  const double tail = 2.0 / c * (1.25 / (4.0 * A * A) + (2.0 * LA + 1.0) / (16.0 * A * A));
  const double v = acc.value();
  return {v, tail_safety * tail + 16.0 * eps * magnitude};
}

inline constexpr double enu0_constant = -32.0 / (pi2 * pi2);

// E for the normalized Lebesgue measure on the zero-drift d-cube, through the lattice transform:
// E = F_0^2 / (lambda_0 - z) - (2/pi^2)(8/pi^2)^d J(-2z/pi^2, d), valid for Re z > lambda at level d + 8.
inline efunction make_cube_reversible_efunction(int d) {
  if (d < 1) throw invalid_argument("dimension must be >= 1");
  eigen_basis basis(domain_spec::cube(std::size_t(d)), 3, d + 5);
  efunction ef(basis, jump_measure::reversible(), e_options{false});
  const double f02 = std::pow(8.0 / pi2, d);
  const double lam0 = basis.lambda0();
  ef.set_evaluator(
      [=](cplx z) -> complex_estimate {
        const cplx s = -2.0 * z / pi2;
        auto j = lattice_transform(s, d);
        const double scale = 2.0 / pi2 * f02;
        const cplx lead = f02 / (lam0 - z);
        const cplx v = lead - scale * j.value;
        return {v, scale * j.error + 8.0 * eps * std::abs(lead)};
      },
      "lattice-transform");
  return ef;
}

// floor for spectrum reports built on make_cube_reversible_efunction
inline double cube_search_floor(int d) { return -alpha * (d + 5.5); }

}  // namespace nlbc
