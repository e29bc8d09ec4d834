#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "common.hpp"
#include "efunction.hpp"

namespace nlbc {

struct real_root {
  double value = 0.0;
  double half_width = 0.0;  // the root lies in value +- half_width
  bool certified = false;   // both bracket ends have |E| > certified error
};

struct suspect_bracket {
  double lo = 0.0, hi = 0.0;
  std::string reason;
};

struct root_scan {
  std::vector<real_root> roots;
  std::vector<suspect_bracket> suspects;
};

struct scan_options {
  int mesh = 160;               // uniform samples per pole-free subinterval
  int near_pole_probes = 6;     // geometric probes next to each pole
  double exclusion = 1e-9;      // pole exclusion radius, relative to |lambda_0|
  double tolerance = 1e-10;     // bisection width, relative to |lambda_0|
};

namespace detail {

// sign of E certified by its error bound; 0 when undecided
inline int certified_sign(const real_estimate& e) {
  if (std::abs(e.value) <= e.error || !std::isfinite(e.value)) return 0;
  return e.value > 0 ? 1 : -1;
}

}  // namespace detail

// Real zeros of E in (lo, hi), scanned between consecutive poles.
inline root_scan real_roots(const efunction& ef, double lo, double hi, scan_options opt = {}) {
  if (!(lo < hi) || hi > 0.0) throw invalid_argument("real_roots needs lo < hi <= 0");
  const double scale = std::abs(ef.lambda0());
  const double ex = opt.exclusion * scale;
  const double tol = opt.tolerance * scale;

  struct cut {
    double x;
    std::optional<double> weight;  // set when x is a pole
  };
  std::vector<cut> cuts{{lo, std::nullopt}};
  for (const auto& c : ef.clusters())
    if (c.is_pole && c.lambda > lo && c.lambda < hi) cuts.push_back({c.lambda, c.weight});
  cuts.push_back({hi, std::nullopt});
  std::sort(cuts.begin(), cuts.end(), [](const cut& a, const cut& b) { return a.x < b.x; });

  std::vector<double> zero_weight;
  for (const auto& c : ef.clusters())
    if (!c.is_pole) zero_weight.push_back(c.lambda);

  root_scan out;
  for (std::size_t s = 0; s + 1 < cuts.size(); ++s) {
    const auto& A = cuts[s];
    const auto& B = cuts[s + 1];
    double a = A.weight ? A.x + ex : A.x;
    double b = B.weight ? B.x - ex : B.x;
    if (!(a < b)) continue;

    std::vector<double> xs;
    for (int i = 0; i <= opt.mesh; ++i) xs.push_back(a + (b - a) * double(i) / opt.mesh);
    for (int k = 1; k <= opt.near_pole_probes; ++k) {
      const double d = ex * std::pow(10.0, -double(k));
      if (A.weight) xs.push_back(A.x + d);
      if (B.weight) xs.push_back(B.x - d);
      const double far = (b - a) / opt.mesh * std::pow(10.0, -double(k));
      xs.push_back(a + far);
      xs.push_back(b - far);
    }
    std::sort(xs.begin(), xs.end());
    xs.erase(std::unique(xs.begin(), xs.end()), xs.end());

    std::vector<std::pair<double, int>> signs;
    for (double x : xs) {
      if (x <= A.x || x >= B.x) continue;
      if (x == 0.0) continue;
      int sg = 0;
      try {
        sg = detail::certified_sign(ef(x));
      } catch (const pole_error&) {
        sg = 0;
      }
      signs.push_back({x, sg});
    }

    // sign changes between consecutive certified samples
    int changes = 0;
    std::optional<std::pair<double, int>> last;
    std::vector<std::pair<double, double>> brackets;
    for (const auto& [x, sg] : signs) {
      if (sg == 0) continue;
      if (last && last->second != sg) {
        brackets.push_back({last->first, x});
        ++changes;
      }
      last = std::pair{x, sg};
    }

    // parity check against the pole asymptotics at each end
    auto end_sign = [&](const cut& c, bool left_end) -> int {
      if (!c.weight || *c.weight == 0.0) return 0;
      // near a pole at P: E ~ w / (P - x); right of P (left end) the sign is -sign(w)
      int sw = *c.weight > 0 ? 1 : -1;
      return left_end ? -sw : sw;
    };
    int ea = end_sign(A, true), eb = end_sign(B, false);
    if (ea != 0 && eb != 0) {
      bool expect_odd = ea != eb;
      if (expect_odd != (changes % 2 == 1))
        out.suspects.push_back({a, b, "sign-change parity disagrees with pole asymptotics"});
    }

    for (auto [l, r] : brackets) {
      int sl = detail::certified_sign(ef(l));
      bool stuck = false;
      while (r - l > tol) {
        double m = 0.5 * (l + r);
        if (m <= l || m >= r) break;
        int sm = 0;
        try {
          sm = detail::certified_sign(ef(m));
        } catch (const pole_error&) {
          sm = 0;
        }
        if (sm == 0) {
          stuck = true;
          break;
        }
        if (sm == sl)
          l = m;
        else
          r = m;
      }
      double root = 0.5 * (l + r);
      bool at_zero_weight = std::any_of(zero_weight.begin(), zero_weight.end(),
                                        [&](double L) { return std::abs(root - L) <= ex; });
      if (at_zero_weight) continue;
      (void)stuck;  // an undecided midpoint only limits precision; the bracket stays certified
      out.roots.push_back({root, 0.5 * (r - l), true});
    }
  }
  std::sort(out.roots.begin(), out.roots.end(), [](const real_root& x, const real_root& y) { return x.value > y.value; });
  return out;
}

struct rectangle {
  double re_lo = 0.0, re_hi = 0.0, im_max = 0.0;
};

struct contour_count {
  int winding = 0;       // zeros minus poles inside
  int poles_inside = 0;
  int zeros = 0;
  bool rouche_certified = true;  // |E| exceeded the error bound along the whole contour
  double min_modulus_margin = 0.0;  // min over samples of |E| / error
  int evaluations = 0;
};

// Argument-principle count of zeros of E inside the rectangle.
inline contour_count complex_root_count(const efunction& ef, rectangle r, int max_depth = 40) {
  if (!(r.im_max > 0.0) || !(r.re_lo < r.re_hi)) throw invalid_argument("bad rectangle");
  const double scale = std::abs(ef.lambda0());
  contour_count out;
  for (double p : ef.poles()) {
    if (std::min(std::abs(p - r.re_lo), std::abs(p - r.re_hi)) <= 1e-6 * scale)
      throw contour_too_close("rectangle edge passes through a pole");
    if (p > r.re_lo && p < r.re_hi) ++out.poles_inside;
  }
  const cplx corners[4] = {{r.re_lo, -r.im_max}, {r.re_hi, -r.im_max}, {r.re_hi, r.im_max}, {r.re_lo, r.im_max}};
  double margin = std::numeric_limits<double>::infinity();
  auto eval = [&](cplx z) {
    auto e = ef(z);
    ++out.evaluations;
    const double m = std::abs(e.value) / std::max(e.error, 1e-300);
    margin = std::min(margin, m);
    if (!(std::abs(e.value) > e.error)) out.rouche_certified = false;
    return e.value;
  };

  double total = 0.0;
  auto segment = [&](auto&& self, cplx z0, cplx z1, cplx e0, cplx e1, int depth) -> void {
    const double d = std::arg(e1 / e0);
    if (std::abs(d) < pi / 4) {
      total += d;
      return;
    }
    if (depth >= max_depth) {
      if (std::abs(d) > pi / 2) throw contour_too_close("phase step above pi/2 after maximal refinement");
      total += d;
      return;
    }
    cplx zm = 0.5 * (z0 + z1);
    cplx em = eval(zm);
    self(self, z0, zm, e0, em, depth + 1);
    self(self, zm, z1, em, e1, depth + 1);
  };
  const int initial = 64;
  for (int side = 0; side < 4; ++side) {
    cplx a = corners[side], b = corners[(side + 1) % 4];
    cplx prev_z = a, prev_e = eval(a);
    for (int i = 1; i <= initial; ++i) {
      cplx z = a + (b - a) * (double(i) / initial);
      cplx e = eval(z);
      segment(segment, prev_z, z, prev_e, e, 0);
      prev_z = z;
      prev_e = e;
    }
  }
  const double w = total / (2.0 * pi);
  out.winding = int(std::lround(w));
  if (std::abs(w - out.winding) > 1e-3) throw contour_too_close("winding number not near an integer");
  out.zeros = out.winding + out.poles_inside;
  out.min_modulus_margin = margin;
  return out;
}

}  // namespace nlbc
