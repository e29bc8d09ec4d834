#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "common.hpp"

namespace nlbc {

// one unit-interval factor (0,1) carrying a constant drift b
struct interval_factor {
  double drift = 0.0;
};

struct domain_spec {
  std::vector<interval_factor> factors;

  static domain_spec cube(std::size_t d) { return domain_spec{std::vector<interval_factor>(d)}; }

  static domain_spec with_drifts(std::span<const double> drifts) {
    domain_spec dom;
    for (double b : drifts) dom.factors.push_back({b});
    return dom;
  }

  std::size_t dim() const { return factors.size(); }

  bool zero_drift() const {
    for (const auto& f : factors)
      if (f.drift != 0.0) return false;
    return true;
  }

  // sum of b_j^2 / 2, the constant shift of every Dirichlet eigenvalue
  double drift_shift() const {
    double s = 0.0;
    for (const auto& f : factors) s += 0.5 * f.drift * f.drift;
    return s;
  }

  void validate() const {
    if (factors.empty()) throw invalid_argument("domain needs at least one factor");
    for (const auto& f : factors)
      if (!std::isfinite(f.drift)) throw invalid_argument("drift must be finite");
  }

  bool interior(std::span<const double> x) const {
    if (x.size() != dim()) return false;
    for (double v : x)
      if (!(v > 0.0 && v < 1.0)) return false;
    return true;
  }

  friend bool operator==(const domain_spec& a, const domain_spec& b) {
    if (a.dim() != b.dim()) return false;
    for (std::size_t j = 0; j < a.dim(); ++j)
      if (a.factors[j].drift != b.factors[j].drift) return false;
    return true;
  }
};

}  // namespace nlbc
