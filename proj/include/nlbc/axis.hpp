#pragma once

#include <algorithm>
#include <cmath>

#include "common.hpp"

namespace nlbc {

// Dirichlet eigendata of u -> u''/2 + b u' on (0,1).
// phi_n(x) = sqrt(2 Z) e^{-bx} sin(n pi x), orthonormal in e^{2bx} dx / Z.
class axis_modes {
 public:
  explicit axis_modes(double drift = 0.0)
      : b_(drift), z_(exprel(2.0 * drift)), amp_(std::sqrt(2.0 * z_)) {}

  double drift() const { return b_; }
  double normalizer() const { return z_; }
  double amplitude() const { return amp_; }

  double eigenvalue(int n) const { return -0.5 * b_ * b_ - alpha * double(n) * double(n); }

  double value(int n, double x) const { return amp_ * std::exp(-b_ * x) * std::sin(n * pi * x); }

  double derivative(int n, double x) const {
    const double k = n * pi;
    return amp_ * std::exp(-b_ * x) * (k * std::cos(k * x) - b_ * std::sin(k * x));
  }

  double second_derivative(int n, double x) const {
    const double k = n * pi;
    return amp_ * std::exp(-b_ * x) *
           ((b_ * b_ - k * k) * std::sin(k * x) - 2.0 * b_ * k * std::cos(k * x));
  }

  // int phi_n d mu_rev
  double F(int n) const {
    const double k = n * pi;
    const double sgn = (n % 2 == 0) ? 1.0 : -1.0;
    return amp_ / z_ * k * (1.0 - sgn * std::exp(b_)) / (b_ * b_ + k * k);
  }

  bool F_exact_zero(int n) const { return b_ == 0.0 && n % 2 == 0; }

  // int phi_n dx over (0,1)
  double lebesgue_integral(int n) const {
    const double k = n * pi;
    const double sgn = (n % 2 == 0) ? 1.0 : -1.0;
    return amp_ * k * (1.0 - sgn * std::exp(-b_)) / (b_ * b_ + k * k);
  }

  bool lebesgue_exact_zero(int n) const { return F_exact_zero(n); }

  // sup over (0,1) of |phi_n|, uniform in n
  double sup_bound() const { return amp_ * std::max(1.0, std::exp(-b_)); }

  // |F_n| <= F_decay() / n for every n
  double F_decay() const { return amp_ / z_ * (1.0 + std::exp(std::abs(b_))) / pi; }

  double reversible_density(double x) const { return std::exp(2.0 * b_ * x) / z_; }

  double log_reversible_density(double x) const { return 2.0 * b_ * x - std::log(z_); }

 private:
  double b_;
  double z_;
  double amp_;
};

}  // namespace nlbc
