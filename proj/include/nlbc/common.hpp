#pragma once

#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace nlbc {

inline constexpr double pi = std::numbers::pi;
inline constexpr double pi2 = pi * pi;
// eigenvalue spacing unit: lambda = -alpha * sum n_j^2 - sum b_j^2 / 2
inline constexpr double alpha = pi2 / 2.0;
inline constexpr double eps = std::numeric_limits<double>::epsilon();
// conservative multiplier on every analytic tail bound
inline constexpr double tail_safety = 2.0;

using cplx = std::complex<double>;

struct invalid_argument : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct domain_error : std::domain_error {
  using std::domain_error::domain_error;
};

struct pole_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct contour_too_close : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct budget_exceeded : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct tolerance_unreachable : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct no_verdict : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct eigensolve_failure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct no_estimate : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// value together with a certified bound on |true - value|
template <class T>
struct estimate {
  T value{};
  double error = 0.0;
};

using real_estimate = estimate<double>;
using complex_estimate = estimate<cplx>;

// what is provable about a coefficient being zero
enum class zero_state { exact_zero, nonzero, uncertain };

inline const char* to_string(zero_state z) {
  switch (z) {
    case zero_state::exact_zero: return "zero";
    case zero_state::nonzero: return "nonzero";
    case zero_state::uncertain: return "uncertain";
  }
  return "?";
}

// values below this without a proof of vanishing are treated as uncertain
inline constexpr double zero_threshold = 1e-10;

inline zero_state classify_numeric(double v) {
  return std::abs(v) < zero_threshold ? zero_state::uncertain : zero_state::nonzero;
}

// (e^q - 1)/q, stable near q = 0
inline cplx exprel(cplx q) {
  if (std::abs(q) < 1e-3) {
    return 1.0 + q / 2.0 + q * q / 6.0 + q * q * q / 24.0;
  }
  return (std::exp(q) - 1.0) / q;
}

inline double exprel(double q) {
  if (std::abs(q) < 1e-8) return 1.0 + q / 2.0;
  return std::expm1(q) / q;
}

// Neumaier compensated summation
template <class T>
class compensated_sum {
 public:
  void add(T x) {
    T t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x))
      comp_ += (sum_ - t) + x;
    else
      comp_ += (x - t) + sum_;
    sum_ = t;
  }
  T value() const { return sum_ + comp_; }

 private:
  T sum_{};
  T comp_{};
};

}  // namespace nlbc
