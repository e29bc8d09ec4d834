#pragma once

#include <memory>
#include <mutex>
#include <optional>
#include <vector>

#include "axis.hpp"
#include "common.hpp"
#include "measures.hpp"

namespace nlbc {

// One-axis measure: a point, or a density e^{cx}/Z_c (Lebesgue c=0, reversible c=2b).
struct axis_measure {
  enum class kind { point, lebesgue, reversible } k = kind::lebesgue;
  double p = 0.5;
  std::optional<rational> exact;
};

// e(mu) = int w dnu for (u''/2 + b u' - mu) w = 1 on (0,1), w(0) = w(1) = 0.
// Equals sum_n F_n G_n / (lambda_n - mu) for the axis measure.
class axis_resolvent {
 public:
  static constexpr int direct_terms = 1 << 16;

  axis_resolvent(axis_modes ax, axis_measure m) : ax_(ax), m_(m) {}

  const axis_modes& modes() const { return ax_; }
  const axis_measure& measure() const { return m_; }

  double G(int n) const {
    switch (m_.k) {
      case axis_measure::kind::point:
        if (m_.exact) return ax_.amplitude() * std::exp(-ax_.drift() * m_.p) * m_.exact->sin_n_pi(n);
        return ax_.value(n, m_.p);
      case axis_measure::kind::lebesgue: return ax_.lebesgue_integral(n);
      case axis_measure::kind::reversible: return ax_.F(n);
    }
    return 0.0;
  }

  bool G_exact_zero(int n) const {
    switch (m_.k) {
      case axis_measure::kind::point: return m_.exact && m_.exact->sin_n_pi_zero(n);
      case axis_measure::kind::lebesgue: return ax_.lebesgue_exact_zero(n);
      case axis_measure::kind::reversible: return ax_.F_exact_zero(n);
    }
    return false;
  }

  bool weight_exact_zero(int n) const { return ax_.F_exact_zero(n) || G_exact_zero(n); }
  double weight(int n) const { return weight_exact_zero(n) ? 0.0 : ax_.F(n) * G(n); }

  complex_estimate operator()(cplx mu) const {
    if (near_removable(mu) || std::abs(mu) < 1e-6) return direct(mu);
    return closed(mu);
  }

  // closed form; accuracy degrades only next to removable singularities
  complex_estimate closed(cplx mu) const {
    const double b = ax_.drift();
    const cplx I(0.0, 1.0);
    cplx om = std::sqrt(-(2.0 * mu + b * b));
    if (om.imag() < 0.0) om = -om;
    const cplx e1 = std::exp(I * om);
    const cplx den = e1 * e1 - 1.0;
    if (m_.k == axis_measure::kind::point) {
      const double x = m_.p;
      auto R = [&](double y) { return (std::exp(I * om * (1.0 + y)) - std::exp(I * om * (1.0 - y))) / den; };
      const cplx a = std::exp(-b * x) * R(1.0 - x);
      const cplx c = std::exp(b * (1.0 - x)) * R(x);
      cplx v = (-1.0 + a + c) / mu;
      double err = 64.0 * eps * (1.0 + std::abs(a) + std::abs(c)) / std::abs(mu);
      return {v, err};
    }
    const double cc = m_.k == axis_measure::kind::lebesgue ? 0.0 : 2.0 * b;
    const double zc = m_.k == axis_measure::kind::lebesgue ? 1.0 : ax_.normalizer();
    const double k = cc - b;
    auto I1 = [&](double kk) {
      cplx q = kk - I * om;
      cplx t = std::abs(q) < 0.5 ? std::exp(kk) * exprel(-q) : (std::exp(kk) - e1) / q;
      return (e1 * exprel(kk + I * om) - t) / den;
    };
    const cplx a = std::exp(k) * I1(-k);
    const cplx c = std::exp(b) * I1(k);
    cplx v = (-1.0 + (a + c) / zc) / mu;
    double err = 64.0 * eps * (1.0 + (std::abs(a) + std::abs(c)) / zc) / std::abs(mu);
    return {v, err};
  }

  // partial sum over 2^16 modes with an explicit remainder bound
  complex_estimate direct(cplx mu) const { return direct_from(mu, 0); }

  // sum over modes n > first (up to 2^16) plus the bound for n > 2^16
  complex_estimate direct_from(cplx mu, int first) const {
    std::call_once(once_->flag, [&] {
      once_->w.resize(direct_terms);
      once_->l.resize(direct_terms);
      for (int n = 1; n <= direct_terms; ++n) {
        once_->w[n - 1] = weight(n);
        once_->l[n - 1] = ax_.eigenvalue(n);
      }
    });
    cplx s = 0.0;
    for (int i = direct_terms - 1; i >= first; --i)
      if (once_->w[i] != 0.0) s += once_->w[i] / (once_->l[i] - mu);
    return {s, tail_safety * weighted_tail(mu.real(), direct_terms) + 1e3 * eps * std::abs(s)};
  }

  // bound on sum_{n > N} |F_n G_n| / Re(mu - lambda_n), with mu shifted by lambda_n
  double weighted_tail(double re_mu, int N) const {
    const double n = N;
    const double beta = re_mu + 0.5 * ax_.drift() * ax_.drift();
    const double c = 1.0 + std::min(0.0, beta) / (alpha * n * n);
    if (!(c > 0.0)) return std::numeric_limits<double>::infinity();
    return ax_.F_decay() * ax_.sup_bound() / (alpha * c * 2.0 * n * n);
  }

  // For Re mu > 0: |e(mu) + 1/mu| <= excess_bound(Re mu) / |mu|; decreasing in Re mu.
  double excess_bound(double re_mu) const {
    const double b = ax_.drift();
    const double q = 2.0 * re_mu + b * b;
    if (!(re_mu > 0.0)) return std::numeric_limits<double>::infinity();
    const double wi = std::sqrt(q);
    const double damp = 1.0 / (-std::expm1(-2.0 * wi));
    if (m_.k == axis_measure::kind::point) {
      const double x = m_.p;
      return 2.0 * damp * (std::exp(-b * x - wi * x) + std::exp(b * (1.0 - x) - wi * (1.0 - x)));
    }
    const double k = m_.k == axis_measure::kind::lebesgue ? -b : b;
    const double zc = m_.k == axis_measure::kind::lebesgue ? 1.0 : ax_.normalizer();
    return (std::exp(k) + std::exp(b)) * 2.0 * std::exp(std::abs(k)) * damp / (wi * zc);
  }

  // E at a removable point lambda_n (F_n G_n = 0), when it is provably zero or not
  std::optional<zero_state> removable_value_state(int n) const {
    if (m_.k != axis_measure::kind::point || ax_.drift() != 0.0 || !m_.exact || n % 2 != 0) return std::nullopt;
    if (!weight_exact_zero(n)) return std::nullopt;
    // zero drift: e(lambda_{2k}) = (2/kappa^2)(1 - cos(2 k pi p)), kappa = 2 k pi
    rational half{m_.exact->num * (n / 2), m_.exact->den};
    const bool integer = half.num % half.den == 0;
    return integer ? zero_state::exact_zero : zero_state::nonzero;
  }

 private:
  bool near_removable(cplx mu) const {
    // nearest axis eigenvalue index
    const double t = -(mu.real() + 0.5 * ax_.drift() * ax_.drift()) / alpha;
    if (t < 0.5) return false;
    const int n = int(std::lround(std::sqrt(t)));
    for (int m = std::max(1, n - 1); m <= n + 1; ++m) {
      const double lm = ax_.eigenvalue(m);
      if (std::abs(mu - lm) < 1e-6 * std::abs(lm) && weight_exact_zero(m)) return true;
    }
    return false;
  }

  struct cache {
    std::once_flag flag;
    std::vector<double> w, l;
  };

  axis_modes ax_;
  axis_measure m_;
  std::shared_ptr<cache> once_ = std::make_shared<cache>();
};

// Splits a product jump measure into its axis factors.
inline std::optional<std::vector<axis_measure>> axis_factors(const jump_measure& nu, std::size_t d) {
  std::vector<axis_measure> out(d);
  if (auto* pm = std::get_if<point_mass>(&nu.variant())) {
    for (std::size_t j = 0; j < d; ++j) out[j] = {axis_measure::kind::point, pm->point[j], pm->exact[j]};
    return out;
  }
  if (nu.is<lebesgue_normalized>()) {
    for (auto& a : out) a.k = axis_measure::kind::lebesgue;
    return out;
  }
  if (nu.is<reversible_measure>()) {
    for (auto& a : out) a.k = axis_measure::kind::reversible;
    return out;
  }
  return std::nullopt;
}

}  // namespace nlbc
