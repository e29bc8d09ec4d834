#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <vector>

#include "basis.hpp"
#include "common.hpp"
#include "measures.hpp"
#include "resolvent.hpp"

namespace nlbc {

struct e_term {
  double lambda = 0.0;
  double F = 0.0;
  double G = 0.0;
  double weight = 0.0;  // F * G, exactly 0 when either factor is provably 0
  int level = 0;
  zero_state F_state = zero_state::nonzero;
  zero_state G_state = zero_state::nonzero;
};

// A distinct Dirichlet eigenvalue with its eigenspace bookkeeping.
struct eigen_cluster {
  int level = 0;
  double lambda = 0.0;
  int multiplicity = 0;  // d_n
  zero_state F_state = zero_state::exact_zero;
  zero_state G_state = zero_state::exact_zero;
  double weight = 0.0;       // sum of F G over members
  bool is_pole = false;      // some member has a weight not provably zero
  std::vector<std::size_t> members;
};

enum class e_strategy { partial_sum, exact_1d, separable_2d, custom };

inline const char* to_string(e_strategy s) {
  switch (s) {
    case e_strategy::partial_sum: return "partial-sum";
    case e_strategy::exact_1d: return "closed-form-1d";
    case e_strategy::separable_2d: return "separable-2d";
    case e_strategy::custom: return "custom";
  }
  return "?";
}

struct e_options {
  bool allow_closed_form = true;
  int separable_terms = 600;  // explicit first-axis modes in the separable path
};

// E(lambda) = sum_n F_n G_n / (lambda_n - lambda) over the full Dirichlet spectrum.
class efunction {
 public:
  using evaluator = std::function<complex_estimate(cplx)>;

  efunction(const eigen_basis& basis, const jump_measure& nu, e_options opt = {})
      : domain_(basis.domain()),
        lambda0_(basis.lambda0()),
        sup_bound_(basis.sup_bound()),
        box_cutoff_(basis.box_shaped() ? basis.cutoff() : 0),
        first_omitted_level_(basis.first_omitted_level()),
        assumption1_(basis.assumption1_certified()),
        measure_(nu) {
    nu.validate(domain_);
    long double sf2 = 0.0L, sg2 = 0.0L;
    bool finite = nu.finite_spectral_support();
    for (const auto& e : basis.entries()) {
      auto g = nu.G(basis, e);
      e_term t;
      t.lambda = e.lambda;
      t.F = e.F;
      t.G = g.value;
      t.level = e.level;
      t.F_state = e.F_state;
      t.G_state = g.state;
      t.weight = (e.F_state == zero_state::exact_zero || g.state == zero_state::exact_zero) ? 0.0 : e.F * g.value;
      sf2 += (long double)e.F * e.F;
      sg2 += (long double)g.value * g.value;
      terms_.push_back(t);
    }
    f_remainder_ = std::max(0.0L, 1.0L - sf2) + 1e-15L * terms_.size();
    if (auto l2 = nu.l2_norm2(domain_)) g_remainder_ = std::max(0.0L, (long double)*l2 - sg2) + 1e-15L * terms_.size() * *l2;
    if (finite) g_remainder_ = 0.0;
    finite_support_ = finite;
    build_clusters();
    if (!(terms_.front().weight > 0.0)) throw invalid_argument("F_0 G_0 must be positive");

    strategy_ = e_strategy::partial_sum;
    if (opt.allow_closed_form && !finite) {
      if (auto ax = axis_factors(nu, dim())) {
        if (dim() == 1) {
          strategy_ = e_strategy::exact_1d;
          axes_.emplace_back(basis.axis(0), (*ax)[0]);
        } else if (dim() == 2) {
          strategy_ = e_strategy::separable_2d;
          axes_.emplace_back(basis.axis(0), (*ax)[0]);
          axes_.emplace_back(basis.axis(1), (*ax)[1]);
          separable_terms_ = opt.separable_terms;
          for (int n = 1; n <= separable_terms_; ++n) {
            outer_w_.push_back(axes_[0].weight(n));
            outer_l_.push_back(axes_[0].modes().eigenvalue(n));
          }
        }
      }
    }
  }

  // Replaces the evaluation path (e.g. an analytic remainder for special measures).
  void set_evaluator(evaluator f, std::string label) {
    custom_ = std::move(f);
    custom_label_ = std::move(label);
    strategy_ = e_strategy::custom;
  }

  std::size_t dim() const { return domain_.dim(); }
  const domain_spec& domain() const { return domain_; }
  const jump_measure& measure() const { return measure_; }
  double lambda0() const { return lambda0_; }
  double lambda1() const { return lambda0_ - 3.0 * alpha; }
  const std::vector<e_term>& terms() const { return terms_; }
  const std::vector<eigen_cluster>& clusters() const { return clusters_; }
  e_strategy strategy() const { return strategy_; }
  std::string strategy_label() const { return strategy_ == e_strategy::custom ? custom_label_ : to_string(strategy_); }
  int first_omitted_level() const { return first_omitted_level_; }
  bool assumption1_certified() const { return assumption1_; }
  bool finite_support() const { return finite_support_; }

  // lambda values of clusters that are genuine poles, decreasing
  std::vector<double> poles() const {
    std::vector<double> p;
    for (const auto& c : clusters_)
      if (c.is_pole) p.push_back(c.lambda);
    return p;
  }

  // Proof state of E(Lambda) = 0 at a zero-weight cluster, when available in closed form.
  std::optional<zero_state> removable_value_state(const eigen_cluster& c) const {
    if (strategy_ != e_strategy::exact_1d || c.is_pole) return std::nullopt;
    const int n = int(std::lround(std::sqrt(double(c.level))));
    if (n * n != c.level) return std::nullopt;
    return axes_[0].removable_value_state(n);
  }

  // lowest lambda where every pole is known from the basis
  double resolved_floor() const { return -domain_.drift_shift() - alpha * first_omitted_level_; }

  complex_estimate operator()(cplx z) const {
    check_pole(z);
    switch (strategy_) {
      case e_strategy::exact_1d: return axes_[0](z);
      case e_strategy::separable_2d: return separable(z);
      case e_strategy::custom: return custom_(z);
      case e_strategy::partial_sum: break;
    }
    return partial(z);
  }

  real_estimate operator()(double x) const {
    auto v = (*this)(cplx(x, 0.0));
    return {v.value.real(), v.error};
  }

  // plain truncated sum plus its certified remainder bound
  complex_estimate partial(cplx z) const {
    cplx s = 0.0;
    for (auto it = terms_.rbegin(); it != terms_.rend(); ++it)
      if (it->weight != 0.0) s += it->weight / (it->lambda - z);
    return {s, tail_bound(z) + 64.0 * eps * std::abs(s)};
  }

  // certified bound on |sum over omitted modes| at z
  double tail_bound(cplx z) const {
    if (finite_support_) return 0.0;
    const double s = -(z.real() + domain_.drift_shift()) / alpha;
    const double L = first_omitted_level_;
    if (L <= s) return std::numeric_limits<double>::infinity();
    double best = std::numeric_limits<double>::infinity();
    const double dist = std::hypot(alpha * (L - s), z.imag());
    if (g_remainder_) best = std::sqrt(double(f_remainder_) * double(*g_remainder_)) / dist;
    if (box_cutoff_ > 0 && dim() <= 3) {
      const double N = box_cutoff_;
      const double c = 1.0 - std::max(0.0, s) / ((N + 1) * (N + 1));
      if (c > 0.0) {
        double I = 0.0;
        if (dim() == 1) I = 1.0 / (3.0 * N * N * N);
        if (dim() == 2) I = pi / (8.0 * N * N);
        if (dim() == 3) I = pi / (4.0 * N);
        const double inv2 = double(dim()) * I / (alpha * alpha * c * c);
        best = std::min(best, std::sqrt(double(f_remainder_)) * sup_bound_ * std::sqrt(inv2));
      }
    }
    return tail_safety * best;
  }

 private:
  void check_pole(cplx z) const {
    const double tol = 1e-12 * std::abs(lambda0_);
    for (const auto& c : clusters_)
      if (c.is_pole && std::abs(z - c.lambda) <= tol) throw pole_error("evaluation at a pole of E");
  }

  // E(z) = sum_{n<=N} a_n e2(z - l_n) + sum_{n>N} a_n / (l_n - z) + sum_{n>N} a_n (e2(mu_n) + 1/mu_n)
  complex_estimate separable(cplx z) const {
    cplx s = 0.0;
    double err = 0.0;
    for (int i = separable_terms_ - 1; i >= 0; --i) {
      if (outer_w_[i] == 0.0) continue;
      auto inner = axes_[1](z - outer_l_[i]);
      s += outer_w_[i] * inner.value;
      err += std::abs(outer_w_[i]) * inner.error;
    }
    auto rest = axes_[0].direct_from(z, separable_terms_);
    s += rest.value;
    err += rest.error;
    const int N = separable_terms_;
    const double mu_next = z.real() - outer_l_.back() + alpha * (2.0 * N + 1.0);
    const double excess = axes_[1].excess_bound(mu_next) * axes_[0].weighted_tail(z.real(), N);
    return {s, err + tail_safety * excess + 64.0 * eps * std::abs(s)};
  }

  void build_clusters() {
    std::map<int, std::size_t> pos;
    for (std::size_t i = 0; i < terms_.size(); ++i) {
      const auto& t = terms_[i];
      auto [it, fresh] = pos.try_emplace(t.level, clusters_.size());
      if (fresh) {
        eigen_cluster c;
        c.level = t.level;
        c.lambda = t.lambda;
        clusters_.push_back(c);
      }
      auto& c = clusters_[it->second];
      c.members.push_back(i);
      c.multiplicity++;
      c.weight += t.weight;
      if (t.weight != 0.0) c.is_pole = true;
    }
    auto merge = [](zero_state acc, zero_state s, bool first) {
      if (first) return s;
      if (acc == zero_state::nonzero || s == zero_state::nonzero) return zero_state::nonzero;
      if (acc == zero_state::uncertain || s == zero_state::uncertain) return zero_state::uncertain;
      return zero_state::exact_zero;
    };
    for (auto& c : clusters_) {
      bool first = true;
      for (auto i : c.members) {
        c.F_state = merge(c.F_state, terms_[i].F_state, first);
        c.G_state = merge(c.G_state, terms_[i].G_state, first);
        first = false;
      }
    }
  }

  domain_spec domain_;
  double lambda0_;
  double sup_bound_;
  int box_cutoff_;
  int first_omitted_level_;
  bool assumption1_;
  jump_measure measure_;
  std::vector<e_term> terms_;
  std::vector<eigen_cluster> clusters_;
  long double f_remainder_ = 1.0L;
  std::optional<long double> g_remainder_;
  bool finite_support_ = false;
  e_strategy strategy_ = e_strategy::partial_sum;
  std::vector<axis_resolvent> axes_;
  int separable_terms_ = 0;
  std::vector<double> outer_w_, outer_l_;
  evaluator custom_;
  std::string custom_label_;
};

inline efunction make_efunction(const eigen_basis& basis, const jump_measure& nu, e_options opt = {}) {
  return efunction(basis, nu, opt);
}

inline complex_estimate evaluate_E(const efunction& ef, cplx z) { return ef(z); }
inline real_estimate evaluate_E(const efunction& ef, double x) { return ef(x); }

}  // namespace nlbc
