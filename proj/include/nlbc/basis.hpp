#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "axis.hpp"
#include "common.hpp"
#include "domain.hpp"

namespace nlbc {

struct eigen_entry {
  std::vector<int> index;  // multi-index, entries >= 1
  int level = 0;           // sum of n_j^2; lambda = -drift_shift - alpha * level
  double lambda = 0.0;
  double F = 0.0;
  zero_state F_state = zero_state::nonzero;
};

// Tensor-product Dirichlet eigenbasis, sorted by lambda nonincreasing with
// lexicographic tie-breaking.
class eigen_basis {
 public:
  eigen_basis(domain_spec domain, int cutoff, std::optional<int> max_level = std::nullopt)
      : domain_(std::move(domain)), cutoff_(cutoff), max_level_(max_level) {
    domain_.validate();
    if (cutoff < 1) throw invalid_argument("basis cutoff must be >= 1");
    const std::size_t d = domain_.dim();
    for (const auto& f : domain_.factors) axes_.emplace_back(f.drift);

    double count = std::pow(double(cutoff), double(d));
    if (!max_level_ && count > 2e7)
      throw invalid_argument("basis too large: " + std::to_string(count) + " entries");

    const int cap = max_level_.value_or(std::numeric_limits<int>::max());
    std::vector<int> idx(d, 1);
    auto gen = [&](auto&& self, std::size_t j, int partial) -> void {
      if (j == d) {
        push_entry(idx, partial);
        return;
      }
      const int rest = int(d - 1 - j);  // each remaining axis adds at least 1
      for (int n = 1; n <= cutoff; ++n) {
        if (partial + n * n + rest > cap) break;
        idx[j] = n;
        self(self, j + 1, partial + n * n);
      }
    };
    gen(gen, 0, 0);
    std::sort(entries_.begin(), entries_.end(), [](const eigen_entry& a, const eigen_entry& b) {
      if (a.level != b.level) return a.level < b.level;
      return a.index < b.index;
    });
    if (entries_.size() > 4e7) throw invalid_argument("basis too large");
  }

  const domain_spec& domain() const { return domain_; }
  std::size_t dim() const { return domain_.dim(); }
  int cutoff() const { return cutoff_; }
  std::optional<int> max_level() const { return max_level_; }
  const std::vector<eigen_entry>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  const eigen_entry& operator[](std::size_t i) const { return entries_[i]; }
  const axis_modes& axis(std::size_t j) const { return axes_[j]; }

  double lambda_of_level(int level) const { return -domain_.drift_shift() - alpha * level; }
  double lambda0() const { return lambda_of_level(int(dim())); }
  double lambda1() const { return lambda_of_level(int(dim()) + 3); }

  // Every multi-index with level <= this value is present.
  int complete_through_level() const {
    const int d = int(dim());
    int box = (cutoff_ + 1) * (cutoff_ + 1) + d - 2;
    return max_level_ ? std::min(box, *max_level_) : box;
  }

  // Smallest level that can be missing from the basis.
  int first_omitted_level() const { return complete_through_level() + 1; }

  bool box_shaped() const {
    return !max_level_ || *max_level_ >= cutoff_ * cutoff_ * int(dim());
  }

  // prod_j sup |phi_{n_j}|
  double sup_bound() const {
    double s = 1.0;
    for (const auto& a : axes_) s *= a.sup_bound();
    return s;
  }

  bool assumption1_certified() const { return dim() <= 3; }

  double evaluate(const eigen_entry& e, std::span<const double> x) const {
    if (!domain_.interior(x)) throw domain_error("point must lie strictly inside (0,1)^d");
    double v = 1.0;
    for (std::size_t j = 0; j < dim(); ++j) v *= axes_[j].value(e.index[j], x[j]);
    return v;
  }

  // (L - lambda) phi at x, using analytic derivatives; zero up to rounding
  double residual(const eigen_entry& e, std::span<const double> x) const {
    double lphi = 0.0;
    for (std::size_t j = 0; j < dim(); ++j) {
      double other = 1.0;
      for (std::size_t k = 0; k < dim(); ++k)
        if (k != j) other *= axes_[k].value(e.index[k], x[k]);
      const auto& a = axes_[j];
      const int n = e.index[j];
      lphi += other * (0.5 * a.second_derivative(n, x[j]) + a.drift() * a.derivative(n, x[j]));
    }
    return lphi - e.lambda * evaluate(e, x);
  }

  double reversible_density(std::span<const double> x) const {
    double r = 1.0;
    for (std::size_t j = 0; j < dim(); ++j) r *= axes_[j].reversible_density(x[j]);
    return r;
  }

  std::optional<std::size_t> find(std::span<const int> index) const {
    for (std::size_t i = 0; i < entries_.size(); ++i)
      if (std::equal(index.begin(), index.end(), entries_[i].index.begin(), entries_[i].index.end()))
        return i;
    return std::nullopt;
  }

  bool contains(const eigen_entry& e) const {
    if (e.index.size() != dim()) return false;
    for (int n : e.index)
      if (n < 1 || n > cutoff_) return false;
    return !max_level_ || e.level <= *max_level_;
  }

  // entry 1 of the canonical ordering: (1,...,1,2)
  std::vector<int> second_index() const {
    std::vector<int> idx(dim(), 1);
    idx.back() = 2;
    return idx;
  }

 private:
  void push_entry(const std::vector<int>& idx, int lev) {
    eigen_entry e;
    e.index = idx;
    e.level = lev;
    e.lambda = lambda_of_level(lev);
    e.F = 1.0;
    bool zero = false;
    for (std::size_t j = 0; j < idx.size(); ++j) {
      e.F *= axes_[j].F(idx[j]);
      zero = zero || axes_[j].F_exact_zero(idx[j]);
    }
    if (zero) {
      e.F = 0.0;
      e.F_state = zero_state::exact_zero;
    }
    entries_.push_back(std::move(e));
  }

  domain_spec domain_;
  int cutoff_;
  std::optional<int> max_level_;
  std::vector<axis_modes> axes_;
  std::vector<eigen_entry> entries_;
};

inline eigen_basis build_basis(const domain_spec& domain, int cutoff,
                               std::optional<int> max_level = std::nullopt) {
  return eigen_basis(domain, cutoff, max_level);
}

inline double coefficient_F(const eigen_basis& basis, const eigen_entry& e) {
  if (!basis.contains(e)) throw invalid_argument("entry does not belong to basis");
  return e.F;
}

inline double evaluate_eigenfunction(const eigen_basis& basis, const eigen_entry& e,
                                     std::span<const double> x) {
  return basis.evaluate(e, x);
}

}  // namespace nlbc
