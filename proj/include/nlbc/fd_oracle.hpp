#pragma once

#include <lapacke.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <ostream>
#include <string>
#include <vector>

#include "common.hpp"
#include "domain.hpp"
#include "measures.hpp"

namespace nlbc {

// Interior finite-difference matrix with every boundary reference replaced by sum_k w_k u_k.
struct nonlocal_matrix {
  std::size_t dim = 1;
  int n_per_axis = 0;  // h = 1/n, interior nodes i = 1..n-1 per axis
  double h = 0.0;
  std::size_t size = 0;
  std::vector<double> entries;          // row-major size x size
  std::vector<double> measure_weights;  // one per interior node, summing to 1

  double at(std::size_t r, std::size_t c) const { return entries[r * size + c]; }

  // coordinates of interior node k
  std::array<double, 2> node(std::size_t k) const {
    const std::size_t m = std::size_t(n_per_axis - 1);
    if (dim == 1) return {double(k + 1) * h, 0.0};
    return {double(k % m + 1) * h, double(k / m + 1) * h};
  }
};

inline constexpr std::size_t fd_max_size = 10000;

namespace detail {

inline std::vector<double> fd_measure_weights(const domain_spec& dom, int n, const jump_measure& nu) {
  const std::size_t d = dom.dim();
  const std::size_t m = std::size_t(n - 1);
  const double h = 1.0 / n;
  const std::size_t size = d == 1 ? m : m * m;
  std::vector<double> w(size, 0.0);

  if (auto* pm = std::get_if<point_mass>(&nu.variant())) {
    // linear (d=1) or bilinear (d=2) split over the surrounding interior nodes
    std::vector<std::pair<std::size_t, double>> axis_w[2];
    for (std::size_t j = 0; j < d; ++j) {
      const double p = pm->point[j];
      if (p < h || p > 1.0 - h) throw invalid_argument("point mass closer than h to the boundary");
      double pos = p * n;
      std::size_t lo = std::size_t(std::floor(pos));
      if (lo >= std::size_t(n - 1)) lo = std::size_t(n - 2);
      const double t = pos - double(lo);
      axis_w[j].push_back({lo - 1, 1.0 - t});
      if (t > 0.0) axis_w[j].push_back({lo, t});
    }
    if (d == 1) {
      for (auto [i, a] : axis_w[0]) w[i] += a;
    } else {
      for (auto [i, a] : axis_w[0])
        for (auto [k, b] : axis_w[1]) w[k * m + i] += a * b;
    }
    return w;
  }

  // density measures: interior trapezoid weights, normalized (the implicit boundary share
  // of the trapezoid rule reduces to this normalization)
  double total = 0.0;
  for (std::size_t k = 0; k < size; ++k) {
    double x[2] = {double(k % m + 1) * h, double(k / m + 1) * h};
    w[k] = nu.density(dom, std::span<const double>(x, d));
    total += w[k];
  }
  if (!(total > 0.0)) throw invalid_argument("jump measure has no mass on the interior grid");
  for (auto& v : w) v /= total;
  return w;
}

}  // namespace detail

// Second-order centered scheme for u''/2 + b.grad u on the interior of the unit cube (d <= 2).
inline nonlocal_matrix build_nonlocal_matrix(const domain_spec& dom, int n_per_axis, const jump_measure& nu) {
  dom.validate();
  const std::size_t d = dom.dim();
  if (d < 1 || d > 2) throw invalid_argument("fd oracle supports d = 1, 2");
  if (n_per_axis < 16) throw invalid_argument("fd oracle needs n_per_axis >= 16");
  nu.validate(dom);
  const std::size_t m = std::size_t(n_per_axis - 1);
  const std::size_t size = d == 1 ? m : m * m;
  if (size > fd_max_size) throw invalid_argument("fd matrix exceeds the dense size budget");
  const double h = 1.0 / n_per_axis;
  for (const auto& f : dom.factors)
    if (!(std::abs(f.drift) * h < 2.0)) throw invalid_argument("grid Peclet number |b| h must be < 2");

  nonlocal_matrix M;
  M.dim = d;
  M.n_per_axis = n_per_axis;
  M.h = h;
  M.size = size;
  M.entries.assign(size * size, 0.0);
  M.measure_weights = detail::fd_measure_weights(dom, n_per_axis, nu);

  const double diff = 0.5 / (h * h);
  for (std::size_t r = 0; r < size; ++r) {
    std::size_t idx[2] = {r % m, r / m};
    double boundary_coef = 0.0;
    double* row = &M.entries[r * size];
    for (std::size_t j = 0; j < d; ++j) {
      const double adv = dom.factors[j].drift / (2.0 * h);
      const std::size_t stride = j == 0 ? 1 : m;
      row[r] -= 2.0 * diff;
      const double cm = diff - adv, cp = diff + adv;
      if (idx[j] == 0)
        boundary_coef += cm;
      else
        row[r - stride] += cm;
      if (idx[j] + 1 == m)
        boundary_coef += cp;
      else
        row[r + stride] += cp;
    }
    if (boundary_coef != 0.0)
      for (std::size_t k = 0; k < size; ++k) row[k] += boundary_coef * M.measure_weights[k];
  }
  return M;
}

// max |(M 1)_r|: the constant vector should be in the kernel
inline double kernel_residual(const nonlocal_matrix& M) {
  double worst = 0.0;
  for (std::size_t r = 0; r < M.size; ++r) {
    double s = 0.0;
    for (std::size_t c = 0; c < M.size; ++c) s += M.entries[r * M.size + c];
    worst = std::max(worst, std::abs(s));
  }
  return worst;
}

struct oracle_result {
  std::vector<cplx> eigenvalues;  // nonzero ones, real part decreasing
  cplx removed_zero;              // eigenvalue removed as the constant mode
};

inline bool spectral_order(cplx a, cplx b) {
  if (a.real() != b.real()) return a.real() > b.real();
  return a.imag() > b.imag();
}

// Dense nonsymmetric eigensolve (LAPACK dgeev), dropping the eigenvalue closest to 0.
inline oracle_result oracle_spectrum(const nonlocal_matrix& M, std::size_t how_many) {
  if (M.size > fd_max_size) throw invalid_argument("fd matrix exceeds the dense size budget");
  const lapack_int n = lapack_int(M.size);
  std::vector<double> a = M.entries, wr(M.size), wi(M.size);
  double dummy = 0.0;
  lapack_int info = LAPACKE_dgeev(LAPACK_ROW_MAJOR, 'N', 'N', n, a.data(), n, wr.data(), wi.data(), &dummy, n,
                                  &dummy, n);
  if (info != 0) throw eigensolve_failure("dgeev failed with info = " + std::to_string(info));
  std::vector<cplx> ev(M.size);
  for (std::size_t i = 0; i < M.size; ++i) ev[i] = cplx(wr[i], wi[i]);
  auto zero = std::min_element(ev.begin(), ev.end(), [](cplx x, cplx y) { return std::abs(x) < std::abs(y); });
  oracle_result out;
  out.removed_zero = *zero;
  ev.erase(zero);
  std::sort(ev.begin(), ev.end(), spectral_order);
  if (ev.size() > how_many) ev.resize(how_many);
  out.eigenvalues = std::move(ev);
  return out;
}

// Richardson step for a second-order method: grids n and r*n.
inline std::vector<cplx> richardson(const std::vector<cplx>& coarse, const std::vector<cplx>& fine, double ratio) {
  const std::size_t k = std::min(coarse.size(), fine.size());
  const double r2 = ratio * ratio;
  std::vector<cplx> out(k);
  for (std::size_t i = 0; i < k; ++i) out[i] = (r2 * fine[i] - coarse[i]) / (r2 - 1.0);
  return out;
}

// top eigenvalues extrapolated from two grid sizes
inline std::vector<cplx> extrapolated_spectrum(const domain_spec& dom, const jump_measure& nu, int coarse, int fine,
                                               std::size_t how_many) {
  auto a = oracle_spectrum(build_nonlocal_matrix(dom, coarse, nu), how_many);
  auto b = oracle_spectrum(build_nonlocal_matrix(dom, fine, nu), how_many);
  return richardson(a.eigenvalues, b.eigenvalues, double(fine) / coarse);
}

// "row col value" per nonzero entry
inline void write_coordinates(const nonlocal_matrix& M, std::ostream& os) {
  os.precision(17);
  for (std::size_t r = 0; r < M.size; ++r)
    for (std::size_t c = 0; c < M.size; ++c)
      if (double v = M.entries[r * M.size + c]; v != 0.0) os << r << ' ' << c << ' ' << v << '\n';
}

inline void write_eigenvalues_csv(const std::vector<cplx>& ev, std::ostream& os) {
  os.precision(17);
  os << "re,im\n";
  for (auto z : ev) os << z.real() << ',' << z.imag() << '\n';
}

}  // namespace nlbc
