#pragma once

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/random/mersenne_twister.hpp>
#include <boost/random/normal_distribution.hpp>
#include <boost/random/uniform_int_distribution.hpp>
#include <boost/random/uniform_01.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <random>  // seed_seq
#include <string>
#include <thread>
#include <vector>

#include "basis.hpp"
#include "common.hpp"
#include "domain.hpp"
#include "efunction.hpp"
#include "measures.hpp"

namespace nlbc {

struct sim_config {
  domain_spec domain = domain_spec::cube(1);
  jump_measure measure = jump_measure::lebesgue();
  double step = 1e-5;
  double horizon = 10.0;
  int replicates = 1;
  std::uint64_t seed = 0;
  enum class start_kind { point, measure } start = start_kind::measure;
  std::vector<double> start_point;  // used with start_kind::point; defaults to the centre
  int bins = 0;                     // histogram bins per axis; 0 picks 100 (d=1) or 40 (d=2)
  int threads = 1;

  void validate() const {
    domain.validate();
    if (domain.dim() > 2) throw invalid_argument("simulation supports d = 1, 2");
    if (!(step > 0.0)) throw invalid_argument("time step must be positive");
    if (!(horizon >= 100.0 * step)) throw invalid_argument("horizon must be at least 100 steps");
    if (replicates < 1) throw invalid_argument("replicates must be >= 1");
    if (threads < 1) throw invalid_argument("threads must be >= 1");
    if (bins < 0) throw invalid_argument("bins must be >= 0");
    measure.validate(domain);
    if (start == start_kind::point && !start_point.empty() && !domain.interior(start_point))
      throw invalid_argument("start point must lie inside the domain");
  }

  int bins_per_axis() const { return bins > 0 ? bins : (domain.dim() == 1 ? 100 : 40); }
};

struct sim_result {
  std::size_t dim = 1;
  int bins_per_axis = 0;
  std::vector<double> histogram;           // occupation frequencies, summing to 1
  std::vector<double> invariant_estimate;  // frequency / cell volume
  std::uint64_t occupation_samples = 0;
  std::uint64_t jumps_observed = 0;
  std::uint64_t steps = 0;
};

namespace detail {

// tabulated inverse CDF of a density on [0,1]
class inverse_cdf {
 public:
  static constexpr int knots = 1 << 14;

  template <class Density>
  explicit inverse_cdf(Density&& rho) : cdf_(knots + 1, 0.0) {
    std::vector<double> f(knots + 1);
    for (int i = 0; i <= knots; ++i) f[i] = std::max(0.0, rho(double(i) / knots));
    for (int i = 1; i <= knots; ++i) cdf_[i] = cdf_[i - 1] + 0.5 * (f[i - 1] + f[i]);
    const double total = cdf_.back();
    if (!(total > 0.0)) throw invalid_argument("density has zero mass");
    for (auto& c : cdf_) c /= total;
  }

  double operator()(double u) const {
    auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
    std::size_t i = std::size_t(std::clamp<std::ptrdiff_t>(it - cdf_.begin(), 1, knots)) - 1;
    const double lo = cdf_[i], hi = cdf_[i + 1];
    const double t = hi > lo ? (u - lo) / (hi - lo) : 0.5;
    return (double(i) + std::clamp(t, 0.0, 1.0)) / knots;
  }

 private:
  std::vector<double> cdf_;
};

// cell table for non-product two-dimensional densities
class cell_sampler {
 public:
  static constexpr int cells = 512;

  cell_sampler(const domain_spec& dom, const jump_measure& nu) : cdf_(std::size_t(cells) * cells + 1, 0.0) {
    for (int k = 0; k < cells; ++k)
      for (int i = 0; i < cells; ++i) {
        double x[2] = {(i + 0.5) / cells, (k + 0.5) / cells};
        const std::size_t c = std::size_t(k) * cells + i;
        cdf_[c + 1] = cdf_[c] + std::max(0.0, nu.density(dom, x));
      }
    const double total = cdf_.back();
    if (!(total > 0.0)) throw invalid_argument("density has zero mass");
    for (auto& c : cdf_) c /= total;
  }

  template <class U>
  void sample(U&& uniform, double* x) const {
    const double u = uniform();
    auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
    std::size_t c = std::size_t(std::clamp<std::ptrdiff_t>(it - cdf_.begin(), 1, std::ptrdiff_t(cdf_.size()) - 1)) - 1;
    x[0] = (double(c % cells) + uniform()) / cells;
    x[1] = (double(c / cells) + uniform()) / cells;
  }

 private:
  std::vector<double> cdf_;
};

}  // namespace detail

// Exact or tabulated sampling from a jump measure.
class measure_sampler {
 public:
  measure_sampler(const domain_spec& dom, const jump_measure& nu) : d_(dom.dim()) {
    if (auto* pm = std::get_if<point_mass>(&nu.variant())) {
      fixed_ = pm->point;
    } else if (nu.product_density()) {
      for (std::size_t j = 0; j < d_; ++j)
        axes_.emplace_back([&, j](double x) { return nu.axis_density(dom, j, x); });
    } else if (d_ == 1) {
      axes_.emplace_back([&](double x) { return nu.density(dom, std::span<const double>(&x, 1)); });
    } else {
      cells_.emplace(dom, nu);
    }
  }

  template <class Gen>
  void operator()(Gen& g, double* x) const {
    boost::random::uniform_01<double> u;
    if (fixed_) {
      std::copy(fixed_->begin(), fixed_->end(), x);
    } else if (cells_) {
      cells_->sample([&] { return u(g); }, x);
    } else {
      for (std::size_t j = 0; j < d_; ++j) x[j] = axes_[j](u(g));
    }
    // a tabulated sample can land on a knot at 0 or 1
    for (std::size_t j = 0; j < d_; ++j) x[j] = std::clamp(x[j], 1e-12, 1.0 - 1e-12);
  }

 private:
  std::size_t d_;
  std::optional<std::vector<double>> fixed_;
  std::vector<detail::inverse_cdf> axes_;
  std::optional<detail::cell_sampler> cells_;
};

// Independent generator for replicate `rep`, fixed by the 64-bit seed.
inline boost::random::mt19937_64 replicate_engine(std::uint64_t seed, std::uint64_t rep) {
  std::seed_seq seq{std::uint32_t(seed), std::uint32_t(seed >> 32), std::uint32_t(rep), std::uint32_t(rep >> 32)};
  return boost::random::mt19937_64(seq);
}

namespace detail {

template <class Body>
void for_replicates(int replicates, int threads, Body&& body) {
  threads = std::max(1, std::min(threads, replicates));
  if (threads == 1) {
    for (int r = 0; r < replicates; ++r) body(r);
    return;
  }
  std::vector<std::thread> pool;
  for (int t = 0; t < threads; ++t)
    pool.emplace_back([&, t] {
      for (int r = t; r < replicates; r += threads) body(r);
    });
  for (auto& th : pool) th.join();
}

}  // namespace detail

// Euler-Maruyama with immediate resampling from nu on exit; occupation recorded over [T/2, T].
inline sim_result simulate(const sim_config& cfg) {
  cfg.validate();
  const std::size_t d = cfg.domain.dim();
  const int nb = cfg.bins_per_axis();
  const std::size_t cells = d == 1 ? std::size_t(nb) : std::size_t(nb) * nb;
  const std::uint64_t steps = std::uint64_t(std::llround(cfg.horizon / cfg.step));
  const std::uint64_t burn = steps / 2;
  measure_sampler sampler(cfg.domain, cfg.measure);
  const double sq = std::sqrt(cfg.step);
  double drift[2] = {0.0, 0.0};
  for (std::size_t j = 0; j < d; ++j) drift[j] = cfg.domain.factors[j].drift * cfg.step;

  std::vector<std::vector<std::uint64_t>> counts(cfg.replicates);
  std::vector<std::uint64_t> jumps(cfg.replicates, 0);
  detail::for_replicates(cfg.replicates, cfg.threads, [&](int rep) {
    auto g = replicate_engine(cfg.seed, std::uint64_t(rep));
    boost::random::normal_distribution<double> normal;
    std::vector<std::uint64_t> c(cells, 0);
    double x[2] = {0.5, 0.5};
    if (cfg.start == sim_config::start_kind::measure)
      sampler(g, x);
    else if (!cfg.start_point.empty())
      std::copy(cfg.start_point.begin(), cfg.start_point.end(), x);
    std::uint64_t jmp = 0;
    for (std::uint64_t s = 0; s < steps; ++s) {
      bool out = false;
      for (std::size_t j = 0; j < d; ++j) {
        x[j] += drift[j] + sq * normal(g);
        out |= !(x[j] > 0.0 && x[j] < 1.0);
      }
      if (out) {
        sampler(g, x);
        ++jmp;
      }
      if (s >= burn) {
        std::size_t cell = std::min<std::size_t>(std::size_t(x[0] * nb), nb - 1);
        if (d == 2) cell += std::size_t(nb) * std::min<std::size_t>(std::size_t(x[1] * nb), nb - 1);
        ++c[cell];
      }
    }
    counts[rep] = std::move(c);
    jumps[rep] = jmp;
  });

  sim_result res;
  res.dim = d;
  res.bins_per_axis = nb;
  std::vector<std::uint64_t> total(cells, 0);
  for (int r = 0; r < cfg.replicates; ++r) {
    for (std::size_t k = 0; k < cells; ++k) total[k] += counts[r][k];
    res.jumps_observed += jumps[r];
  }
  res.steps = steps * std::uint64_t(cfg.replicates);
  for (auto v : total) res.occupation_samples += v;
  const double vol = std::pow(1.0 / nb, double(d));
  res.histogram.resize(cells);
  res.invariant_estimate.resize(cells);
  for (std::size_t k = 0; k < cells; ++k) {
    res.histogram[k] = double(total[k]) / double(res.occupation_samples);
    res.invariant_estimate[k] = res.histogram[k] / vol;
  }
  return res;
}

// Invariant density from the killed Green's function, mu(y) = int G(x, y) dnu(x) / int int G dnu dz.
// Series mode: G(x, y) = sum_n phi_n(x) phi_n(y) rho(y) / (-lambda_n), so the normalizer is -E(0).
class green_density {
 public:
  enum class mode { series, exact };

  green_density(const eigen_basis& basis, const jump_measure& nu, mode m = mode::series)
      : basis_(basis), nu_(nu), mode_(m) {
    nu.validate(basis.domain());
    const auto& dom = basis.domain();
    if (m == mode::exact) {
      if (dom.dim() != 1 || !dom.zero_drift()) throw invalid_argument("exact Green mode needs d = 1 without drift");
      exact_normalizer();
      return;
    }
    if (dom.dim() > 2) throw invalid_argument("Green density supports d = 1, 2");
    if (!basis.box_shaped() || basis.cutoff() < 32) throw invalid_argument("series mode needs a box basis with cutoff >= 32");
    if (dom.dim() == 2 && !nu.has_l2_density())
      throw domain_error("no certified series tail for a point mass in d = 2");
    long double sg2 = 0.0L;
    for (const auto& e : basis.entries()) {
      auto g = nu.G(basis, e);
      const double gv = g.state == zero_state::exact_zero ? 0.0 : g.value;
      coef_.push_back(gv / (-e.lambda));
      sg2 += (long double)gv * gv;
    }
    efunction ef(basis, nu);
    auto e0 = ef(0.0);
    norm_ = {-e0.value, e0.error};
    const double B = basis.sup_bound();
    const double N = basis.cutoff();
    if (nu.finite_spectral_support()) {
      tail_ = 64.0 * eps;  // the series is finite: only rounding remains
    } else if (dom.dim() == 1) {
      // |G_n| <= B for any probability measure; sum_{n > N} 1/(alpha n^2) <= 1/(alpha N)
      tail_ = B * B / (alpha * N);
    } else {
      const double rg = std::max(0.0L, (long double)*nu.l2_norm2(dom) - sg2) + 1e-15L * coef_.size();
      tail_ = std::sqrt(rg) * B * std::sqrt(2.0 * pi / (8.0 * N * N)) / alpha;
    }
  }

  // density at y, with a bound on the truncation error; 0 on the boundary
  real_estimate operator()(std::span<const double> y) const {
    const auto& dom = basis_.domain();
    if (y.size() != dom.dim()) throw invalid_argument("point has the wrong dimension");
    for (double v : y) {
      if (v < 0.0 || v > 1.0) throw invalid_argument("point outside the closed cube");
      if (v == 0.0 || v == 1.0) return {0.0, 0.0};
    }
    if (mode_ == mode::exact) return exact(y[0]);
    compensated_sum<double> s;
    const auto& ent = basis_.entries();
    for (std::size_t i = ent.size(); i-- > 0;)
      if (coef_[i] != 0.0) s.add(coef_[i] * basis_.evaluate(ent[i], y));
    const double rho = basis_.reversible_density(y);
    const double num = rho * s.value();
    const double num_err = rho * tail_safety * tail_ + 64.0 * eps * std::abs(num);
    const double v = num / norm_.value;
    const double err = num_err / norm_.value + std::abs(v) * norm_.error / norm_.value;
    return {v, err};
  }

  real_estimate operator()(double y) const { return (*this)(std::span<const double>(&y, 1)); }

  // sup over y of the truncation bound (series mode)
  double tail_bound() const { return tail_; }

 private:
  // G(x, y) = 2 min(x, y) (1 - max(x, y)) for u''/2 on (0,1); int_0^1 G(x, y) dy = x (1 - x)
  void exact_normalizer() {
    if (auto* pm = std::get_if<point_mass>(&nu_.variant())) {
      const double p = pm->point[0];
      norm_ = {p * (1.0 - p), 4.0 * eps};
      return;
    }
    double err = 0.0;
    const auto& dom = basis_.domain();
    auto rho = [&](double x) { return nu_.density(dom, std::span<const double>(&x, 1)); };
    using gk = boost::math::quadrature::gauss_kronrod<double, 61>;
    const double v = gk::integrate([&](double x) { return x * (1.0 - x) * rho(x); }, 0.0, 1.0, 3, 1e-12, &err);
    norm_ = {v, tail_safety * err + 16.0 * eps * v};
  }

  real_estimate exact(double y) const {
    double num = 0.0, err = 0.0;
    if (auto* pm = std::get_if<point_mass>(&nu_.variant())) {
      const double p = pm->point[0];
      num = 2.0 * std::min(p, y) * (1.0 - std::max(p, y));
      err = 8.0 * eps * num;
    } else {
      const auto& dom = basis_.domain();
      auto rho = [&](double x) { return nu_.density(dom, std::span<const double>(&x, 1)); };
      using gk = boost::math::quadrature::gauss_kronrod<double, 61>;
      double e1 = 0.0, e2 = 0.0;
      const double a = gk::integrate([&](double x) { return 2.0 * x * (1.0 - y) * rho(x); }, 0.0, y, 3, 1e-12, &e1);
      const double b = gk::integrate([&](double x) { return 2.0 * y * (1.0 - x) * rho(x); }, y, 1.0, 3, 1e-12, &e2);
      num = a + b;
      err = tail_safety * (e1 + e2) + 16.0 * eps * num;
    }
    const double v = num / norm_.value;
    return {v, err / norm_.value + v * norm_.error / norm_.value};
  }

  eigen_basis basis_;
  jump_measure nu_;
  mode mode_;
  std::vector<double> coef_;
  real_estimate norm_{1.0, 0.0};
  double tail_ = 0.0;
};

inline real_estimate green_invariant_density(const eigen_basis& basis, const jump_measure& nu,
                                             std::span<const double> y,
                                             green_density::mode m = green_density::mode::series) {
  return green_density(basis, nu, m)(y);
}

// L1 distance between a one-dimensional histogram density and a reference density (bin averages by Gauss rule).
inline double histogram_l1(const sim_result& r, const std::function<double(double)>& density) {
  if (r.dim != 1) throw invalid_argument("histogram_l1 is one-dimensional");
  const int nb = r.bins_per_axis;
  const double w = 1.0 / nb;
  using gl = boost::math::quadrature::gauss<double, 8>;
  double l1 = 0.0;
  for (int b = 0; b < nb; ++b) {
    const double avg = gl::integrate(density, b * w, (b + 1) * w) / w;
    l1 += std::abs(r.invariant_estimate[b] - avg) * w;
  }
  return l1;
}

// Observables selectable by name.
inline const std::map<std::string, std::function<double(std::span<const double>)>>& observable_registry() {
  static const std::map<std::string, std::function<double(std::span<const double>)>> reg = {
      {"sin2pi", [](std::span<const double> x) { return std::sin(2.0 * pi * x[0]); }},
      {"cos2pi", [](std::span<const double> x) { return std::cos(2.0 * pi * x[0]); }},
      {"x", [](std::span<const double> x) { return x[0]; }},
      {"left-half", [](std::span<const double> x) { return x[0] < 0.5 ? 1.0 : 0.0; }},
      {"const", [](std::span<const double>) { return 1.0; }},
  };
  return reg;
}

inline std::function<double(std::span<const double>)> observable(const std::string& name) {
  const auto& reg = observable_registry();
  auto it = reg.find(name);
  if (it == reg.end()) throw invalid_argument("unknown observable: " + name);
  return it->second;
}

struct mixing_estimate {
  double rate = 0.0;
  double half_width = 0.0;  // bootstrap 95% half-width
  double window_end = 0.0;  // last time used in the fit
  std::vector<double> times, means, std_errors;
};

struct mixing_options {
  int mesh_every = 10;   // record every this many steps
  int bootstrap = 200;
  double signal_factor = 3.0;
};

// Fits log |E_x f(X_t) - mu(f)| against t over the window where the signal exceeds its noise.
inline mixing_estimate estimate_mixing_rate(const sim_config& cfg, const std::function<double(std::span<const double>)>& f,
                                            double invariant_mean, mixing_options opt = {}) {
  cfg.validate();
  if (opt.mesh_every < 1 || opt.bootstrap < 10) throw invalid_argument("bad mixing options");
  const std::size_t d = cfg.domain.dim();
  const std::uint64_t steps = std::uint64_t(std::llround(cfg.horizon / cfg.step));
  const std::size_t K = std::size_t(steps / opt.mesh_every) + 1;
  measure_sampler sampler(cfg.domain, cfg.measure);
  const double sq = std::sqrt(cfg.step);
  double drift[2] = {0.0, 0.0};
  for (std::size_t j = 0; j < d; ++j) drift[j] = cfg.domain.factors[j].drift * cfg.step;
  std::vector<double> x0(d, 0.5);
  if (!cfg.start_point.empty()) x0 = cfg.start_point;

  const std::size_t R = std::size_t(cfg.replicates);
  std::vector<float> paths(R * K);  // f values per replicate and mesh time
  detail::for_replicates(cfg.replicates, cfg.threads, [&](int rep) {
    auto g = replicate_engine(cfg.seed, std::uint64_t(rep));
    boost::random::normal_distribution<double> normal;
    double x[2] = {x0[0], d == 2 ? x0[1] : 0.5};
    float* row = &paths[std::size_t(rep) * K];
    row[0] = float(f(std::span<const double>(x, d)));
    for (std::uint64_t s = 1; s <= steps; ++s) {
      bool out = false;
      for (std::size_t j = 0; j < d; ++j) {
        x[j] += drift[j] + sq * normal(g);
        out |= !(x[j] > 0.0 && x[j] < 1.0);
      }
      if (out) sampler(g, x);
      if (s % opt.mesh_every == 0) row[s / opt.mesh_every] = float(f(std::span<const double>(x, d)));
    }
  });

  mixing_estimate est;
  est.times.resize(K);
  est.means.assign(K, 0.0);
  est.std_errors.assign(K, 0.0);
  for (std::size_t k = 0; k < K; ++k) {
    double s = 0.0, s2 = 0.0;
    for (std::size_t r = 0; r < R; ++r) {
      const double v = paths[r * K + k];
      s += v;
      s2 += v * v;
    }
    const double m = s / R;
    est.times[k] = double(k * opt.mesh_every) * cfg.step;
    est.means[k] = m;
    est.std_errors[k] = R > 1 ? std::sqrt(std::max(0.0, s2 / R - m * m) / double(R - 1)) : 0.0;
  }
  std::size_t end = 0;
  while (end < K && std::abs(est.means[end] - invariant_mean) > opt.signal_factor * est.std_errors[end]) ++end;
  if (end < 3)
    throw no_estimate("signal below " + std::to_string(opt.signal_factor) + " standard errors from the start (|E f - mu(f)| = " +
                      std::to_string(std::abs(est.means[0] - invariant_mean)) + ")");
  est.window_end = est.times[end - 1];

  auto slope = [&](const std::vector<double>& means) {
    double st = 0.0, sy = 0.0, stt = 0.0, sty = 0.0;
    int n = 0;
    for (std::size_t k = 0; k < end; ++k) {
      const double diff = std::abs(means[k] - invariant_mean);
      if (!(diff > 0.0)) continue;
      const double t = est.times[k], y = std::log(diff);
      st += t, sy += y, stt += t * t, sty += t * y;
      ++n;
    }
    const double den = n * stt - st * st;
    return den > 0.0 ? (n * sty - st * sy) / den : std::numeric_limits<double>::quiet_NaN();
  };
  est.rate = slope(est.means);

  // bootstrap over replicates
  auto g = replicate_engine(cfg.seed ^ 0x9e3779b97f4a7c15ULL, std::uint64_t(-1));
  boost::random::uniform_int_distribution<std::size_t> pick(0, R - 1);
  std::vector<double> rates;
  std::vector<double> means(K);
  std::vector<std::size_t> sample(R);
  for (int b = 0; b < opt.bootstrap; ++b) {
    for (auto& s : sample) s = pick(g);
    for (std::size_t k = 0; k < end; ++k) {
      double s = 0.0;
      for (auto r : sample) s += paths[r * K + k];
      means[k] = s / R;
    }
    const double r = slope(means);
    if (std::isfinite(r)) rates.push_back(r);
  }
  double m = 0.0, v = 0.0;
  for (double r : rates) m += r;
  m /= rates.size();
  for (double r : rates) v += (r - m) * (r - m);
  est.half_width = 1.96 * std::sqrt(v / std::max<std::size_t>(1, rates.size() - 1));
  return est;
}

}  // namespace nlbc
