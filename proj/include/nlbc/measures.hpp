#pragma once

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <fstream>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "axis.hpp"
#include "basis.hpp"
#include "common.hpp"
#include "domain.hpp"

namespace nlbc {

// exact p/q with q > 0, used for point-mass coordinates given as text
struct rational {
  std::int64_t num = 0;
  std::int64_t den = 1;

  double to_double() const { return double(num) / double(den); }

  static std::optional<rational> parse(std::string_view s) {
    auto trim = [](std::string_view v) {
      while (!v.empty() && std::isspace(static_cast<unsigned char>(v.front()))) v.remove_prefix(1);
      while (!v.empty() && std::isspace(static_cast<unsigned char>(v.back()))) v.remove_suffix(1);
      return v;
    };
    s = trim(s);
    if (s.empty()) return std::nullopt;
    rational r;
    if (auto slash = s.find('/'); slash != std::string_view::npos) {
      auto a = trim(s.substr(0, slash)), b = trim(s.substr(slash + 1));
      if (!parse_int(a, r.num) || !parse_int(b, r.den) || r.den == 0) return std::nullopt;
      if (r.den < 0) {
        r.num = -r.num;
        r.den = -r.den;
      }
      return r.reduced();
    }
    bool neg = false;
    if (s.front() == '-' || s.front() == '+') {
      neg = s.front() == '-';
      s.remove_prefix(1);
    }
    auto dot = s.find('.');
    std::string digits(s.substr(0, dot));
    std::size_t frac_len = 0;
    if (dot != std::string_view::npos) {
      auto frac = s.substr(dot + 1);
      frac_len = frac.size();
      digits += std::string(frac);
    }
    if (digits.empty() || digits.size() > 18 || frac_len > 17) return std::nullopt;
    for (char c : digits)
      if (c < '0' || c > '9') return std::nullopt;
    r.num = std::stoll(digits);
    r.den = 1;
    for (std::size_t k = 0; k < frac_len; ++k) r.den *= 10;
    if (neg) r.num = -r.num;
    return r.reduced();
  }

  rational reduced() const {
    std::int64_t g = std::gcd(num < 0 ? -num : num, den);
    if (g == 0) return *this;
    return {num / g, den / g};
  }

  // sin(n pi num/den) evaluated with exact integer argument reduction
  double sin_n_pi(int n) const {
    using i128 = __int128;
    const i128 q = den;
    i128 r = (i128(n) * i128(num)) % (2 * q);
    if (r < 0) r += 2 * q;
    // nearest multiple of q: sin(pi r/q) = (-1)^k sin(pi (r - kq)/q)
    i128 k = (2 * r + q) / (2 * q);
    i128 rem = r - k * q;
    double s = std::sin(pi * (double(rem) / double(den)));
    return (k % 2 == 0) ? s : -s;
  }

  bool sin_n_pi_zero(int n) const {
    using i128 = __int128;
    return (i128(n) * i128(num)) % i128(den) == 0;
  }

 private:
  static bool parse_int(std::string_view s, std::int64_t& out) {
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc() && p == s.data() + s.size();
  }
};

struct point_mass {
  std::vector<double> point;
  std::vector<std::optional<rational>> exact;  // per coordinate, if known exactly
};

struct lebesgue_normalized {};
struct reversible_measure {};
struct quasi_stationary {};

struct eigen_mixture {
  double epsilon = 0.0;
  int sign = +1;
};

// density w.r.t. dx on the uniform grid x_i = i/(m-1), i = 0..m-1 per axis
struct grid_density {
  std::vector<double> values;  // row-major, m^d entries
  std::size_t per_axis = 0;
  double renormalization = 1.0;  // factor applied at load
};

struct measure_coefficient {
  double value = 0.0;
  zero_state state = zero_state::nonzero;
};

class jump_measure {
 public:
  using variant_t = std::variant<point_mass, lebesgue_normalized, reversible_measure,
                                 quasi_stationary, eigen_mixture, grid_density>;

  jump_measure() : v_(lebesgue_normalized{}) {}
  explicit jump_measure(variant_t v) : v_(std::move(v)) {}

  static jump_measure lebesgue() { return jump_measure(lebesgue_normalized{}); }
  static jump_measure reversible() { return jump_measure(reversible_measure{}); }
  static jump_measure quasistationary() { return jump_measure(quasi_stationary{}); }
  static jump_measure mixture(double eps, int sign) { return jump_measure(eigen_mixture{eps, sign}); }

  static jump_measure delta(std::vector<double> p) {
    point_mass pm{std::move(p), {}};
    pm.exact.assign(pm.point.size(), std::nullopt);
    return jump_measure(std::move(pm));
  }

  static jump_measure delta(const std::vector<rational>& p) {
    point_mass pm;
    for (const auto& r : p) {
      pm.point.push_back(r.to_double());
      pm.exact.emplace_back(r);
    }
    return jump_measure(std::move(pm));
  }

  // grid values are renormalized to unit trapezoid mass
  static jump_measure grid(std::vector<double> values, std::size_t dim) {
    grid_density g;
    g.values = std::move(values);
    const double m = std::round(std::pow(double(g.values.size()), 1.0 / double(dim)));
    g.per_axis = std::size_t(m);
    if (dim < 1 || dim > 2) throw invalid_argument("grid density supports d = 1, 2");
    std::size_t expect = dim == 1 ? g.per_axis : g.per_axis * g.per_axis;
    if (g.per_axis < 3 || expect != g.values.size())
      throw invalid_argument("grid density needs m^d values with m >= 3");
    for (double v : g.values)
      if (!(v >= 0.0) || !std::isfinite(v)) throw invalid_argument("grid density must be nonnegative");
    double mass = grid_mass(g, dim);
    if (!(mass > 0.0)) throw invalid_argument("grid density has zero mass");
    for (double& v : g.values) v /= mass;
    g.renormalization = 1.0 / mass;
    return jump_measure(std::move(g));
  }

  static jump_measure grid_from_csv(const std::string& path, std::size_t dim) {
    std::ifstream in(path);
    if (!in) throw invalid_argument("cannot open grid file " + path);
    std::vector<double> vals;
    std::string line;
    while (std::getline(in, line)) {
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      vals.push_back(std::stod(line));
    }
    return grid(std::move(vals), dim);
  }

  const variant_t& variant() const { return v_; }

  template <class T>
  bool is() const {
    return std::holds_alternative<T>(v_);
  }

  std::string kind() const {
    return std::visit(
        [](const auto& m) -> std::string {
          using T = std::decay_t<decltype(m)>;
          if constexpr (std::is_same_v<T, point_mass>) return "delta";
          if constexpr (std::is_same_v<T, lebesgue_normalized>) return "lebesgue";
          if constexpr (std::is_same_v<T, reversible_measure>) return "reversible";
          if constexpr (std::is_same_v<T, quasi_stationary>) return "quasistationary";
          if constexpr (std::is_same_v<T, eigen_mixture>) return "mixture";
          if constexpr (std::is_same_v<T, grid_density>) return "grid";
        },
        v_);
  }

  // product of one-axis measures (enables the separable resolvent path)
  bool is_product() const {
    return is<point_mass>() || is<lebesgue_normalized>() || is<reversible_measure>();
  }

  // mass is carried by at most a few explicit eigenfunctions
  bool finite_spectral_support() const { return is<quasi_stationary>() || is<eigen_mixture>(); }

  bool has_l2_density() const { return !is<point_mass>(); }

  // warnings collected during construction
  std::vector<std::string> warnings() const {
    std::vector<std::string> w;
    if (auto* g = std::get_if<grid_density>(&v_))
      if (std::abs(g->renormalization - 1.0) > 1e-4)
        w.push_back("grid density renormalized by factor " + std::to_string(g->renormalization));
    return w;
  }

  void validate(const domain_spec& dom) const {
    dom.validate();
    std::visit(
        [&](const auto& m) {
          using T = std::decay_t<decltype(m)>;
          if constexpr (std::is_same_v<T, point_mass>) {
            if (!dom.interior(m.point))
              throw invalid_argument("point mass must be strictly inside the domain");
          } else if constexpr (std::is_same_v<T, eigen_mixture>) {
            if (!(m.epsilon > 0.0)) throw invalid_argument("mixture epsilon must be positive");
            if (m.sign != 1 && m.sign != -1) throw invalid_argument("mixture sign must be +1 or -1");
            if (mixture_min_on_grid(dom, m) < -1e-12)
              throw invalid_argument("mixture density is negative; reduce epsilon");
          } else if constexpr (std::is_same_v<T, grid_density>) {
            if (dom.dim() > 2) throw invalid_argument("grid density supports d = 1, 2");
            std::size_t expect = dom.dim() == 1 ? m.per_axis : m.per_axis * m.per_axis;
            if (expect != m.values.size()) throw invalid_argument("grid density does not match dimension");
          }
        },
        v_);
  }

  // G_n = int phi_n d nu, with a proof state for vanishing
  measure_coefficient G(const eigen_basis& basis, const eigen_entry& e) const {
    if (!basis.contains(e)) throw invalid_argument("entry does not belong to basis");
    const std::size_t d = basis.dim();
    return std::visit(
        [&](const auto& m) -> measure_coefficient {
          using T = std::decay_t<decltype(m)>;
          if constexpr (std::is_same_v<T, point_mass>) {
            double v = 1.0;
            bool all_exact = true;
            for (std::size_t j = 0; j < d; ++j) {
              const auto& ax = basis.axis(j);
              const int n = e.index[j];
              if (m.exact[j]) {
                if (m.exact[j]->sin_n_pi_zero(n)) return {0.0, zero_state::exact_zero};
                v *= ax.amplitude() * std::exp(-ax.drift() * m.point[j]) * m.exact[j]->sin_n_pi(n);
              } else {
                all_exact = false;
                v *= ax.value(n, m.point[j]);
              }
            }
            return {v, all_exact ? zero_state::nonzero : classify_numeric(v)};
          } else if constexpr (std::is_same_v<T, lebesgue_normalized>) {
            double v = 1.0;
            for (std::size_t j = 0; j < d; ++j) {
              if (basis.axis(j).lebesgue_exact_zero(e.index[j])) return {0.0, zero_state::exact_zero};
              v *= basis.axis(j).lebesgue_integral(e.index[j]);
            }
            return {v, zero_state::nonzero};
          } else if constexpr (std::is_same_v<T, reversible_measure>) {
            return {e.F, e.F_state};
          } else if constexpr (std::is_same_v<T, quasi_stationary>) {
            if (is_ground(e)) return {1.0 / ground_F(basis.domain()), zero_state::nonzero};
            return {0.0, zero_state::exact_zero};
          } else if constexpr (std::is_same_v<T, eigen_mixture>) {
            const auto mc = mixture_constants(basis.domain(), m);
            if (is_ground(e)) return {mc.c, zero_state::nonzero};
            if (e.index == basis.second_index())
              return {m.sign * mc.orient * mc.c * m.epsilon, zero_state::nonzero};
            return {0.0, zero_state::exact_zero};
          } else {
            double v = grid_inner(basis, e, m);
            return {v, classify_numeric(v)};
          }
        },
        v_);
  }

  // sum_n G_n^2 = || d nu / d mu_rev ||^2 in L2(mu_rev), when finite
  std::optional<double> l2_norm2(const domain_spec& dom) const {
    return std::visit(
        [&](const auto& m) -> std::optional<double> {
          using T = std::decay_t<decltype(m)>;
          if constexpr (std::is_same_v<T, point_mass>) {
            return std::nullopt;
          } else if constexpr (std::is_same_v<T, lebesgue_normalized>) {
            double s = 1.0;
            for (const auto& f : dom.factors) s *= exprel(2.0 * f.drift) * exprel(-2.0 * f.drift);
            return s;
          } else if constexpr (std::is_same_v<T, reversible_measure>) {
            return 1.0;
          } else if constexpr (std::is_same_v<T, quasi_stationary>) {
            double f0 = ground_F(dom);
            return 1.0 / (f0 * f0);
          } else if constexpr (std::is_same_v<T, eigen_mixture>) {
            auto mc = mixture_constants(dom, m);
            return mc.c * mc.c * (1.0 + m.epsilon * m.epsilon);
          } else {
            return grid_l2(dom, m);
          }
        },
        v_);
  }

  // Lebesgue density of nu at x (not defined for point masses)
  double density(const domain_spec& dom, std::span<const double> x) const {
    return std::visit(
        [&](const auto& m) -> double {
          using T = std::decay_t<decltype(m)>;
          if constexpr (std::is_same_v<T, point_mass>) {
            throw invalid_argument("point mass has no density");
          } else if constexpr (std::is_same_v<T, lebesgue_normalized>) {
            return 1.0;
          } else if constexpr (std::is_same_v<T, reversible_measure>) {
            double r = 1.0;
            for (std::size_t j = 0; j < dom.dim(); ++j) r *= axis_modes(dom.factors[j].drift).reversible_density(x[j]);
            return r;
          } else if constexpr (std::is_same_v<T, quasi_stationary>) {
            return std::max(0.0, ground_value(dom, x) * rev_density(dom, x) / ground_F(dom));
          } else if constexpr (std::is_same_v<T, eigen_mixture>) {
            auto mc = mixture_constants(dom, m);
            double v = ground_value(dom, x) + m.sign * mc.orient * m.epsilon * second_value(dom, x);
            return std::max(0.0, mc.c * v * rev_density(dom, x));
          } else {
            return grid_interp(m, dom.dim(), x);
          }
        },
        v_);
  }

  // one-axis density factors for product measures with densities
  bool product_density() const {
    return is<lebesgue_normalized>() || is<reversible_measure>() || is<quasi_stationary>();
  }

  double axis_density(const domain_spec& dom, std::size_t j, double x) const {
    axis_modes ax(dom.factors[j].drift);
    if (is<lebesgue_normalized>()) return 1.0;
    if (is<reversible_measure>()) return ax.reversible_density(x);
    if (is<quasi_stationary>())
      return std::max(0.0, ax.value(1, x) * ax.reversible_density(x) / ax.F(1));
    throw invalid_argument("measure is not a product of axis densities");
  }

  std::string describe() const {
    return std::visit(
        [&](const auto& m) -> std::string {
          using T = std::decay_t<decltype(m)>;
          if constexpr (std::is_same_v<T, point_mass>) {
            std::string s = "delta:";
            for (std::size_t j = 0; j < m.point.size(); ++j) {
              if (j) s += ",";
              if (m.exact[j]) {
                s += std::to_string(m.exact[j]->num);
                if (m.exact[j]->den != 1) s += "/" + std::to_string(m.exact[j]->den);
              } else {
                std::ostringstream o;
                o.precision(17);
                o << m.point[j];
                s += o.str();
              }
            }
            return s;
          } else if constexpr (std::is_same_v<T, eigen_mixture>) {
            std::ostringstream o;
            o.precision(17);
            o << "mixture:" << m.epsilon << "," << (m.sign > 0 ? "+" : "-");
            return o.str();
          } else {
            return kind();
          }
        },
        v_);
  }

  // F of the ground entry (1,...,1)
  static double ground_F(const domain_spec& dom) {
    double f = 1.0;
    for (const auto& fac : dom.factors) f *= axis_modes(fac.drift).F(1);
    return f;
  }

  // F of the canonical second entry (1,...,1,2)
  static double second_F(const domain_spec& dom) {
    double f = 1.0;
    for (std::size_t j = 0; j < dom.dim(); ++j)
      f *= axis_modes(dom.factors[j].drift).F(j + 1 == dom.dim() ? 2 : 1);
    if (dom.factors.back().drift == 0.0) return 0.0;
    return f;
  }

  static double ground_value(const domain_spec& dom, std::span<const double> x) {
    double v = 1.0;
    for (std::size_t j = 0; j < dom.dim(); ++j) v *= axis_modes(dom.factors[j].drift).value(1, x[j]);
    return v;
  }

  static double second_value(const domain_spec& dom, std::span<const double> x) {
    double v = 1.0;
    for (std::size_t j = 0; j < dom.dim(); ++j)
      v *= axis_modes(dom.factors[j].drift).value(j + 1 == dom.dim() ? 2 : 1, x[j]);
    return v;
  }

  static double rev_density(const domain_spec& dom, std::span<const double> x) {
    double r = 1.0;
    for (std::size_t j = 0; j < dom.dim(); ++j) r *= axis_modes(dom.factors[j].drift).reversible_density(x[j]);
    return r;
  }

  struct mixture_consts {
    double c;       // normalizing constant
    double orient;  // +-1, so that orient * F_1 >= 0
  };

  static mixture_consts mixture_constants(const domain_spec& dom, const eigen_mixture& m) {
    double f0 = ground_F(dom), f1 = second_F(dom);
    double orient = f1 < 0.0 ? -1.0 : 1.0;
    return {1.0 / (f0 + m.sign * m.epsilon * std::abs(f1)), orient};
  }

  // validation grid with about 10^4 points
  static std::vector<std::vector<double>> validation_grid(std::size_t d) {
    std::size_t k = std::max<std::size_t>(2, std::size_t(std::ceil(std::pow(1e4, 1.0 / double(d)))));
    std::vector<std::vector<double>> pts;
    std::vector<std::size_t> c(d, 0);
    while (true) {
      std::vector<double> x(d);
      for (std::size_t j = 0; j < d; ++j) x[j] = (double(c[j]) + 0.5) / double(k);
      pts.push_back(std::move(x));
      std::size_t j = 0;
      while (j < d && ++c[j] == k) c[j++] = 0;
      if (j == d) break;
    }
    return pts;
  }

 private:
  static bool is_ground(const eigen_entry& e) {
    return std::all_of(e.index.begin(), e.index.end(), [](int n) { return n == 1; });
  }

  static double mixture_min_on_grid(const domain_spec& dom, const eigen_mixture& m) {
    auto mc = mixture_constants(dom, m);
    double lo = std::numeric_limits<double>::infinity();
    for (const auto& x : validation_grid(dom.dim()))
      lo = std::min(lo, ground_value(dom, x) + m.sign * mc.orient * m.epsilon * second_value(dom, x));
    return lo;
  }

  static std::vector<double> trapezoid_weights(std::size_t m) {
    std::vector<double> w(m, 1.0 / double(m - 1));
    w.front() *= 0.5;
    w.back() *= 0.5;
    return w;
  }

  static double grid_mass(const grid_density& g, std::size_t d) {
    auto w = trapezoid_weights(g.per_axis);
    double s = 0.0;
    if (d == 1) {
      for (std::size_t i = 0; i < g.per_axis; ++i) s += w[i] * g.values[i];
    } else {
      for (std::size_t i = 0; i < g.per_axis; ++i)
        for (std::size_t k = 0; k < g.per_axis; ++k) s += w[i] * w[k] * g.values[i * g.per_axis + k];
    }
    return s;
  }

  static double grid_inner(const eigen_basis& basis, const eigen_entry& e, const grid_density& g) {
    const std::size_t m = g.per_axis;
    auto w = trapezoid_weights(m);
    auto node = [&](std::size_t i) { return double(i) / double(m - 1); };
    if (basis.dim() == 1) {
      double s = 0.0;
      for (std::size_t i = 1; i + 1 < m; ++i) s += w[i] * g.values[i] * basis.axis(0).value(e.index[0], node(i));
      return s;
    }
    if (basis.dim() != 2) throw invalid_argument("grid density supports d = 1, 2");
    std::vector<double> p0(m, 0.0), p1(m, 0.0);
    for (std::size_t i = 1; i + 1 < m; ++i) {
      p0[i] = basis.axis(0).value(e.index[0], node(i));
      p1[i] = basis.axis(1).value(e.index[1], node(i));
    }
    double s = 0.0;
    for (std::size_t i = 1; i + 1 < m; ++i)
      for (std::size_t k = 1; k + 1 < m; ++k) s += w[i] * w[k] * g.values[i * m + k] * p0[i] * p1[k];
    return s;
  }

  static double grid_l2(const domain_spec& dom, const grid_density& g) {
    const std::size_t m = g.per_axis;
    auto w = trapezoid_weights(m);
    auto node = [&](std::size_t i) { return double(i) / double(m - 1); };
    double s = 0.0;
    if (dom.dim() == 1) {
      axis_modes a(dom.factors[0].drift);
      for (std::size_t i = 0; i < m; ++i) s += w[i] * g.values[i] * g.values[i] / a.reversible_density(node(i));
      return s;
    }
    axis_modes a0(dom.factors[0].drift), a1(dom.factors[1].drift);
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t k = 0; k < m; ++k) {
        double v = g.values[i * m + k];
        s += w[i] * w[k] * v * v / (a0.reversible_density(node(i)) * a1.reversible_density(node(k)));
      }
    return s;
  }

  static double grid_interp(const grid_density& g, std::size_t d, std::span<const double> x) {
    const std::size_t m = g.per_axis;
    auto locate = [&](double t, std::size_t& i, double& f) {
      double u = std::clamp(t, 0.0, 1.0) * double(m - 1);
      i = std::min<std::size_t>(std::size_t(u), m - 2);
      f = u - double(i);
    };
    std::size_t i, k;
    double fi, fk;
    locate(x[0], i, fi);
    if (d == 1) return (1 - fi) * g.values[i] + fi * g.values[i + 1];
    locate(x[1], k, fk);
    auto at = [&](std::size_t a, std::size_t b) { return g.values[a * m + b]; };
    return (1 - fi) * ((1 - fk) * at(i, k) + fk * at(i, k + 1)) + fi * ((1 - fk) * at(i + 1, k) + fk * at(i + 1, k + 1));
  }

  variant_t v_;
};

inline measure_coefficient coefficient_G(const jump_measure& nu, const eigen_basis& basis,
                                         const eigen_entry& e) {
  return nu.G(basis, e);
}

// 0.9 times the largest eps with phi_0 +- eps phi_1 >= 0 on the validation grid
inline double max_safe_epsilon(const eigen_basis& basis) {
  if (basis.size() < 2) throw invalid_argument("basis needs at least two entries");
  const auto& dom = basis.domain();
  double best = std::numeric_limits<double>::infinity();
  for (const auto& x : jump_measure::validation_grid(dom.dim())) {
    double p1 = std::abs(jump_measure::second_value(dom, x));
    if (p1 > 0.0) best = std::min(best, jump_measure::ground_value(dom, x) / p1);
  }
  if (!std::isfinite(best)) throw std::logic_error("second eigenfunction vanishes on the grid");
  return 0.9 * best;
}

// Parse "kind:params": delta:x[,y], lebesgue, reversible, quasistationary,
// mixture:eps,sign, grid:path
inline jump_measure parse_measure(const std::string& spec, std::size_t dim) {
  auto colon = spec.find(':');
  std::string kind = spec.substr(0, colon);
  std::string params = colon == std::string::npos ? "" : spec.substr(colon + 1);
  auto split = [](const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(item);
    return out;
  };
  if (kind == "delta") {
    auto parts = split(params);
    if (parts.size() != dim) throw invalid_argument("delta needs " + std::to_string(dim) + " coordinates");
    std::vector<rational> exact;
    bool all_exact = true;
    std::vector<double> pt;
    for (const auto& p : parts) {
      auto r = rational::parse(p);
      if (r) {
        exact.push_back(*r);
        pt.push_back(r->to_double());
      } else {
        all_exact = false;
        try {
          pt.push_back(std::stod(p));
        } catch (const std::exception&) {
          throw invalid_argument("bad coordinate '" + p + "'");
        }
      }
    }
    if (all_exact) return jump_measure::delta(exact);
    return jump_measure::delta(pt);
  }
  if (!params.empty() && kind != "mixture" && kind != "grid")
    throw invalid_argument("measure '" + kind + "' takes no parameters");
  if (kind == "lebesgue") return jump_measure::lebesgue();
  if (kind == "reversible") return jump_measure::reversible();
  if (kind == "quasistationary" || kind == "qs") return jump_measure::quasistationary();
  if (kind == "mixture") {
    auto parts = split(params);
    if (parts.size() != 2) throw invalid_argument("mixture needs eps,sign");
    int sign = 0;
    if (parts[1] == "+" || parts[1] == "1" || parts[1] == "+1") sign = 1;
    if (parts[1] == "-" || parts[1] == "-1") sign = -1;
    if (sign == 0) throw invalid_argument("mixture sign must be + or -");
    double e;
    try {
      e = std::stod(parts[0]);
    } catch (const std::exception&) {
      throw invalid_argument("bad mixture epsilon '" + parts[0] + "'");
    }
    return jump_measure::mixture(e, sign);
  }
  if (kind == "grid") return jump_measure::grid_from_csv(params, dim);
  throw invalid_argument("unknown measure kind '" + kind + "'");
}

}  // namespace nlbc
