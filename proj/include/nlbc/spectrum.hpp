#pragma once

#include <algorithm>
#include <optional>
#include <string>
#include <vector>

#include "basis.hpp"
#include "efunction.hpp"
#include "measures.hpp"
#include "roots.hpp"

namespace nlbc {

enum class provenance { e_root, dirichlet_rule };

inline const char* to_string(provenance p) { return p == provenance::e_root ? "E-root" : "dirichlet-rule"; }

struct spectral_value {
  cplx value;
  int multiplicity = 1;
  provenance origin = provenance::e_root;
  bool multiplicity_certain = true;
  double half_width = 0.0;
};

// How one Dirichlet cluster was classified.
struct cluster_decision {
  double lambda = 0.0;
  int level = 0;
  int d_n = 0;
  zero_state F = zero_state::nonzero;
  zero_state G = zero_state::nonzero;
  std::optional<real_estimate> E_at;  // only evaluated when both clusters vanish
  int multiplicity = 0;               // 0: not an eigenvalue
  bool certain = true;
  std::string rule;
};

struct spectrum_report {
  double lambda0 = 0.0;
  double lambda1 = 0.0;
  double floor = 0.0;
  std::vector<spectral_value> eigenvalues;  // real part decreasing
  std::optional<double> gap;
  std::string characterization = "complete";
  bool assumption1_certified = true;
  std::string real_maximizer = "sign-conditions";  // sign-conditions | contour | unverified | skipped
  std::optional<contour_count> maximizer_contour;
  bool indeterminate = false;
  std::vector<std::string> issues;
  std::vector<cluster_decision> clusters;
  std::string e_strategy;

  bool certified() const { return !indeterminate; }

  // gap strictly below lambda_0 whenever the maximizer is real
  bool upper_bound_holds() const { return !gap || *gap < lambda0; }

  // eigenvalues repeated by multiplicity, real part decreasing
  std::vector<cplx> expanded() const {
    std::vector<cplx> v;
    for (const auto& e : eigenvalues)
      for (int k = 0; k < e.multiplicity; ++k) v.push_back(e.value);
    return v;
  }
};

struct report_options {
  scan_options scan{};
  bool complex_check = true;
  double contour_height_factor = 20.0;  // |Im| <= factor * |lambda_0|
};

namespace detail {

// measures whose products F_n G_n are all >= 0 or at most two are nonzero
inline bool real_spectrum_by_sign_conditions(const efunction& ef) {
  const auto& nu = ef.measure();
  if (nu.is<reversible_measure>() || nu.finite_spectral_support()) return true;
  if (nu.is<lebesgue_normalized>() && ef.domain().zero_drift()) return true;
  return false;
}

}  // namespace detail

inline spectrum_report spectrum_report_for(const efunction& ef, double search_floor, report_options opt = {}) {
  spectrum_report rep;
  rep.lambda0 = ef.lambda0();
  rep.lambda1 = ef.lambda1();
  rep.floor = search_floor;
  rep.e_strategy = ef.strategy_label();
  if (!(search_floor < rep.lambda0)) throw invalid_argument("search floor must lie below lambda_0");
  if (!(search_floor > ef.resolved_floor()))
    throw invalid_argument("basis cutoff too small: clusters above the floor are incomplete");

  const double scale = std::abs(rep.lambda0);
  const double ex = opt.scan.exclusion * scale;

  // (a) roots of E away from the Dirichlet eigenvalues
  auto scan = real_roots(ef, search_floor, -ex, opt.scan);
  for (const auto& r : scan.roots) rep.eigenvalues.push_back({cplx(r.value, 0.0), 1, provenance::e_root, true, r.half_width});
  for (const auto& s : scan.suspects) {
    rep.indeterminate = true;
    rep.issues.push_back("suspect root bracket [" + std::to_string(s.lo) + ", " + std::to_string(s.hi) + "]: " + s.reason);
  }

  // (b) multiplicity table at each Dirichlet eigenvalue
  for (const auto& c : ef.clusters()) {
    if (c.lambda <= search_floor) continue;
    if (c.level == int(ef.dim())) continue;  // lambda_0 is never an eigenvalue
    cluster_decision dec;
    dec.lambda = c.lambda;
    dec.level = c.level;
    dec.d_n = c.multiplicity;
    dec.F = c.F_state;
    dec.G = c.G_state;
    const bool f0 = c.F_state == zero_state::exact_zero, g0 = c.G_state == zero_state::exact_zero;
    const bool f1 = c.F_state == zero_state::nonzero, g1 = c.G_state == zero_state::nonzero;
    if (f1 && g1) {
      dec.multiplicity = c.multiplicity - 1;
      dec.rule = "both clusters nonzero: d_n - 1";
    } else if ((f0 && g1) || (f1 && g0)) {
      dec.multiplicity = c.multiplicity;
      dec.rule = "one cluster vanishes: d_n";
    } else if (f0 && g0) {
      auto e = ef(c.lambda);
      dec.E_at = e;
      auto proof = ef.removable_value_state(c);
      if (proof == zero_state::exact_zero) {
        dec.multiplicity = c.multiplicity + 1;
        dec.rule = "both vanish, E(Lambda) = 0 in closed form: d_n + 1";
      } else if (proof == zero_state::nonzero || std::abs(e.value) > e.error) {
        dec.multiplicity = c.multiplicity;
        dec.rule = "both vanish, E(Lambda) != 0: d_n";
      } else {
        dec.multiplicity = c.multiplicity;
        dec.certain = false;
        dec.rule = "both vanish, E(Lambda) not separated from 0: d_n or d_n + 1";
        rep.indeterminate = true;
        rep.issues.push_back("E at Dirichlet eigenvalue " + std::to_string(c.lambda) + " is within its error bound of 0");
      }
    } else {
      dec.certain = false;
      dec.multiplicity = 0;
      dec.rule = "coefficient below threshold without proof of vanishing";
      rep.indeterminate = true;
      rep.issues.push_back("undecidable cluster at " + std::to_string(c.lambda));
    }
    if (dec.multiplicity > 0)
      rep.eigenvalues.push_back({cplx(c.lambda, 0.0), dec.multiplicity, provenance::dirichlet_rule, dec.certain, 0.0});
    rep.clusters.push_back(dec);
  }
  std::sort(rep.eigenvalues.begin(), rep.eigenvalues.end(),
            [](const spectral_value& a, const spectral_value& b) { return a.value.real() > b.value.real(); });
  if (!rep.eigenvalues.empty()) rep.gap = rep.eigenvalues.front().value.real();
  if (!rep.gap) {
    rep.indeterminate = true;
    rep.issues.push_back("no eigenvalue above the search floor");
  }

  // (c) characterization and the real-maximizer check
  rep.assumption1_certified = ef.assumption1_certified();
  rep.characterization =
      (ef.measure().has_l2_density() || rep.assumption1_certified) ? "complete" : "eigenvalues-only";
  if (detail::real_spectrum_by_sign_conditions(ef)) {
    rep.real_maximizer = "sign-conditions";
  } else if (!opt.complex_check || !rep.gap) {
    rep.real_maximizer = "skipped";
  } else {
    double lo = *rep.gap + 1e-3 * scale;
    for (double p : ef.poles())
      if (std::abs(p - lo) <= 1e-5 * scale) lo += 2e-5 * scale;
    rectangle box{lo, -1e-3 * scale, opt.contour_height_factor * scale};
    try {
      auto cc = complex_root_count(ef, box);
      rep.maximizer_contour = cc;
      if (cc.rouche_certified && cc.zeros == 0) {
        rep.real_maximizer = "contour";
      } else {
        rep.real_maximizer = "unverified";
        if (cc.zeros != 0)
          rep.issues.push_back(std::to_string(cc.zeros) + " zero(s) of E with real part above the real gap candidate");
        else
          rep.issues.push_back("contour check not certified by the error bound");
      }
    } catch (const std::exception& e) {
      rep.real_maximizer = "unverified";
      rep.issues.push_back(std::string("contour check failed: ") + e.what());
    }
  }
  return rep;
}

inline spectrum_report spectrum_report_for(const eigen_basis& basis, const jump_measure& nu, double search_floor,
                                           report_options opt = {}) {
  return spectrum_report_for(efunction(basis, nu), search_floor, opt);
}

}  // namespace nlbc
