#pragma once

#include <json.hpp>

#include <chrono>
#include <ctime>
#include <ostream>
#include <string>
#include <vector>

#include "basis.hpp"
#include "fd_oracle.hpp"
#include "series.hpp"
#include "simulation.hpp"
#include "spectrum.hpp"

namespace nlbc {

using json = nlohmann::ordered_json;

inline constexpr int json_schema = 1;

// Top-level document: schema first, metadata (wall-clock data) kept apart from results.
inline json make_document(const std::string& command) {
  json j;
  j["schema"] = json_schema;
  j["command"] = command;
  return j;
}

inline void attach_metadata(json& doc) {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  doc["metadata"] = {{"generated_at", buf}, {"tool", "nlbc"}};
}

// copy without the metadata block, for byte comparison of reruns
inline json without_metadata(json doc) {
  doc.erase("metadata");
  return doc;
}

inline json to_json(cplx z) { return json{{"re", z.real()}, {"im", z.imag()}}; }

inline json to_json(const domain_spec& d) {
  json drifts = json::array();
  for (const auto& f : d.factors) drifts.push_back(f.drift);
  return json{{"dim", d.dim()}, {"drift", drifts}};
}

inline json to_json(const eigen_basis& b) {
  json j;
  j["domain"] = to_json(b.domain());
  j["cutoff"] = b.cutoff();
  if (b.max_level()) j["max_level"] = *b.max_level();
  j["complete_through_level"] = b.complete_through_level();
  json entries = json::array();
  for (const auto& e : b.entries())
    entries.push_back({{"index", e.index}, {"level", e.level}, {"lambda", e.lambda}, {"F", e.F}, {"F_state", to_string(e.F_state)}});
  j["entries"] = std::move(entries);
  return j;
}

inline json to_json(const contour_count& c) {
  return json{{"winding", c.winding},         {"poles_inside", c.poles_inside},
              {"zeros", c.zeros},             {"rouche_certified", c.rouche_certified},
              {"min_modulus_margin", c.min_modulus_margin}, {"evaluations", c.evaluations}};
}

inline json to_json(const spectrum_report& r) {
  json j;
  j["lambda0"] = r.lambda0;
  j["lambda1"] = r.lambda1;
  j["floor"] = r.floor;
  j["gap"] = r.gap ? json(*r.gap) : json(nullptr);
  j["certified"] = r.certified();
  j["e_strategy"] = r.e_strategy;
  j["characterization"] = r.characterization;
  j["assumption1_certified"] = r.assumption1_certified;
  j["real_maximizer"] = r.real_maximizer;
  if (r.maximizer_contour) j["maximizer_contour"] = to_json(*r.maximizer_contour);
  json ev = json::array();
  for (const auto& v : r.eigenvalues)
    ev.push_back({{"re", v.value.real()},
                  {"im", v.value.imag()},
                  {"multiplicity", v.multiplicity},
                  {"multiplicity_certain", v.multiplicity_certain},
                  {"provenance", to_string(v.origin)},
                  {"half_width", v.half_width}});
  j["eigenvalues"] = std::move(ev);
  json cl = json::array();
  for (const auto& c : r.clusters) {
    json x{{"lambda", c.lambda}, {"level", c.level},  {"d_n", c.d_n},
           {"F", to_string(c.F)}, {"G", to_string(c.G)}, {"multiplicity", c.multiplicity},
           {"certain", c.certain}, {"rule", c.rule}};
    if (c.E_at) x["E_at"] = {{"value", c.E_at->value}, {"error", c.E_at->error}};
    cl.push_back(std::move(x));
  }
  j["clusters"] = std::move(cl);
  j["issues"] = r.issues;
  return j;
}

inline json to_json(const hd_result& h) {
  json j{{"d", h.d}, {"value_lo", h.value_lo}, {"value_hi", h.value_hi}, {"method", to_string(h.method)}};
  j["verdict"] = to_string(h.verdict_or_none());
  return j;
}

inline json to_json(const sim_result& r) {
  return json{{"dim", r.dim},
              {"bins_per_axis", r.bins_per_axis},
              {"steps", r.steps},
              {"occupation_samples", r.occupation_samples},
              {"jumps_observed", r.jumps_observed},
              {"histogram", r.histogram},
              {"invariant_estimate", r.invariant_estimate}};
}

inline json to_json(const mixing_estimate& m) {
  return json{{"rate", m.rate}, {"half_width", m.half_width}, {"window_end", m.window_end}};
}

inline json to_json(const std::vector<cplx>& v) {
  json a = json::array();
  for (auto z : v) a.push_back(to_json(z));
  return a;
}

inline void write_csv(const std::vector<hd_result>& rows, std::ostream& os) {
  os.precision(17);
  os << "d,value_lo,value_hi,method,verdict\n";
  for (const auto& h : rows)
    os << h.d << ',' << h.value_lo << ',' << h.value_hi << ',' << to_string(h.method) << ','
       << to_string(h.verdict_or_none()) << '\n';
}

inline void write_csv(const spectrum_report& r, std::ostream& os) {
  os.precision(17);
  os << "re,im,multiplicity,provenance,multiplicity_certain,half_width\n";
  for (const auto& v : r.eigenvalues)
    os << v.value.real() << ',' << v.value.imag() << ',' << v.multiplicity << ',' << to_string(v.origin) << ','
       << (v.multiplicity_certain ? "true" : "false") << ',' << v.half_width << '\n';
}

// bin centres with the occupation density
inline void write_csv(const sim_result& r, std::ostream& os) {
  os.precision(17);
  const int nb = r.bins_per_axis;
  if (r.dim == 1) {
    os << "x,density\n";
    for (int b = 0; b < nb; ++b) os << (b + 0.5) / nb << ',' << r.invariant_estimate[b] << '\n';
  } else {
    os << "x,y,density\n";
    for (int k = 0; k < nb; ++k)
      for (int b = 0; b < nb; ++b)
        os << (b + 0.5) / nb << ',' << (k + 0.5) / nb << ',' << r.invariant_estimate[std::size_t(k) * nb + b] << '\n';
  }
}

}  // namespace nlbc
