#include "report_json.hpp"

namespace clawkit::cli {

Json to_json(const StructReport& r) {
  Json j;
  j["k_vanishes"] = r.k_vanishes;
  j["n_vanishes"] = r.n_vanishes ? Json(*r.n_vanishes) : Json(nullptr);
  j["g_quadratic_in_q"] = r.g_quadratic_in_q;
  j["normal_form"] = r.normal_form_detected ? Json(*r.normal_form_detected) : Json(nullptr);
  j["predicted_obstructions"] = r.predicted_obstructions;
  j["linear"] = r.linear;
  return j;
}

Json to_json(const ConservationLaw& l) {
  Json j;
  j["order"] = l.order;
  j["weight"] = l.weight;
  j["density"] = print(l.density);
  j["flux"] = print(l.flux);
  return j;
}

Json to_json(const SearchResult& r) {
  Json j;
  j["order"] = r.ansatz.m;
  j["ansatz"] = {{"d_x", r.ansatz.spec.d_x},
                 {"d_t", r.ansatz.spec.d_t},
                 {"d_u", r.ansatz.spec.d_u},
                 {"unknowns", r.ansatz.unknowns()}};
  Json atoms = Json::array();
  for (const auto& a : r.ansatz.spec.atoms) atoms.push_back(print(a));
  j["ansatz"]["atoms"] = atoms;
  Json tatoms = Json::array();
  for (const auto& a : r.ansatz.spec.time_atoms) tatoms.push_back(print(a));
  j["ansatz"]["time_atoms"] = tatoms;
  j["equations"] = r.equations;
  j["rank"] = r.rank;
  j["new_laws"] = r.count_at_order(r.ansatz.m);
  Json laws = Json::array();
  for (const auto& l : r.laws) laws.push_back(to_json(l));
  j["laws"] = laws;
  j["warnings"] = r.warnings;
  return j;
}

Json to_json(const TypeTriple& t) {
  Json j = Json::array({t.n_minus1, t.n1, t.n3});
  if (t.n5) j.push_back(*t.n5);
  return j;
}

Json to_json(const TypeReport& r) {
  Json j;
  j["type"] = to_json(r.type);
  Json runs = Json::array();
  for (const auto& s : r.runs) runs.push_back(to_json(s));
  j["runs"] = runs;
  j["warnings"] = r.warnings;
  return j;
}

Json to_json(const ProbeResult& r) {
  Json j;
  Json counts = Json::array();
  for (const auto& [order, count] : r.counts) {
    counts.push_back({{"order", order}, {"weight", weight_of_order(order)}, {"new_laws", count}});
  }
  j["counts"] = counts;
  j["warnings"] = r.warnings;
  return j;
}

Json to_json(const DriftReport& r) {
  Json j;
  j["times"] = r.times;
  Json series = Json::array();
  for (const auto& s : r.series) series.push_back({{"density", s.density}, {"drift", s.drift}, {"values", s.values}});
  j["series"] = series;
  j["max_drift"] = r.max_drift();
  return j;
}

Json to_json(const MomentSet& m) {
  return Json{{"length", m.length}, {"area", m.area},         {"mx", m.mx},
              {"my", m.my},         {"m2", m.m2}, {"degenerate", m.degenerate}};
}

namespace {

Json counts_json(const ExpectedCounts& e) {
  Json j = Json::object();
  if (e.n_minus1) j["n_minus1"] = *e.n_minus1;
  if (e.n1) j["n1"] = *e.n1;
  if (e.n3) j["n3"] = *e.n3;
  if (e.n5) j["n5"] = *e.n5;
  return j;
}

}  // namespace

Json to_json(const CatalogEntry& e) {
  Json j;
  j["id"] = e.id;
  j["f"] = e.f;
  j["g"] = e.g;
  Json b = Json::object();
  for (const auto& [k, v] : e.bindings) b[k] = to_string(v);
  j["bindings"] = b;
  j["expected"] = counts_json(e.expected);
  j["negative"] = e.negative;
  j["check_n5"] = e.check_n5;
  if (!e.notes.empty()) j["notes"] = e.notes;
  return j;
}

Json to_json(const EntryResult& r, bool timings) {
  Json j;
  j["id"] = r.id;
  j["pass"] = r.pass;
  j["observed"] = to_json(r.observed);
  j["k_vanishes"] = r.report.k_vanishes;
  j["diffs"] = r.diffs;
  if (timings) j["seconds"] = r.seconds;
  return j;
}

}  // namespace clawkit::cli
