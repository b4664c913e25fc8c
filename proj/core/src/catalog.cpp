#include "clawkit/catalog.hpp"

#include <algorithm>
#include <chrono>

#include "catalog_data.hpp"
#include "clawkit/error.hpp"
#include "json.hpp"

namespace clawkit {

using nlohmann::json;

EvolutionEq CatalogEntry::equation() const {
  ParamTable pt;
  for (const auto& p : params) pt.declare(p);
  for (const auto& [name, v] : bindings) pt.bind(name, v);
  EvolutionEq eq = parse_equation(f, g, pt);
  eq.f = substitute(eq.f, pt);
  eq.g = substitute(eq.g, pt);
  return eq;
}

SearchOptions CatalogEntry::search_options(const SearchOptions& base) const {
  SearchOptions o = base;
  if (ansatz.d_x) o.d_x = std::max(o.d_x, *ansatz.d_x);
  if (ansatz.d_t) o.d_t = std::max(o.d_t, *ansatz.d_t);
  if (ansatz.d_u) o.d_u = *ansatz.d_u;
  for (const auto& a : ansatz.time_atoms) o.time_atoms.push_back(parse(a));
  return o;
}

namespace {

std::optional<int> opt_int(const json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<int>();
}

Rational parse_rational(const std::string& s) {
  Expr e = parse(s);
  auto v = e.constant_value();
  if (!v) throw Error("catalog binding is not a rational constant: " + s);
  return *v;
}

void load_group(const json& group, bool negative, std::vector<CatalogEntry>& out) {
  for (const auto& fam : group) {
    CatalogEntry base;
    base.family = fam.at("id").get<std::string>();
    base.f = fam.at("f").get<std::string>();
    base.g = fam.at("g").get<std::string>();
    base.params = fam.value("params", std::vector<std::string>{});
    base.negative = negative;
    base.expect_k_vanishes = fam.value("expect_k_vanishes", true);
    base.notes = fam.value("notes", std::string{});
    const json& ex = fam.at("expected");
    base.expected = {opt_int(ex, "n_minus1"), opt_int(ex, "n1"), opt_int(ex, "n3"), opt_int(ex, "n5")};
    auto constraints = fam.value("constraints", std::vector<std::string>{});
    for (const auto& inst : fam.at("instances")) {
      CatalogEntry e = base;
      e.label = inst.at("label").get<std::string>();
      e.id = e.family + "/" + e.label;
      for (const auto& [name, v] : inst.at("bindings").items()) e.bindings[name] = parse_rational(v.get<std::string>());
      e.check_n5 = inst.value("check_n5", false);
      if (inst.contains("notes")) e.notes += "; " + inst.at("notes").get<std::string>();
      if (inst.contains("ansatz")) {
        const json& a = inst.at("ansatz");
        e.ansatz.d_x = opt_int(a, "d_x");
        e.ansatz.d_t = opt_int(a, "d_t");
        e.ansatz.d_u = opt_int(a, "d_u");
        e.ansatz.time_atoms = a.value("time_atoms", std::vector<std::string>{});
      }
      ParamTable pt;
      for (const auto& p : e.params) pt.declare(p);
      for (const auto& [name, v] : e.bindings) {
        if (!pt.declared(name)) throw Error("catalog entry " + e.id + " binds undeclared parameter " + name);
        pt.bind(name, v);
      }
      if (!pt.free_names().empty()) throw Error("catalog entry " + e.id + " leaves parameters unbound");
      for (const auto& c : constraints) {
        if (substitute(parse(c, pt), pt).is_zero()) {
          throw Error("catalog entry " + e.id + " violates constraint " + c + " != 0");
        }
      }
      e.equation();
      out.push_back(std::move(e));
    }
  }
}

}  // namespace

std::vector<CatalogEntry> load_catalog(const std::string& json_text) {
  json j = json::parse(json_text);
  std::vector<CatalogEntry> out;
  load_group(j.at("families"), false, out);
  if (j.contains("negative")) load_group(j.at("negative"), true, out);
  return out;
}

const std::vector<CatalogEntry>& entries() {
  static const std::vector<CatalogEntry> list = load_catalog(kEmbeddedCatalog);
  return list;
}

bool RegressionReport::all_pass() const {
  return std::all_of(results.begin(), results.end(), [](const auto& r) { return r.pass; });
}

namespace {

void compare(const char* name, const std::optional<int>& want, int got, std::vector<std::string>& diffs) {
  if (want && *want != got) {
    diffs.push_back(std::string(name) + ": expected " + std::to_string(*want) + ", got " + std::to_string(got));
  }
}

EntryResult run_entry(const CatalogEntry& e, const RegressionOptions& opts) {
  auto t0 = std::chrono::steady_clock::now();
  EntryResult r;
  r.id = e.id;
  try {
    EvolutionEq eq = e.equation();
    r.report = structural_report(eq);
    if (r.report.k_vanishes != e.expect_k_vanishes) {
      r.diffs.push_back(std::string("k_vanishes: expected ") + (e.expect_k_vanishes ? "true" : "false"));
    }
    if (!e.negative) {
      if (r.report.n_vanishes != true) r.diffs.emplace_back("n_vanishes: expected true");
      if (!r.report.normal_form_detected) r.diffs.emplace_back("normal form not detected");
    }
    SearchOptions so = e.search_options(opts.search);
    int top = 0;
    if (e.expected.n1 || e.expected.n3) top = 2;
    bool n5 = opts.weight5 && e.check_n5 && e.expected.n5.has_value();
    if (n5) top = 3;
    std::vector<int> counts;
    for (int m = 0; m <= top; ++m) counts.push_back(solve_densities(eq, m, so).count_at_order(m));
    counts.resize(4, 0);
    r.observed.n_minus1 = counts[0];
    r.observed.n1 = counts[1];
    r.observed.n3 = counts[2];
    if (n5) r.observed.n5 = counts[3];
    compare("n_minus1", e.expected.n_minus1, counts[0], r.diffs);
    if (top >= 2) {
      compare("n1", e.expected.n1, counts[1], r.diffs);
      compare("n3", e.expected.n3, counts[2], r.diffs);
    }
    if (n5) compare("n5", e.expected.n5, counts[3], r.diffs);
  } catch (const std::exception& ex) {
    r.diffs.push_back(std::string("error: ") + ex.what());
  }
  r.pass = r.diffs.empty();
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

}  // namespace

RegressionReport run_regression(const std::vector<CatalogEntry>& list, const RegressionOptions& opts) {
  RegressionReport rep;
  for (const auto& e : list) {
    if (!opts.only.empty() && std::none_of(opts.only.begin(), opts.only.end(),
                                           [&](const std::string& p) { return e.id.rfind(p, 0) == 0; })) {
      continue;
    }
    if (opts.progress) opts.progress(e.id);
    rep.results.push_back(run_entry(e, opts));
  }
  return rep;
}

RegressionReport run_regression(const RegressionOptions& opts) { return run_regression(entries(), opts); }

}  // namespace clawkit
