#include "app.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "clawkit/catalog.hpp"
#include "clawkit/clawsearch.hpp"
#include "clawkit/curveflow.hpp"
#include "clawkit/error.hpp"
#include "clawkit/numeric.hpp"
#include "clawkit/pdesolve.hpp"
#include "clawkit/structclass.hpp"
#include "config_json.hpp"
#include "report_json.hpp"

namespace clawkit::cli {

namespace {

struct RunConfig {
  std::string format = "json";
  std::string output;

  // equation
  std::string f = "1";
  std::string g;
  std::vector<std::string> params;
  std::vector<std::string> bindings;

  // search
  int order = 0;
  int deg_x = 2;
  int deg_t = 2;
  std::optional<int> deg_u;
  std::vector<std::string> atoms;
  std::vector<std::string> time_atoms;
  int closure = 1;
  std::size_t basis_cap = 20000;
  bool full_basis = false;
  std::string route = "euler";
  std::optional<int> jet_cap;
  bool weight5 = false;
  int max_order = 3;

  // verify
  double length = 80.0;
  int points = 512;
  double step = 1e-3;
  double horizon = 1.0;
  std::string u0 = "3*sech(x/2)^2";
  std::vector<std::string> densities;
  int laws_order = 1;
  double tolerance = 1e-6;
  double floor = 1e-8;
  int record_every = 100;
  bool allow_x = false;

  // curveflow
  std::string curve_x = "cos(theta)";
  std::string curve_y = "sin(theta)";
  std::string input;
  int samples = 256;
  double curve_step = 1e-3;
  double curve_horizon = 0.5;
  int curve_record_every = 50;
  bool no_redistribute = false;
  std::string states_path;
  std::string moments_path;
  std::string svg_path;
  bool fit = false;
  double moment_tolerance = 1e-3;

  // catalog
  std::vector<std::string> only;
  std::string catalog_file;
  bool timings = false;
  bool progress = false;
};

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

ParamTable param_table(const RunConfig& cfg) {
  ParamTable pt;
  for (const auto& p : cfg.params) pt.declare(p);
  for (const auto& b : cfg.bindings) {
    auto eq = b.find('=');
    if (eq == std::string::npos || eq == 0) throw UsageError("binding \"" + b + "\" must look like name=value");
    std::string name = b.substr(0, eq);
    auto value = parse(b.substr(eq + 1)).constant_value();
    if (!value) throw UsageError("binding \"" + b + "\" needs a rational value");
    pt.declare(name);
    pt.bind(name, *value);
  }
  return pt;
}

EvolutionEq equation(const RunConfig& cfg) {
  if (cfg.g.empty()) throw UsageError("--g is required");
  return parse_equation(cfg.f, cfg.g, param_table(cfg));
}

SearchOptions search_options(const RunConfig& cfg) {
  SearchOptions o;
  o.d_x = cfg.deg_x;
  o.d_t = cfg.deg_t;
  o.d_u = cfg.deg_u;
  if (!cfg.atoms.empty()) {
    std::vector<Expr> atoms;
    for (const auto& a : cfg.atoms) atoms.push_back(parse(a));
    o.atoms = atoms;
  }
  for (const auto& a : cfg.time_atoms) o.time_atoms.push_back(parse(a));
  o.atom_closure = cfg.closure;
  o.basis_cap = cfg.basis_cap;
  o.reduced_basis = !cfg.full_basis;
  o.route = cfg.route == "byparts" ? ResidualRoute::ByParts : ResidualRoute::Euler;
  if (cfg.jet_cap) o.jet_cap = *cfg.jet_cap;
  return o;
}

std::string csv_quote(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q += '"';
    q += c;
  }
  return q + "\"";
}

std::string number(double v) {
  std::ostringstream ss;
  ss << std::setprecision(17) << v;
  return ss.str();
}

std::string triple_text(const TypeTriple& t) {
  std::string s = "(" + std::to_string(t.n_minus1) + "," + std::to_string(t.n1) + "," + std::to_string(t.n3);
  if (t.n5) s += "," + std::to_string(*t.n5);
  return s + ")";
}

std::string kv_csv(const Json& j) {
  std::string s = "key,value\n";
  for (auto it = j.begin(); it != j.end(); ++it) {
    std::string v = it->is_string() ? it->get<std::string>() : it->dump();
    s += it.key() + "," + csv_quote(v) + "\n";
  }
  return s;
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw UsageError("cannot write " + path);
  f << text;
}

std::string laws_csv(const std::vector<ConservationLaw>& laws) {
  std::string s = "order,weight,density,flux\n";
  for (const auto& l : laws) {
    s += std::to_string(l.order) + "," + std::to_string(l.weight) + "," + csv_quote(print(l.density)) + "," +
         csv_quote(print(l.flux)) + "\n";
  }
  return s;
}

// --------------------------------------------------------------- commands

struct Outcome {
  std::string text;
  int code = 0;
};

Outcome cmd_classify(const RunConfig& cfg) {
  auto rep = structural_report(equation(cfg));
  Json j = to_json(rep);
  if (cfg.format == "csv") return {kv_csv(j)};
  if (cfg.format == "text") {
    std::ostringstream s;
    s << "K vanishes: " << (rep.k_vanishes ? "yes" : "no") << "\n";
    if (rep.n_vanishes) s << "N vanishes: " << (*rep.n_vanishes ? "yes" : "no") << "\n";
    if (rep.normal_form_detected) s << "normal form: u_t = " << *rep.normal_form_detected << "\n";
    s << "g quadratic in q: " << (rep.g_quadratic_in_q ? "yes" : "no") << "\n";
    for (const auto& o : rep.predicted_obstructions) s << "obstruction: " << o << "\n";
    if (rep.linear) s << "linear equation\n";
    return {s.str()};
  }
  return {j.dump(2) + "\n"};
}

Outcome cmd_search(const RunConfig& cfg) {
  auto res = solve_densities(equation(cfg), cfg.order, search_options(cfg));
  if (cfg.format == "csv") return {laws_csv(res.laws)};
  if (cfg.format == "text") {
    std::ostringstream s;
    s << "order " << cfg.order << ": " << res.count_at_order(cfg.order) << " new law(s), " << res.laws.size()
      << " independent density(ies), " << res.ansatz.unknowns() << " unknowns\n";
    for (const auto& l : res.laws) s << "  [" << l.order << "] rho = " << print(l.density) << "\n";
    for (const auto& w : res.warnings) s << "warning: " << w << "\n";
    return {s.str()};
  }
  return {to_json(res).dump(2) + "\n"};
}

Outcome cmd_type(const RunConfig& cfg) {
  auto rep = classify_type(equation(cfg), search_options(cfg), cfg.weight5);
  if (cfg.format == "csv") {
    std::string s = "order,weight,new_laws\n";
    for (const auto& r : rep.runs) {
      s += std::to_string(r.ansatz.m) + "," + std::to_string(weight_of_order(r.ansatz.m)) + "," +
           std::to_string(r.count_at_order(r.ansatz.m)) + "\n";
    }
    return {s};
  }
  if (cfg.format == "text") {
    std::ostringstream s;
    s << triple_text(rep.type) << "\n";
    for (const auto& r : rep.runs) {
      for (const auto& l : r.laws) {
        if (l.order == r.ansatz.m) s << "  weight " << l.weight << ": " << print(l.density) << "\n";
      }
    }
    for (const auto& w : rep.warnings) s << "warning: " << w << "\n";
    return {s.str()};
  }
  return {to_json(rep).dump(2) + "\n"};
}

Outcome cmd_probe(const RunConfig& cfg) {
  auto res = weight_sequence_probe(equation(cfg), cfg.max_order, search_options(cfg));
  if (cfg.format == "csv") {
    std::string s = "order,weight,new_laws\n";
    for (const auto& [o, c] : res.counts) {
      s += std::to_string(o) + "," + std::to_string(weight_of_order(o)) + "," + std::to_string(c) + "\n";
    }
    return {s};
  }
  if (cfg.format == "text") {
    std::ostringstream s;
    for (const auto& [o, c] : res.counts) s << "weight " << weight_of_order(o) << ": " << c << "\n";
    for (const auto& w : res.warnings) s << "warning: " << w << "\n";
    return {s.str()};
  }
  return {to_json(res).dump(2) + "\n"};
}

Outcome cmd_verify(const RunConfig& cfg) {
  EvolutionEq eq = equation(cfg);
  std::vector<Expr> densities;
  std::vector<std::string> warnings;
  if (!cfg.densities.empty()) {
    for (const auto& d : cfg.densities) densities.push_back(parse(d));
  } else {
    for (int m = 0; m <= cfg.laws_order; ++m) {
      for (const auto& law : solve_densities(eq, m, search_options(cfg)).laws) {
        if (law.order != m) continue;
        if (law.density.depends_on(Symbol::x())) {
          warnings.push_back("skipped x-dependent density " + print(law.density));
          continue;
        }
        densities.push_back(law.density);
      }
    }
  }
  if (densities.empty()) throw UsageError("no densities to monitor");
  NumericFormula u0(cfg.u0, {"x"});
  auto x = grid_points(cfg.length, cfg.points);
  std::vector<double> init(x.size());
  for (std::size_t j = 0; j < x.size(); ++j) init[j] = u0(x[j]);
  IntegrateOptions io;
  io.record_every = cfg.record_every;
  io.allow_x = cfg.allow_x;
  auto traj = integrate(eq, init, cfg.length, cfg.horizon, cfg.step, io);
  auto rep = monitor(traj, densities, cfg.floor);
  const bool ok = rep.max_drift() <= cfg.tolerance;
  if (!ok) warnings.push_back("drift exceeds tolerance " + number(cfg.tolerance));
  if (traj.indicative) warnings.push_back("sponge mode: results are indicative");

  Outcome out;
  out.code = ok ? 0 : 2;
  if (cfg.format == "csv") {
    std::string s = "time";
    for (std::size_t i = 0; i < rep.series.size(); ++i) s += ",I_" + std::to_string(i + 1);
    s += "\n";
    for (std::size_t r = 0; r < rep.times.size(); ++r) {
      s += number(rep.times[r]);
      for (const auto& ser : rep.series) s += "," + number(ser.values[r]);
      s += "\n";
    }
    out.text = s;
  } else if (cfg.format == "text") {
    std::ostringstream s;
    for (std::size_t i = 0; i < rep.series.size(); ++i) {
      s << "I_" << i + 1 << " = integral of " << rep.series[i].density << ": drift " << std::setprecision(3)
        << rep.series[i].drift << "\n";
    }
    s << (ok ? "PASS" : "FAIL") << "\n";
    for (const auto& w : warnings) s << "warning: " << w << "\n";
    out.text = s.str();
  } else {
    Json j = to_json(rep);
    j["tolerance"] = cfg.tolerance;
    j["pass"] = ok;
    j["indicative"] = traj.indicative;
    j["warnings"] = warnings;
    out.text = j.dump(2) + "\n";
  }
  return out;
}

CurveState read_curve_csv(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw UsageError("cannot read " + path);
  CurveState c;
  std::string line;
  while (std::getline(f, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ls(line);
    double x = 0, y = 0;
    if (!(ls >> x >> y)) {
      if (c.x.empty()) continue;  // header row
      throw UsageError("malformed curve sample: " + line);
    }
    c.x.push_back(x);
    c.y.push_back(y);
  }
  return c;
}

std::string svg(const std::vector<CurveState>& states) {
  double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
  for (const auto& s : states) {
    for (int j = 0; j < s.size(); ++j) {
      xmin = std::min(xmin, s.x[j]), xmax = std::max(xmax, s.x[j]);
      ymin = std::min(ymin, s.y[j]), ymax = std::max(ymax, s.y[j]);
    }
  }
  const double pad = 0.05 * std::max(xmax - xmin, ymax - ymin);
  std::ostringstream o;
  o << std::setprecision(6);
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"" << xmin - pad << " " << -(ymax + pad) << " "
    << xmax - xmin + 2 * pad << " " << ymax - ymin + 2 * pad << "\" width=\"600\" height=\"600\">\n";
  const std::size_t stride = std::max<std::size_t>(1, states.size() / 8);
  for (std::size_t i = 0; i < states.size(); i += stride) {
    const auto& s = states[i];
    double shade = states.size() > 1 ? static_cast<double>(i) / (states.size() - 1) : 1.0;
    o << "<polygon fill=\"none\" stroke=\"rgb(" << static_cast<int>(200 * (1 - shade)) << ",60,"
      << static_cast<int>(60 + 180 * shade) << ")\" stroke-width=\"" << 0.003 * (xmax - xmin) << "\" points=\"";
    for (int j = 0; j < s.size(); ++j) o << s.x[j] << "," << -s.y[j] << " ";
    o << "\"><title>t = " << s.t << "</title></polygon>\n";
  }
  o << "</svg>\n";
  return o.str();
}

Outcome cmd_curveflow(const RunConfig& cfg) {
  CurveState c;
  if (!cfg.input.empty()) {
    c = read_curve_csv(cfg.input);
  } else {
    NumericFormula fx(cfg.curve_x, {"theta"}), fy(cfg.curve_y, {"theta"});
    c = sample_curve([&](double th) { return fx(th); }, [&](double th) { return fy(th); }, cfg.samples);
  }
  EvolveOptions eo;
  eo.record_every = cfg.curve_record_every;
  eo.redistribute = !cfg.no_redistribute;
  auto traj = evolve(c, cfg.curve_horizon, cfg.curve_step, eo);

  std::vector<MomentSet> ms;
  for (const auto& s : traj.states) ms.push_back(moments(s));
  const MomentSet& m0 = ms.front();
  const double first_scale = std::fabs(m0.area) * m0.length / (2 * 3.14159265358979323846);
  auto drift = [&](double MomentSet::*field, double floor) {
    double d = 0.0;
    for (const auto& m : ms) d = std::max(d, std::fabs(m.*field - m0.*field));
    return d / std::max(std::fabs(m0.*field), floor);
  };
  Json drifts{{"length", drift(&MomentSet::length, 1e-300)},
              {"area", drift(&MomentSet::area, 1e-300)},
              {"mx", drift(&MomentSet::mx, first_scale)},
              {"my", drift(&MomentSet::my, first_scale)},
              {"m2", drift(&MomentSet::m2, 1e-300)}};
  double worst = 0.0;
  for (const auto& [k, v] : drifts.items()) worst = std::max(worst, v.get<double>());
  const bool ok = worst <= cfg.moment_tolerance;

  std::string moments_csv = "t,L,A,Mx,My,M2\n";
  for (std::size_t i = 0; i < ms.size(); ++i) {
    moments_csv += number(traj.states[i].t) + "," + number(ms[i].length) + "," + number(ms[i].area) + "," +
                   number(ms[i].mx) + "," + number(ms[i].my) + "," + number(ms[i].m2) + "\n";
  }
  if (!cfg.moments_path.empty()) write_file(cfg.moments_path, moments_csv);
  if (!cfg.states_path.empty()) {
    std::string s = "t,j,x,y\n";
    for (const auto& st : traj.states) {
      for (int j = 0; j < st.size(); ++j) {
        s += number(st.t) + "," + std::to_string(j) + "," + number(st.x[j]) + "," + number(st.y[j]) + "\n";
      }
    }
    write_file(cfg.states_path, s);
  }
  if (!cfg.svg_path.empty()) write_file(cfg.svg_path, svg(traj.states));

  std::optional<SelfSimilarFit> fit;
  if (cfg.fit) fit = fit_self_similar(traj.states.back());

  Outcome out;
  out.code = ok ? 0 : 2;
  if (cfg.format == "csv") {
    out.text = moments_csv;
  } else if (cfg.format == "text") {
    std::ostringstream s;
    s << std::setprecision(3);
    s << "states: " << traj.states.size() << ", final t = " << traj.states.back().t << "\n";
    for (const auto& [k, v] : drifts.items()) s << "drift " << k << ": " << v.get<double>() << "\n";
    if (traj.self_intersection) s << "self-intersection detected at t = " << *traj.self_intersection_time << "\n";
    if (fit) s << "self-similar fit: a0 = " << fit->a0 << ", a1 = " << fit->a1 << ", a2 = " << fit->a2
               << ", residual " << fit->residual << "\n";
    s << (ok ? "PASS" : "FAIL") << "\n";
    out.text = s.str();
  } else {
    Json j;
    j["samples"] = c.size();
    j["states"] = traj.states.size();
    j["final_time"] = traj.states.back().t;
    j["initial_moments"] = to_json(ms.front());
    j["final_moments"] = to_json(ms.back());
    j["drift"] = drifts;
    j["tolerance"] = cfg.moment_tolerance;
    j["pass"] = ok;
    j["self_intersection"] = traj.self_intersection;
    j["self_intersection_time"] = traj.self_intersection_time ? Json(*traj.self_intersection_time) : Json(nullptr);
    j["substeps"] = traj.substeps;
    if (fit) j["self_similar_fit"] = {{"a0", fit->a0}, {"a1", fit->a1}, {"a2", fit->a2}, {"residual", fit->residual}};
    out.text = j.dump(2) + "\n";
  }
  return out;
}

std::vector<CatalogEntry> catalog_entries(const RunConfig& cfg) {
  if (cfg.catalog_file.empty()) return entries();
  std::ifstream f(cfg.catalog_file);
  if (!f) throw UsageError("cannot read " + cfg.catalog_file);
  std::stringstream ss;
  ss << f.rdbuf();
  return load_catalog(ss.str());
}

std::string expected_text(const ExpectedCounts& e) {
  auto v = [](const std::optional<int>& x) { return x ? std::to_string(*x) : std::string("?"); };
  std::string s = "(" + v(e.n_minus1) + "," + v(e.n1) + "," + v(e.n3);
  if (e.n5) s += "," + v(e.n5);
  return s + ")";
}

Outcome cmd_catalog_list(const RunConfig& cfg) {
  auto list = catalog_entries(cfg);
  if (cfg.format == "csv") {
    std::string s = "id,f,g,expected\n";
    for (const auto& e : list) {
      s += csv_quote(e.id) + "," + csv_quote(e.f) + "," + csv_quote(e.g) + "," + csv_quote(expected_text(e.expected)) +
           "\n";
    }
    return {s};
  }
  if (cfg.format == "text") {
    std::ostringstream s;
    for (const auto& e : list) s << std::left << std::setw(34) << e.id << expected_text(e.expected) << "\n";
    return {s.str()};
  }
  Json arr = Json::array();
  for (const auto& e : list) arr.push_back(to_json(e));
  return {arr.dump(2) + "\n"};
}

Outcome cmd_catalog_run(const RunConfig& cfg, std::ostream& err) {
  RegressionOptions ro;
  ro.weight5 = cfg.weight5;
  ro.only = cfg.only;
  if (cfg.progress) ro.progress = [&err](const std::string& id) { err << "running " << id << std::endl; };
  auto list = catalog_entries(cfg);
  auto rep = run_regression(list, ro);
  if (rep.results.empty()) throw UsageError("no catalog entries selected");
  Outcome out;
  out.code = rep.all_pass() ? 0 : 2;
  std::map<std::string, const CatalogEntry*> by_id;
  for (const auto& e : list) by_id[e.id] = &e;
  if (cfg.format == "csv") {
    std::string s = "id,expected,observed,pass,diffs\n";
    for (const auto& r : rep.results) {
      std::string diffs;
      for (const auto& d : r.diffs) diffs += (diffs.empty() ? "" : "; ") + d;
      s += csv_quote(r.id) + "," + csv_quote(expected_text(by_id.at(r.id)->expected)) + "," +
           csv_quote(triple_text(r.observed)) + "," + (r.pass ? "true" : "false") + "," + csv_quote(diffs) + "\n";
    }
    out.text = s;
  } else if (cfg.format == "text") {
    std::ostringstream s;
    s << std::left << std::setw(34) << "entry" << std::setw(14) << "expected" << std::setw(14) << "observed"
      << "status\n";
    for (const auto& r : rep.results) {
      s << std::left << std::setw(34) << r.id << std::setw(14) << expected_text(by_id.at(r.id)->expected)
        << std::setw(14) << triple_text(r.observed) << (r.pass ? "PASS" : "FAIL");
      if (cfg.timings) s << "  " << std::fixed << std::setprecision(2) << r.seconds << " s" << std::defaultfloat;
      s << "\n";
      for (const auto& d : r.diffs) s << "    " << d << "\n";
    }
    s << (rep.all_pass() ? "all entries match" : "MISMATCH") << "\n";
    out.text = s.str();
  } else {
    Json j;
    Json arr = Json::array();
    for (const auto& r : rep.results) arr.push_back(to_json(r, cfg.timings));
    j["results"] = arr;
    j["all_pass"] = rep.all_pass();
    out.text = j.dump(2) + "\n";
  }
  return out;
}

// ----------------------------------------------------------------- options

void add_equation_options(CLI::App* sub, RunConfig& cfg) {
  sub->add_option("--f", cfg.f, "Coefficient f(x,u,p) of u_xxx")->capture_default_str();
  sub->add_option("--g", cfg.g, "Lower-order part g(x,u,p,q)");
  sub->add_option("--param", cfg.params, "Declare a free parameter (repeatable)");
  sub->add_option("--bind", cfg.bindings, "Bind a parameter, name=value with a rational value (repeatable)");
}

void add_search_options(CLI::App* sub, RunConfig& cfg) {
  sub->add_option("--deg-x", cfg.deg_x, "Ansatz degree in x")->capture_default_str()->check(CLI::Range(0, 12));
  sub->add_option("--deg-t", cfg.deg_t, "Ansatz degree in t")->capture_default_str()->check(CLI::Range(0, 12));
  sub->add_option("--deg-u", cfg.deg_u, "Ansatz jet degree (default max(m+3, 2m+2))")->check(CLI::Range(0, 16));
  sub->add_option("--atom", cfg.atoms, "Explicit atom factor such as exp(u) (repeatable; default: harvested)");
  sub->add_option("--time-atom", cfg.time_atoms, "Factor in t such as exp(t) (repeatable)");
  sub->add_option("--closure", cfg.closure, "Atom harvest closure level")->capture_default_str()->check(
      CLI::Range(0, 2));
  sub->add_option("--basis-cap", cfg.basis_cap, "Maximum ansatz size")->capture_default_str();
  sub->add_flag("--full-basis", cfg.full_basis, "Do not reduce the ansatz modulo total derivatives");
  sub->add_option("--route", cfg.route, "Residual route")
      ->capture_default_str()
      ->check(CLI::IsMember({"euler", "byparts"}));
  sub->add_option("--jet-cap", cfg.jet_cap, "Jet order cap (default: CLAWKIT_JET_CAP or 12)")->check(
      CLI::Range(3, kMaxJetOrder));
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  CLI::App app{"Conservation laws of third-order evolution equations, with numerical verifiers", "clawkit"};
  app.config_formatter(std::make_shared<JsonConfig>());
  app.set_config("--config", "", "JSON run configuration; command-line flags override it");
  app.add_option("--format", cfg.format, "Report format")
      ->capture_default_str()
      ->check(CLI::IsMember({"json", "csv", "text"}));
  app.add_option("--output,-o", cfg.output, "Write the report to a file instead of stdout");
  app.require_subcommand(1);
  app.fallthrough();

  auto* classify = app.add_subcommand("classify", "Structural invariants K and N and the normal form");
  add_equation_options(classify, cfg);

  auto* search = app.add_subcommand("search", "Conserved densities of a given order");
  add_equation_options(search, cfg);
  add_search_options(search, cfg);
  search->add_option("--order", cfg.order, "Jet order m of the densities")->capture_default_str()->check(
      CLI::Range(0, 8));

  auto* type = app.add_subcommand("type", "Counts of new laws of weight -1, 1, 3 (and 5)");
  add_equation_options(type, cfg);
  add_search_options(type, cfg);
  type->add_flag("--weight5", cfg.weight5, "Also count weight-5 laws");

  auto* probe = app.add_subcommand("probe", "New-law counts for orders 0..max-order");
  add_equation_options(probe, cfg);
  add_search_options(probe, cfg);
  probe->add_option("--max-order", cfg.max_order, "Highest order probed")->capture_default_str()->check(
      CLI::Range(0, 6));

  auto* verify = app.add_subcommand("verify", "Integrate on a periodic grid and monitor conserved integrals");
  add_equation_options(verify, cfg);
  add_search_options(verify, cfg);
  verify->add_option("--length", cfg.length, "Domain length L")->capture_default_str();
  verify->add_option("--points", cfg.points, "Grid points N (power of two)")->capture_default_str();
  verify->add_option("--dt", cfg.step, "Time step")->capture_default_str();
  verify->add_option("--time", cfg.horizon, "Final time T")->capture_default_str();
  verify->add_option("--u0", cfg.u0, "Initial profile as a formula in x")->capture_default_str();
  verify->add_option("--density", cfg.densities, "Density to monitor (repeatable; default: searched laws)");
  verify->add_option("--laws-order", cfg.laws_order, "Highest order of searched laws")->capture_default_str();
  verify->add_option("--tolerance", cfg.tolerance, "Maximum accepted relative drift")->capture_default_str();
  verify->add_option("--floor", cfg.floor, "Scale floor of the relative drift")->capture_default_str();
  verify->add_option("--record-every", cfg.record_every, "Steps between recorded states")->capture_default_str();
  verify->add_flag("--allow-x", cfg.allow_x, "Allow explicit x with sponge layers (indicative results)");

  auto* curve = app.add_subcommand("curveflow", "Evolve a closed curve by gamma_t = k_s N");
  curve->add_option("--x", cfg.curve_x, "x(theta) of the initial curve")->capture_default_str();
  curve->add_option("--y", cfg.curve_y, "y(theta) of the initial curve")->capture_default_str();
  curve->add_option("--input", cfg.input, "CSV of x,y samples (overrides --x/--y)");
  curve->add_option("--samples", cfg.samples, "Number of samples for --x/--y")->capture_default_str();
  curve->add_option("--dt", cfg.curve_step, "Time step")->capture_default_str();
  curve->add_option("--time", cfg.curve_horizon, "Final time T")->capture_default_str();
  curve->add_option("--record-every", cfg.curve_record_every, "Steps between recorded states")
      ->capture_default_str();
  curve->add_flag("--no-redistribute", cfg.no_redistribute, "Move samples normally only (explicit substeps)");
  curve->add_option("--states", cfg.states_path, "Write states CSV (t,j,x,y)");
  curve->add_option("--moments", cfg.moments_path, "Write moments CSV (t,L,A,Mx,My,M2)");
  curve->add_option("--svg", cfg.svg_path, "Write an SVG of recorded states");
  curve->add_flag("--fit", cfg.fit, "Fit the self-similar relation to the final state");
  curve->add_option("--tolerance", cfg.moment_tolerance, "Maximum accepted relative moment drift")
      ->capture_default_str();

  auto* catalog = app.add_subcommand("catalog", "Classification catalog");
  catalog->require_subcommand(1);
  catalog->add_option("--file", cfg.catalog_file, "Catalog JSON to use instead of the built-in one");
  auto* cat_list = catalog->add_subcommand("list", "List catalog entries");
  auto* cat_run = catalog->add_subcommand("run", "Regression over catalog entries");
  cat_run->add_flag("--weight5", cfg.weight5, "Also check weight-5 counts where recorded");
  cat_run->add_option("--only", cfg.only, "Restrict to ids with this prefix (repeatable)");
  cat_run->add_flag("--timings", cfg.timings, "Include per-entry timings (output is then not reproducible)");
  cat_run->add_flag("--progress", cfg.progress, "Report progress on stderr");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, err, err);
    return 1;
  }

  try {
    Outcome res;
    if (*classify) res = cmd_classify(cfg);
    else if (*search) res = cmd_search(cfg);
    else if (*type) res = cmd_type(cfg);
    else if (*probe) res = cmd_probe(cfg);
    else if (*verify) res = cmd_verify(cfg);
    else if (*curve) res = cmd_curveflow(cfg);
    else if (*cat_list) res = cmd_catalog_list(cfg);
    else if (*cat_run) res = cmd_catalog_run(cfg, err);
    if (cfg.output.empty()) {
      out << res.text;
    } else {
      write_file(cfg.output, res.text);
    }
    return res.code;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const ParseError& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const UnsupportedExpression& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const InvalidEquation& e) {
    err << "error: invalid equation: " << e.what() << "\n";
    return 1;
  } catch (const PreconditionViolated& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const NonPeriodicEquation& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const StabilityBound& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const CyclicBinding& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const Error& e) {
    err << "failure: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace clawkit::cli
