#include "clawkit/structclass.hpp"

#include "clawkit/error.hpp"

namespace clawkit {

Expr EvolutionEq::rhs() const { return substitute(f * Expr(Symbol::p(3)) + g, params); }

EvolutionEq validate_equation(const Expr& f, const Expr& g, const ParamTable& params) {
  if (f.is_zero()) throw InvalidEquation("f vanishes identically");
  if (f.depends_on(Symbol::t()) || g.depends_on(Symbol::t())) {
    throw InvalidEquation("f and g must not depend on t");
  }
  if (f.jet_order() > 1) throw InvalidEquation("f depends on p" + std::to_string(f.jet_order()));
  if (g.jet_order() > 2) throw InvalidEquation("g depends on p" + std::to_string(g.jet_order()));
  for (const auto& e : {f, g}) {
    for (const auto& s : e.symbols()) {
      if (s.is_param() && !params.declared(s.param_name())) {
        throw InvalidEquation("parameter " + s.str() + " is not declared");
      }
    }
  }
  return EvolutionEq{f, g, params};
}

EvolutionEq parse_equation(const std::string& f, const std::string& g, const ParamTable& params) {
  return validate_equation(parse(f, params), parse(g, params), params);
}

bool k_invariant_vanishes(const EvolutionEq& eq) {
  const Symbol p = Symbol::p(1);
  const Symbol q = Symbol::p(2);
  return diff(eq.g, q, 2) == Expr(2) * diff(eq.f, p);
}

bool n_invariant_vanishes(const EvolutionEq& eq) {
  if (!k_invariant_vanishes(eq)) throw PreconditionViolated("N relations are only defined when K = 0");
  const Symbol p = Symbol::p(1);
  const Symbol u = Symbol::u();
  const Symbol x = Symbol::x();
  const Expr& f = eq.f;
  Expr fp = diff(f, p);
  Expr fx = diff(f, x);
  Expr fu = diff(f, u);
  Expr P(p);
  Expr first = Expr(4) * fp * fp - Expr(3) * f * diff(fp, p);
  Expr second = Expr(4) * (fp * fx + P * fp * fu) - Expr(3) * f * (diff(fp, x) + P * diff(fp, u) - fu);
  return first.is_zero() && second.is_zero();
}

bool is_linear_equation(const EvolutionEq& eq) {
  if (eq.f.jet_order() >= 0) return false;
  for (const auto& [m, c] : eq.g.terms()) {
    int jet_degree = 0;
    for (int s = kSlotU; s < kNumSlots; ++s) {
      if (m.pw[s] < 0) return false;
      jet_degree += m.pw[s];
    }
    for (const auto& a : m.atoms) {
      if (a.slot >= kSlotU) return false;
    }
    if (jet_degree > 1) return false;
  }
  return true;
}

StructReport structural_report(const EvolutionEq& eq) {
  StructReport r;
  r.k_vanishes = k_invariant_vanishes(eq);
  if (r.k_vanishes) r.n_vanishes = n_invariant_vanishes(eq);
  r.g_quadratic_in_q = diff(eq.g, Symbol::p(2), 3).is_zero();
  if (eq.f == Expr(1) && !eq.g.depends_on(Symbol::p(2))) r.normal_form_detected = kNormalFormTag;
  if (!r.k_vanishes) r.predicted_obstructions.emplace_back(kObstructionNoWeightMinusOne);
  if (!r.g_quadratic_in_q) r.predicted_obstructions.emplace_back(kObstructionQuadraticInQ);
  r.linear = is_linear_equation(eq);
  return r;
}

}  // namespace clawkit
