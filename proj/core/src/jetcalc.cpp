#include "clawkit/jetcalc.hpp"

#include <algorithm>
#include <cstdlib>
#include <mutex>
#include <string>
#include <vector>

#include "clawkit/error.hpp"

namespace clawkit {

int default_jet_cap() {
  if (const char* env = std::getenv("CLAWKIT_JET_CAP"); env != nullptr && *env != '\0') {
    char* end = nullptr;
    long v = std::strtol(env, &end, 10);
    if (end == env || *end != '\0' || v < 3 || v > kMaxJetOrder) {
      throw Error("CLAWKIT_JET_CAP must be an integer in 3.." + std::to_string(kMaxJetOrder));
    }
    return static_cast<int>(v);
  }
  return 12;
}

struct JetContext::Cache {
  std::mutex mu;
  std::vector<std::unique_ptr<Expr>> derivs;
};

JetContext::JetContext(int max_order) : max_order_(max_order), cache_(std::make_shared<Cache>()) {
  if (max_order < 1 || max_order > kMaxJetOrder) {
    throw Error("jet order cap must lie in 1.." + std::to_string(kMaxJetOrder));
  }
}

JetContext::JetContext(Expr rhs, int max_order) : JetContext(max_order) { rhs_ = std::move(rhs); }

const Expr& JetContext::rhs() const {
  if (!rhs_) throw PreconditionViolated("jet context carries no evolution right-hand side");
  return *rhs_;
}

const Expr& JetContext::rhs_derivative(int i) const {
  const Expr& q = rhs();
  std::lock_guard lock(cache_->mu);
  auto& d = cache_->derivs;
  if (d.empty()) d.push_back(std::make_unique<Expr>(q));
  while (static_cast<int>(d.size()) <= i) {
    Expr next = total_x(*d.back(), *this);
    d.push_back(std::make_unique<Expr>(std::move(next)));
  }
  return *d[i];
}

namespace {

void require_order(const Expr& e, int limit, const char* op) {
  int order = e.jet_order();
  if (order > limit) {
    throw JetOrderOverflow(std::string(op) + ": jet order " + std::to_string(order) + " exceeds limit " +
                           std::to_string(limit));
  }
}

// Top jet slot of a monomial, or -1 when it involves only t and x.
int top_slot(const Monomial& m) {
  int o = m.jet_order();
  return o < 0 ? -1 : jet_slot(o);
}

}  // namespace

Expr total_x(const Expr& e, const JetContext& ctx) {
  require_order(e, ctx.max_order() - 1, "total_x");
  Expr r;
  for (const auto& [m, c] : e.terms()) {
    if (m.depends_on_slot(kSlotX)) r += diff(Expr::term(m, c), Symbol::x());
    for (int s = kSlotU; s < kNumSlots - 1; ++s) {
      bool atoms = std::any_of(m.atoms.begin(), m.atoms.end(), [s](const Atom& a) { return a.slot == s; });
      if (atoms) {
        Expr ds = diff(Expr::term(m, c), Symbol::from_slot(s));
        for (const auto& [mm, cc] : ds.terms()) {
          Monomial shifted = mm;
          shifted.pw[s + 1] = static_cast<std::int16_t>(shifted.pw[s + 1] + 1);
          r.add_term(std::move(shifted), cc);
        }
        continue;
      }
      if (m.pw[s] == 0) continue;
      Monomial mm = m;
      mm.pw[s] = static_cast<std::int16_t>(mm.pw[s] - 1);
      mm.pw[s + 1] = static_cast<std::int16_t>(mm.pw[s + 1] + 1);
      r.add_term(std::move(mm), c * m.pw[s]);
    }
  }
  return r;
}

Expr total_t(const Expr& e, const JetContext& ctx) {
  if (!ctx.has_rhs()) throw PreconditionViolated("total_t needs the evolution right-hand side");
  require_order(e, ctx.max_order() - 3, "total_t");
  Expr r = diff(e, Symbol::t());
  int order = e.jet_order();
  for (int i = 0; i <= order; ++i) {
    Expr d = diff(e, Symbol::p(i));
    if (d.is_zero()) continue;
    r += d * ctx.rhs_derivative(i);
  }
  return r;
}

Expr euler(const Expr& e, const JetContext& ctx) {
  int k = e.jet_order();
  if (2 * k > ctx.max_order()) {
    throw JetOrderOverflow("euler: jet order " + std::to_string(k) + " exceeds limit " +
                           std::to_string(ctx.max_order() / 2));
  }
  if (k < 0) return Expr();
  Expr r = diff(e, Symbol::p(k));
  for (int i = k - 1; i >= 0; --i) r = diff(e, Symbol::p(i)) - total_x(r, ctx);
  return r;
}

ByParts reduce_by_parts(const Expr& e, const JetContext& ctx) {
  require_order(e, ctx.max_order() - 1, "reduce_by_parts");
  ByParts out{e, Expr()};
  for (;;) {
    int k = 0;
    for (const auto& [m, c] : out.reduced.terms()) {
      int s = top_slot(m);
      if (s > kSlotU && m.pw[s] == 1) k = std::max(k, s - kSlotU);
    }
    if (k == 0) break;
    const int s = jet_slot(k);
    Expr coeff;
    for (const auto& [m, c] : out.reduced.terms()) {
      if (top_slot(m) != s || m.pw[s] != 1) continue;
      Monomial mm = m;
      mm.pw[s] = 0;
      coeff.add_term(std::move(mm), c);
    }
    Expr prim = integrate(coeff, Symbol::p(k - 1));
    out.reduced -= total_x(prim, ctx);
    out.exact_part += prim;
  }
  return out;
}

Expr extract_flux(const Expr& h, const JetContext& ctx) {
  if (!euler(h, ctx).is_zero()) throw NotExact("expression is not a total x-derivative: " + h.str());
  ByParts bp = reduce_by_parts(h, ctx);
  if (bp.reduced.jet_order() >= 0) {
    throw NotExact("by-parts reduction left jet-dependent terms: " + bp.reduced.str());
  }
  Expr residual;
  try {
    residual = integrate(bp.reduced, Symbol::x());
  } catch (const NonIntegrable& err) {
    throw NonIntegrableResidual(std::string("(t,x) residual has no antiderivative in the expression class: ") +
                                err.what());
  }
  return bp.exact_part + residual;
}

}  // namespace clawkit
