#include "clawkit/clawsearch.hpp"

#include <algorithm>
#include <set>

#include "clawkit/error.hpp"

namespace clawkit {

int weight_of_order(int order) { return 2 * order - 1; }

int default_jet_degree(int m) { return std::max(m + 3, 2 * m + 2); }

int SearchResult::count_at_order(int order) const {
  return static_cast<int>(std::count_if(laws.begin(), laws.end(), [order](const auto& l) { return l.order == order; }));
}

// ---------------------------------------------------------------- atoms

namespace {

std::optional<Rational> rational_sqrt(const Rational& q) {
  if (q < 0) return std::nullopt;
  mpz_class n = q.get_num();
  mpz_class d = q.get_den();
  mpz_class rn = sqrt(n);
  mpz_class rd = sqrt(d);
  if (rn * rn != n || rd * rd != d) return std::nullopt;
  Rational r(rn, rd);
  r.canonicalize();
  return r;
}

struct SlotAtoms {
  std::set<Frac> rates;
  std::set<Frac> freqs;
};

}  // namespace

std::vector<Expr> harvest_atoms(const EvolutionEq& eq, int closure) {
  std::map<int, SlotAtoms> slots;
  for (const Expr* e : {&eq.f, &eq.g}) {
    for (const auto& [m, c] : e->terms()) {
      for (const auto& a : m.atoms) {
        if (a.slot != kSlotU && a.slot != kSlotX) continue;
        if (a.kind == AtomKind::Exp) slots[a.slot].rates.insert(a.arg);
        if (a.kind == AtomKind::Cos || a.kind == AtomKind::Sin) slots[a.slot].freqs.insert(a.arg);
      }
    }
  }
  // Order-zero densities h(u) against a constant c*p1^3 term need h''' = -2c h'.
  Expr cubic = coefficient(substitute(eq.g, eq.params), Symbol::p(1), 3);
  if (auto c = cubic.constant_value(); c && *c != 0) {
    Rational lam2 = -2 * *c;
    if (auto r = rational_sqrt(lam2 < 0 ? Rational(-lam2) : lam2)) {
      if (lam2 > 0) {
        slots[kSlotU].rates.insert(Frac::from_rational(*r));
      } else {
        slots[kSlotU].freqs.insert(Frac::from_rational(*r));
      }
    }
  }
  std::vector<Expr> out;
  for (auto& [slot, sa] : slots) {
    std::set<Frac> rates;
    for (const auto& r : sa.rates) {
      rates.insert(r);
      rates.insert(-r);
    }
    std::set<Frac> freqs = sa.freqs;
    if (closure >= 1) {
      std::set<Frac> r2 = rates;
      for (const auto& a : rates) {
        for (const auto& b : rates) r2.insert(a + b);
      }
      rates = std::move(r2);
      std::set<Frac> f2 = freqs;
      for (const auto& a : freqs) {
        for (const auto& b : freqs) {
          f2.insert(a + b);
          Frac d = a - b;
          f2.insert(d.num < 0 ? -d : d);
        }
      }
      freqs = std::move(f2);
    }
    rates.erase(Frac(0));
    freqs.erase(Frac(0));
    Symbol s = Symbol::from_slot(slot);
    for (const auto& r : rates) out.push_back(Expr::exp_atom(s, r));
    for (const auto& w : freqs) {
      out.push_back(Expr::cos_atom(s, w));
      out.push_back(Expr::sin_atom(s, w));
    }
  }
  return out;
}

// ---------------------------------------------------------------- ansatz

namespace {

void jet_monomials(int m, int var, int remaining, Monomial& cur, std::vector<Monomial>& out) {
  if (var > m) {
    out.push_back(cur);
    return;
  }
  for (int k = 0; k <= remaining; ++k) {
    cur.pw[jet_slot(var)] = static_cast<std::int16_t>(k);
    jet_monomials(m, var + 1, remaining - k, cur, out);
  }
  cur.pw[jet_slot(var)] = 0;
}

const Monomial& single_monomial(const Expr& e, const char* what) {
  if (e.size() != 1) throw Error(std::string(what) + " must be a single monomial: " + e.str());
  return e.terms().begin()->first;
}

bool is_reduced_jet_monomial(const Monomial& m) {
  int order = m.jet_order();
  if (order < 0) return false;
  if (order == 0) return true;
  return m.pw[jet_slot(order)] >= 2;
}

}  // namespace

Ansatz build_ansatz(const EvolutionEq& eq, int m, const AnsatzSpec& spec) {
  (void)eq;
  if (m < 0 || spec.d_x < 0 || spec.d_t < 0 || spec.d_u < 0) throw Error("ansatz orders and degrees must be >= 0");
  if (m > kMaxJetOrder) throw JetOrderOverflow("ansatz order exceeds the jet symbol range");
  std::vector<Monomial> jets;
  Monomial cur;
  jet_monomials(m, 0, spec.d_u, cur, jets);

  std::vector<Monomial> factors{Monomial{}};
  for (const auto& a : spec.atoms) {
    const Monomial& am = single_monomial(a, "atom factor");
    if (am.atoms.empty()) throw Error("atom factor without transcendental part: " + a.str());
    factors.push_back(am);
  }
  std::vector<Monomial> time_factors{Monomial{}};
  for (const auto& a : spec.time_atoms) {
    const Monomial& tm = single_monomial(a, "time factor");
    bool only_t = !tm.atoms.empty() && std::all_of(tm.atoms.begin(), tm.atoms.end(),
                                                   [](const Atom& at) { return at.slot == kSlotT; });
    if (!only_t || tm.degree() != 0) throw Error("time factor must be a transcendental atom in t: " + a.str());
    time_factors.push_back(tm);
  }

  std::set<Monomial> basis;
  for (const auto& j : jets) {
    for (int ix = 0; ix <= spec.d_x; ++ix) {
      for (int it = 0; it <= spec.d_t; ++it) {
        for (const auto& af : factors) {
          for (const auto& tf : time_factors) {
            Monomial mm = j;
            mm.pw[kSlotX] = static_cast<std::int16_t>(ix);
            mm.pw[kSlotT] = static_cast<std::int16_t>(it);
            Expr prod = Expr::term(mm, 1) * Expr::term(af, 1) * Expr::term(tf, 1);
            const Monomial& pm = single_monomial(prod, "basis element");
            if (spec.reduced && !is_reduced_jet_monomial(pm)) continue;
            basis.insert(pm);
            if (basis.size() > spec.basis_cap) {
              throw ResourceCapExceeded("ansatz basis exceeds cap of " + std::to_string(spec.basis_cap) +
                                        " monomials");
            }
          }
        }
      }
    }
  }
  Ansatz a;
  a.m = m;
  a.spec = spec;
  a.basis.assign(basis.begin(), basis.end());
  return a;
}

Ansatz build_ansatz(const EvolutionEq& eq, int m, int d_x, int d_t, int d_u) {
  AnsatzSpec spec;
  spec.d_x = d_x;
  spec.d_t = d_t;
  spec.d_u = d_u;
  return build_ansatz(eq, m, spec);
}

// ---------------------------------------------------------------- determining system

namespace {

Expr bound_rhs(const EvolutionEq& eq) {
  Expr q = eq.rhs();
  for (const auto& s : q.symbols()) {
    if (s.is_param()) throw PreconditionViolated("parameter " + s.str() + " must be bound before solving");
  }
  return q;
}

Expr strip_pure_tx(const Expr& e) {
  Expr r;
  for (const auto& [m, c] : e.terms()) {
    if (m.jet_order() >= 0) r.add_term(m, c);
  }
  return r;
}

Expr residual(const Monomial& b, const JetContext& ctx, ResidualRoute route) {
  Expr h = total_t(Expr::term(b, 1), ctx);
  if (route == ResidualRoute::Euler) return euler(h, ctx);
  return strip_pure_tx(reduce_by_parts(h, ctx).reduced);
}

}  // namespace

DeterminingSystem determining_system(const EvolutionEq& eq, const Ansatz& a, ResidualRoute route, int jet_cap) {
  JetContext ctx(bound_rhs(eq), jet_cap);
  std::map<Monomial, SparseRow> rows;
  for (std::size_t j = 0; j < a.basis.size(); ++j) {
    Expr r = residual(a.basis[j], ctx, route);
    for (const auto& [m, c] : r.terms()) rows[m].emplace_back(static_cast<int>(j), c);
  }
  DeterminingSystem ds;
  ds.unknowns = a.basis;
  ds.equations.reserve(rows.size());
  ds.provenance.reserve(rows.size());
  for (auto& [m, row] : rows) {
    ds.provenance.push_back(m);
    ds.equations.push_back(std::move(row));
  }
  return ds;
}

// ---------------------------------------------------------------- solving

namespace {

Rational lcm_den_over_gcd_num(const std::vector<Rational>& v) {
  mpz_class l = 1;
  mpz_class g = 0;
  for (const auto& q : v) mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), q.get_den_mpz_t());
  for (const auto& q : v) {
    mpz_class n = q.get_num() * (l / q.get_den());
    mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), n.get_mpz_t());
  }
  if (g == 0) g = 1;
  Rational s(l, g);
  s.canonicalize();
  return s;
}

// Orders monomials so the highest jet order (and then the largest monomial) comes first.
struct LeadingFirst {
  bool operator()(const Monomial& a, const Monomial& b) const {
    int oa = a.jet_order();
    int ob = b.jet_order();
    if (oa != ob) return oa > ob;
    return b < a;
  }
};

std::vector<Expr> echelon_densities(const std::vector<Expr>& dens) {
  std::set<Monomial, LeadingFirst> cols;
  for (const auto& d : dens) {
    for (const auto& [m, c] : d.terms()) cols.insert(m);
  }
  std::vector<Monomial> colv(cols.begin(), cols.end());
  std::map<Monomial, int, LeadingFirst> index;
  for (std::size_t i = 0; i < colv.size(); ++i) index.emplace(colv[i], static_cast<int>(i));
  RowEchelon ech(static_cast<int>(colv.size()));
  for (const auto& d : dens) {
    SparseRow row;
    for (const auto& [m, c] : d.terms()) row.emplace_back(index.at(m), c);
    std::sort(row.begin(), row.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    ech.add(std::move(row));
  }
  std::vector<Expr> out;
  for (const auto& row : ech.reduced()) {
    std::vector<Rational> vals;
    for (const auto& [c, v] : row) vals.push_back(v);
    Rational s = lcm_den_over_gcd_num(vals);
    Expr e;
    for (const auto& [c, v] : row) e.add_term(colv[c], v * s);
    out.push_back(std::move(e));
  }
  return out;
}

}  // namespace

SearchResult solve_densities(const EvolutionEq& eq, int m, const SearchOptions& opts) {
  if (2 * (m + 3) > opts.jet_cap && opts.route == ResidualRoute::Euler) {
    throw ResourceCapExceeded("order " + std::to_string(m) + " search needs jet cap " + std::to_string(2 * (m + 3)) +
                              ", have " + std::to_string(opts.jet_cap));
  }
  SearchResult res;
  AnsatzSpec spec;
  spec.d_x = opts.d_x;
  spec.d_t = opts.d_t;
  spec.d_u = opts.d_u.value_or(default_jet_degree(m));
  spec.atoms = opts.atoms ? *opts.atoms : harvest_atoms(eq, opts.atom_closure);
  spec.time_atoms = opts.time_atoms;
  spec.basis_cap = opts.basis_cap;
  spec.reduced = opts.reduced_basis;
  res.ansatz = build_ansatz(eq, m, spec);

  Expr q = bound_rhs(eq);
  JetContext ctx(q, opts.jet_cap);
  DeterminingSystem ds = determining_system(eq, res.ansatz, opts.route, opts.jet_cap);
  res.equations = ds.equations.size();

  RowEchelon ech(static_cast<int>(ds.unknowns.size()));
  for (auto& row : ds.equations) ech.add(std::move(row));
  res.rank = static_cast<std::size_t>(ech.rank());

  std::vector<Expr> dens;
  for (const auto& v : ech.nullspace()) {
    Expr rho;
    for (const auto& [j, c] : v) rho.add_term(ds.unknowns[j], c);
    if (!opts.reduced_basis) rho = reduce_by_parts(rho, ctx).reduced;
    rho = strip_pure_tx(rho);
    if (!rho.is_zero()) dens.push_back(std::move(rho));
  }

  for (auto& rho : echelon_densities(dens)) {
    if (euler(rho, ctx).is_zero()) throw Error("internal: trivial density survived echelon: " + rho.str());
    Expr h = total_t(rho, ctx);
    ConservationLaw law;
    law.flux = extract_flux(h, ctx);
    if (total_x(law.flux, ctx) != h) throw Error("internal: flux check failed for " + rho.str());
    law.order = rho.jet_order();
    law.weight = weight_of_order(law.order);
    law.density = std::move(rho);
    res.laws.push_back(std::move(law));
  }
  std::stable_sort(res.laws.begin(), res.laws.end(),
                   [](const auto& a, const auto& b) { return a.order < b.order; });
  if (is_linear_equation(eq)) res.warnings.emplace_back(kLinearWarning);
  return res;
}

TypeReport classify_type(const EvolutionEq& eq, const SearchOptions& opts, bool with_n5) {
  TypeReport rep;
  int top = with_n5 ? 3 : 2;
  std::vector<int> counts;
  for (int m = 0; m <= top; ++m) {
    rep.runs.push_back(solve_densities(eq, m, opts));
    counts.push_back(rep.runs.back().count_at_order(m));
  }
  rep.type.n_minus1 = counts[0];
  rep.type.n1 = counts[1];
  rep.type.n3 = counts[2];
  if (with_n5) rep.type.n5 = counts[3];
  if (is_linear_equation(eq)) rep.warnings.emplace_back(kLinearWarning);
  return rep;
}

ProbeResult weight_sequence_probe(const EvolutionEq& eq, int max_order, const SearchOptions& opts) {
  if (max_order < 0) throw Error("max_order must be >= 0");
  ProbeResult pr;
  for (int m = 0; m <= max_order; ++m) {
    auto r = solve_densities(eq, m, opts);
    pr.counts.emplace_back(m, r.count_at_order(m));
  }
  if (is_linear_equation(eq)) pr.warnings.emplace_back(kLinearWarning);
  return pr;
}

}  // namespace clawkit
