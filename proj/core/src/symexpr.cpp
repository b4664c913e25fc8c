#include "clawkit/symexpr.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <set>

#include "clawkit/error.hpp"
#include "clawkit/parser.hpp"

namespace clawkit {

std::string to_string(const Rational& q) { return q.get_str(); }

// ---------------------------------------------------------------- Symbol

Symbol Symbol::p(int order) {
  if (order < 0 || order > kMaxJetOrder) {
    throw Error("jet order " + std::to_string(order) + " outside 0.." + std::to_string(kMaxJetOrder));
  }
  return Symbol(jet_slot(order));
}

Symbol Symbol::param(std::string name) {
  Symbol s(-1);
  s.name_ = std::move(name);
  return s;
}

Symbol Symbol::from_slot(int slot) {
  if (slot < 0 || slot >= kNumSlots) throw Error("invalid symbol slot");
  return Symbol(slot);
}

std::string Symbol::str() const {
  if (is_param()) return name_;
  if (slot_ == kSlotT) return "t";
  if (slot_ == kSlotX) return "x";
  if (slot_ == kSlotU) return "u";
  return "p" + std::to_string(slot_ - kSlotU);
}

std::strong_ordering operator<=>(const Symbol& a, const Symbol& b) {
  if (a.is_param() != b.is_param()) return a.is_param() ? std::strong_ordering::greater : std::strong_ordering::less;
  if (!a.is_param()) return a.slot_ <=> b.slot_;
  return a.name_.compare(b.name_) <=> 0;
}

// ---------------------------------------------------------------- Frac

namespace {

std::int64_t narrow(__int128 v) {
  if (v > std::numeric_limits<std::int64_t>::max() || v < std::numeric_limits<std::int64_t>::min()) {
    throw UnsupportedExpression("atom argument overflow");
  }
  return static_cast<std::int64_t>(v);
}

__int128 gcd128(__int128 a, __int128 b) {
  if (a < 0) a = -a;
  if (b < 0) b = -b;
  while (b != 0) {
    __int128 r = a % b;
    a = b;
    b = r;
  }
  return a;
}

}  // namespace

Frac::Frac(std::int64_t n, std::int64_t d) {
  if (d == 0) throw UnsupportedExpression("zero denominator in atom argument");
  if (d < 0) {
    n = -n;
    d = -d;
  }
  std::int64_t g = std::gcd(n < 0 ? -n : n, d);
  if (g == 0) g = 1;
  num = n / g;
  den = d / g;
}

Frac Frac::from_rational(const Rational& q) {
  if (!q.get_num().fits_slong_p() || !q.get_den().fits_slong_p()) {
    throw UnsupportedExpression("atom argument too large");
  }
  return Frac(q.get_num().get_si(), q.get_den().get_si());
}

Rational Frac::to_rational() const {
  Rational q(static_cast<long>(num), static_cast<long>(den));
  q.canonicalize();
  return q;
}

Frac operator+(const Frac& a, const Frac& b) {
  __int128 n = static_cast<__int128>(a.num) * b.den + static_cast<__int128>(b.num) * a.den;
  __int128 d = static_cast<__int128>(a.den) * b.den;
  __int128 g = gcd128(n, d);
  if (g == 0) g = 1;
  return Frac(narrow(n / g), narrow(d / g));
}

Frac operator*(const Frac& a, const Frac& b) {
  __int128 n = static_cast<__int128>(a.num) * b.num;
  __int128 d = static_cast<__int128>(a.den) * b.den;
  __int128 g = gcd128(n, d);
  if (g == 0) g = 1;
  return Frac(narrow(n / g), narrow(d / g));
}

std::strong_ordering operator<=>(const Frac& a, const Frac& b) {
  __int128 l = static_cast<__int128>(a.num) * b.den;
  __int128 r = static_cast<__int128>(b.num) * a.den;
  if (l < r) return std::strong_ordering::less;
  if (l > r) return std::strong_ordering::greater;
  return std::strong_ordering::equal;
}

std::strong_ordering operator<=>(const Atom& a, const Atom& b) {
  if (auto c = a.slot <=> b.slot; c != 0) return c;
  if (auto c = a.kind <=> b.kind; c != 0) return c;
  return a.arg <=> b.arg;
}

// ---------------------------------------------------------------- Monomial

int Monomial::degree() const noexcept {
  int d = 0;
  for (auto e : pw) d += e;
  for (const auto& [name, e] : params) d += e;
  return d;
}

bool Monomial::is_one() const noexcept {
  return params.empty() && atoms.empty() && std::all_of(pw.begin(), pw.end(), [](auto e) { return e == 0; });
}

int Monomial::jet_order() const noexcept {
  int order = -1;
  for (int s = kSlotU; s < kNumSlots; ++s) {
    if (pw[s] != 0) order = s - kSlotU;
  }
  for (const auto& a : atoms) {
    if (a.slot >= kSlotU) order = std::max(order, a.slot - kSlotU);
  }
  return order;
}

bool Monomial::depends_on_slot(int slot) const noexcept {
  if (pw[slot] != 0) return true;
  return std::any_of(atoms.begin(), atoms.end(), [slot](const Atom& a) { return a.slot == slot; });
}

bool Monomial::depends_on(const Symbol& s) const {
  if (!s.is_param()) return depends_on_slot(s.slot());
  return std::any_of(params.begin(), params.end(), [&](const auto& p) { return p.first == s.param_name(); });
}

const Atom* Monomial::atom(int slot, AtomKind kind) const noexcept {
  for (const auto& a : atoms) {
    if (a.slot == slot && a.kind == kind) return &a;
  }
  return nullptr;
}

bool Monomial::has_trig(int slot) const noexcept {
  return atom(slot, AtomKind::Sin) != nullptr || atom(slot, AtomKind::Cos) != nullptr;
}

std::strong_ordering operator<=>(const Monomial& a, const Monomial& b) {
  if (auto c = a.degree() <=> b.degree(); c != 0) return c;
  if (auto c = a.pw <=> b.pw; c != 0) return c;
  if (auto c = a.params <=> b.params; c != 0) return c;
  return a.atoms <=> b.atoms;
}

// ---------------------------------------------------------------- products

namespace {

using TermList = std::vector<std::pair<Monomial, Rational>>;

std::int16_t add_exponent(int a, int b) {
  int s = a + b;
  if (s > std::numeric_limits<std::int16_t>::max() || s < std::numeric_limits<std::int16_t>::min()) {
    throw UnsupportedExpression("exponent overflow");
  }
  return static_cast<std::int16_t>(s);
}

void sort_atoms(Monomial& m) { std::sort(m.atoms.begin(), m.atoms.end()); }

// Normalizes a trig atom: sin(-f) = -sin(f), cos(-f) = cos(f), sin(0) = 0, cos(0) = 1.
// Returns the sign (0 when the factor vanishes) and whether an atom remains.
int normalize_trig(Atom& a, bool& keep) {
  keep = true;
  if (a.arg.is_zero()) {
    keep = false;
    return a.kind == AtomKind::Sin ? 0 : 1;
  }
  if (a.arg.num < 0) {
    a.arg = -a.arg;
    return a.kind == AtomKind::Sin ? -1 : 1;
  }
  return 1;
}

// Product of two monomials; trig factors on a common symbol are linearized.
void multiply_monomials(const Monomial& a, const Monomial& b, const Rational& c, TermList& out) {
  Monomial base;
  for (int s = 0; s < kNumSlots; ++s) base.pw[s] = add_exponent(a.pw[s], b.pw[s]);

  // params: merge sorted lists
  {
    auto ia = a.params.begin();
    auto ib = b.params.begin();
    while (ia != a.params.end() || ib != b.params.end()) {
      if (ib == b.params.end() || (ia != a.params.end() && ia->first < ib->first)) {
        base.params.push_back(*ia++);
      } else if (ia == a.params.end() || ib->first < ia->first) {
        base.params.push_back(*ib++);
      } else {
        int e = ia->second + ib->second;
        if (e != 0) base.params.emplace_back(ia->first, e);
        ++ia;
        ++ib;
      }
    }
  }

  struct TrigPair {
    std::uint8_t slot;
    const Atom* ta;
    const Atom* tb;
  };
  std::vector<TrigPair> trig;

  auto merge_atom = [&](const Atom& at) {
    if (at.kind == AtomKind::Sin || at.kind == AtomKind::Cos) return;
    for (auto& existing : base.atoms) {
      if (existing.slot == at.slot && existing.kind == at.kind) {
        existing.arg = existing.arg + at.arg;
        return;
      }
    }
    base.atoms.push_back(at);
  };
  for (const auto& at : a.atoms) merge_atom(at);
  for (const auto& at : b.atoms) merge_atom(at);
  std::erase_if(base.atoms, [](const Atom& at) { return at.arg.is_zero(); });
  for (auto& at : base.atoms) {
    if (at.kind == AtomKind::Log && at.arg.num < 0) throw UnsupportedExpression("negative power of log");
  }

  for (const auto& at : a.atoms) {
    if (at.kind == AtomKind::Sin || at.kind == AtomKind::Cos) trig.push_back({at.slot, &at, nullptr});
  }
  for (const auto& at : b.atoms) {
    if (at.kind != AtomKind::Sin && at.kind != AtomKind::Cos) continue;
    auto it = std::find_if(trig.begin(), trig.end(), [&](const TrigPair& tp) { return tp.slot == at.slot; });
    if (it == trig.end()) {
      trig.push_back({at.slot, nullptr, &at});
    } else {
      it->tb = &at;
    }
  }

  TermList parts;
  parts.emplace_back(std::move(base), c);
  const Rational half(1, 2);
  for (const auto& tp : trig) {
    if (tp.ta == nullptr || tp.tb == nullptr) {
      const Atom& at = tp.ta != nullptr ? *tp.ta : *tp.tb;
      for (auto& [m, q] : parts) m.atoms.push_back(at);
      continue;
    }
    const Atom& x = *tp.ta;
    const Atom& y = *tp.tb;
    // (kind, arg, sign) pairs from product-to-sum identities
    struct Piece {
      AtomKind kind;
      Frac arg;
      int sign;
    };
    std::array<Piece, 2> pieces{};
    bool xs = x.kind == AtomKind::Sin;
    bool ys = y.kind == AtomKind::Sin;
    if (!xs && !ys) {
      pieces = {Piece{AtomKind::Cos, x.arg - y.arg, 1}, Piece{AtomKind::Cos, x.arg + y.arg, 1}};
    } else if (xs && ys) {
      pieces = {Piece{AtomKind::Cos, x.arg - y.arg, 1}, Piece{AtomKind::Cos, x.arg + y.arg, -1}};
    } else if (xs) {
      pieces = {Piece{AtomKind::Sin, x.arg + y.arg, 1}, Piece{AtomKind::Sin, x.arg - y.arg, 1}};
    } else {
      pieces = {Piece{AtomKind::Sin, y.arg + x.arg, 1}, Piece{AtomKind::Sin, y.arg - x.arg, 1}};
    }
    TermList next;
    for (const auto& [m, q] : parts) {
      for (const auto& pc : pieces) {
        Atom at{tp.slot, pc.kind, pc.arg};
        bool keep = false;
        int sign = normalize_trig(at, keep) * pc.sign;
        if (sign == 0) continue;
        Monomial mm = m;
        if (keep) mm.atoms.push_back(at);
        Rational qq = q * half;
        if (sign < 0) qq = -qq;
        next.emplace_back(std::move(mm), std::move(qq));
      }
    }
    parts = std::move(next);
  }
  for (auto& [m, q] : parts) {
    sort_atoms(m);
    out.emplace_back(std::move(m), std::move(q));
  }
}

// Partial derivative of a monomial with respect to a slot.
void partial_monomial(const Monomial& m, int slot, const Rational& c, TermList& out) {
  if (m.pw[slot] != 0) {
    Monomial d = m;
    d.pw[slot] = add_exponent(d.pw[slot], -1);
    out.emplace_back(std::move(d), c * m.pw[slot]);
  }
  for (std::size_t i = 0; i < m.atoms.size(); ++i) {
    const Atom& at = m.atoms[i];
    if (at.slot != slot) continue;
    Rational arg = at.arg.to_rational();
    switch (at.kind) {
      case AtomKind::Exp:
        out.emplace_back(m, c * arg);
        break;
      case AtomKind::Cos: {
        Monomial d = m;
        d.atoms[i].kind = AtomKind::Sin;
        sort_atoms(d);
        out.emplace_back(std::move(d), -c * arg);
        break;
      }
      case AtomKind::Sin: {
        Monomial d = m;
        d.atoms[i].kind = AtomKind::Cos;
        sort_atoms(d);
        out.emplace_back(std::move(d), c * arg);
        break;
      }
      case AtomKind::Log: {
        Monomial d = m;
        auto k = at.arg.num;
        if (k == 1) {
          d.atoms.erase(d.atoms.begin() + static_cast<std::ptrdiff_t>(i));
        } else {
          d.atoms[i].arg = Frac(k - 1);
        }
        d.pw[slot] = add_exponent(d.pw[slot], -1);
        out.emplace_back(std::move(d), c * static_cast<long>(k));
        break;
      }
    }
  }
}

void partial_param(const Monomial& m, const std::string& name, const Rational& c, TermList& out) {
  for (std::size_t i = 0; i < m.params.size(); ++i) {
    if (m.params[i].first != name) continue;
    Monomial d = m;
    int e = d.params[i].second;
    if (e == 1) {
      d.params.erase(d.params.begin() + static_cast<std::ptrdiff_t>(i));
    } else {
      d.params[i].second = e - 1;
    }
    out.emplace_back(std::move(d), c * e);
  }
}

}  // namespace

// ---------------------------------------------------------------- Expr

Expr::Expr(const Rational& c) {
  if (c != 0) terms_.emplace(Monomial{}, c);
}

Expr::Expr(long c) : Expr(Rational(c)) {}

Expr::Expr(const Symbol& s) {
  Monomial m;
  if (s.is_param()) {
    m.params.emplace_back(s.param_name(), 1);
  } else {
    m.pw[s.slot()] = 1;
  }
  terms_.emplace(std::move(m), Rational(1));
}

Expr Expr::term(Monomial m, const Rational& c) {
  Expr e;
  if (c != 0) e.terms_.emplace(std::move(m), c);
  return e;
}

namespace {

Expr atom_expr(const Symbol& s, AtomKind kind, Frac arg) {
  if (s.is_param()) throw UnsupportedExpression("transcendental atoms of parameters are not supported");
  Atom at{static_cast<std::uint8_t>(s.slot()), kind, arg};
  if (kind == AtomKind::Exp) {
    if (arg.is_zero()) return Expr(1);
    Monomial m;
    m.atoms.push_back(at);
    return Expr::term(std::move(m), 1);
  }
  bool keep = false;
  int sign = normalize_trig(at, keep);
  if (sign == 0) return Expr();
  Monomial m;
  if (keep) m.atoms.push_back(at);
  return Expr::term(std::move(m), sign);
}

}  // namespace

Expr Expr::exp_atom(const Symbol& s, const Frac& rate) { return atom_expr(s, AtomKind::Exp, rate); }
Expr Expr::sin_atom(const Symbol& s, const Frac& freq) { return atom_expr(s, AtomKind::Sin, freq); }
Expr Expr::cos_atom(const Symbol& s, const Frac& freq) { return atom_expr(s, AtomKind::Cos, freq); }

std::optional<Rational> Expr::constant_value() const {
  if (terms_.empty()) return Rational(0);
  if (terms_.size() == 1 && terms_.begin()->first.is_one()) return terms_.begin()->second;
  return std::nullopt;
}

int Expr::jet_order() const noexcept {
  int order = -1;
  for (const auto& [m, c] : terms_) order = std::max(order, m.jet_order());
  return order;
}

bool Expr::depends_on(const Symbol& s) const {
  return std::any_of(terms_.begin(), terms_.end(), [&](const auto& t) { return t.first.depends_on(s); });
}

bool Expr::has_atoms() const noexcept {
  return std::any_of(terms_.begin(), terms_.end(), [](const auto& t) { return !t.first.atoms.empty(); });
}

std::vector<Symbol> Expr::symbols() const {
  std::set<Symbol> out;
  for (const auto& [m, c] : terms_) {
    for (int s = 0; s < kNumSlots; ++s) {
      if (m.depends_on_slot(s)) out.insert(Symbol::from_slot(s));
    }
    for (const auto& [name, e] : m.params) out.insert(Symbol::param(name));
  }
  return {out.begin(), out.end()};
}

void Expr::add_term(const Monomial& m, const Rational& c) {
  if (c == 0) return;
  auto it = terms_.find(m);
  if (it == terms_.end()) {
    terms_.emplace(m, c);
    return;
  }
  it->second += c;
  if (it->second == 0) terms_.erase(it);
}

void Expr::add_term(Monomial&& m, const Rational& c) {
  if (c == 0) return;
  auto it = terms_.find(m);
  if (it == terms_.end()) {
    terms_.emplace(std::move(m), c);
    return;
  }
  it->second += c;
  if (it->second == 0) terms_.erase(it);
}

Expr& Expr::operator+=(const Expr& o) {
  for (const auto& [m, c] : o.terms_) add_term(m, c);
  return *this;
}

Expr& Expr::operator-=(const Expr& o) {
  for (const auto& [m, c] : o.terms_) add_term(m, -c);
  return *this;
}

Expr Expr::operator-() const {
  Expr r = *this;
  for (auto& [m, c] : r.terms_) c = -c;
  return r;
}

Expr operator*(const Expr& a, const Expr& b) {
  Expr r;
  TermList buf;
  for (const auto& [ma, ca] : a.terms_) {
    for (const auto& [mb, cb] : b.terms_) {
      buf.clear();
      multiply_monomials(ma, mb, ca * cb, buf);
      for (auto& [m, c] : buf) r.add_term(std::move(m), c);
    }
  }
  return r;
}

Expr& Expr::operator*=(const Expr& o) {
  *this = *this * o;
  return *this;
}

Expr Expr::inverse() const {
  if (terms_.size() != 1) {
    throw UnsupportedExpression("division is only supported by a single monomial factor, not \"" + str() + "\"");
  }
  const auto& [m, c] = *terms_.begin();
  Monomial inv;
  for (int s = 0; s < kNumSlots; ++s) inv.pw[s] = static_cast<std::int16_t>(-m.pw[s]);
  for (const auto& [name, e] : m.params) inv.params.emplace_back(name, -e);
  for (const auto& at : m.atoms) {
    if (at.kind != AtomKind::Exp) {
      throw UnsupportedExpression("cannot divide by a trigonometric or logarithmic factor");
    }
    inv.atoms.push_back(Atom{at.slot, AtomKind::Exp, -at.arg});
  }
  Rational ci = 1 / c;
  return Expr::term(std::move(inv), ci);
}

Expr pow(const Expr& base, int n) {
  if (n < 0) return pow(base.inverse(), -n);
  Expr result(1);
  Expr sq = base;
  while (n > 0) {
    if (n & 1) result *= sq;
    n >>= 1;
    if (n > 0) sq = sq * sq;
  }
  return result;
}

Expr diff(const Expr& e, const Symbol& v) {
  Expr r;
  TermList buf;
  for (const auto& [m, c] : e.terms()) {
    buf.clear();
    if (v.is_param()) {
      partial_param(m, v.param_name(), c, buf);
    } else {
      partial_monomial(m, v.slot(), c, buf);
    }
    for (auto& [mm, cc] : buf) r.add_term(std::move(mm), cc);
  }
  return r;
}

Expr diff(const Expr& e, const Symbol& v, int times) {
  Expr r = e;
  for (int i = 0; i < times; ++i) r = diff(r, v);
  return r;
}

// ---------------------------------------------------------------- integration

namespace {

// Antiderivative of exp(a s)*trig(b s) pieces (no powers of s, no log).
Expr antideriv_exp_trig(const Expr& e, int slot) {
  Expr r;
  const Symbol s = Symbol::from_slot(slot);
  for (const auto& [m, c] : e.terms()) {
    const Atom* ex = m.atom(slot, AtomKind::Exp);
    const Atom* co = m.atom(slot, AtomKind::Cos);
    const Atom* si = m.atom(slot, AtomKind::Sin);
    Rational a = ex != nullptr ? ex->arg.to_rational() : Rational(0);
    Rational b = co != nullptr ? co->arg.to_rational() : (si != nullptr ? si->arg.to_rational() : Rational(0));
    Monomial rest = m;
    std::erase_if(rest.atoms, [slot](const Atom& at) { return at.slot == slot; });
    Expr rest_e = Expr::term(rest, c);
    Expr ea = ex != nullptr ? Expr::exp_atom(s, ex->arg) : Expr(1);
    if (b == 0) {
      if (a == 0) throw NonIntegrable("internal: constant piece in exp/trig antiderivative");
      r += rest_e * ea * Expr(Rational(1 / a));
      continue;
    }
    Frac bf = co != nullptr ? co->arg : si->arg;
    Rational denom = a * a + b * b;
    Expr cosb = Expr::cos_atom(s, bf);
    Expr sinb = Expr::sin_atom(s, bf);
    Expr piece = co != nullptr ? (Expr(Rational(a / denom)) * cosb + Expr(Rational(b / denom)) * sinb)
                               : (Expr(Rational(a / denom)) * sinb - Expr(Rational(b / denom)) * cosb);
    r += rest_e * ea * piece;
  }
  return r;
}

// integral of s^n * E(s), E a combination of exp/trig atoms in s only.
Expr integrate_power_times(int n, const Expr& e, int slot) {
  Expr anti = antideriv_exp_trig(e, slot);
  Expr sn = pow(Expr(Symbol::from_slot(slot)), n);
  if (n == 0) return anti;
  return sn * anti - Expr(n) * integrate_power_times(n - 1, anti, slot);
}

// integral of s^n log(s)^k
Expr integrate_power_log(int n, int k, int slot) {
  const Symbol s = Symbol::from_slot(slot);
  auto logk = [&](int p) {
    if (p == 0) return Expr(1);
    Monomial m;
    m.atoms.push_back(Atom{static_cast<std::uint8_t>(slot), AtomKind::Log, Frac(p)});
    return Expr::term(std::move(m), 1);
  };
  if (n == -1) return Expr(Rational(1, k + 1)) * logk(k + 1);
  Rational inv(1, n + 1);
  Expr first = Expr(inv) * pow(Expr(s), n + 1) * logk(k);
  if (k == 0) return first;
  return first - Expr(Rational(inv * k)) * integrate_power_log(n, k - 1, slot);
}

Expr integrate_slot(const Monomial& m, const Rational& c, int slot) {
  const Symbol s = Symbol::from_slot(slot);
  int n = m.pw[slot];
  const Atom* lg = m.atom(slot, AtomKind::Log);
  Monomial rest = m;
  rest.pw[slot] = 0;
  std::erase_if(rest.atoms, [slot](const Atom& at) { return at.slot == slot; });
  Expr rest_e = Expr::term(rest, c);

  bool has_exp_trig = m.atom(slot, AtomKind::Exp) != nullptr || m.has_trig(slot);
  if (lg != nullptr) {
    if (has_exp_trig) throw NonIntegrable("cannot integrate log times exp/trig in " + s.str());
    return rest_e * integrate_power_log(n, static_cast<int>(lg->arg.num), slot);
  }
  if (!has_exp_trig) {
    if (n == -1) {
      Monomial lm;
      lm.atoms.push_back(Atom{static_cast<std::uint8_t>(slot), AtomKind::Log, Frac(1)});
      return rest_e * Expr::term(std::move(lm), 1);
    }
    return rest_e * Expr(Rational(1, n + 1)) * pow(Expr(s), n + 1);
  }
  if (n < 0) throw NonIntegrable("cannot integrate negative power times exp/trig in " + s.str());
  Monomial sp;
  for (const auto& at : m.atoms) {
    if (at.slot == slot) sp.atoms.push_back(at);
  }
  return rest_e * integrate_power_times(n, Expr::term(std::move(sp), 1), slot);
}

}  // namespace

Expr integrate(const Expr& e, const Symbol& v) {
  Expr r;
  for (const auto& [m, c] : e.terms()) {
    if (v.is_param()) {
      int n = 0;
      Monomial rest = m;
      for (auto it = rest.params.begin(); it != rest.params.end(); ++it) {
        if (it->first == v.param_name()) {
          n = it->second;
          rest.params.erase(it);
          break;
        }
      }
      if (n == -1) throw NonIntegrable("cannot integrate 1/" + v.str());
      r += Expr::term(std::move(rest), c) * Expr(Rational(1, n + 1)) * pow(Expr(v), n + 1);
      continue;
    }
    r += integrate_slot(m, c, v.slot());
  }
  return r;
}

Expr coefficient(const Expr& e, const Symbol& s, int power) {
  Expr r;
  for (const auto& [m, c] : e.terms()) {
    Monomial mm = m;
    if (s.is_param()) {
      int k = 0;
      for (auto it = mm.params.begin(); it != mm.params.end(); ++it) {
        if (it->first == s.param_name()) {
          k = it->second;
          mm.params.erase(it);
          break;
        }
      }
      if (k == power) r.add_term(std::move(mm), c);
      continue;
    }
    if (m.pw[s.slot()] != power) continue;
    if (std::any_of(m.atoms.begin(), m.atoms.end(), [&](const Atom& at) { return at.slot == s.slot(); })) continue;
    mm.pw[s.slot()] = 0;
    r.add_term(std::move(mm), c);
  }
  return r;
}

int degree_in(const Expr& e, const Symbol& s) {
  int d = 0;
  for (const auto& [m, c] : e.terms()) {
    if (s.is_param()) {
      for (const auto& [name, k] : m.params) {
        if (name == s.param_name()) d = std::max(d, k);
      }
    } else {
      d = std::max<int>(d, m.pw[s.slot()]);
    }
  }
  return d;
}

// ---------------------------------------------------------------- ParamTable

void ParamTable::declare(const std::string& name) { entries_.try_emplace(name, std::nullopt); }

void ParamTable::bind(const std::string& name, const Rational& value) { entries_[name] = value; }

std::optional<Rational> ParamTable::value(const std::string& name) const {
  auto it = entries_.find(name);
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

std::vector<std::string> ParamTable::free_names() const {
  std::vector<std::string> out;
  for (const auto& [name, v] : entries_) {
    if (!v) out.push_back(name);
  }
  return out;
}

// ---------------------------------------------------------------- substitution

namespace {

// Replacement of the form lambda*s' (single symbol, degree one, no atoms).
std::optional<std::pair<int, Frac>> as_scaled_symbol(const Expr& e) {
  if (e.size() != 1) return std::nullopt;
  const auto& [m, c] = *e.terms().begin();
  if (!m.atoms.empty() || !m.params.empty()) return std::nullopt;
  int slot = -1;
  for (int s = 0; s < kNumSlots; ++s) {
    if (m.pw[s] == 0) continue;
    if (m.pw[s] != 1 || slot >= 0) return std::nullopt;
    slot = s;
  }
  if (slot < 0) return std::nullopt;
  return std::make_pair(slot, Frac::from_rational(c));
}

void check_acyclic(const std::map<Symbol, Expr>& bindings) {
  std::map<Symbol, std::vector<Symbol>> graph;
  for (const auto& [sym, repl] : bindings) {
    for (const auto& dep : repl.symbols()) {
      if (dep != sym && bindings.count(dep) != 0) graph[sym].push_back(dep);
    }
  }
  std::map<Symbol, int> state;  // 1 = on stack, 2 = done
  std::function<void(const Symbol&)> visit = [&](const Symbol& s) {
    state[s] = 1;
    for (const auto& d : graph[s]) {
      if (state[d] == 1) throw CyclicBinding("cyclic binding through " + s.str() + " and " + d.str());
      if (state[d] == 0) visit(d);
    }
    state[s] = 2;
  };
  for (const auto& [sym, repl] : bindings) {
    if (state[sym] == 0) visit(sym);
  }
}

}  // namespace

Expr substitute(const Expr& e, const std::map<Symbol, Expr>& bindings) {
  if (bindings.empty()) return e;
  check_acyclic(bindings);

  std::map<std::pair<Symbol, int>, Expr> power_cache;
  auto power_of = [&](const Symbol& s, int k) -> const Expr& {
    auto key = std::make_pair(s, k);
    auto it = power_cache.find(key);
    if (it != power_cache.end()) return it->second;
    return power_cache.emplace(key, pow(bindings.at(s), k)).first->second;
  };

  Expr result;
  for (const auto& [m, c] : e.terms()) {
    Monomial rest = m;
    Expr factor(1);
    for (int s = 0; s < kNumSlots; ++s) {
      Symbol sym = Symbol::from_slot(s);
      if (bindings.count(sym) == 0) continue;
      if (m.pw[s] != 0) {
        factor = factor * power_of(sym, m.pw[s]);
        rest.pw[s] = 0;
      }
      for (const auto& at : m.atoms) {
        if (at.slot != s) continue;
        auto scaled = as_scaled_symbol(bindings.at(sym));
        if (!scaled) {
          throw UnsupportedExpression("cannot substitute " + bindings.at(sym).str() + " into a transcendental atom of " +
                                      sym.str());
        }
        Symbol target = Symbol::from_slot(scaled->first);
        Frac lambda = scaled->second;
        switch (at.kind) {
          case AtomKind::Exp:
            factor = factor * Expr::exp_atom(target, at.arg * lambda);
            break;
          case AtomKind::Cos:
            factor = factor * Expr::cos_atom(target, at.arg * lambda);
            break;
          case AtomKind::Sin:
            factor = factor * Expr::sin_atom(target, at.arg * lambda);
            break;
          case AtomKind::Log: {
            if (!(lambda == Frac(1))) throw UnsupportedExpression("log of a scaled symbol is not supported");
            Monomial lm;
            lm.atoms.push_back(Atom{static_cast<std::uint8_t>(target.slot()), AtomKind::Log, at.arg});
            factor = factor * Expr::term(std::move(lm), 1);
            break;
          }
        }
      }
      std::erase_if(rest.atoms, [s](const Atom& at) { return at.slot == s; });
    }
    std::vector<std::pair<std::string, int>> kept;
    for (const auto& [name, k] : m.params) {
      Symbol sym = Symbol::param(name);
      if (bindings.count(sym) == 0) {
        kept.emplace_back(name, k);
        continue;
      }
      factor = factor * power_of(sym, k);
    }
    rest.params = std::move(kept);
    result += Expr::term(std::move(rest), c) * factor;
  }
  return result;
}

Expr substitute(const Expr& e, const ParamTable& params) {
  std::map<Symbol, Expr> b;
  for (const auto& [name, v] : params.entries()) {
    if (v) b.emplace(Symbol::param(name), Expr(*v));
  }
  return substitute(e, b);
}

// ---------------------------------------------------------------- parsing

namespace {

std::optional<Symbol> resolve_identifier(const std::string& name, const ParamTable& params) {
  if (name == "x") return Symbol::x();
  if (name == "t") return Symbol::t();
  if (name == "u") return Symbol::u();
  if (name == "p") return Symbol::p(1);
  if (name == "q") return Symbol::p(2);
  if (params.declared(name)) return Symbol::param(name);
  if (name.size() >= 2 && name[0] == 'p' && name[1] != '0') {
    bool digits = std::all_of(name.begin() + 1, name.end(), [](char ch) { return ch >= '0' && ch <= '9'; });
    if (digits && name.size() <= 3) {
      int k = std::stoi(name.substr(1));
      if (k >= 1 && k <= kMaxJetOrder) return Symbol::p(k);
    }
  }
  return std::nullopt;
}

Expr build(const syntax::Node& n, const ParamTable& params) {
  using syntax::NodeKind;
  switch (n.kind) {
    case NodeKind::Number:
      return Expr(Rational(n.text));
    case NodeKind::Decimal:
      throw ParseError("floating-point literal not allowed in exact expressions", n.offset);
    case NodeKind::Ident: {
      auto sym = resolve_identifier(n.text, params);
      if (!sym) throw UnknownIdentifier(n.text, n.offset);
      return Expr(*sym);
    }
    case NodeKind::Add:
      return build(n.children[0], params) + build(n.children[1], params);
    case NodeKind::Sub:
      return build(n.children[0], params) - build(n.children[1], params);
    case NodeKind::Mul:
      return build(n.children[0], params) * build(n.children[1], params);
    case NodeKind::Neg:
      return -build(n.children[0], params);
    case NodeKind::Div: {
      Expr den = build(n.children[1], params);
      if (den.is_zero()) throw ParseError("division by zero", n.offset);
      try {
        return build(n.children[0], params) * den.inverse();
      } catch (const UnsupportedExpression& err) {
        throw ParseError(err.what(), n.offset);
      }
    }
    case NodeKind::Pow: {
      Expr base = build(n.children[0], params);
      Expr ex = build(n.children[1], params);
      auto k = ex.constant_value();
      if (!k || k->get_den() != 1 || !k->get_num().fits_sint_p()) {
        throw ParseError("exponent must be an integer constant", n.children[1].offset);
      }
      int kk = static_cast<int>(k->get_num().get_si());
      if (kk < 0 && base.is_zero()) throw ParseError("division by zero", n.offset);
      try {
        return pow(base, kk);
      } catch (const UnsupportedExpression& err) {
        throw ParseError(err.what(), n.offset);
      }
    }
    case NodeKind::Call: {
      static const std::set<std::string> known{"exp", "log", "sin", "cos", "sinh", "cosh"};
      if (known.count(n.text) == 0) throw UnknownIdentifier(n.text, n.offset);
      Expr arg = build(n.children[0], params);
      auto cv = arg.constant_value();
      if (cv) {
        if (*cv != 0) throw ParseError(n.text + " of a nonzero constant is not exact", n.children[0].offset);
        if (n.text == "log") throw ParseError("log(0) is undefined", n.children[0].offset);
        return (n.text == "sin" || n.text == "sinh") ? Expr(0) : Expr(1);
      }
      auto scaled = as_scaled_symbol(arg);
      if (!scaled) {
        throw ParseError(n.text + " argument must be a rational multiple of a single symbol",
                         n.children[0].offset);
      }
      Symbol s = Symbol::from_slot(scaled->first);
      Frac a = scaled->second;
      if (n.text == "exp") return Expr::exp_atom(s, a);
      if (n.text == "sin") return Expr::sin_atom(s, a);
      if (n.text == "cos") return Expr::cos_atom(s, a);
      if (n.text == "cosh") return Expr(Rational(1, 2)) * (Expr::exp_atom(s, a) + Expr::exp_atom(s, -a));
      if (n.text == "sinh") return Expr(Rational(1, 2)) * (Expr::exp_atom(s, a) - Expr::exp_atom(s, -a));
      // log
      if (!(a == Frac(1))) throw ParseError("log argument must be a bare symbol", n.children[0].offset);
      Monomial m;
      m.atoms.push_back(Atom{static_cast<std::uint8_t>(s.slot()), AtomKind::Log, Frac(1)});
      return Expr::term(std::move(m), 1);
    }
  }
  throw ParseError("internal: unknown node", n.offset);
}

std::string print_frac_times(const Frac& f, const std::string& sym) {
  if (f == Frac(1)) return sym;
  if (f == Frac(-1)) return "-" + sym;
  return f.to_rational().get_str() + "*" + sym;
}

std::string print_monomial(const Monomial& m) {
  std::vector<std::string> factors;
  for (int s = 0; s < kNumSlots; ++s) {
    if (m.pw[s] == 0) continue;
    std::string name = Symbol::from_slot(s).str();
    if (m.pw[s] == 1) {
      factors.push_back(name);
    } else if (m.pw[s] > 0) {
      factors.push_back(name + "^" + std::to_string(m.pw[s]));
    } else {
      factors.push_back(name + "^(" + std::to_string(m.pw[s]) + ")");
    }
  }
  for (const auto& [name, k] : m.params) {
    if (k == 1) {
      factors.push_back(name);
    } else if (k > 0) {
      factors.push_back(name + "^" + std::to_string(k));
    } else {
      factors.push_back(name + "^(" + std::to_string(k) + ")");
    }
  }
  for (const auto& at : m.atoms) {
    std::string name = Symbol::from_slot(at.slot).str();
    switch (at.kind) {
      case AtomKind::Exp:
        factors.push_back("exp(" + print_frac_times(at.arg, name) + ")");
        break;
      case AtomKind::Cos:
        factors.push_back("cos(" + print_frac_times(at.arg, name) + ")");
        break;
      case AtomKind::Sin:
        factors.push_back("sin(" + print_frac_times(at.arg, name) + ")");
        break;
      case AtomKind::Log:
        factors.push_back(at.arg.num == 1 ? "log(" + name + ")"
                                          : "log(" + name + ")^" + std::to_string(at.arg.num));
        break;
    }
  }
  std::string out;
  for (std::size_t i = 0; i < factors.size(); ++i) {
    if (i != 0) out += "*";
    out += factors[i];
  }
  return out;
}

}  // namespace

Expr parse(std::string_view text, const ParamTable& params) {
  return build(syntax::parse_tree(text), params);
}

std::string print(const Expr& e) {
  if (e.is_zero()) return "0";
  std::string out;
  bool first = true;
  for (auto it = e.terms().rbegin(); it != e.terms().rend(); ++it) {
    const auto& [m, c] = *it;
    bool neg = c < 0;
    Rational mag = neg ? Rational(-c) : c;
    std::string body;
    if (m.is_one()) {
      body = mag.get_str();
    } else if (mag == 1) {
      body = print_monomial(m);
    } else {
      body = mag.get_str() + "*" + print_monomial(m);
    }
    if (first) {
      out = neg ? "-" + body : body;
      first = false;
    } else {
      out += neg ? " - " : " + ";
      out += body;
    }
  }
  return out;
}

std::string Expr::str() const { return print(*this); }

}  // namespace clawkit
