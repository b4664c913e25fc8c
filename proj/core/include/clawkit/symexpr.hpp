#pragma once

// Exact symbolic expressions over jet coordinates.
//
// An Expr is kept in canonical form: a finite sum of rational multiples of
// monomials.  A monomial is a product of integer powers of symbols (t, x, u,
// p1..p20 and named parameters) and transcendental atoms applied to a single
// symbol with a rational coefficient.  Atoms are normalized so that
//   - each symbol carries at most one exp(a*s) factor (a != 0),
//   - each symbol carries at most one trigonometric factor, sin(b*s) or
//     cos(b*s) with b > 0 (products are linearized),
//   - sinh/cosh are rewritten through exponentials,
//   - log(s)^k appears only with a bare symbol argument.
// With these rules equality of canonical forms is equality of functions.

#include <gmpxx.h>

#include <array>
#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace clawkit {

using Rational = mpq_class;

std::string to_string(const Rational& q);

inline constexpr int kMaxJetOrder = 20;
inline constexpr int kSlotT = 0;
inline constexpr int kSlotX = 1;
inline constexpr int kSlotU = 2;
inline constexpr int kNumSlots = kSlotU + kMaxJetOrder + 1;

constexpr int jet_slot(int order) { return kSlotU + order; }

class Symbol {
 public:
  static Symbol t() { return Symbol(kSlotT); }
  static Symbol x() { return Symbol(kSlotX); }
  static Symbol u() { return Symbol(kSlotU); }
  /// p(0) is u, p(i) the i-th x-derivative.
  static Symbol p(int order);
  static Symbol param(std::string name);
  static Symbol from_slot(int slot);

  bool is_param() const noexcept { return slot_ < 0; }
  int slot() const noexcept { return slot_; }
  /// u -> 0, p_i -> i, anything else -> -1.
  int jet_order() const noexcept { return slot_ >= kSlotU ? slot_ - kSlotU : -1; }
  const std::string& param_name() const noexcept { return name_; }
  std::string str() const;

  friend bool operator==(const Symbol& a, const Symbol& b) {
    return a.slot_ == b.slot_ && a.name_ == b.name_;
  }
  friend std::strong_ordering operator<=>(const Symbol& a, const Symbol& b);

 private:
  explicit Symbol(int slot) : slot_(slot) {}
  int slot_ = -1;
  std::string name_;
};

/// Exact fraction with machine-word parts, used for atom arguments.
struct Frac {
  std::int64_t num = 0;
  std::int64_t den = 1;

  Frac() = default;
  Frac(std::int64_t n, std::int64_t d = 1);
  static Frac from_rational(const Rational& q);
  Rational to_rational() const;

  bool is_zero() const noexcept { return num == 0; }
  Frac operator-() const { return Frac(-num, den); }
  friend Frac operator+(const Frac& a, const Frac& b);
  friend Frac operator-(const Frac& a, const Frac& b) { return a + (-b); }
  friend Frac operator*(const Frac& a, const Frac& b);
  friend bool operator==(const Frac&, const Frac&) = default;
  friend std::strong_ordering operator<=>(const Frac& a, const Frac& b);
};

enum class AtomKind : std::uint8_t { Exp, Cos, Sin, Log };

struct Atom {
  std::uint8_t slot = 0;
  AtomKind kind = AtomKind::Exp;
  Frac arg;  // rate/frequency; for Log the power

  friend bool operator==(const Atom&, const Atom&) = default;
  friend std::strong_ordering operator<=>(const Atom& a, const Atom& b);
};

class Monomial {
 public:
  std::array<std::int16_t, kNumSlots> pw{};
  std::vector<std::pair<std::string, int>> params;  // sorted by name
  std::vector<Atom> atoms;                          // sorted by (slot, kind)

  int degree() const noexcept;
  bool is_one() const noexcept;
  /// Highest jet order present (u counts as 0), -1 when free of u and p_i.
  int jet_order() const noexcept;
  bool depends_on_slot(int slot) const noexcept;
  bool depends_on(const Symbol& s) const;
  bool has_params() const noexcept { return !params.empty(); }
  const Atom* atom(int slot, AtomKind kind) const noexcept;
  bool has_trig(int slot) const noexcept;

  friend bool operator==(const Monomial&, const Monomial&) = default;
  friend std::strong_ordering operator<=>(const Monomial& a, const Monomial& b);
};

class Expr {
 public:
  using TermMap = std::map<Monomial, Rational>;

  Expr() = default;
  Expr(const Rational& c);  // NOLINT(google-explicit-constructor)
  Expr(long c);             // NOLINT(google-explicit-constructor)
  Expr(int c) : Expr(static_cast<long>(c)) {}  // NOLINT(google-explicit-constructor)
  explicit Expr(const Symbol& s);
  static Expr term(Monomial m, const Rational& c);
  static Expr exp_atom(const Symbol& s, const Frac& rate);
  static Expr sin_atom(const Symbol& s, const Frac& freq);
  static Expr cos_atom(const Symbol& s, const Frac& freq);

  const TermMap& terms() const noexcept { return terms_; }
  std::size_t size() const noexcept { return terms_.size(); }
  bool is_zero() const noexcept { return terms_.empty(); }
  std::optional<Rational> constant_value() const;
  bool is_constant() const { return constant_value().has_value(); }
  int jet_order() const noexcept;
  bool depends_on(const Symbol& s) const;
  bool has_atoms() const noexcept;
  /// Every symbol and parameter occurring anywhere in the expression.
  std::vector<Symbol> symbols() const;

  Expr& operator+=(const Expr& o);
  Expr& operator-=(const Expr& o);
  Expr& operator*=(const Expr& o);
  Expr operator-() const;
  friend Expr operator+(Expr a, const Expr& b) { return a += b; }
  friend Expr operator-(Expr a, const Expr& b) { return a -= b; }
  friend Expr operator*(const Expr& a, const Expr& b);
  friend bool operator==(const Expr&, const Expr&) = default;

  /// Multiplicative inverse of a single-term expression without trig/log factors.
  Expr inverse() const;
  std::string str() const;

  // Low-level accumulation used by the differential-algebra layer.
  void add_term(const Monomial& m, const Rational& c);
  void add_term(Monomial&& m, const Rational& c);

 private:
  TermMap terms_;
};

Expr pow(const Expr& base, int n);
Expr diff(const Expr& e, const Symbol& v);
Expr diff(const Expr& e, const Symbol& v, int times);
/// Antiderivative with respect to v; throws NonIntegrable outside the class.
Expr integrate(const Expr& e, const Symbol& v);

/// Partial coefficients of a polynomial in s: coefficient(e, s, k) collects terms
/// with exactly s^k (and no atom in s).
Expr coefficient(const Expr& e, const Symbol& s, int power);
/// Largest power of s occurring; 0 when e is free of s.
int degree_in(const Expr& e, const Symbol& s);

/// Registry of named parameters: each is either free or bound to a rational.
class ParamTable {
 public:
  void declare(const std::string& name);
  void bind(const std::string& name, const Rational& value);
  bool declared(const std::string& name) const { return entries_.count(name) != 0; }
  std::optional<Rational> value(const std::string& name) const;
  const std::map<std::string, std::optional<Rational>>& entries() const { return entries_; }
  std::vector<std::string> free_names() const;

 private:
  std::map<std::string, std::optional<Rational>> entries_;
};

/// Simultaneous substitution followed by canonicalization.
Expr substitute(const Expr& e, const std::map<Symbol, Expr>& bindings);
/// Replaces every bound parameter by its value; free parameters stay symbolic.
Expr substitute(const Expr& e, const ParamTable& params);

/// Parses the expression grammar into canonical form.
Expr parse(std::string_view text, const ParamTable& params = {});
std::string print(const Expr& e);

}  // namespace clawkit
