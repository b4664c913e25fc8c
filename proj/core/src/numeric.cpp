#include "clawkit/numeric.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

#include "clawkit/error.hpp"

namespace clawkit {

CompiledExpr::CompiledExpr(const Expr& e) : jet_order_(e.jet_order()) {
  for (const auto& [m, c] : e.terms()) {
    if (m.has_params()) throw PreconditionViolated("cannot evaluate an expression with unbound parameters");
    Term t{c.get_d(), {}, m.atoms};
    for (int s = 0; s < kNumSlots; ++s) {
      if (m.pw[s] != 0) t.powers.emplace_back(s, m.pw[s]);
    }
    terms_.push_back(std::move(t));
  }
}

namespace {

double slot_value(int slot, double t, double x, const double* jets) {
  if (slot == kSlotT) return t;
  if (slot == kSlotX) return x;
  return jets[slot - kSlotU];
}

double ipow(double b, int e) {
  if (e < 0) return 1.0 / ipow(b, -e);
  double r = 1.0;
  while (e > 0) {
    if (e & 1) r *= b;
    b *= b;
    e >>= 1;
  }
  return r;
}

}  // namespace

double CompiledExpr::operator()(double t, double x, const double* jets) const {
  double sum = 0.0;
  for (const auto& term : terms_) {
    double v = term.coeff;
    for (const auto& [s, e] : term.powers) v *= ipow(slot_value(s, t, x, jets), e);
    for (const auto& a : term.atoms) {
      double z = slot_value(a.slot, t, x, jets);
      double arg = static_cast<double>(a.arg.num) / static_cast<double>(a.arg.den);
      switch (a.kind) {
        case AtomKind::Exp:
          v *= std::exp(arg * z);
          break;
        case AtomKind::Cos:
          v *= std::cos(arg * z);
          break;
        case AtomKind::Sin:
          v *= std::sin(arg * z);
          break;
        case AtomKind::Log:
          v *= ipow(std::log(z), static_cast<int>(a.arg.num));
          break;
      }
    }
    sum += v;
  }
  return sum;
}

void CompiledExpr::evaluate(double t, const std::vector<double>& x, const std::vector<std::vector<double>>& jets,
                            std::vector<double>& out) const {
  const std::size_t n = x.size();
  if (static_cast<int>(jets.size()) <= jet_order_) throw Error("not enough jet data for evaluation");
  out.assign(n, 0.0);
  std::vector<double> point(jets.size());
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i < jets.size(); ++i) point[i] = jets[i][j];
    out[j] = (*this)(t, x[j], point.data());
  }
}

// ---------------------------------------------------------------- formulas

namespace {

const std::set<std::string>& known_functions() {
  static const std::set<std::string> f{"exp", "log", "sqrt", "abs", "sin", "cos", "tan", "sinh", "cosh", "tanh", "sech"};
  return f;
}

}  // namespace

NumericFormula::NumericFormula(std::string_view text, std::vector<std::string> variables,
                               std::map<std::string, double> constants)
    : root_(syntax::parse_tree(text, syntax::ParseOptions{true})),
      vars_(std::move(variables)),
      constants_(std::move(constants)) {
  constants_.try_emplace("pi", std::numbers::pi);
  check(root_);
}

void NumericFormula::check(const syntax::Node& n) const {
  using syntax::NodeKind;
  if (n.kind == NodeKind::Ident) {
    bool var = std::find(vars_.begin(), vars_.end(), n.text) != vars_.end();
    if (!var && constants_.count(n.text) == 0) throw UnknownIdentifier(n.text, n.offset);
  }
  if (n.kind == NodeKind::Call && known_functions().count(n.text) == 0) throw UnknownIdentifier(n.text, n.offset);
  for (const auto& c : n.children) check(c);
}

double NumericFormula::operator()(const std::vector<double>& values) const {
  if (values.size() != vars_.size()) throw Error("formula expects " + std::to_string(vars_.size()) + " values");
  return eval(root_, values);
}

double NumericFormula::eval(const syntax::Node& n, const std::vector<double>& values) const {
  using syntax::NodeKind;
  switch (n.kind) {
    case NodeKind::Number:
    case NodeKind::Decimal:
      return std::stod(n.text);
    case NodeKind::Ident: {
      auto it = std::find(vars_.begin(), vars_.end(), n.text);
      if (it != vars_.end()) return values[static_cast<std::size_t>(it - vars_.begin())];
      return constants_.at(n.text);
    }
    case NodeKind::Add:
      return eval(n.children[0], values) + eval(n.children[1], values);
    case NodeKind::Sub:
      return eval(n.children[0], values) - eval(n.children[1], values);
    case NodeKind::Mul:
      return eval(n.children[0], values) * eval(n.children[1], values);
    case NodeKind::Div:
      return eval(n.children[0], values) / eval(n.children[1], values);
    case NodeKind::Pow:
      return std::pow(eval(n.children[0], values), eval(n.children[1], values));
    case NodeKind::Neg:
      return -eval(n.children[0], values);
    case NodeKind::Call: {
      double a = eval(n.children[0], values);
      const std::string& f = n.text;
      if (f == "exp") return std::exp(a);
      if (f == "log") return std::log(a);
      if (f == "sqrt") return std::sqrt(a);
      if (f == "abs") return std::fabs(a);
      if (f == "sin") return std::sin(a);
      if (f == "cos") return std::cos(a);
      if (f == "tan") return std::tan(a);
      if (f == "sinh") return std::sinh(a);
      if (f == "cosh") return std::cosh(a);
      if (f == "tanh") return std::tanh(a);
      return 1.0 / std::cosh(a);
    }
  }
  return 0.0;
}

}  // namespace clawkit
