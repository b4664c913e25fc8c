#pragma once

// Floating-point evaluation of exact expressions and of free-form formulas
// (initial data, parametric curves).

#include <cstddef>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "clawkit/parser.hpp"
#include "clawkit/symexpr.hpp"

namespace clawkit {

/// Expr compiled for repeated evaluation.  Parameters must be bound beforehand.
class CompiledExpr {
 public:
  explicit CompiledExpr(const Expr& e);

  int jet_order() const noexcept { return jet_order_; }
  /// jets[i] holds the i-th x-derivative of u (jets[0] = u).
  double operator()(double t, double x, const double* jets) const;
  /// Vectorized form: out[j] = e(t, x[j], jets[0][j], jets[1][j], ...).
  void evaluate(double t, const std::vector<double>& x, const std::vector<std::vector<double>>& jets,
                std::vector<double>& out) const;

 private:
  struct Term {
    double coeff;
    std::vector<std::pair<int, int>> powers;  // (slot, exponent)
    std::vector<Atom> atoms;
  };
  std::vector<Term> terms_;
  int jet_order_ = -1;
};

/// Formula over named real variables, e.g. "12*k^2*sech(k*x)^2" with k bound.
/// Functions: exp log sqrt abs sin cos tan sinh cosh tanh sech; constant pi.
class NumericFormula {
 public:
  NumericFormula(std::string_view text, std::vector<std::string> variables,
                 std::map<std::string, double> constants = {});
  double operator()(const std::vector<double>& values) const;
  double operator()(double v) const { return (*this)(std::vector<double>{v}); }

 private:
  double eval(const syntax::Node& n, const std::vector<double>& values) const;
  void check(const syntax::Node& n) const;
  syntax::Node root_;
  std::vector<std::string> vars_;
  std::map<std::string, double> constants_;
};

}  // namespace clawkit
