#pragma once

#include <optional>
#include <string>
#include <vector>

#include "clawkit/symexpr.hpp"

namespace clawkit {

/// u_t = f(x,u,p1) * p3 + g(x,u,p1,p2)
struct EvolutionEq {
  Expr f;
  Expr g;
  ParamTable params;

  /// Q = f*p3 + g with bound parameters substituted.
  Expr rhs() const;
};

struct StructReport {
  bool k_vanishes = false;
  std::optional<bool> n_vanishes;
  bool g_quadratic_in_q = false;
  std::optional<std::string> normal_form_detected;
  std::vector<std::string> predicted_obstructions;
  bool linear = false;
};

inline constexpr const char* kNormalFormTag = "u_xxx + g(x,u,p)";
inline constexpr const char* kObstructionNoWeightMinusOne = "no weight -1 laws";
inline constexpr const char* kObstructionQuadraticInQ =
    "higher-weight laws require g at most quadratic in q (necessary condition only)";

EvolutionEq validate_equation(const Expr& f, const Expr& g, const ParamTable& params = {});
/// Parses f and g with the given parameter table and validates the result.
EvolutionEq parse_equation(const std::string& f, const std::string& g, const ParamTable& params = {});

/// g_qq == 2 f_p
bool k_invariant_vanishes(const EvolutionEq& eq);
/// The two coordinate relations on f; requires k_invariant_vanishes.
bool n_invariant_vanishes(const EvolutionEq& eq);
/// f constant in the jet and g affine in u, p1, p2 without transcendental u-dependence.
bool is_linear_equation(const EvolutionEq& eq);
StructReport structural_report(const EvolutionEq& eq);

}  // namespace clawkit
