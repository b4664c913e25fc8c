#pragma once

#include <memory>
#include <optional>
#include <utility>

#include "clawkit/symexpr.hpp"

namespace clawkit {

/// Jet order cap used when none is given: CLAWKIT_JET_CAP if set, otherwise 12.
int default_jet_cap();

class JetContext {
 public:
  explicit JetContext(int max_order = default_jet_cap());
  /// rhs is Q = f*p3 + g of the evolution equation u_t = Q.
  JetContext(Expr rhs, int max_order = default_jet_cap());

  int max_order() const noexcept { return max_order_; }
  bool has_rhs() const noexcept { return rhs_.has_value(); }
  const Expr& rhs() const;
  /// D_x^i Q, memoized.
  const Expr& rhs_derivative(int i) const;

 private:
  struct Cache;
  int max_order_;
  std::optional<Expr> rhs_;
  std::shared_ptr<Cache> cache_;
};

Expr total_x(const Expr& e, const JetContext& ctx);
Expr total_t(const Expr& e, const JetContext& ctx);
Expr euler(const Expr& e, const JetContext& ctx);

struct ByParts {
  Expr reduced;
  Expr exact_part;
};

/// e = reduced + D_x(exact_part) where no term of `reduced` is linear in its top jet variable.
ByParts reduce_by_parts(const Expr& e, const JetContext& ctx);

/// F with D_x F = h. Throws NotExact or NonIntegrableResidual.
Expr extract_flux(const Expr& h, const JetContext& ctx);

}  // namespace clawkit
