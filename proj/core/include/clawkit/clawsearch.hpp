#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "clawkit/jetcalc.hpp"
#include "clawkit/linalg.hpp"
#include "clawkit/structclass.hpp"
#include "clawkit/symexpr.hpp"

namespace clawkit {

struct AnsatzSpec {
  int d_x = 2;
  int d_t = 2;
  int d_u = 3;
  /// Single-term atom factors such as exp(u), sin(u/2), exp(-x).
  std::vector<Expr> atoms;
  /// Optional single-term factors in t such as exp(t), cos(t/2).
  std::vector<Expr> time_atoms;
  std::size_t basis_cap = 20000;
  /// Keep only monomials that are already reduced by parts and depend on the jet.
  bool reduced = false;
};

struct Ansatz {
  int m = 0;
  AnsatzSpec spec;
  std::vector<Monomial> basis;

  std::size_t unknowns() const noexcept { return basis.size(); }
};

struct DeterminingSystem {
  std::vector<Monomial> unknowns;
  std::vector<SparseRow> equations;
  /// Residual monomial each equation was collected from.
  std::vector<Monomial> provenance;
};

struct ConservationLaw {
  Expr density;
  Expr flux;
  int order = 0;
  int weight = -1;
};

enum class ResidualRoute { Euler, ByParts };

struct SearchOptions {
  int d_x = 2;
  int d_t = 2;
  /// Fixed jet degree; when unset max(m + 3, 2m + 2) is used.
  std::optional<int> d_u;
  /// Explicit atom factors; when unset they are harvested from the equation.
  std::optional<std::vector<Expr>> atoms;
  int atom_closure = 1;
  std::vector<Expr> time_atoms;
  std::size_t basis_cap = 20000;
  bool reduced_basis = true;
  ResidualRoute route = ResidualRoute::Euler;
  int jet_cap = default_jet_cap();
};

struct SearchResult {
  Ansatz ansatz;
  std::vector<ConservationLaw> laws;
  std::size_t equations = 0;
  std::size_t rank = 0;
  std::vector<std::string> warnings;

  /// Number of laws whose density has exactly the given order.
  int count_at_order(int order) const;
};

struct TypeTriple {
  int n_minus1 = 0;
  int n1 = 0;
  int n3 = 0;
  std::optional<int> n5;

  friend bool operator==(const TypeTriple&, const TypeTriple&) = default;
};

struct TypeReport {
  TypeTriple type;
  /// One search per order 0..2 (3 when n5 was requested).
  std::vector<SearchResult> runs;
  std::vector<std::string> warnings;
};

inline constexpr const char* kLinearWarning = "linear equation: counts not governed by the nonlinear classification";

int weight_of_order(int order);
int default_jet_degree(int m);

/// Atom factors suggested by the transcendental content of f and g.
std::vector<Expr> harvest_atoms(const EvolutionEq& eq, int closure = 1);

Ansatz build_ansatz(const EvolutionEq& eq, int m, const AnsatzSpec& spec);
Ansatz build_ansatz(const EvolutionEq& eq, int m, int d_x, int d_t, int d_u);

DeterminingSystem determining_system(const EvolutionEq& eq, const Ansatz& a,
                                     ResidualRoute route = ResidualRoute::Euler, int jet_cap = default_jet_cap());

SearchResult solve_densities(const EvolutionEq& eq, int m, const SearchOptions& opts = {});
TypeReport classify_type(const EvolutionEq& eq, const SearchOptions& opts = {}, bool with_n5 = false);

struct ProbeResult {
  std::vector<std::pair<int, int>> counts;
  std::vector<std::string> warnings;
};
ProbeResult weight_sequence_probe(const EvolutionEq& eq, int max_order, const SearchOptions& opts = {});

}  // namespace clawkit
