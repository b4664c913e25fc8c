#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "clawkit/symexpr.hpp"

namespace clawkit {

/// Sparse row: (column, value) pairs with strictly increasing columns and nonzero values.
using SparseRow = std::vector<std::pair<int, Rational>>;

/// Incremental exact Gaussian elimination.  Rows are reduced against the
/// current pivots on insertion; pivot is the smallest column present.
class RowEchelon {
 public:
  explicit RowEchelon(int columns) : columns_(columns), pivot_of_(columns, -1) {}

  /// Returns true when the row was independent of the rows added so far.
  bool add(SparseRow row);
  int rank() const noexcept { return static_cast<int>(rows_.size()); }
  int columns() const noexcept { return columns_; }

  /// Reduced row echelon form; rows sorted by pivot column, pivots normalized to 1.
  std::vector<SparseRow> reduced() const;
  /// Basis of {v : A v = 0}, one vector per free column (that column set to 1).
  std::vector<SparseRow> nullspace() const;

 private:
  void reduce(SparseRow& row) const;
  int columns_;
  std::vector<SparseRow> rows_;
  std::vector<int> pivot_of_;  // column -> row index
};

/// a + s*b for sparse rows.
SparseRow axpy(const SparseRow& a, const Rational& s, const SparseRow& b);

}  // namespace clawkit
