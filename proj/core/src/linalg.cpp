#include "clawkit/linalg.hpp"

#include <algorithm>

#include "clawkit/error.hpp"

namespace clawkit {

SparseRow axpy(const SparseRow& a, const Rational& s, const SparseRow& b) {
  SparseRow out;
  out.reserve(a.size() + b.size());
  auto ia = a.begin();
  auto ib = b.begin();
  while (ia != a.end() || ib != b.end()) {
    if (ib == b.end() || (ia != a.end() && ia->first < ib->first)) {
      out.push_back(*ia++);
    } else if (ia == a.end() || ib->first < ia->first) {
      out.emplace_back(ib->first, s * ib->second);
      ++ib;
    } else {
      Rational v = ia->second + s * ib->second;
      if (v != 0) out.emplace_back(ia->first, std::move(v));
      ++ia;
      ++ib;
    }
  }
  return out;
}

void RowEchelon::reduce(SparseRow& row) const {
  // Pivot rows have all other entries to the right of their pivot, so scanning
  // left to right visits every eliminable column once.
  std::size_t pos = 0;
  while (pos < row.size()) {
    int col = row[pos].first;
    int r = pivot_of_[col];
    if (r < 0) {
      ++pos;
      continue;
    }
    Rational s = -row[pos].second;
    row = axpy(row, s, rows_[r]);
  }
}

bool RowEchelon::add(SparseRow row) {
  for (const auto& [c, v] : row) {
    if (c < 0 || c >= columns_) throw Error("column index out of range");
  }
  reduce(row);
  if (row.empty()) return false;
  Rational inv = 1 / row.front().second;
  for (auto& [c, v] : row) v *= inv;
  pivot_of_[row.front().first] = static_cast<int>(rows_.size());
  rows_.push_back(std::move(row));
  return true;
}

std::vector<SparseRow> RowEchelon::reduced() const {
  std::vector<int> order;
  for (int c = 0; c < columns_; ++c) {
    if (pivot_of_[c] >= 0) order.push_back(pivot_of_[c]);
  }
  std::vector<SparseRow> out(rows_.size());
  std::vector<int> done_row(columns_, -1);
  // Back substitution from the rightmost pivot.
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    SparseRow row = rows_[*it];
    std::size_t pos = 1;
    while (pos < row.size()) {
      int col = row[pos].first;
      int d = done_row[col];
      if (d < 0) {
        ++pos;
        continue;
      }
      Rational s = -row[pos].second;
      row = axpy(row, s, out[d]);
    }
    int slot = static_cast<int>(order.rend() - it) - 1;
    done_row[row.front().first] = slot;
    out[slot] = std::move(row);
  }
  return out;
}

std::vector<SparseRow> RowEchelon::nullspace() const {
  auto rref = reduced();
  std::vector<std::vector<std::pair<int, Rational>>> by_free(columns_);
  for (const auto& row : rref) {
    int pc = row.front().first;
    for (std::size_t i = 1; i < row.size(); ++i) by_free[row[i].first].emplace_back(pc, -row[i].second);
  }
  std::vector<SparseRow> basis;
  for (int c = 0; c < columns_; ++c) {
    if (pivot_of_[c] >= 0) continue;
    SparseRow v = std::move(by_free[c]);
    v.emplace_back(c, Rational(1));
    std::sort(v.begin(), v.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    basis.push_back(std::move(v));
  }
  return basis;
}

}  // namespace clawkit
