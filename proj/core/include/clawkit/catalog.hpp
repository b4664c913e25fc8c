#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "clawkit/clawsearch.hpp"
#include "clawkit/structclass.hpp"

namespace clawkit {

struct ExpectedCounts {
  std::optional<int> n_minus1;
  std::optional<int> n1;
  std::optional<int> n3;
  std::optional<int> n5;
};

struct AnsatzOverride {
  std::optional<int> d_x;
  std::optional<int> d_t;
  std::optional<int> d_u;
  std::vector<std::string> time_atoms;
};

/// One parameter instantiation of a classified family.
struct CatalogEntry {
  std::string id;      // family/label
  std::string family;
  std::string label;
  std::string f;
  std::string g;
  std::vector<std::string> params;
  std::map<std::string, Rational> bindings;
  ExpectedCounts expected;
  bool negative = false;
  bool expect_k_vanishes = true;
  bool check_n5 = false;
  AnsatzOverride ansatz;
  std::string notes;

  EvolutionEq equation() const;
  SearchOptions search_options(const SearchOptions& base = {}) const;
};

/// Entries of the embedded catalog data file.
const std::vector<CatalogEntry>& entries();
/// Parses catalog JSON text (same schema as the embedded file).
std::vector<CatalogEntry> load_catalog(const std::string& json_text);

struct RegressionOptions {
  bool weight5 = false;
  /// Run only entries whose id starts with one of these prefixes (all when empty).
  std::vector<std::string> only;
  SearchOptions search;
  std::function<void(const std::string&)> progress;
};

struct EntryResult {
  std::string id;
  bool pass = false;
  StructReport report;
  TypeTriple observed;
  std::vector<std::string> diffs;
  double seconds = 0;
};

struct RegressionReport {
  std::vector<EntryResult> results;
  bool all_pass() const;
};

RegressionReport run_regression(const RegressionOptions& opts = {});
RegressionReport run_regression(const std::vector<CatalogEntry>& list, const RegressionOptions& opts);

}  // namespace clawkit
