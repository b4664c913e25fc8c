#include "doctest.h"

#include <set>

#include "clawkit/catalog.hpp"
#include "clawkit/error.hpp"

using namespace clawkit;

TEST_CASE("catalog contents") {
  const auto& list = entries();
  std::map<std::string, int> per_family;
  int negatives = 0;
  for (const auto& e : list) {
    ++per_family[e.family];
    if (e.negative) ++negatives;
    auto eq = e.equation();
    auto rep = structural_report(eq);
    if (e.negative) {
      CHECK_FALSE(rep.k_vanishes);
    } else {
      CHECK_MESSAGE(rep.k_vanishes, e.id);
      CHECK_MESSAGE(rep.n_vanishes == true, e.id);
      CHECK_MESSAGE(rep.normal_form_detected.has_value(), e.id);
      CHECK(e.expected.n_minus1.value_or(-1) >= 0);
    }
  }
  CHECK(negatives >= 1);
  for (const char* fam : {"kdv-family", "mkdv-plus", "mkdv-minus", "trig-family", "hyperbolic-family", "exp-plus",
                          "exp-minus", "cubic-plus", "cubic-minus"}) {
    CHECK_MESSAGE(per_family[fam] >= 2, fam);
  }
  std::set<std::string> ids;
  for (const auto& e : list) ids.insert(e.id);
  CHECK(ids.size() == list.size());
}

TEST_CASE("catalog loading validates constraints") {
  const char* bad = R"({"families": [{"id": "h", "f": "1", "g": "(m*sinh(u) + n*cosh(u))*p1", "params": ["m", "n"],
    "constraints": ["m^2 - n^2"], "expected": {"n_minus1": 2},
    "instances": [{"label": "deg", "bindings": {"m": "1", "n": "1"}}]}]})";
  CHECK_THROWS_AS(load_catalog(bad), Error);
  const char* unbound = R"({"families": [{"id": "k", "f": "1", "g": "r*u*p1", "params": ["r"],
    "expected": {"n_minus1": 3}, "instances": [{"label": "x", "bindings": {}}]}]})";
  CHECK_THROWS_AS(load_catalog(unbound), Error);
}

TEST_CASE("regression collects failures without aborting") {
  const char* text = R"({"families": [
    {"id": "kdv", "f": "1", "g": "u*p1", "params": [], "expected": {"n_minus1": 3, "n1": 1, "n3": 1},
     "instances": [{"label": "a", "bindings": {}}]},
    {"id": "wrong", "f": "1", "g": "u*p1", "params": [], "expected": {"n_minus1": 2, "n1": 1, "n3": 1},
     "instances": [{"label": "b", "bindings": {}}]}],
    "negative": [{"id": "neg", "f": "1", "g": "p2^2", "params": [], "expected": {"n_minus1": 0},
     "expect_k_vanishes": false, "instances": [{"label": "c", "bindings": {}}]}]})";
  auto list = load_catalog(text);
  REQUIRE(list.size() == 3);
  auto rep = run_regression(list, {});
  REQUIRE(rep.results.size() == 3);
  CHECK(rep.results[0].pass);
  CHECK_FALSE(rep.results[1].pass);
  REQUIRE(rep.results[1].diffs.size() == 1);
  CHECK(rep.results[1].diffs[0] == "n_minus1: expected 2, got 3");
  CHECK(rep.results[2].pass);
  CHECK_FALSE(rep.all_pass());
}

TEST_CASE("regression on embedded KdV instance") {
  RegressionOptions o;
  o.only = {"kdv-family/r2=0,r1=0", "k-nonzero"};
  auto rep = run_regression(o);
  REQUIRE(rep.results.size() == 2);
  CHECK(rep.all_pass());
  CHECK(rep.results[0].observed == TypeTriple{3, 1, 1, std::nullopt});
}
