#pragma once

#include <random>

#include "clawkit/symexpr.hpp"

namespace clawkit::testing {

struct GenOptions {
  int max_terms = 4;
  int max_jet = 3;
  int max_power = 3;
  bool atoms = true;
  bool params = false;
  bool negative_powers = false;
  bool t_and_x = true;
};

class ExprGen {
 public:
  explicit ExprGen(unsigned seed, GenOptions opts = {}) : rng_(seed), opts_(opts) {}

  Rational coeff() {
    std::uniform_int_distribution<int> num(-9, 9);
    std::uniform_int_distribution<int> den(1, 4);
    int n = 0;
    while (n == 0) n = num(rng_);
    Rational q(n, den(rng_));
    q.canonicalize();
    return q;
  }

  Expr monomial() {
    Expr m(coeff());
    std::uniform_int_distribution<int> pw(0, opts_.max_power);
    std::uniform_int_distribution<int> coin(0, 3);
    if (opts_.t_and_x) {
      if (coin(rng_) == 0) m *= pow(Expr(Symbol::t()), pw(rng_) % 3);
      if (coin(rng_) == 0) m *= pow(Expr(Symbol::x()), pw(rng_) % 3);
    }
    for (int i = 0; i <= opts_.max_jet; ++i) {
      if (coin(rng_) < 2) m *= pow(Expr(Symbol::p(i)), pw(rng_));
    }
    if (opts_.negative_powers && coin(rng_) == 0) m *= pow(Expr(Symbol::p(1)), -1 - pw(rng_) % 3);
    if (opts_.params && coin(rng_) == 0) m *= Expr(Symbol::param(coin(rng_) % 2 == 0 ? "a" : "b2"));
    if (opts_.atoms && coin(rng_) == 0) {
      std::uniform_int_distribution<int> rate(-3, 3);
      std::uniform_int_distribution<int> kind(0, 3);
      int r = rate(rng_);
      Frac f(r == 0 ? 1 : r, 1 + coin(rng_) % 2);
      switch (kind(rng_)) {
        case 0:
          m *= Expr::exp_atom(Symbol::u(), f);
          break;
        case 1:
          m *= Expr::sin_atom(Symbol::u(), f);
          break;
        case 2:
          m *= Expr::cos_atom(Symbol::u(), f);
          break;
        default:
          if (opts_.t_and_x) m *= Expr::exp_atom(Symbol::x(), f);
          break;
      }
    }
    return m;
  }

  Expr expr() {
    std::uniform_int_distribution<int> n(1, opts_.max_terms);
    Expr e;
    int k = n(rng_);
    for (int i = 0; i < k; ++i) e += monomial();
    return e;
  }

  std::mt19937& rng() { return rng_; }

 private:
  std::mt19937 rng_;
  GenOptions opts_;
};

}  // namespace clawkit::testing
