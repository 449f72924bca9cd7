#pragma once

// Deterministic random generators for well-scoped (not necessarily
// well-typed) terms and types, used by the substitution-law property tests.

#include <random>

#include "cbt/syntax.hpp"

namespace cbt::testing {

struct Gen {
  std::mt19937 rng;

  explicit Gen(unsigned seed) : rng(seed) {}

  int pick(int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng); }

  /// Random term with free indices < scope, at most `depth` constructors deep.
  TermPtr term(int scope, int depth) {
    if (depth <= 0) return leaf(scope);
    switch (pick(14)) {
      case 0: return leaf(scope);
      case 1: return pair(term(scope, depth - 1), term(scope, depth - 1));
      case 2: return proj1(term(scope, depth - 1));
      case 3: return proj2(term(scope, depth - 1));
      case 4: return inl(term(scope, depth - 1));
      case 5: return inr(term(scope, depth - 1));
      case 6:
        return match(term(scope, depth - 1), type(scope, depth - 1), type(scope, depth - 1),
                     type(scope, depth - 1), term(scope + 1, depth - 1),
                     term(scope + 1, depth - 1));
      case 7: return lam(term(scope + 1, depth - 1));
      case 8: return app(term(scope, depth - 1), term(scope, depth - 1));
      case 9: return dlam(term(scope + 1, depth - 1));
      case 10: return dapp(term(scope, depth - 1), term(scope, depth - 1));
      case 11: return refl(term(scope, depth - 1));
      case 12: return prop_code(type(scope, depth - 1), term(scope, depth - 1));
      default: return annot(term(scope, depth - 1), type(scope, depth - 1));
    }
  }

  TypePtr type(int scope, int depth) {
    if (depth <= 0) return pick(2) ? unit_ty() : prop_ty();
    switch (pick(8)) {
      case 0: return unit_ty();
      case 1: return prod_ty(type(scope, depth - 1), type(scope, depth - 1));
      case 2: return coprod_ty(type(scope, depth - 1), type(scope, depth - 1));
      case 3: return fun_ty(type(scope, depth - 1), type(scope, depth - 1));
      case 4:
        return id_ty(type(scope, depth - 1), term(scope, depth - 1), term(scope, depth - 1));
      case 5: return pi_ty(type(scope, depth - 1), type(scope + 1, depth - 1));
      case 6: return prop_ty();
      default: return el_ty(term(scope, depth - 1));
    }
  }

  /// Random substitution instantiating `src` variables using `dst` free ones.
  SubstObj subst(int src, int dst, int depth) {
    SubstObj out;
    out.terms.reserve(static_cast<std::size_t>(src));
    for (int k = 0; k < src; ++k) out.terms.push_back(term(dst, depth));
    return out;
  }

 private:
  TermPtr leaf(int scope) {
    if (scope > 0 && pick(2)) return var(pick(scope));
    return star();
  }
};

}  // namespace cbt::testing
