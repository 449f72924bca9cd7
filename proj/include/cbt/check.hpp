#pragma once

// Bidirectional typechecker for the kernel calculus. Public entry points
// verify presuppositions eagerly (context and type well-formedness are
// re-derived, never assumed); the private recursion maintains them
// inductively, which is the permitted form of caching.
//
// Every acceptance yields a Derivation tree that can be replayed: replay
// re-runs the public checker on each node's conclusion.

#include <string>
#include <utility>
#include <vector>

#include "cbt/equality.hpp"
#include "cbt/pretty.hpp"
#include "cbt/syntax.hpp"

namespace cbt {

enum class ErrKind {
  Scope, Mismatch, NotAFunction, NotAPair, BranchContext, PropExpected, ConversionFailed
};

inline const char* to_string(ErrKind k) {
  switch (k) {
    case ErrKind::Scope: return "scope";
    case ErrKind::Mismatch: return "mismatch";
    case ErrKind::NotAFunction: return "not-a-function";
    case ErrKind::NotAPair: return "not-a-pair";
    case ErrKind::BranchContext: return "branch-context";
    case ErrKind::PropExpected: return "prop-expected";
    case ErrKind::ConversionFailed: return "conversion-failed";
  }
  return "unknown";
}

struct TypeError : std::runtime_error {
  ErrKind kind;
  std::string where;
  std::string expected;  // beta-normal form where a comparison failed
  std::string actual;

  TypeError(ErrKind k, std::string w, std::string exp = "", std::string act = "")
      : std::runtime_error(render(k, w, exp, act)),
        kind(k), where(std::move(w)), expected(std::move(exp)), actual(std::move(act)) {}

  static std::string render(ErrKind k, const std::string& w, const std::string& exp,
                            const std::string& act) {
    std::string out = std::string(to_string(k)) + ": " + w;
    if (!exp.empty() || !act.empty()) out += " (expected " + exp + ", got " + act + ")";
    return out;
  }
};

// ---------------------------------------------------------------------------
// Judgments and derivations

struct CtxWf { Ctx ctx; };
struct TyWf { Ctx ctx; TypePtr ty; };
struct TmHas { Ctx ctx; TermPtr tm; TypePtr ty; };
struct TmEq { Ctx ctx; TermPtr lhs, rhs; TypePtr ty; };
struct SubstHas { Ctx ctx; SubstObj subst; Ctx target; };

using Judgment = std::variant<CtxWf, TyWf, TmHas, TmEq, SubstHas>;

struct Derivation;
using DerivPtr = std::shared_ptr<const Derivation>;

struct Derivation {
  std::string rule;
  std::vector<DerivPtr> premises;
  Judgment conclusion;
};

inline DerivPtr deriv(std::string rule, std::vector<DerivPtr> premises, Judgment conclusion) {
  return std::make_shared<const Derivation>(
      Derivation{std::move(rule), std::move(premises), std::move(conclusion)});
}

namespace detail {
/// Placeholder binder names for rendering kernel diagnostics (v0 is oldest).
inline std::vector<std::string> names_for(std::size_t n) {
  std::vector<std::string> out;
  out.reserve(n);
  for (std::size_t k = 0; k < n; ++k) out.push_back("v" + std::to_string(k));
  return out;
}
}  // namespace detail

/// Uniqueness-proof type over carrier A: Pi x:A. Pi y:A. Id A x y.
inline TypePtr uniq_ty(const TypePtr& a) {
  return pi_ty(a, pi_ty(shift(a, 1, 0), id_ty(shift(a, 2, 0), var(1), var(0))));
}

// ---------------------------------------------------------------------------

class Checker {
 public:
  // --- public judgments; presuppositions are re-derived eagerly ---

  DerivPtr check_ctx(const Ctx& ctx) { return guard([&] { return ctx_wf(ctx); }); }

  DerivPtr check_ty(const Ctx& ctx, const TypePtr& a) {
    return guard([&] {
      ctx_wf(ctx);
      return ty_wf(ctx, a);
    });
  }

  TypePtr infer_tm(const Ctx& ctx, const TermPtr& u) {
    TypePtr out;
    guard([&] {
      ctx_wf(ctx);
      auto [ty, d] = infer(ctx, u);
      out = ty;
      return d;
    });
    return out;
  }

  DerivPtr check_tm(const Ctx& ctx, const TermPtr& u, const TypePtr& a) {
    return guard([&] {
      ctx_wf(ctx);
      ty_wf(ctx, a);
      return tm_check(ctx, u, a);
    });
  }

  DerivPtr check_eq_tm(const Ctx& ctx, const TermPtr& u, const TermPtr& v, const TypePtr& a) {
    return guard([&] {
      ctx_wf(ctx);
      ty_wf(ctx, a);
      DerivPtr du = tm_check(ctx, u, a);
      DerivPtr dv = tm_check(ctx, v, a);
      if (!conv_tm_here(ctx, a, u, v)) {
        auto names = detail::names_for(ctx.size());
        throw TypeError(ErrKind::ConversionFailed, "sides of the equation are not convertible",
                        pretty_tm(normalize_tm(ctx, a, u).term, names),
                        pretty_tm(normalize_tm(ctx, a, v).term, names));
      }
      return deriv("tm-eq", {du, dv}, TmEq{ctx, u, v, a});
    });
  }

  DerivPtr check_subst(const Ctx& ctx, const SubstObj& sigma, const Ctx& delta) {
    return guard([&] {
      ctx_wf(ctx);
      ctx_wf(delta);
      return subst_has(ctx, sigma, delta);
    });
  }

  /// Propositional-code equality discipline: R(A,p) = R(B,q) : Prop is
  /// accepted given bi-implication evidence f : A->B and g : B->A, and the
  /// code pair is registered so later conversions treat the codes as equal.
  DerivPtr check_prop_code_eq(const Ctx& ctx, const TypePtr& a, const TermPtr& p,
                              const TypePtr& b, const TermPtr& q, const TermPtr& f,
                              const TermPtr& g) {
    return guard([&] {
      ctx_wf(ctx);
      DerivPtr da = ty_wf(ctx, a);
      DerivPtr db = ty_wf(ctx, b);
      DerivPtr dp = tm_check(ctx, p, uniq_ty(a));
      DerivPtr dq = tm_check(ctx, q, uniq_ty(b));
      DerivPtr df = tm_check(ctx, f, fun_ty(a, b));
      DerivPtr dg = tm_check(ctx, g, fun_ty(b, a));
      TermPtr lhs = prop_code(a, p), rhs = prop_code(b, q);
      registry_.push_back({ctx.size(), normalize_tm(ctx, prop_ty(), lhs).term,
                           normalize_tm(ctx, prop_ty(), rhs).term});
      return deriv("prop-code-eq", {da, db, dp, dq, df, dg},
                   TmEq{ctx, lhs, rhs, prop_ty()});
    });
  }

  // --- conversion with the registered code equations ---

  bool conv_tm_here(const Ctx& ctx, const TypePtr& a, const TermPtr& u, const TermPtr& v) {
    return conv_tm(ctx, a, u, v, extras_for(ctx.size()));
  }

  bool conv_ty_here(const Ctx& ctx, const TypePtr& a, const TypePtr& b) {
    return conv_ty(ctx, a, b, extras_for(ctx.size()));
  }

  /// Whether a term's type can be synthesized without an expected type.
  static bool inferable(const TermPtr& t) {
    return !(std::holds_alternative<Lam>(t->node) || std::holds_alternative<DLam>(t->node) ||
             std::holds_alternative<Pair>(t->node) || std::holds_alternative<Inl>(t->node) ||
             std::holds_alternative<Inr>(t->node));
  }

  /// Re-validates a derivation bottom-up: every premise replays and every
  /// conclusion re-checks through the public interface.
  bool replay(const DerivPtr& d) {
    if (!d) return false;
    for (const auto& p : d->premises)
      if (!replay(p)) return false;
    try {
      std::visit(overloaded{
                     [&](const CtxWf& j) { check_ctx(j.ctx); },
                     [&](const TyWf& j) { check_ty(j.ctx, j.ty); },
                     [&](const TmHas& j) { check_tm(j.ctx, j.tm, j.ty); },
                     [&](const TmEq& j) {
                       // prop-code-eq conclusions hold by the registry entry
                       // they created; re-checking goes through conversion.
                       check_eq_tm(j.ctx, j.lhs, j.rhs, j.ty);
                     },
                     [&](const SubstHas& j) { check_subst(j.ctx, j.subst, j.target); },
                 },
                 d->conclusion);
    } catch (const TypeError&) {
      return false;
    }
    return true;
  }

 private:
  struct RegEntry {
    std::size_t ctx_len;
    TermPtr lhs, rhs;  // normal forms at registration scope
  };
  std::vector<RegEntry> registry_;

  ExtraEqs extras_for(std::size_t ctx_len) const {
    ExtraEqs out;
    for (const auto& e : registry_) {
      if (e.ctx_len > ctx_len) continue;
      int by = static_cast<int>(ctx_len - e.ctx_len);
      out.emplace_back(shift(e.lhs, by, 0), shift(e.rhs, by, 0));
    }
    return out;
  }

  /// Turns stray scope errors from the substitution calculus into TypeErrors.
  template <class F>
  DerivPtr guard(F&& f) {
    try {
      return f();
    } catch (const scope_error& e) {
      throw TypeError(ErrKind::Scope, e.what());
    }
  }

  // --- structural rules (presuppositions maintained inductively) ---

  DerivPtr ctx_wf(const Ctx& ctx) {
    if (ctx.empty()) return deriv("ctx-empty", {}, CtxWf{ctx});
    Ctx prefix = ctx.prefix(ctx.size() - 1);
    DerivPtr dp = ctx_wf(prefix);
    DerivPtr dt;
    try {
      dt = ty_wf(prefix, ctx.entries.back());
    } catch (TypeError& e) {
      e.where = "context entry " + std::to_string(ctx.size() - 1) + ": " + e.where;
      throw TypeError(e.kind, e.where, e.expected, e.actual);
    }
    return deriv("ctx-ext", {dp, dt}, CtxWf{ctx});
  }

  DerivPtr ty_wf(const Ctx& ctx, const TypePtr& a) {
    return std::visit(
        overloaded{
            [&](const UnitTy&) { return deriv("ty-unit", {}, TyWf{ctx, a}); },
            [&](const ProdTy& p) {
              return deriv("ty-prod", {ty_wf(ctx, p.left), ty_wf(ctx, p.right)}, TyWf{ctx, a});
            },
            [&](const CoprodTy& c) {
              return deriv("ty-coprod", {ty_wf(ctx, c.left), ty_wf(ctx, c.right)}, TyWf{ctx, a});
            },
            [&](const FunTy& f) {
              return deriv("ty-fun", {ty_wf(ctx, f.dom), ty_wf(ctx, f.cod)}, TyWf{ctx, a});
            },
            [&](const IdTy& i) {
              DerivPtr dc = ty_wf(ctx, i.carrier);
              DerivPtr dl = tm_check(ctx, i.lhs, i.carrier);
              DerivPtr dr = tm_check(ctx, i.rhs, i.carrier);
              return deriv("ty-id", {dc, dl, dr}, TyWf{ctx, a});
            },
            [&](const PiTy& p) {
              DerivPtr dd = ty_wf(ctx, p.dom);
              DerivPtr dc = ty_wf(ctx.extended(p.dom), p.cod);
              return deriv("ty-pi", {dd, dc}, TyWf{ctx, a});
            },
            [&](const PropTy&) { return deriv("ty-prop", {}, TyWf{ctx, a}); },
            [&](const ElTy& e) {
              try {
                DerivPtr dc = tm_check(ctx, e.code, prop_ty());
                return deriv("ty-el", {dc}, TyWf{ctx, a});
              } catch (const TypeError& err) {
                throw TypeError(ErrKind::PropExpected, "El argument is not a proposition code",
                                err.expected, err.actual);
              }
            },
        },
        a->node);
  }

  std::pair<TypePtr, DerivPtr> infer(const Ctx& ctx, const TermPtr& u) {
    return std::visit(
        overloaded{
            [&](const Var& v) -> std::pair<TypePtr, DerivPtr> {
              TypePtr ty;
              try {
                ty = lookup_var(ctx, v.index);
              } catch (const scope_error& e) {
                throw TypeError(ErrKind::Scope, e.what());
              }
              return {ty, deriv("tm-var", {}, TmHas{ctx, u, ty})};
            },
            [&](const Star&) -> std::pair<TypePtr, DerivPtr> {
              return {unit_ty(), deriv("tm-star", {}, TmHas{ctx, u, unit_ty()})};
            },
            [&](const Proj1& p) -> std::pair<TypePtr, DerivPtr> {
              auto [ty, d] = infer(ctx, p.arg);
              const auto* prod = std::get_if<ProdTy>(&ty->node);
              if (!prod)
                throw TypeError(ErrKind::NotAPair, "projection of a non-pair",
                                "a product type", pretty_ty(ty, detail::names_for(ctx.size())));
              return {prod->left, deriv("tm-proj1", {d}, TmHas{ctx, u, prod->left})};
            },
            [&](const Proj2& p) -> std::pair<TypePtr, DerivPtr> {
              auto [ty, d] = infer(ctx, p.arg);
              const auto* prod = std::get_if<ProdTy>(&ty->node);
              if (!prod)
                throw TypeError(ErrKind::NotAPair, "projection of a non-pair",
                                "a product type", pretty_ty(ty, detail::names_for(ctx.size())));
              return {prod->right, deriv("tm-proj2", {d}, TmHas{ctx, u, prod->right})};
            },
            [&](const App& a) -> std::pair<TypePtr, DerivPtr> {
              auto [fty, df] = infer(ctx, a.fn);
              const auto* fun = std::get_if<FunTy>(&fty->node);
              if (!fun)
                throw TypeError(ErrKind::NotAFunction, "application of a non-function",
                                "a function type", pretty_ty(fty, detail::names_for(ctx.size())));
              DerivPtr da = tm_check(ctx, a.arg, fun->dom);
              return {fun->cod, deriv("tm-app", {df, da}, TmHas{ctx, u, fun->cod})};
            },
            [&](const DApp& a) -> std::pair<TypePtr, DerivPtr> {
              auto [fty, df] = infer(ctx, a.fn);
              const auto* pi = std::get_if<PiTy>(&fty->node);
              if (!pi)
                throw TypeError(ErrKind::NotAFunction, "application of a non-function",
                                "a Pi type", pretty_ty(fty, detail::names_for(ctx.size())));
              DerivPtr da = tm_check(ctx, a.arg, pi->dom);
              TypePtr out = apply_ty(pi->cod, extend(id_subst(ctx.size()), a.arg));
              return {out, deriv("tm-dapp", {df, da}, TmHas{ctx, u, out})};
            },
            [&](const Refl& r) -> std::pair<TypePtr, DerivPtr> {
              auto [ty, d] = infer(ctx, r.arg);
              TypePtr out = id_ty(ty, r.arg, r.arg);
              return {out, deriv("tm-refl", {d}, TmHas{ctx, u, out})};
            },
            [&](const PropCode& c) -> std::pair<TypePtr, DerivPtr> {
              DerivPtr dc = ty_wf(ctx, c.carrier);
              DerivPtr dp = tm_check(ctx, c.uniq, uniq_ty(c.carrier));
              return {prop_ty(), deriv("tm-code", {dc, dp}, TmHas{ctx, u, prop_ty()})};
            },
            [&](const Match& m) -> std::pair<TypePtr, DerivPtr> {
              DerivPtr dl = ty_wf(ctx, m.left_ty);
              DerivPtr dr = ty_wf(ctx, m.right_ty);
              DerivPtr ds = tm_check(ctx, m.scrut, coprod_ty(m.left_ty, m.right_ty));
              DerivPtr dm = ty_wf(ctx, m.motive);
              TypePtr branch_ty = shift(m.motive, 1, 0);
              DerivPtr dbl = check_branch(ctx.extended(m.left_ty), m.left, branch_ty, "left");
              DerivPtr dbr = check_branch(ctx.extended(m.right_ty), m.right, branch_ty, "right");
              return {m.motive,
                      deriv("tm-match", {dl, dr, ds, dm, dbl, dbr}, TmHas{ctx, u, m.motive})};
            },
            [&](const Annot& an) -> std::pair<TypePtr, DerivPtr> {
              DerivPtr dt = ty_wf(ctx, an.ty);
              DerivPtr dc = tm_check(ctx, an.tm, an.ty);
              return {an.ty, deriv("tm-annot", {dt, dc}, TmHas{ctx, u, an.ty})};
            },
            [&](const auto&) -> std::pair<TypePtr, DerivPtr> {
              throw TypeError(ErrKind::Mismatch,
                              "term has no synthesizable type; add an annotation");
            },
        },
        u->node);
  }

  DerivPtr check_branch(const Ctx& ctx, const TermPtr& body, const TypePtr& ty,
                        const char* side) {
    try {
      return tm_check(ctx, body, ty);
    } catch (const TypeError& e) {
      throw TypeError(ErrKind::BranchContext,
                      std::string(side) + " branch: " + e.where, e.expected, e.actual);
    }
  }

  DerivPtr tm_check(const Ctx& ctx, const TermPtr& u, const TypePtr& a) {
    // intro forms against matching type heads
    if (const auto* l = std::get_if<Lam>(&u->node)) {
      if (const auto* f = std::get_if<FunTy>(&a->node)) {
        DerivPtr db = tm_check(ctx.extended(f->dom), l->body, shift(f->cod, 1, 0));
        return deriv("tm-lam", {db}, TmHas{ctx, u, a});
      }
      throw TypeError(ErrKind::Mismatch, "function literal against a non-function type",
                      pretty_ty(a, detail::names_for(ctx.size())), "fun");
    }
    if (const auto* l = std::get_if<DLam>(&u->node)) {
      if (const auto* p = std::get_if<PiTy>(&a->node)) {
        DerivPtr db = tm_check(ctx.extended(p->dom), l->body, p->cod);
        return deriv("tm-dlam", {db}, TmHas{ctx, u, a});
      }
      throw TypeError(ErrKind::Mismatch, "function literal against a non-Pi type",
                      pretty_ty(a, detail::names_for(ctx.size())), "dfun");
    }
    if (const auto* p = std::get_if<Pair>(&u->node)) {
      if (const auto* t = std::get_if<ProdTy>(&a->node)) {
        DerivPtr d1 = tm_check(ctx, p->fst, t->left);
        DerivPtr d2 = tm_check(ctx, p->snd, t->right);
        return deriv("tm-pair", {d1, d2}, TmHas{ctx, u, a});
      }
      throw TypeError(ErrKind::Mismatch, "pair against a non-product type",
                      pretty_ty(a, detail::names_for(ctx.size())), "pair");
    }
    if (const auto* i = std::get_if<Inl>(&u->node)) {
      if (const auto* t = std::get_if<CoprodTy>(&a->node)) {
        DerivPtr d = tm_check(ctx, i->arg, t->left);
        return deriv("tm-inl", {d}, TmHas{ctx, u, a});
      }
      throw TypeError(ErrKind::Mismatch, "injection against a non-sum type",
                      pretty_ty(a, detail::names_for(ctx.size())), "inl");
    }
    if (const auto* i = std::get_if<Inr>(&u->node)) {
      if (const auto* t = std::get_if<CoprodTy>(&a->node)) {
        DerivPtr d = tm_check(ctx, i->arg, t->right);
        return deriv("tm-inr", {d}, TmHas{ctx, u, a});
      }
      throw TypeError(ErrKind::Mismatch, "injection against a non-sum type",
                      pretty_ty(a, detail::names_for(ctx.size())), "inr");
    }
    // beta-redexes whose head is a bare literal: propagate the expected type
    // into the function position instead of failing to infer
    if (const auto* ap = std::get_if<App>(&u->node)) {
      if (!inferable(ap->fn)) {
        auto [arg_ty, da] = infer(ctx, ap->arg);
        DerivPtr df = tm_check(ctx, ap->fn, fun_ty(arg_ty, a));
        return deriv("tm-app-check", {df, da}, TmHas{ctx, u, a});
      }
    }
    if (const auto* ap = std::get_if<DApp>(&u->node)) {
      // only the non-dependent reading is recoverable without an annotation
      if (!inferable(ap->fn)) {
        auto [arg_ty, da] = infer(ctx, ap->arg);
        DerivPtr df = tm_check(ctx, ap->fn, pi_ty(arg_ty, shift(a, 1, 0)));
        return deriv("tm-dapp-check", {df, da}, TmHas{ctx, u, a});
      }
    }
    // refl can be checked against any Id type whose endpoints it witnesses
    if (const auto* r = std::get_if<Refl>(&u->node)) {
      if (const auto* t = std::get_if<IdTy>(&a->node)) {
        DerivPtr d = tm_check(ctx, r->arg, t->carrier);
        auto names = detail::names_for(ctx.size());
        if (!conv_tm_here(ctx, t->carrier, r->arg, t->lhs))
          throw TypeError(ErrKind::ConversionFailed, "refl endpoint mismatch",
                          pretty_tm(normalize_tm(ctx, t->carrier, t->lhs).term, names),
                          pretty_tm(normalize_tm(ctx, t->carrier, r->arg).term, names));
        if (!conv_tm_here(ctx, t->carrier, r->arg, t->rhs))
          throw TypeError(ErrKind::ConversionFailed, "refl endpoint mismatch",
                          pretty_tm(normalize_tm(ctx, t->carrier, t->rhs).term, names),
                          pretty_tm(normalize_tm(ctx, t->carrier, r->arg).term, names));
        return deriv("tm-refl-at", {d}, TmHas{ctx, u, a});
      }
    }
    // mode switch: infer and convert
    auto [ty, d] = infer(ctx, u);
    if (!conv_ty_here(ctx, ty, a)) {
      auto names = detail::names_for(ctx.size());
      throw TypeError(ErrKind::ConversionFailed, "type mismatch",
                      pretty_ty(normalize_ty(ctx, a).type, names),
                      pretty_ty(normalize_ty(ctx, ty).type, names));
    }
    return deriv("tm-conv", {d}, TmHas{ctx, u, a});
  }

  DerivPtr subst_has(const Ctx& ctx, const SubstObj& sigma, const Ctx& delta) {
    if (sigma.size() != delta.size())
      throw TypeError(ErrKind::Mismatch, "substitution length does not match the target context",
                      std::to_string(delta.size()), std::to_string(sigma.size()));
    DerivPtr d = deriv("subst-empty", {}, SubstHas{ctx, SubstObj{}, Ctx{}});
    for (std::size_t k = 0; k < sigma.size(); ++k) {
      SubstObj prefix{std::vector<TermPtr>(sigma.terms.begin(),
                                           sigma.terms.begin() + static_cast<long>(k))};
      TypePtr expected = apply_ty(delta.entries[k], prefix);
      DerivPtr de;
      try {
        de = tm_check(ctx, sigma.terms[k], expected);
      } catch (TypeError& e) {
        e.where = "substitution entry " + std::to_string(k) + ": " + e.where;
        throw TypeError(e.kind, e.where, e.expected, e.actual);
      }
      SubstObj sofar{std::vector<TermPtr>(sigma.terms.begin(),
                                          sigma.terms.begin() + static_cast<long>(k + 1))};
      d = deriv("subst-ext", {d, de}, SubstHas{ctx, sofar, delta.prefix(k + 1)});
    }
    return d;
  }
};

}  // namespace cbt
