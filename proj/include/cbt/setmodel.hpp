#pragma once

// Finite-set semantics. Every type denotes a finite set of canonical values,
// every context a finite set of environments, and every judgment can be
// checked exhaustively, which makes this module an independent soundness
// oracle for the checker: an accepted equation must evaluate to equal values
// under every environment.
//
// Dictionary: Unit is terminal, Prod the fiber product, Coprod the fiberwise
// disjoint union, Fun the fiber exponent, Id the equalizer (a subsingleton
// fiber, inhabited iff the endpoints agree), Pi the dependent product of
// graphs, Prop the two-element truth-value object, and El p the fiber
// classified by p.

#include <algorithm>
#include <cstdlib>
#include <string>
#include <vector>

#include "cbt/check.hpp"
#include "cbt/syntax.hpp"

namespace cbt {

// ---------------------------------------------------------------------------
// Semantic values

struct SemValue;
using SemPtr = std::shared_ptr<const SemValue>;

struct UnitTok {};
struct PairV { SemPtr fst, snd; };
struct LeftV { SemPtr arg; };
struct RightV { SemPtr arg; };
struct FunV { std::vector<std::pair<SemPtr, SemPtr>> graph; };  // sorted by key
struct PropV { bool truth = false; };
struct EqTok {};

struct SemValue {
  std::variant<UnitTok, PairV, LeftV, RightV, FunV, PropV, EqTok> node;
};

inline SemPtr smk(SemValue v) { return std::make_shared<const SemValue>(std::move(v)); }
inline SemPtr unit_tok() { return smk(SemValue{UnitTok{}}); }
inline SemPtr eq_tok() { return smk(SemValue{EqTok{}}); }
inline SemPtr prop_v(bool b) { return smk(SemValue{PropV{b}}); }

/// Total order on semantic values; the basis for canonical FinSet order.
inline int sem_compare(const SemPtr& a, const SemPtr& b) {
  if (a->node.index() != b->node.index())
    return a->node.index() < b->node.index() ? -1 : 1;
  return std::visit(
      overloaded{
          [&](const UnitTok&) { return 0; },
          [&](const PairV& x) {
            const auto& y = std::get<PairV>(b->node);
            int c = sem_compare(x.fst, y.fst);
            return c != 0 ? c : sem_compare(x.snd, y.snd);
          },
          [&](const LeftV& x) { return sem_compare(x.arg, std::get<LeftV>(b->node).arg); },
          [&](const RightV& x) { return sem_compare(x.arg, std::get<RightV>(b->node).arg); },
          [&](const FunV& x) {
            const auto& y = std::get<FunV>(b->node);
            if (x.graph.size() != y.graph.size())
              return x.graph.size() < y.graph.size() ? -1 : 1;
            for (std::size_t k = 0; k < x.graph.size(); ++k) {
              int c = sem_compare(x.graph[k].first, y.graph[k].first);
              if (c != 0) return c;
              c = sem_compare(x.graph[k].second, y.graph[k].second);
              if (c != 0) return c;
            }
            return 0;
          },
          [&](const PropV& x) {
            const auto& y = std::get<PropV>(b->node);
            return x.truth == y.truth ? 0 : (x.truth < y.truth ? -1 : 1);
          },
          [&](const EqTok&) { return 0; },
      },
      a->node);
}

inline bool sem_eq(const SemPtr& a, const SemPtr& b) { return sem_compare(a, b) == 0; }

/// Finite set with canonical (sorted, duplicate-free) element order.
struct FinSet {
  std::vector<SemPtr> elems;

  std::size_t size() const { return elems.size(); }
  bool empty() const { return elems.empty(); }

  void canonicalize() {
    std::sort(elems.begin(), elems.end(),
              [](const SemPtr& a, const SemPtr& b) { return sem_compare(a, b) < 0; });
    elems.erase(std::unique(elems.begin(), elems.end(),
                            [](const SemPtr& a, const SemPtr& b) { return sem_eq(a, b); }),
                elems.end());
  }

  bool contains(const SemPtr& v) const {
    for (const auto& e : elems)
      if (sem_eq(e, v)) return true;
    return false;
  }
};

inline bool operator==(const FinSet& a, const FinSet& b) {
  if (a.elems.size() != b.elems.size()) return false;
  for (std::size_t k = 0; k < a.elems.size(); ++k)
    if (!sem_eq(a.elems[k], b.elems[k])) return false;
  return true;
}

using SemEnv = std::vector<SemPtr>;  // oldest first, like Ctx

struct BudgetExceeded : std::runtime_error {
  explicit BudgetExceeded(long long limit)
      : std::runtime_error("enumeration budget of " + std::to_string(limit) +
                           " elements exceeded") {}
};

inline long long default_enum_budget() {
  if (const char* s = std::getenv("CBT_ENUM_BUDGET")) {
    char* end = nullptr;
    long long v = std::strtoll(s, &end, 10);
    if (end && *end == '\0' && v > 0) return v;
  }
  return 1000000;
}

// ---------------------------------------------------------------------------

class SetModel {
 public:
  explicit SetModel(long long budget = default_enum_budget())
      : limit_(budget), remaining_(budget) {}

  FinSet interp_ty(const Ctx& ctx, const TypePtr& a, const SemEnv& env) {
    return std::visit(
        overloaded{
            [&](const UnitTy&) { return singleton(unit_tok()); },
            [&](const ProdTy& p) {
              FinSet l = interp_ty(ctx, p.left, env);
              FinSet r = interp_ty(ctx, p.right, env);
              FinSet out;
              for (const auto& x : l.elems)
                for (const auto& y : r.elems) {
                  charge(1);
                  out.elems.push_back(smk(SemValue{PairV{x, y}}));
                }
              out.canonicalize();
              return out;
            },
            [&](const CoprodTy& c) {
              FinSet l = interp_ty(ctx, c.left, env);
              FinSet r = interp_ty(ctx, c.right, env);
              FinSet out;
              for (const auto& x : l.elems) {
                charge(1);
                out.elems.push_back(smk(SemValue{LeftV{x}}));
              }
              for (const auto& y : r.elems) {
                charge(1);
                out.elems.push_back(smk(SemValue{RightV{y}}));
              }
              out.canonicalize();
              return out;
            },
            [&](const FunTy& f) {
              FinSet dom = interp_ty(ctx, f.dom, env);
              FinSet cod = interp_ty(ctx, f.cod, env);
              std::vector<FinSet> fibers(dom.size(), cod);
              return graphs(dom, fibers);
            },
            [&](const IdTy& i) {
              SemPtr l = interp_tm(ctx, i.lhs, i.carrier, env);
              SemPtr r = interp_tm(ctx, i.rhs, i.carrier, env);
              return sem_eq(l, r) ? singleton(eq_tok()) : FinSet{};
            },
            [&](const PiTy& p) {
              FinSet dom = interp_ty(ctx, p.dom, env);
              std::vector<FinSet> fibers;
              fibers.reserve(dom.size());
              for (const auto& x : dom.elems) {
                SemEnv inner = env;
                inner.push_back(x);
                fibers.push_back(interp_ty(ctx.extended(p.dom), p.cod, inner));
              }
              return graphs(dom, fibers);
            },
            [&](const PropTy&) {
              charge(2);
              FinSet out;
              out.elems = {prop_v(false), prop_v(true)};
              return out;
            },
            [&](const ElTy& e) {
              SemPtr code = interp_tm(ctx, e.code, prop_ty(), env);
              const auto* pv = std::get_if<PropV>(&code->node);
              if (!pv) throw internal_error("El code did not evaluate to a truth value");
              return pv->truth ? singleton(unit_tok()) : FinSet{};
            },
        },
        a->node);
  }

  SemPtr interp_tm(const Ctx& ctx, const TermPtr& u, const TypePtr& a, const SemEnv& env) {
    return std::visit(
        overloaded{
            [&](const Var& v) -> SemPtr {
              if (v.index < 0 || static_cast<std::size_t>(v.index) >= env.size())
                throw internal_error("semantic environment lookup out of range");
              return env[env.size() - 1 - static_cast<std::size_t>(v.index)];
            },
            [&](const Star&) -> SemPtr { return unit_tok(); },
            [&](const Pair& p) -> SemPtr {
              const auto* t = std::get_if<ProdTy>(&a->node);
              if (!t) throw internal_error("pair interpreted at a non-product type");
              return smk(SemValue{PairV{interp_tm(ctx, p.fst, t->left, env),
                                        interp_tm(ctx, p.snd, t->right, env)}});
            },
            [&](const Proj1& p) -> SemPtr {
              TypePtr ty = ck_.infer_tm(ctx, p.arg);
              SemPtr v = interp_tm(ctx, p.arg, ty, env);
              const auto* pv = std::get_if<PairV>(&v->node);
              if (!pv) throw internal_error("projection of a non-pair value");
              return pv->fst;
            },
            [&](const Proj2& p) -> SemPtr {
              TypePtr ty = ck_.infer_tm(ctx, p.arg);
              SemPtr v = interp_tm(ctx, p.arg, ty, env);
              const auto* pv = std::get_if<PairV>(&v->node);
              if (!pv) throw internal_error("projection of a non-pair value");
              return pv->snd;
            },
            [&](const Inl& i) -> SemPtr {
              const auto* t = std::get_if<CoprodTy>(&a->node);
              if (!t) throw internal_error("injection interpreted at a non-sum type");
              return smk(SemValue{LeftV{interp_tm(ctx, i.arg, t->left, env)}});
            },
            [&](const Inr& i) -> SemPtr {
              const auto* t = std::get_if<CoprodTy>(&a->node);
              if (!t) throw internal_error("injection interpreted at a non-sum type");
              return smk(SemValue{RightV{interp_tm(ctx, i.arg, t->right, env)}});
            },
            [&](const Match& m) -> SemPtr {
              SemPtr s = interp_tm(ctx, m.scrut, coprod_ty(m.left_ty, m.right_ty), env);
              TypePtr branch_ty = shift(m.motive, 1, 0);
              if (const auto* l = std::get_if<LeftV>(&s->node)) {
                SemEnv inner = env;
                inner.push_back(l->arg);
                return interp_tm(ctx.extended(m.left_ty), m.left, branch_ty, inner);
              }
              if (const auto* r = std::get_if<RightV>(&s->node)) {
                SemEnv inner = env;
                inner.push_back(r->arg);
                return interp_tm(ctx.extended(m.right_ty), m.right, branch_ty, inner);
              }
              throw internal_error("match scrutinee is not an injection value");
            },
            [&](const Lam& l) -> SemPtr {
              const auto* t = std::get_if<FunTy>(&a->node);
              if (!t) throw internal_error("lambda interpreted at a non-function type");
              return close_over(ctx, l.body, t->dom, shift(t->cod, 1, 0), env);
            },
            [&](const DLam& l) -> SemPtr {
              const auto* t = std::get_if<PiTy>(&a->node);
              if (!t) throw internal_error("lambda interpreted at a non-Pi type");
              return close_over(ctx, l.body, t->dom, t->cod, env);
            },
            [&](const App& ap) -> SemPtr {
              TypePtr fn_ty;
              if (Checker::inferable(ap.fn)) {
                fn_ty = ck_.infer_tm(ctx, ap.fn);
              } else {
                fn_ty = fun_ty(ck_.infer_tm(ctx, ap.arg), a);
              }
              const auto* t = std::get_if<FunTy>(&fn_ty->node);
              if (!t) throw internal_error("application head is not a function");
              SemPtr f = interp_tm(ctx, ap.fn, fn_ty, env);
              SemPtr x = interp_tm(ctx, ap.arg, t->dom, env);
              return graph_lookup(f, x);
            },
            [&](const DApp& ap) -> SemPtr {
              TypePtr fn_ty;
              if (Checker::inferable(ap.fn)) {
                fn_ty = ck_.infer_tm(ctx, ap.fn);
              } else {
                fn_ty = pi_ty(ck_.infer_tm(ctx, ap.arg), shift(a, 1, 0));
              }
              const auto* t = std::get_if<PiTy>(&fn_ty->node);
              if (!t) throw internal_error("application head is not a Pi");
              SemPtr f = interp_tm(ctx, ap.fn, fn_ty, env);
              SemPtr x = interp_tm(ctx, ap.arg, t->dom, env);
              return graph_lookup(f, x);
            },
            [&](const Refl&) -> SemPtr { return eq_tok(); },
            [&](const PropCode& c) -> SemPtr {
              return prop_v(!interp_ty(ctx, c.carrier, env).empty());
            },
            [&](const Annot& an) -> SemPtr { return interp_tm(ctx, an.tm, an.ty, env); },
        },
        u->node);
  }

  SemEnv interp_subst(const Ctx& ctx, const SubstObj& sigma, const Ctx& delta,
                      const SemEnv& env) {
    SemEnv out;
    out.reserve(sigma.size());
    for (std::size_t k = 0; k < sigma.size(); ++k) {
      SubstObj prefix{std::vector<TermPtr>(sigma.terms.begin(),
                                           sigma.terms.begin() + static_cast<long>(k))};
      TypePtr ty = apply_ty(delta.entries[k], prefix);
      out.push_back(interp_tm(ctx, sigma.terms[k], ty, env));
    }
    return out;
  }

  /// All environments of a context, oldest entry enumerated first.
  std::vector<SemEnv> enumerate_envs(const Ctx& ctx) {
    std::vector<SemEnv> out{{}};
    for (std::size_t k = 0; k < ctx.size(); ++k) {
      Ctx prefix = ctx.prefix(k);
      std::vector<SemEnv> next;
      for (const auto& env : out) {
        FinSet fiber = interp_ty(prefix, ctx.entries[k], env);
        for (const auto& x : fiber.elems) {
          charge(1);
          SemEnv e = env;
          e.push_back(x);
          next.push_back(std::move(e));
        }
      }
      out = std::move(next);
    }
    return out;
  }

  /// Context as a set of left-nested dependent pairs, terminal at the root.
  FinSet interp_ctx(const Ctx& ctx) {
    FinSet out;
    for (const auto& env : enumerate_envs(ctx)) {
      SemPtr v = unit_tok();
      for (const auto& x : env) v = smk(SemValue{PairV{v, x}});
      out.elems.push_back(v);
    }
    out.canonicalize();
    return out;
  }

  /// Exhaustive semantic equality of two terms at a type: equal values under
  /// every environment of the context (vacuously true when none exist).
  bool sem_eq_tm(const Ctx& ctx, const TermPtr& u, const TermPtr& v, const TypePtr& a) {
    for (const auto& env : enumerate_envs(ctx))
      if (!sem_eq(interp_tm(ctx, u, a, env), interp_tm(ctx, v, a, env))) return false;
    return true;
  }

  /// Exhaustive semantic equality of two types: equal fibers everywhere.
  bool sem_eq_ty(const Ctx& ctx, const TypePtr& a, const TypePtr& b) {
    for (const auto& env : enumerate_envs(ctx))
      if (!(interp_ty(ctx, a, env) == interp_ty(ctx, b, env))) return false;
    return true;
  }

  std::size_t cardinality(const TypePtr& a) { return interp_ty(Ctx{}, a, {}).size(); }

 private:
  long long limit_;
  long long remaining_;
  Checker ck_;

  void charge(long long n) {
    remaining_ -= n;
    if (remaining_ < 0) throw BudgetExceeded(limit_);
  }

  FinSet singleton(SemPtr v) {
    charge(1);
    FinSet out;
    out.elems.push_back(std::move(v));
    return out;
  }

  /// All graphs with the given keys and per-key fibers (the dependent product;
  /// the plain exponent passes a constant fiber).
  FinSet graphs(const FinSet& dom, const std::vector<FinSet>& fibers) {
    for (const auto& f : fibers)
      if (f.empty()) return FinSet{};
    FinSet out;
    std::vector<std::size_t> idx(dom.size(), 0);
    while (true) {
      charge(1);
      FunV g;
      g.graph.reserve(dom.size());
      for (std::size_t k = 0; k < dom.size(); ++k)
        g.graph.emplace_back(dom.elems[k], fibers[k].elems[idx[k]]);
      out.elems.push_back(smk(SemValue{std::move(g)}));
      std::size_t k = 0;
      for (; k < idx.size(); ++k) {
        if (++idx[k] < fibers[k].size()) break;
        idx[k] = 0;
      }
      if (k == idx.size()) break;  // odometer wrapped (or zero keys)
    }
    out.canonicalize();
    return out;
  }

  /// Interprets a one-binder body as a function graph over dom.
  SemPtr close_over(const Ctx& ctx, const TermPtr& body, const TypePtr& dom,
                    const TypePtr& body_ty, const SemEnv& env) {
    FinSet d = interp_ty(ctx, dom, env);
    FunV g;
    g.graph.reserve(d.size());
    for (const auto& x : d.elems) {
      charge(1);
      SemEnv inner = env;
      inner.push_back(x);
      g.graph.emplace_back(x, interp_tm(ctx.extended(dom), body, body_ty, inner));
    }
    return smk(SemValue{std::move(g)});
  }

  static SemPtr graph_lookup(const SemPtr& f, const SemPtr& x) {
    const auto* g = std::get_if<FunV>(&f->node);
    if (!g) throw internal_error("application of a non-function value");
    for (const auto& [k, v] : g->graph)
      if (sem_eq(k, x)) return v;
    throw internal_error("function graph is not total on its argument");
  }
};

/// One-line rendering of a semantic value.
inline std::string sem_show(const SemPtr& v) {
  return std::visit(
      overloaded{
          [&](const UnitTok&) { return std::string("UnitTok"); },
          [&](const PairV& p) { return "PairV(" + sem_show(p.fst) + ", " + sem_show(p.snd) + ")"; },
          [&](const LeftV& l) { return "LeftV(" + sem_show(l.arg) + ")"; },
          [&](const RightV& r) { return "RightV(" + sem_show(r.arg) + ")"; },
          [&](const FunV& f) {
            std::string out = "FunV{";
            for (std::size_t k = 0; k < f.graph.size(); ++k) {
              if (k) out += ", ";
              out += sem_show(f.graph[k].first) + " -> " + sem_show(f.graph[k].second);
            }
            return out + "}";
          },
          [&](const PropV& p) { return std::string(p.truth ? "PropV(t)" : "PropV(f)"); },
          [&](const EqTok&) { return std::string("EqTok"); },
      },
      v->node);
}

}  // namespace cbt
