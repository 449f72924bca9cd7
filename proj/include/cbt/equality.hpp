#pragma once

// Definitional equality via normalization by evaluation. Terms are evaluated
// into a semantic domain (closures for binders, typed neutrals for stuck
// variables) and read back type-directed, which makes the normal forms
// beta-normal and eta-long: every inhabitant of Unit reads back as Star,
// pairs are eta-expanded, functions are lambda-wrapped, and inhabitants of
// irrelevant types (El, Id) read back as canonical tokens.
//
// Equality reflection is approximated after normalization by a congruence
// closure over the ground equations contributed by Id-typed context entries.
// That keeps conversion decidable; equations under binders are only used at
// subterms that do not mention the bound variables.

#include <functional>
#include <utility>

#include "cbt/syntax.hpp"

namespace cbt {

// ---------------------------------------------------------------------------
// Semantic domain

struct Val;
struct TyVal;
struct Neut;
using ValPtr = std::shared_ptr<const Val>;
using TyValPtr = std::shared_ptr<const TyVal>;
using NeutPtr = std::shared_ptr<const Neut>;
using Env = std::vector<ValPtr>;  // oldest first, like Ctx

struct TVUnit {};
struct TVProd { TyValPtr left, right; };
struct TVCoprod { TyValPtr left, right; };
struct TVFun { TyValPtr dom, cod; };
struct TVId { TyValPtr carrier; ValPtr lhs, rhs; };
struct TVPi { TyValPtr dom; std::function<TyValPtr(ValPtr)> cod; };
struct TVProp {};
struct TVEl { ValPtr code; };

struct TyVal {
  std::variant<TVUnit, TVProd, TVCoprod, TVFun, TVId, TVPi, TVProp, TVEl> node;
};

struct VStar {};
struct VPair { ValPtr fst, snd; };
struct VInl { ValPtr arg; };
struct VInr { ValPtr arg; };
struct VLam { std::function<ValPtr(ValPtr)> fn; };
struct VDLam { std::function<ValPtr(ValPtr)> fn; };
struct VRefl { ValPtr arg; };
struct VPropCode { TyValPtr carrier; ValPtr uniq; };
struct VNeut { NeutPtr neut; };

struct Val {
  std::variant<VStar, VPair, VInl, VInr, VLam, VDLam, VRefl, VPropCode, VNeut> node;
};

// Neutral spines. Each neutral knows the semantic type of the whole spine so
// readback can stay type-directed without re-inference.
struct NVar { int level = 0; };
struct NProj1 { NeutPtr arg; };
struct NProj2 { NeutPtr arg; };
struct NApp { NeutPtr fn; ValPtr arg; };
struct NDApp { NeutPtr fn; ValPtr arg; };
struct NMatch {
  NeutPtr scrut;
  TyValPtr left_ty, right_ty, motive;
  std::function<ValPtr(ValPtr)> left, right;
};

struct Neut {
  std::variant<NVar, NProj1, NProj2, NApp, NDApp, NMatch> node;
  TyValPtr ty;
};

inline ValPtr vmk(Val v) { return std::make_shared<const Val>(std::move(v)); }
inline TyValPtr vmk(TyVal v) { return std::make_shared<const TyVal>(std::move(v)); }
inline NeutPtr nmk(Neut n) { return std::make_shared<const Neut>(std::move(n)); }

inline ValPtr fresh_var(int level, TyValPtr ty) {
  return vmk(Val{VNeut{nmk(Neut{NVar{level}, std::move(ty)})}});
}

// ---------------------------------------------------------------------------
// Evaluation

ValPtr eval_tm(const TermPtr& t, const Env& env);
TyValPtr eval_ty(const TypePtr& t, const Env& env);

inline const ValPtr& env_lookup(const Env& env, int i) {
  if (i < 0 || static_cast<std::size_t>(i) >= env.size())
    throw internal_error("evaluation hit an out-of-scope variable");
  return env[env.size() - 1 - static_cast<std::size_t>(i)];
}

inline Env env_push(Env env, ValPtr v) {
  env.push_back(std::move(v));
  return env;
}

inline ValPtr do_proj1(const ValPtr& v) {
  if (const auto* p = std::get_if<VPair>(&v->node)) return p->fst;
  if (const auto* n = std::get_if<VNeut>(&v->node)) {
    const auto* prod = std::get_if<TVProd>(&n->neut->ty->node);
    if (!prod) throw internal_error("projection from a neutral of non-product type");
    return vmk(Val{VNeut{nmk(Neut{NProj1{n->neut}, prod->left})}});
  }
  throw internal_error("projection from a non-pair value");
}

inline ValPtr do_proj2(const ValPtr& v) {
  if (const auto* p = std::get_if<VPair>(&v->node)) return p->snd;
  if (const auto* n = std::get_if<VNeut>(&v->node)) {
    const auto* prod = std::get_if<TVProd>(&n->neut->ty->node);
    if (!prod) throw internal_error("projection from a neutral of non-product type");
    return vmk(Val{VNeut{nmk(Neut{NProj2{n->neut}, prod->right})}});
  }
  throw internal_error("projection from a non-pair value");
}

inline ValPtr do_app(const ValPtr& f, const ValPtr& a) {
  if (const auto* l = std::get_if<VLam>(&f->node)) return l->fn(a);
  if (const auto* n = std::get_if<VNeut>(&f->node)) {
    const auto* fun = std::get_if<TVFun>(&n->neut->ty->node);
    if (!fun) throw internal_error("application of a neutral of non-function type");
    return vmk(Val{VNeut{nmk(Neut{NApp{n->neut, a}, fun->cod})}});
  }
  throw internal_error("application of a non-function value");
}

inline ValPtr do_dapp(const ValPtr& f, const ValPtr& a) {
  if (const auto* l = std::get_if<VDLam>(&f->node)) return l->fn(a);
  if (const auto* n = std::get_if<VNeut>(&f->node)) {
    const auto* pi = std::get_if<TVPi>(&n->neut->ty->node);
    if (!pi) throw internal_error("application of a neutral of non-Pi type");
    return vmk(Val{VNeut{nmk(Neut{NDApp{n->neut, a}, pi->cod(a)})}});
  }
  throw internal_error("application of a non-function value");
}

inline ValPtr do_match(const ValPtr& scrut, TyValPtr left_ty, TyValPtr right_ty,
                       TyValPtr motive, std::function<ValPtr(ValPtr)> left,
                       std::function<ValPtr(ValPtr)> right) {
  if (const auto* l = std::get_if<VInl>(&scrut->node)) return left(l->arg);
  if (const auto* r = std::get_if<VInr>(&scrut->node)) return right(r->arg);
  if (const auto* n = std::get_if<VNeut>(&scrut->node))
    return vmk(Val{VNeut{nmk(Neut{NMatch{n->neut, std::move(left_ty), std::move(right_ty),
                                         motive, std::move(left), std::move(right)},
                                  motive})}});
  throw internal_error("match on a non-coproduct value");
}

inline ValPtr eval_tm(const TermPtr& t, const Env& env) {
  return std::visit(
      overloaded{
          [&](const Var& v) -> ValPtr { return env_lookup(env, v.index); },
          [&](const Star&) -> ValPtr { return vmk(Val{VStar{}}); },
          [&](const Pair& p) -> ValPtr {
            return vmk(Val{VPair{eval_tm(p.fst, env), eval_tm(p.snd, env)}});
          },
          [&](const Proj1& p) -> ValPtr { return do_proj1(eval_tm(p.arg, env)); },
          [&](const Proj2& p) -> ValPtr { return do_proj2(eval_tm(p.arg, env)); },
          [&](const Inl& i) -> ValPtr { return vmk(Val{VInl{eval_tm(i.arg, env)}}); },
          [&](const Inr& i) -> ValPtr { return vmk(Val{VInr{eval_tm(i.arg, env)}}); },
          [&](const Match& m) -> ValPtr {
            TermPtr lbody = m.left, rbody = m.right;
            return do_match(eval_tm(m.scrut, env), eval_ty(m.left_ty, env),
                            eval_ty(m.right_ty, env), eval_ty(m.motive, env),
                            [lbody, env](ValPtr v) { return eval_tm(lbody, env_push(env, std::move(v))); },
                            [rbody, env](ValPtr v) { return eval_tm(rbody, env_push(env, std::move(v))); });
          },
          [&](const Lam& l) -> ValPtr {
            TermPtr body = l.body;
            return vmk(Val{VLam{[body, env](ValPtr v) {
              return eval_tm(body, env_push(env, std::move(v)));
            }}});
          },
          [&](const App& a) -> ValPtr {
            return do_app(eval_tm(a.fn, env), eval_tm(a.arg, env));
          },
          [&](const DLam& l) -> ValPtr {
            TermPtr body = l.body;
            return vmk(Val{VDLam{[body, env](ValPtr v) {
              return eval_tm(body, env_push(env, std::move(v)));
            }}});
          },
          [&](const DApp& a) -> ValPtr {
            return do_dapp(eval_tm(a.fn, env), eval_tm(a.arg, env));
          },
          [&](const Refl& r) -> ValPtr { return vmk(Val{VRefl{eval_tm(r.arg, env)}}); },
          [&](const PropCode& c) -> ValPtr {
            return vmk(Val{VPropCode{eval_ty(c.carrier, env), eval_tm(c.uniq, env)}});
          },
          [&](const Annot& a) -> ValPtr { return eval_tm(a.tm, env); },
      },
      t->node);
}

inline TyValPtr eval_ty(const TypePtr& t, const Env& env) {
  return std::visit(
      overloaded{
          [&](const UnitTy&) -> TyValPtr { return vmk(TyVal{TVUnit{}}); },
          [&](const ProdTy& p) -> TyValPtr {
            return vmk(TyVal{TVProd{eval_ty(p.left, env), eval_ty(p.right, env)}});
          },
          [&](const CoprodTy& c) -> TyValPtr {
            return vmk(TyVal{TVCoprod{eval_ty(c.left, env), eval_ty(c.right, env)}});
          },
          [&](const FunTy& f) -> TyValPtr {
            return vmk(TyVal{TVFun{eval_ty(f.dom, env), eval_ty(f.cod, env)}});
          },
          [&](const IdTy& i) -> TyValPtr {
            return vmk(TyVal{TVId{eval_ty(i.carrier, env), eval_tm(i.lhs, env),
                                  eval_tm(i.rhs, env)}});
          },
          [&](const PiTy& p) -> TyValPtr {
            TypePtr cod = p.cod;
            return vmk(TyVal{TVPi{eval_ty(p.dom, env), [cod, env](ValPtr v) {
                                    return eval_ty(cod, env_push(env, std::move(v)));
                                  }}});
          },
          [&](const PropTy&) -> TyValPtr { return vmk(TyVal{TVProp{}}); },
          [&](const ElTy& e) -> TyValPtr { return vmk(TyVal{TVEl{eval_tm(e.code, env)}}); },
      },
      t->node);
}

/// Semantic type of uniqueness proofs over carrier A: Pi x:A. Pi y:A. Id A x y.
inline TyValPtr uniq_ty_val(const TyValPtr& a) {
  return vmk(TyVal{TVPi{a, [a](ValPtr x) {
                          return vmk(TyVal{TVPi{a, [a, x](ValPtr y) {
                                                  return vmk(TyVal{TVId{a, x, y}});
                                                }}});
                        }}});
}

// ---------------------------------------------------------------------------
// Readback

TermPtr readback_tm(int depth, const TyValPtr& ty, const ValPtr& v);
TermPtr readback_neut(int depth, const NeutPtr& n);
TypePtr readback_ty(int depth, const TyValPtr& ty);

inline TermPtr readback_tm(int depth, const TyValPtr& ty, const ValPtr& v) {
  return std::visit(
      overloaded{
          [&](const TVUnit&) -> TermPtr { return star(); },
          [&](const TVProd& p) -> TermPtr {
            return pair(readback_tm(depth, p.left, do_proj1(v)),
                        readback_tm(depth, p.right, do_proj2(v)));
          },
          [&](const TVFun& f) -> TermPtr {
            ValPtr x = fresh_var(depth, f.dom);
            return lam(readback_tm(depth + 1, f.cod, do_app(v, x)));
          },
          [&](const TVPi& p) -> TermPtr {
            ValPtr x = fresh_var(depth, p.dom);
            return dlam(readback_tm(depth + 1, p.cod(x), do_dapp(v, x)));
          },
          // Canonical tokens: every proof of an identity reads back as refl of
          // the (normalized) left endpoint, every inhabitant of El as star.
          [&](const TVId& i) -> TermPtr { return refl(readback_tm(depth, i.carrier, i.lhs)); },
          [&](const TVEl&) -> TermPtr { return star(); },
          [&](const TVCoprod& c) -> TermPtr {
            if (const auto* l = std::get_if<VInl>(&v->node))
              return inl(readback_tm(depth, c.left, l->arg));
            if (const auto* r = std::get_if<VInr>(&v->node))
              return inr(readback_tm(depth, c.right, r->arg));
            if (const auto* n = std::get_if<VNeut>(&v->node)) return readback_neut(depth, n->neut);
            throw internal_error("coproduct value is neither injection nor neutral");
          },
          [&](const TVProp&) -> TermPtr {
            if (const auto* c = std::get_if<VPropCode>(&v->node))
              return prop_code(readback_ty(depth, c->carrier),
                               readback_tm(depth, uniq_ty_val(c->carrier), c->uniq));
            if (const auto* n = std::get_if<VNeut>(&v->node)) return readback_neut(depth, n->neut);
            throw internal_error("Prop value is neither a code nor neutral");
          },
      },
      ty->node);
}

inline TermPtr readback_neut(int depth, const NeutPtr& n) {
  return std::visit(
      overloaded{
          [&](const NVar& v) -> TermPtr {
            int index = depth - 1 - v.level;
            if (index < 0) throw internal_error("readback of a level outside the current depth");
            return var(index);
          },
          [&](const NProj1& p) -> TermPtr { return proj1(readback_neut(depth, p.arg)); },
          [&](const NProj2& p) -> TermPtr { return proj2(readback_neut(depth, p.arg)); },
          [&](const NApp& a) -> TermPtr {
            const auto* fun = std::get_if<TVFun>(&a.fn->ty->node);
            if (!fun) throw internal_error("neutral application head is not a function");
            return app(readback_neut(depth, a.fn), readback_tm(depth, fun->dom, a.arg));
          },
          [&](const NDApp& a) -> TermPtr {
            const auto* pi = std::get_if<TVPi>(&a.fn->ty->node);
            if (!pi) throw internal_error("neutral application head is not a Pi");
            return dapp(readback_neut(depth, a.fn), readback_tm(depth, pi->dom, a.arg));
          },
          [&](const NMatch& m) -> TermPtr {
            ValPtr xl = fresh_var(depth, m.left_ty);
            ValPtr xr = fresh_var(depth, m.right_ty);
            // The motive value is depth-independent; reading it back one
            // binder deeper renders the weakened branch type automatically.
            return match(readback_neut(depth, m.scrut), readback_ty(depth, m.left_ty),
                         readback_ty(depth, m.right_ty), readback_ty(depth, m.motive),
                         readback_tm(depth + 1, m.motive, m.left(xl)),
                         readback_tm(depth + 1, m.motive, m.right(xr)));
          },
      },
      n->node);
}

inline TypePtr readback_ty(int depth, const TyValPtr& ty) {
  return std::visit(
      overloaded{
          [&](const TVUnit&) -> TypePtr { return unit_ty(); },
          [&](const TVProd& p) -> TypePtr {
            return prod_ty(readback_ty(depth, p.left), readback_ty(depth, p.right));
          },
          [&](const TVCoprod& c) -> TypePtr {
            return coprod_ty(readback_ty(depth, c.left), readback_ty(depth, c.right));
          },
          [&](const TVFun& f) -> TypePtr {
            return fun_ty(readback_ty(depth, f.dom), readback_ty(depth, f.cod));
          },
          [&](const TVId& i) -> TypePtr {
            return id_ty(readback_ty(depth, i.carrier), readback_tm(depth, i.carrier, i.lhs),
                         readback_tm(depth, i.carrier, i.rhs));
          },
          [&](const TVPi& p) -> TypePtr {
            ValPtr x = fresh_var(depth, p.dom);
            return pi_ty(readback_ty(depth, p.dom), readback_ty(depth + 1, p.cod(x)));
          },
          [&](const TVProp&) -> TypePtr { return prop_ty(); },
          [&](const TVEl& e) -> TypePtr {
            return el_ty(readback_tm(depth, vmk(TyVal{TVProp{}}), e.code));
          },
      },
      ty->node);
}

// ---------------------------------------------------------------------------
// Normalization

/// Beta-normal, eta-long term; irrelevant inhabitants are canonical tokens.
struct NfTm { TermPtr term; };
struct NfTy { TypePtr type; };

/// Environment of fresh neutrals for the entries of ctx.
inline Env ctx_env(const Ctx& ctx) {
  Env env;
  env.reserve(ctx.size());
  for (std::size_t k = 0; k < ctx.size(); ++k)
    env.push_back(fresh_var(static_cast<int>(k), eval_ty(ctx.entries[k], env)));
  return env;
}

inline NfTm normalize_tm(const Ctx& ctx, const TypePtr& a, const TermPtr& u) {
  Env env = ctx_env(ctx);
  return NfTm{readback_tm(static_cast<int>(ctx.size()), eval_ty(a, env), eval_tm(u, env))};
}

inline NfTy normalize_ty(const Ctx& ctx, const TypePtr& a) {
  Env env = ctx_env(ctx);
  return NfTy{readback_ty(static_cast<int>(ctx.size()), eval_ty(a, env))};
}

/// True iff the head of A (up to evaluation) is El or Id, whose inhabitants
/// are all definitionally equal.
inline bool is_irrelevant(const Ctx& ctx, const TypePtr& a) {
  TyValPtr tv = eval_ty(a, ctx_env(ctx));
  return std::holds_alternative<TVEl>(tv->node) || std::holds_alternative<TVId>(tv->node);
}

// ---------------------------------------------------------------------------
// Congruence closure over ground normal forms

/// Union-find partition of (sub)terms of the equations fed to it, closed under
/// congruence through the constructors that do not bind variables. Subterms
/// containing binders participate as atomic leaves.
class EqClassMap {
  enum class Tag {
    AtomTm, AtomTy, PairC, P1, P2, InlC, InrC, AppC, DAppC, ReflC, CodeC,
    ProdC, CoprodC, FunC, IdC, ElC
  };
  struct Node {
    Tag tag;
    std::vector<int> kids;
    TermPtr atom_tm;  // set iff tag == AtomTm
    TypePtr atom_ty;  // set iff tag == AtomTy
  };

 public:
  bool empty() const { return equations_ == 0; }

  /// Merges the classes of two terms (normal forms in the ambient context).
  void add_equation(const TermPtr& a, const TermPtr& b) {
    unite(intern_tm(a), intern_tm(b));
    ++equations_;
    closed_ = false;
  }

  bool equal_tm(const TermPtr& a, const TermPtr& b) {
    if (equal(a, b)) return true;
    if (empty()) return false;
    int i = intern_tm(a), j = intern_tm(b);
    close();
    return find(i) == find(j);
  }

  bool equal_ty(const TypePtr& a, const TypePtr& b) {
    if (equal(a, b)) return true;
    if (empty()) return false;
    int i = intern_ty(a), j = intern_ty(b);
    close();
    return find(i) == find(j);
  }

 private:
  std::vector<Node> nodes_;
  std::vector<int> parent_;
  int equations_ = 0;
  bool closed_ = true;

  int add_node(Node n) {
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
      const Node& m = nodes_[i];
      if (m.tag != n.tag || m.kids != n.kids) continue;
      if (n.tag == Tag::AtomTm && !equal(m.atom_tm, n.atom_tm)) continue;
      if (n.tag == Tag::AtomTy && !equal(m.atom_ty, n.atom_ty)) continue;
      return static_cast<int>(i);
    }
    nodes_.push_back(std::move(n));
    parent_.push_back(static_cast<int>(nodes_.size()) - 1);
    closed_ = false;
    return static_cast<int>(nodes_.size()) - 1;
  }

  int intern_tm(const TermPtr& t) {
    return std::visit(
        overloaded{
            [&](const Pair& p) { return add_node({Tag::PairC, {intern_tm(p.fst), intern_tm(p.snd)}, nullptr, nullptr}); },
            [&](const Proj1& p) { return add_node({Tag::P1, {intern_tm(p.arg)}, nullptr, nullptr}); },
            [&](const Proj2& p) { return add_node({Tag::P2, {intern_tm(p.arg)}, nullptr, nullptr}); },
            [&](const Inl& i) { return add_node({Tag::InlC, {intern_tm(i.arg)}, nullptr, nullptr}); },
            [&](const Inr& i) { return add_node({Tag::InrC, {intern_tm(i.arg)}, nullptr, nullptr}); },
            [&](const App& a) { return add_node({Tag::AppC, {intern_tm(a.fn), intern_tm(a.arg)}, nullptr, nullptr}); },
            [&](const DApp& a) { return add_node({Tag::DAppC, {intern_tm(a.fn), intern_tm(a.arg)}, nullptr, nullptr}); },
            [&](const Refl& r) { return add_node({Tag::ReflC, {intern_tm(r.arg)}, nullptr, nullptr}); },
            [&](const PropCode& c) {
              return add_node({Tag::CodeC, {intern_ty(c.carrier), intern_tm(c.uniq)}, nullptr, nullptr});
            },
            [&](const Annot& a) { return intern_tm(a.tm); },
            // Var, Star and the binder forms are leaves.
            [&](const auto&) { return add_node({Tag::AtomTm, {}, t, nullptr}); },
        },
        t->node);
  }

  int intern_ty(const TypePtr& t) {
    return std::visit(
        overloaded{
            [&](const ProdTy& p) { return add_node({Tag::ProdC, {intern_ty(p.left), intern_ty(p.right)}, nullptr, nullptr}); },
            [&](const CoprodTy& c) { return add_node({Tag::CoprodC, {intern_ty(c.left), intern_ty(c.right)}, nullptr, nullptr}); },
            [&](const FunTy& f) { return add_node({Tag::FunC, {intern_ty(f.dom), intern_ty(f.cod)}, nullptr, nullptr}); },
            [&](const IdTy& i) {
              return add_node({Tag::IdC, {intern_ty(i.carrier), intern_tm(i.lhs), intern_tm(i.rhs)}, nullptr, nullptr});
            },
            [&](const ElTy& e) { return add_node({Tag::ElC, {intern_tm(e.code)}, nullptr, nullptr}); },
            // Unit, Prop, Pi are leaves (Pi binds).
            [&](const auto&) { return add_node({Tag::AtomTy, {}, nullptr, t}); },
        },
        t->node);
  }

  int find(int i) {
    while (parent_[static_cast<std::size_t>(i)] != i) {
      parent_[static_cast<std::size_t>(i)] =
          parent_[static_cast<std::size_t>(parent_[static_cast<std::size_t>(i)])];
      i = parent_[static_cast<std::size_t>(i)];
    }
    return i;
  }

  void unite(int i, int j) {
    i = find(i); j = find(j);
    if (i != j) { parent_[static_cast<std::size_t>(i)] = j; closed_ = false; }
  }

  void close() {
    if (closed_) return;
    bool changed = true;
    while (changed) {
      changed = false;
      for (std::size_t i = 0; i < nodes_.size(); ++i) {
        for (std::size_t j = i + 1; j < nodes_.size(); ++j) {
          const Node& a = nodes_[i];
          const Node& b = nodes_[j];
          if (a.tag != b.tag || a.kids.size() != b.kids.size() || a.kids.empty()) continue;
          if (find(static_cast<int>(i)) == find(static_cast<int>(j))) continue;
          bool congruent = true;
          for (std::size_t k = 0; k < a.kids.size(); ++k)
            if (find(a.kids[k]) != find(b.kids[k])) { congruent = false; break; }
          if (congruent) {
            unite(static_cast<int>(i), static_cast<int>(j));
            changed = true;
          }
        }
      }
    }
    closed_ = true;
  }
};

/// Ground equations added on top of the reflected hypotheses; both sides must
/// be normal forms in the ambient context.
using ExtraEqs = std::vector<std::pair<TermPtr, TermPtr>>;

/// Partition generated by the Id-typed entries of ctx: for every entry of
/// head Id(A,a,b), nf(a) and nf(b) land in one class.
inline EqClassMap reflect_hypotheses(const Ctx& ctx, const ExtraEqs& extra = {}) {
  EqClassMap cc;
  std::size_t n = ctx.size();
  for (std::size_t k = 0; k < n; ++k) {
    TypePtr in_scope = shift(ctx.entries[k], static_cast<int>(n - k), 0);
    NfTy nf = normalize_ty(ctx, in_scope);
    if (const auto* id = std::get_if<IdTy>(&nf.type->node)) cc.add_equation(id->lhs, id->rhs);
  }
  for (const auto& [a, b] : extra) cc.add_equation(a, b);
  return cc;
}

// ---------------------------------------------------------------------------
// Conversion

namespace detail {

bool conv_nf_tm(const TermPtr& a, const TermPtr& b, int depth, EqClassMap& cc);
bool conv_nf_ty(const TypePtr& a, const TypePtr& b, int depth, EqClassMap& cc);

// Equations live at the ambient context; a subterm under `depth` binders can
// consult them only if it does not mention the bound variables.
inline bool cc_says_tm(const TermPtr& a, const TermPtr& b, int depth, EqClassMap& cc) {
  if (mentions_below(a, depth) || mentions_below(b, depth)) return false;
  return cc.equal_tm(shift(a, -depth, 0), shift(b, -depth, 0));
}

inline bool cc_says_ty(const TypePtr& a, const TypePtr& b, int depth, EqClassMap& cc) {
  if (mentions_below(a, depth) || mentions_below(b, depth)) return false;
  return cc.equal_ty(shift(a, -depth, 0), shift(b, -depth, 0));
}

inline bool conv_nf_tm(const TermPtr& a, const TermPtr& b, int depth, EqClassMap& cc) {
  if (equal(a, b)) return true;
  if (cc_says_tm(a, b, depth, cc)) return true;
  if (a->node.index() != b->node.index()) return false;
  return std::visit(
      overloaded{
          [&](const Pair& x) {
            const auto& y = std::get<Pair>(b->node);
            return conv_nf_tm(x.fst, y.fst, depth, cc) && conv_nf_tm(x.snd, y.snd, depth, cc);
          },
          [&](const Proj1& x) { return conv_nf_tm(x.arg, std::get<Proj1>(b->node).arg, depth, cc); },
          [&](const Proj2& x) { return conv_nf_tm(x.arg, std::get<Proj2>(b->node).arg, depth, cc); },
          [&](const Inl& x) { return conv_nf_tm(x.arg, std::get<Inl>(b->node).arg, depth, cc); },
          [&](const Inr& x) { return conv_nf_tm(x.arg, std::get<Inr>(b->node).arg, depth, cc); },
          [&](const Match& x) {
            const auto& y = std::get<Match>(b->node);
            return conv_nf_tm(x.scrut, y.scrut, depth, cc) &&
                   conv_nf_ty(x.left_ty, y.left_ty, depth, cc) &&
                   conv_nf_ty(x.right_ty, y.right_ty, depth, cc) &&
                   conv_nf_ty(x.motive, y.motive, depth, cc) &&
                   conv_nf_tm(x.left, y.left, depth + 1, cc) &&
                   conv_nf_tm(x.right, y.right, depth + 1, cc);
          },
          [&](const Lam& x) { return conv_nf_tm(x.body, std::get<Lam>(b->node).body, depth + 1, cc); },
          [&](const App& x) {
            const auto& y = std::get<App>(b->node);
            return conv_nf_tm(x.fn, y.fn, depth, cc) && conv_nf_tm(x.arg, y.arg, depth, cc);
          },
          [&](const DLam& x) { return conv_nf_tm(x.body, std::get<DLam>(b->node).body, depth + 1, cc); },
          [&](const DApp& x) {
            const auto& y = std::get<DApp>(b->node);
            return conv_nf_tm(x.fn, y.fn, depth, cc) && conv_nf_tm(x.arg, y.arg, depth, cc);
          },
          [&](const Refl& x) { return conv_nf_tm(x.arg, std::get<Refl>(b->node).arg, depth, cc); },
          [&](const PropCode& x) {
            const auto& y = std::get<PropCode>(b->node);
            return conv_nf_ty(x.carrier, y.carrier, depth, cc) &&
                   conv_nf_tm(x.uniq, y.uniq, depth, cc);
          },
          [&](const auto&) { return false; },  // Var, Star, Annot: structural only
      },
      a->node);
}

inline bool conv_nf_ty(const TypePtr& a, const TypePtr& b, int depth, EqClassMap& cc) {
  if (equal(a, b)) return true;
  if (cc_says_ty(a, b, depth, cc)) return true;
  if (a->node.index() != b->node.index()) return false;
  return std::visit(
      overloaded{
          [&](const ProdTy& x) {
            const auto& y = std::get<ProdTy>(b->node);
            return conv_nf_ty(x.left, y.left, depth, cc) && conv_nf_ty(x.right, y.right, depth, cc);
          },
          [&](const CoprodTy& x) {
            const auto& y = std::get<CoprodTy>(b->node);
            return conv_nf_ty(x.left, y.left, depth, cc) && conv_nf_ty(x.right, y.right, depth, cc);
          },
          [&](const FunTy& x) {
            const auto& y = std::get<FunTy>(b->node);
            return conv_nf_ty(x.dom, y.dom, depth, cc) && conv_nf_ty(x.cod, y.cod, depth, cc);
          },
          [&](const IdTy& x) {
            const auto& y = std::get<IdTy>(b->node);
            return conv_nf_ty(x.carrier, y.carrier, depth, cc) &&
                   conv_nf_tm(x.lhs, y.lhs, depth, cc) && conv_nf_tm(x.rhs, y.rhs, depth, cc);
          },
          [&](const PiTy& x) {
            const auto& y = std::get<PiTy>(b->node);
            return conv_nf_ty(x.dom, y.dom, depth, cc) && conv_nf_ty(x.cod, y.cod, depth + 1, cc);
          },
          [&](const ElTy& x) { return conv_nf_tm(x.code, std::get<ElTy>(b->node).code, depth, cc); },
          [&](const auto&) { return false; },  // Unit, Prop: same index implies equal
      },
      a->node);
}

}  // namespace detail

/// Definitional equality of terms at type A in ctx. Presupposes both sides
/// typecheck at A. `extra` supplies further ground equations between normal
/// forms (used for the propositional-code discipline).
inline bool conv_tm(const Ctx& ctx, const TypePtr& a, const TermPtr& u, const TermPtr& v,
                    const ExtraEqs& extra = {}) {
  if (is_irrelevant(ctx, a)) return true;
  NfTm nu = normalize_tm(ctx, a, u);
  NfTm nv = normalize_tm(ctx, a, v);
  if (equal(nu.term, nv.term)) return true;
  EqClassMap cc = reflect_hypotheses(ctx, extra);
  if (cc.empty()) return false;
  return detail::conv_nf_tm(nu.term, nv.term, 0, cc);
}

/// Definitional equality of well-formed types in ctx.
inline bool conv_ty(const Ctx& ctx, const TypePtr& a, const TypePtr& b,
                    const ExtraEqs& extra = {}) {
  NfTy na = normalize_ty(ctx, a);
  NfTy nb = normalize_ty(ctx, b);
  if (equal(na.type, nb.type)) return true;
  EqClassMap cc = reflect_hypotheses(ctx, extra);
  if (cc.empty()) return false;
  return detail::conv_nf_ty(na.type, nb.type, 0, cc);
}

}  // namespace cbt
