#pragma once

// Surface-to-core elaboration: resolves names to indices, expands the sugar
// forms (Bool, true, false, if, Trunc, squash, truncElim, IdP, Void) into
// their definitions, and turns declarations into kernel obligations. The
// elaborator tracks types only as far as syntax selection needs (application
// flavor, match scrutinee components, squash carriers); the kernel re-derives
// everything afterwards.

#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "cbt/check.hpp"
#include "cbt/equality.hpp"
#include "cbt/lex.hpp"
#include "cbt/parse.hpp"
#include "cbt/prelude.hpp"
#include "cbt/pretty.hpp"
#include "cbt/syntax.hpp"

namespace cbt {

struct ElabError {
  Diagnostic diag;
};

class Elaborator {
 public:
  struct Mark {
    std::size_t scope;
    std::size_t globals;
  };

  const Ctx& ctx() const { return ctx_; }
  const std::vector<std::string>& names() const { return names_; }

  Mark mark() const { return {names_.size(), globals_.size()}; }

  void rollback(const Mark& m) {
    names_.resize(m.scope);
    ctx_.entries.resize(m.scope);
    globals_.resize(m.globals);
  }

  bool known(const std::string& name) const {
    for (const auto& n : names_)
      if (n == name) return true;
    for (const auto& g : globals_)
      if (g.name == name) return true;
    return false;
  }

  /// Brings an assumption into scope (caller has validated the type).
  void declare_assume(const std::string& name, TypePtr ty) {
    names_.push_back(name);
    ctx_.entries.push_back(std::move(ty));
  }

  /// Registers a definition; later references inline it at the right depth.
  void declare_def(const std::string& name, TermPtr tm, TypePtr ty) {
    globals_.push_back({name, std::move(tm), std::move(ty), names_.size()});
  }

  TypePtr elab_type(const STyPtr& s) {
    return std::visit(
        overloaded{
            [&](const SUnit&) { return unit_ty(); },
            [&](const SProp&) { return prop_ty(); },
            [&](const SBool&) { return bool_ty(); },
            [&](const SVoid&) { return void_ty(); },
            [&](const SProd& p) { return prod_ty(elab_type(p.left), elab_type(p.right)); },
            [&](const SCoprod& c) {
              return coprod_ty(elab_type(c.left), elab_type(c.right));
            },
            [&](const SArrow& f) { return fun_ty(elab_type(f.dom), elab_type(f.cod)); },
            [&](const SId& i) {
              TypePtr carrier = elab_type(i.carrier);
              return id_ty(carrier, elab_check(i.lhs, carrier),
                           elab_check(i.rhs, carrier));
            },
            [&](const SPi& p) {
              TypePtr dom = elab_type(p.dom);
              Binder bind(*this, p.name, dom);
              return pi_ty(dom, elab_type(p.cod));
            },
            [&](const SEl& e) { return el_ty(elab_check(e.code, prop_ty())); },
            [&](const STrunc& t) { return trunc_ty(elab_type(t.carrier)); },
        },
        s->node);
  }

  std::pair<TermPtr, TypePtr> elab_infer(const STmPtr& s) {
    return std::visit(
        overloaded{
            [&](const SName& n) -> Inferred { return resolve(n.name, s->span); },
            [&](const SStar&) -> Inferred { return {star(), unit_ty()}; },
            [&](const STrue&) -> Inferred { return {true_tm(), bool_ty()}; },
            [&](const SFalse&) -> Inferred { return {false_tm(), bool_ty()}; },
            [&](const SApp& a) -> Inferred {
              auto [fn, fn_ty] = elab_infer(a.fn);
              TypePtr nf = nf_ty(fn_ty, s->span);
              if (const auto* f = std::get_if<FunTy>(&nf->node)) {
                TermPtr arg = elab_check(a.arg, f->dom);
                return {app(fn, arg), f->cod};
              }
              if (const auto* p = std::get_if<PiTy>(&nf->node)) {
                TermPtr arg = elab_check(a.arg, p->dom);
                return {dapp(fn, arg), apply_ty(p->cod, subst1(ctx_.size(), arg))};
              }
              throw ElabError{{Severity::Error,
                               "applied term is not a function",
                               a.fn->span,
                               std::nullopt,
                               pretty_ty(nf, names_)}};
            },
            [&](const SProj1& p) -> Inferred {
              auto [arg, prod] = infer_prod(p.arg);
              return {proj1(arg), prod.left};
            },
            [&](const SProj2& p) -> Inferred {
              auto [arg, prod] = infer_prod(p.arg);
              return {proj2(arg), prod.right};
            },
            [&](const SRefl& r) -> Inferred {
              auto [arg, ty] = elab_infer(r.arg);
              return {refl(arg), id_ty(ty, arg, arg)};
            },
            [&](const SCode& c) -> Inferred {
              TypePtr carrier = elab_type(c.carrier);
              return {prop_code(carrier, elab_check(c.uniq, uniq_ty(carrier))),
                      prop_ty()};
            },
            [&](const SIdP& i) -> Inferred {
              TypePtr carrier = elab_type(i.carrier);
              return {id_prop(carrier, elab_check(i.lhs, carrier),
                              elab_check(i.rhs, carrier)),
                      prop_ty()};
            },
            [&](const SSquash& q) -> Inferred {
              auto [arg, ty] = elab_infer(q.arg);
              return {squash(arg, ty), trunc_ty(ty)};
            },
            [&](const STruncElim& te) -> Inferred {
              auto [tr, tr_ty] = elab_infer(te.tr);
              TypePtr carrier = truncated_carrier(tr_ty, te.tr->span);
              TermPtr code = elab_check(te.code, prop_ty());
              TermPtr fn = elab_check(te.fn, fun_ty(carrier, el_ty(code)));
              return {trunc_elim(tr, code, fn), el_ty(code)};
            },
            [&](const SIf& i) -> Inferred {
              TypePtr motive = elab_type(i.motive);
              TermPtr cond = elab_check(i.cond, bool_ty());
              TermPtr t = elab_check(i.then_tm, motive);
              TermPtr e = elab_check(i.else_tm, motive);
              return {ite(cond, t, e, motive), motive};
            },
            [&](const SMatch& m) -> Inferred { return elab_match(m); },
            [&](const SAnnot& an) -> Inferred {
              TypePtr ty = elab_type(an.ty);
              return {annot(elab_check(an.tm, ty), ty), ty};
            },
            [&](const auto&) -> Inferred {
              throw ElabError{{Severity::Error,
                               "cannot infer the type of this term; add an annotation",
                               s->span}};
            },
        },
        s->node);
  }

  TermPtr elab_check(const STmPtr& s, const TypePtr& expected) {
    return std::visit(
        overloaded{
            [&](const SFun& f) -> TermPtr {
              const FunTy* fe = peel<FunTy>(expected, s->span, "a function literal");
              Binder bind(*this, f.name, fe->dom);
              return lam(elab_check(f.body, shift(fe->cod, 1, 0)));
            },
            [&](const SDFun& f) -> TermPtr {
              const PiTy* pe = peel<PiTy>(expected, s->span, "a dependent function literal");
              Binder bind(*this, f.name, pe->dom);
              return dlam(elab_check(f.body, pe->cod));
            },
            [&](const SPair& p) -> TermPtr {
              const ProdTy* pe = peel<ProdTy>(expected, s->span, "a pair literal");
              return pair(elab_check(p.fst, pe->left), elab_check(p.snd, pe->right));
            },
            [&](const SInl& i) -> TermPtr {
              const CoprodTy* ce = peel<CoprodTy>(expected, s->span, "an injection");
              return inl(elab_check(i.arg, ce->left));
            },
            [&](const SInr& i) -> TermPtr {
              const CoprodTy* ce = peel<CoprodTy>(expected, s->span, "an injection");
              return inr(elab_check(i.arg, ce->right));
            },
            [&](const SApp& a) -> TermPtr {
              // a literal lambda head cannot synthesize; type the argument
              // instead and push the expectation inward
              if (std::holds_alternative<SFun>(a.fn->node)) {
                auto [arg, arg_ty] = elab_infer(a.arg);
                TermPtr fn = elab_check(a.fn, fun_ty(arg_ty, expected));
                return app(fn, arg);
              }
              if (std::holds_alternative<SDFun>(a.fn->node)) {
                auto [arg, arg_ty] = elab_infer(a.arg);
                TermPtr fn = elab_check(a.fn, pi_ty(arg_ty, shift(expected, 1, 0)));
                return dapp(fn, arg);
              }
              return elab_infer(s).first;
            },
            [&](const auto&) -> TermPtr { return elab_infer(s).first; },
        },
        s->node);
  }

 private:
  struct Global {
    std::string name;
    TermPtr tm;  // annotated, so references stay synthesizable
    TypePtr ty;
    std::size_t depth;  // scope size when defined
  };

  using Inferred = std::pair<TermPtr, TypePtr>;

  Ctx ctx_;
  std::vector<std::string> names_;
  std::vector<Global> globals_;

  struct Binder {
    Elaborator& el;
    Binder(Elaborator& e, const std::string& name, TypePtr ty) : el(e) {
      el.names_.push_back(name);
      el.ctx_.entries.push_back(std::move(ty));
    }
    ~Binder() {
      el.names_.pop_back();
      el.ctx_.entries.pop_back();
    }
  };

  Inferred resolve(const std::string& name, Span sp) {
    for (std::size_t k = 0; k < names_.size(); ++k) {
      std::size_t idx = names_.size() - 1 - k;
      if (names_[idx] == name) {
        int i = static_cast<int>(k);
        return {var(i), lookup_var(ctx_, i)};
      }
    }
    for (auto it = globals_.rbegin(); it != globals_.rend(); ++it) {
      if (it->name == name) {
        // the stored term is already annotated, so its type stays synthesizable
        int by = static_cast<int>(names_.size() - it->depth);
        return {shift(it->tm, by, 0), shift(it->ty, by, 0)};
      }
    }
    throw ElabError{{Severity::Error, "unbound name '" + name + "'", sp}};
  }

  /// Normalizes far enough to expose a type head; evaluation failures on
  /// ill-formed input surface as diagnostics rather than crashes.
  TypePtr nf_ty(const TypePtr& a, Span sp) {
    try {
      return normalize_ty(ctx_, a).type;
    } catch (const std::runtime_error& e) {
      throw ElabError{{Severity::Error,
                       std::string("type is not well-formed here: ") + e.what(), sp}};
    }
  }

  template <typename Head>
  const Head* peel(const TypePtr& expected, Span sp, const char* what) {
    if (const auto* h = std::get_if<Head>(&expected->node)) return h;
    nf_cache_ = nf_ty(expected, sp);
    if (const auto* h = std::get_if<Head>(&nf_cache_->node)) return h;
    throw ElabError{{Severity::Error,
                     std::string(what) + " does not fit the expected type",
                     sp,
                     pretty_ty(nf_cache_, names_),
                     std::nullopt}};
  }

  Inferred elab_match(const SMatch& m) {
    auto [scrut, scrut_ty] = elab_infer(m.scrut);
    TypePtr nf = nf_ty(scrut_ty, m.scrut->span);
    const auto* co = std::get_if<CoprodTy>(&nf->node);
    if (!co)
      throw ElabError{{Severity::Error,
                       "match scrutinee must have a sum type",
                       m.scrut->span,
                       std::nullopt,
                       pretty_ty(nf, names_)}};
    TypePtr motive = elab_type(m.motive);
    TypePtr branch_ty = shift(motive, 1, 0);
    TermPtr left, right;
    {
      Binder bind(*this, m.left_name, co->left);
      left = elab_check(m.left, branch_ty);
    }
    {
      Binder bind(*this, m.right_name, co->right);
      right = elab_check(m.right, branch_ty);
    }
    return {match(scrut, co->left, co->right, motive, left, right), motive};
  }

  std::pair<TermPtr, ProdTy> infer_prod(const STmPtr& s) {
    auto [arg, ty] = elab_infer(s);
    TypePtr nf = nf_ty(ty, s->span);
    if (const auto* p = std::get_if<ProdTy>(&nf->node)) return {arg, *p};
    throw ElabError{{Severity::Error,
                     "projection target is not a pair",
                     s->span,
                     std::nullopt,
                     pretty_ty(nf, names_)}};
  }

  /// Digs the carrier A out of a normalized truncation type
  /// Pi (P : Prop) (A -> El P) -> El P.
  TypePtr truncated_carrier(const TypePtr& a, Span sp) {
    TypePtr nf = nf_ty(a, sp);
    const auto* pi = std::get_if<PiTy>(&nf->node);
    if (pi && std::holds_alternative<PropTy>(pi->dom->node)) {
      if (const auto* outer = std::get_if<FunTy>(&pi->cod->node)) {
        if (const auto* inner = std::get_if<FunTy>(&outer->dom->node)) {
          if (!mentions_below(inner->dom, 1)) return shift(inner->dom, -1, 0);
        }
      }
    }
    throw ElabError{{Severity::Error,
                     "truncElim target must have a truncation type",
                     sp,
                     std::nullopt,
                     pretty_ty(nf, names_)}};
  }

  TypePtr nf_cache_;  // keeps peel's normal form alive for the returned pointer
};

// ---------------------------------------------------------------------------
// Whole-module elaboration

struct Obligation {
  enum class Kind { Def, Eq, Assume };
  Kind kind = Kind::Def;
  std::string name;
  Judgment judgment;
  TermPtr core_tm;  // defs: the lambda-chain; eqs: the left side
  TypePtr core_ty;  // defs/eqs: the declared type
  std::vector<std::string> scope_names;  // for pretty-printing in diagnostics
  Span name_span;
};

/// Turns a parsed module into kernel obligations, threading definitions and
/// assumptions through scope. The first elaboration error is returned as a
/// Diagnostic.
inline std::variant<std::vector<Obligation>, Diagnostic> elaborate(
    const ModuleFile& mod, Elaborator& el) {
  std::vector<Obligation> out;
  try {
    for (const auto& d : mod.decls) {
      std::visit(
          overloaded{
              [&](const DefDecl& def) {
                if (el.known(def.name))
                  throw ElabError{{Severity::Error,
                                   "duplicate definition of '" + def.name + "'",
                                   def.name_span}};
                auto mark = el.mark();
                std::vector<TypePtr> doms;
                for (const auto& p : def.params) {
                  TypePtr dom = el.elab_type(p.ty);
                  doms.push_back(dom);
                  el.declare_assume(p.name, dom);
                }
                TypePtr ret = el.elab_type(def.ty);
                TermPtr body = el.elab_check(def.body, ret);
                el.rollback(mark);
                TermPtr tm = body;
                TypePtr ty = ret;
                for (std::size_t k = doms.size(); k-- > 0;) {
                  tm = dlam(tm);
                  ty = pi_ty(doms[k], ty);
                }
                Obligation ob;
                ob.kind = Obligation::Kind::Def;
                ob.name = def.name;
                ob.judgment = TmHas{el.ctx(), tm, ty};
                ob.core_tm = tm;
                ob.core_ty = ty;
                ob.scope_names = el.names();
                ob.name_span = def.name_span;
                out.push_back(std::move(ob));
                el.declare_def(def.name, annot(tm, ty), ty);
              },
              [&](const EqDecl& eq) {
                if (el.known(eq.name))
                  throw ElabError{{Severity::Error,
                                   "duplicate definition of '" + eq.name + "'",
                                   eq.name_span}};
                TypePtr ty = el.elab_type(eq.ty);
                TermPtr lhs = el.elab_check(eq.lhs, ty);
                TermPtr rhs = el.elab_check(eq.rhs, ty);
                Obligation ob;
                ob.kind = Obligation::Kind::Eq;
                ob.name = eq.name;
                ob.judgment = TmEq{el.ctx(), lhs, rhs, ty};
                ob.core_tm = lhs;
                ob.core_ty = ty;
                ob.scope_names = el.names();
                ob.name_span = eq.name_span;
                out.push_back(std::move(ob));
              },
              [&](const AssumeDecl& as) {
                if (el.known(as.name))
                  throw ElabError{{Severity::Error,
                                   "duplicate definition of '" + as.name + "'",
                                   as.name_span}};
                TypePtr ty = el.elab_type(as.ty);
                Obligation ob;
                ob.kind = Obligation::Kind::Assume;
                ob.name = as.name;
                ob.judgment = TyWf{el.ctx(), ty};
                ob.core_ty = ty;
                ob.scope_names = el.names();
                ob.name_span = as.name_span;
                out.push_back(std::move(ob));
                el.declare_assume(as.name, ty);
              },
          },
          d);
    }
  } catch (const ElabError& e) {
    return e.diag;
  }
  return out;
}

}  // namespace cbt
