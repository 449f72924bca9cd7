#pragma once

// Reference implementation of substitution using named variables and
// capture-avoiding renaming. Deliberately independent of the index-based
// calculus in cbt/syntax.hpp: terms are converted to a named representation,
// substituted there the textbook way, and converted back. Used only by tests
// to cross-check shift/apply/compose.

#include <map>
#include <memory>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "cbt/syntax.hpp"

namespace cbt::testing {

struct NTm;
struct NTy;
using NTmPtr = std::shared_ptr<const NTm>;
using NTyPtr = std::shared_ptr<const NTy>;

struct NVar { std::string name; };
struct NStar {};
struct NPair { NTmPtr fst, snd; };
struct NProj1 { NTmPtr arg; };
struct NProj2 { NTmPtr arg; };
struct NInl { NTmPtr arg; };
struct NInr { NTmPtr arg; };
struct NMatch {
  NTmPtr scrut;
  NTyPtr left_ty, right_ty, motive;
  std::string lname; NTmPtr left;
  std::string rname; NTmPtr right;
};
struct NLam { std::string name; NTmPtr body; };
struct NApp { NTmPtr fn, arg; };
struct NDLam { std::string name; NTmPtr body; };
struct NDApp { NTmPtr fn, arg; };
struct NRefl { NTmPtr arg; };
struct NPropCode { NTyPtr carrier; NTmPtr uniq; };
struct NAnnot { NTmPtr tm; NTyPtr ty; };

struct NTm {
  std::variant<NVar, NStar, NPair, NProj1, NProj2, NInl, NInr, NMatch, NLam,
               NApp, NDLam, NDApp, NRefl, NPropCode, NAnnot>
      node;
};

struct NUnit {};
struct NProd { NTyPtr left, right; };
struct NCoprod { NTyPtr left, right; };
struct NFun { NTyPtr dom, cod; };
struct NId { NTyPtr carrier; NTmPtr lhs, rhs; };
struct NPi { std::string name; NTyPtr dom, cod; };
struct NProp {};
struct NEl { NTmPtr code; };

struct NTy {
  std::variant<NUnit, NProd, NCoprod, NFun, NId, NPi, NProp, NEl> node;
};

inline NTmPtr nmk(NTm t) { return std::make_shared<const NTm>(std::move(t)); }
inline NTyPtr nmk(NTy t) { return std::make_shared<const NTy>(std::move(t)); }

// --- de Bruijn -> named -----------------------------------------------------
// `scope` lists the names of the variables in context, oldest first, so
// Var i resolves to scope[scope.size()-1-i].

NTmPtr to_named(const TermPtr& t, const std::vector<std::string>& scope);
NTyPtr to_named(const TypePtr& t, const std::vector<std::string>& scope);

inline std::string scope_name(const std::vector<std::string>& scope, int i) {
  if (i < 0 || static_cast<std::size_t>(i) >= scope.size())
    throw scope_error("named oracle: index out of scope");
  return scope[scope.size() - 1 - static_cast<std::size_t>(i)];
}

inline std::vector<std::string> pushed(std::vector<std::string> scope, std::string n) {
  scope.push_back(std::move(n));
  return scope;
}

// Binder names are generated from a global counter so they never clash with
// the scope names handed in by the test (which use a different prefix).
inline std::string fresh_binder() {
  static int counter = 0;
  return "b$" + std::to_string(counter++);
}

inline NTmPtr to_named(const TermPtr& t, const std::vector<std::string>& scope) {
  return std::visit(
      overloaded{
          [&](const Var& v) -> NTmPtr { return nmk(NTm{NVar{scope_name(scope, v.index)}}); },
          [&](const Star&) -> NTmPtr { return nmk(NTm{NStar{}}); },
          [&](const Pair& p) -> NTmPtr {
            return nmk(NTm{NPair{to_named(p.fst, scope), to_named(p.snd, scope)}});
          },
          [&](const Proj1& p) -> NTmPtr { return nmk(NTm{NProj1{to_named(p.arg, scope)}}); },
          [&](const Proj2& p) -> NTmPtr { return nmk(NTm{NProj2{to_named(p.arg, scope)}}); },
          [&](const Inl& i) -> NTmPtr { return nmk(NTm{NInl{to_named(i.arg, scope)}}); },
          [&](const Inr& i) -> NTmPtr { return nmk(NTm{NInr{to_named(i.arg, scope)}}); },
          [&](const Match& m) -> NTmPtr {
            std::string ln = fresh_binder(), rn = fresh_binder();
            return nmk(NTm{NMatch{to_named(m.scrut, scope), to_named(m.left_ty, scope),
                                  to_named(m.right_ty, scope), to_named(m.motive, scope), ln,
                                  to_named(m.left, pushed(scope, ln)), rn,
                                  to_named(m.right, pushed(scope, rn))}});
          },
          [&](const Lam& l) -> NTmPtr {
            std::string n = fresh_binder();
            return nmk(NTm{NLam{n, to_named(l.body, pushed(scope, n))}});
          },
          [&](const App& a) -> NTmPtr {
            return nmk(NTm{NApp{to_named(a.fn, scope), to_named(a.arg, scope)}});
          },
          [&](const DLam& l) -> NTmPtr {
            std::string n = fresh_binder();
            return nmk(NTm{NDLam{n, to_named(l.body, pushed(scope, n))}});
          },
          [&](const DApp& a) -> NTmPtr {
            return nmk(NTm{NDApp{to_named(a.fn, scope), to_named(a.arg, scope)}});
          },
          [&](const Refl& r) -> NTmPtr { return nmk(NTm{NRefl{to_named(r.arg, scope)}}); },
          [&](const PropCode& c) -> NTmPtr {
            return nmk(NTm{NPropCode{to_named(c.carrier, scope), to_named(c.uniq, scope)}});
          },
          [&](const Annot& a) -> NTmPtr {
            return nmk(NTm{NAnnot{to_named(a.tm, scope), to_named(a.ty, scope)}});
          },
      },
      t->node);
}

inline NTyPtr to_named(const TypePtr& t, const std::vector<std::string>& scope) {
  return std::visit(
      overloaded{
          [&](const UnitTy&) -> NTyPtr { return nmk(NTy{NUnit{}}); },
          [&](const ProdTy& p) -> NTyPtr {
            return nmk(NTy{NProd{to_named(p.left, scope), to_named(p.right, scope)}});
          },
          [&](const CoprodTy& c) -> NTyPtr {
            return nmk(NTy{NCoprod{to_named(c.left, scope), to_named(c.right, scope)}});
          },
          [&](const FunTy& f) -> NTyPtr {
            return nmk(NTy{NFun{to_named(f.dom, scope), to_named(f.cod, scope)}});
          },
          [&](const IdTy& i) -> NTyPtr {
            return nmk(NTy{NId{to_named(i.carrier, scope), to_named(i.lhs, scope),
                               to_named(i.rhs, scope)}});
          },
          [&](const PiTy& p) -> NTyPtr {
            std::string n = fresh_binder();
            return nmk(NTy{NPi{n, to_named(p.dom, scope), to_named(p.cod, pushed(scope, n))}});
          },
          [&](const PropTy&) -> NTyPtr { return nmk(NTy{NProp{}}); },
          [&](const ElTy& e) -> NTyPtr { return nmk(NTy{NEl{to_named(e.code, scope)}}); },
      },
      t->node);
}

// --- free variables ---------------------------------------------------------

void free_vars(const NTmPtr& t, std::set<std::string>& out);
void free_vars(const NTyPtr& t, std::set<std::string>& out);

inline void free_vars(const NTmPtr& t, std::set<std::string>& out) {
  std::visit(
      overloaded{
          [&](const NVar& v) { out.insert(v.name); },
          [&](const NStar&) {},
          [&](const NPair& p) { free_vars(p.fst, out); free_vars(p.snd, out); },
          [&](const NProj1& p) { free_vars(p.arg, out); },
          [&](const NProj2& p) { free_vars(p.arg, out); },
          [&](const NInl& i) { free_vars(i.arg, out); },
          [&](const NInr& i) { free_vars(i.arg, out); },
          [&](const NMatch& m) {
            free_vars(m.scrut, out); free_vars(m.left_ty, out);
            free_vars(m.right_ty, out); free_vars(m.motive, out);
            std::set<std::string> l, r;
            free_vars(m.left, l); l.erase(m.lname);
            free_vars(m.right, r); r.erase(m.rname);
            out.insert(l.begin(), l.end());
            out.insert(r.begin(), r.end());
          },
          [&](const NLam& l) {
            std::set<std::string> b;
            free_vars(l.body, b); b.erase(l.name);
            out.insert(b.begin(), b.end());
          },
          [&](const NApp& a) { free_vars(a.fn, out); free_vars(a.arg, out); },
          [&](const NDLam& l) {
            std::set<std::string> b;
            free_vars(l.body, b); b.erase(l.name);
            out.insert(b.begin(), b.end());
          },
          [&](const NDApp& a) { free_vars(a.fn, out); free_vars(a.arg, out); },
          [&](const NRefl& r) { free_vars(r.arg, out); },
          [&](const NPropCode& c) { free_vars(c.carrier, out); free_vars(c.uniq, out); },
          [&](const NAnnot& a) { free_vars(a.tm, out); free_vars(a.ty, out); },
      },
      t->node);
}

inline void free_vars(const NTyPtr& t, std::set<std::string>& out) {
  std::visit(
      overloaded{
          [&](const NUnit&) {},
          [&](const NProd& p) { free_vars(p.left, out); free_vars(p.right, out); },
          [&](const NCoprod& c) { free_vars(c.left, out); free_vars(c.right, out); },
          [&](const NFun& f) { free_vars(f.dom, out); free_vars(f.cod, out); },
          [&](const NId& i) { free_vars(i.carrier, out); free_vars(i.lhs, out); free_vars(i.rhs, out); },
          [&](const NPi& p) {
            free_vars(p.dom, out);
            std::set<std::string> c;
            free_vars(p.cod, c); c.erase(p.name);
            out.insert(c.begin(), c.end());
          },
          [&](const NProp&) {},
          [&](const NEl& e) { free_vars(e.code, out); },
      },
      t->node);
}

// --- capture-avoiding substitution -------------------------------------------
// Simultaneous: every name in the map is replaced at once. Binders are always
// renamed to a fresh name before descending, which sidesteps capture entirely.

using NamedSubst = std::map<std::string, NTmPtr>;

NTmPtr nsubst(const NTmPtr& t, const NamedSubst& s);
NTyPtr nsubst(const NTyPtr& t, const NamedSubst& s);

inline NamedSubst bind_fresh(const NamedSubst& s, const std::string& old_name,
                             std::string& fresh_out) {
  fresh_out = fresh_binder();
  NamedSubst s2 = s;
  s2[old_name] = nmk(NTm{NVar{fresh_out}});
  return s2;
}

inline NTmPtr nsubst(const NTmPtr& t, const NamedSubst& s) {
  return std::visit(
      overloaded{
          [&](const NVar& v) -> NTmPtr {
            auto it = s.find(v.name);
            return it == s.end() ? t : it->second;
          },
          [&](const NStar&) -> NTmPtr { return t; },
          [&](const NPair& p) -> NTmPtr {
            return nmk(NTm{NPair{nsubst(p.fst, s), nsubst(p.snd, s)}});
          },
          [&](const NProj1& p) -> NTmPtr { return nmk(NTm{NProj1{nsubst(p.arg, s)}}); },
          [&](const NProj2& p) -> NTmPtr { return nmk(NTm{NProj2{nsubst(p.arg, s)}}); },
          [&](const NInl& i) -> NTmPtr { return nmk(NTm{NInl{nsubst(i.arg, s)}}); },
          [&](const NInr& i) -> NTmPtr { return nmk(NTm{NInr{nsubst(i.arg, s)}}); },
          [&](const NMatch& m) -> NTmPtr {
            std::string ln, rn;
            NamedSubst ls = bind_fresh(s, m.lname, ln);
            NamedSubst rs = bind_fresh(s, m.rname, rn);
            return nmk(NTm{NMatch{nsubst(m.scrut, s), nsubst(m.left_ty, s),
                                  nsubst(m.right_ty, s), nsubst(m.motive, s), ln,
                                  nsubst(m.left, ls), rn, nsubst(m.right, rs)}});
          },
          [&](const NLam& l) -> NTmPtr {
            std::string n;
            NamedSubst s2 = bind_fresh(s, l.name, n);
            return nmk(NTm{NLam{n, nsubst(l.body, s2)}});
          },
          [&](const NApp& a) -> NTmPtr {
            return nmk(NTm{NApp{nsubst(a.fn, s), nsubst(a.arg, s)}});
          },
          [&](const NDLam& l) -> NTmPtr {
            std::string n;
            NamedSubst s2 = bind_fresh(s, l.name, n);
            return nmk(NTm{NDLam{n, nsubst(l.body, s2)}});
          },
          [&](const NDApp& a) -> NTmPtr {
            return nmk(NTm{NDApp{nsubst(a.fn, s), nsubst(a.arg, s)}});
          },
          [&](const NRefl& r) -> NTmPtr { return nmk(NTm{NRefl{nsubst(r.arg, s)}}); },
          [&](const NPropCode& c) -> NTmPtr {
            return nmk(NTm{NPropCode{nsubst(c.carrier, s), nsubst(c.uniq, s)}});
          },
          [&](const NAnnot& a) -> NTmPtr {
            return nmk(NTm{NAnnot{nsubst(a.tm, s), nsubst(a.ty, s)}});
          },
      },
      t->node);
}

inline NTyPtr nsubst(const NTyPtr& t, const NamedSubst& s) {
  return std::visit(
      overloaded{
          [&](const NUnit&) -> NTyPtr { return t; },
          [&](const NProd& p) -> NTyPtr {
            return nmk(NTy{NProd{nsubst(p.left, s), nsubst(p.right, s)}});
          },
          [&](const NCoprod& c) -> NTyPtr {
            return nmk(NTy{NCoprod{nsubst(c.left, s), nsubst(c.right, s)}});
          },
          [&](const NFun& f) -> NTyPtr {
            return nmk(NTy{NFun{nsubst(f.dom, s), nsubst(f.cod, s)}});
          },
          [&](const NId& i) -> NTyPtr {
            return nmk(NTy{NId{nsubst(i.carrier, s), nsubst(i.lhs, s), nsubst(i.rhs, s)}});
          },
          [&](const NPi& p) -> NTyPtr {
            std::string n;
            NamedSubst s2 = bind_fresh(s, p.name, n);
            return nmk(NTy{NPi{n, nsubst(p.dom, s), nsubst(p.cod, s2)}});
          },
          [&](const NProp&) -> NTyPtr { return t; },
          [&](const NEl& e) -> NTyPtr { return nmk(NTy{NEl{nsubst(e.code, s)}}); },
      },
      t->node);
}

// --- named -> de Bruijn -------------------------------------------------------

TermPtr from_named(const NTmPtr& t, const std::vector<std::string>& scope);
TypePtr from_named(const NTyPtr& t, const std::vector<std::string>& scope);

inline int scope_index(const std::vector<std::string>& scope, const std::string& n) {
  for (std::size_t k = 0; k < scope.size(); ++k)
    if (scope[scope.size() - 1 - k] == n) return static_cast<int>(k);
  throw scope_error("named oracle: unbound name " + n);
}

inline TermPtr from_named(const NTmPtr& t, const std::vector<std::string>& scope) {
  return std::visit(
      overloaded{
          [&](const NVar& v) -> TermPtr { return var(scope_index(scope, v.name)); },
          [&](const NStar&) -> TermPtr { return star(); },
          [&](const NPair& p) -> TermPtr {
            return pair(from_named(p.fst, scope), from_named(p.snd, scope));
          },
          [&](const NProj1& p) -> TermPtr { return proj1(from_named(p.arg, scope)); },
          [&](const NProj2& p) -> TermPtr { return proj2(from_named(p.arg, scope)); },
          [&](const NInl& i) -> TermPtr { return inl(from_named(i.arg, scope)); },
          [&](const NInr& i) -> TermPtr { return inr(from_named(i.arg, scope)); },
          [&](const NMatch& m) -> TermPtr {
            return match(from_named(m.scrut, scope), from_named(m.left_ty, scope),
                         from_named(m.right_ty, scope), from_named(m.motive, scope),
                         from_named(m.left, pushed(scope, m.lname)),
                         from_named(m.right, pushed(scope, m.rname)));
          },
          [&](const NLam& l) -> TermPtr {
            return lam(from_named(l.body, pushed(scope, l.name)));
          },
          [&](const NApp& a) -> TermPtr {
            return app(from_named(a.fn, scope), from_named(a.arg, scope));
          },
          [&](const NDLam& l) -> TermPtr {
            return dlam(from_named(l.body, pushed(scope, l.name)));
          },
          [&](const NDApp& a) -> TermPtr {
            return dapp(from_named(a.fn, scope), from_named(a.arg, scope));
          },
          [&](const NRefl& r) -> TermPtr { return refl(from_named(r.arg, scope)); },
          [&](const NPropCode& c) -> TermPtr {
            return prop_code(from_named(c.carrier, scope), from_named(c.uniq, scope));
          },
          [&](const NAnnot& a) -> TermPtr {
            return annot(from_named(a.tm, scope), from_named(a.ty, scope));
          },
      },
      t->node);
}

inline TypePtr from_named(const NTyPtr& t, const std::vector<std::string>& scope) {
  return std::visit(
      overloaded{
          [&](const NUnit&) -> TypePtr { return unit_ty(); },
          [&](const NProd& p) -> TypePtr {
            return prod_ty(from_named(p.left, scope), from_named(p.right, scope));
          },
          [&](const NCoprod& c) -> TypePtr {
            return coprod_ty(from_named(c.left, scope), from_named(c.right, scope));
          },
          [&](const NFun& f) -> TypePtr {
            return fun_ty(from_named(f.dom, scope), from_named(f.cod, scope));
          },
          [&](const NId& i) -> TypePtr {
            return id_ty(from_named(i.carrier, scope), from_named(i.lhs, scope),
                         from_named(i.rhs, scope));
          },
          [&](const NPi& p) -> TypePtr {
            return pi_ty(from_named(p.dom, scope), from_named(p.cod, pushed(scope, p.name)));
          },
          [&](const NProp&) -> TypePtr { return prop_ty(); },
          [&](const NEl& e) -> TypePtr { return el_ty(from_named(e.code, scope)); },
      },
      t->node);
}

// --- the oracle entry points --------------------------------------------------
// `src_len` free variables in u; sigma maps them to terms with `dst_len` free
// variables. Names for the two scopes use distinct prefixes.

inline std::vector<std::string> mk_scope(const std::string& prefix, std::size_t n) {
  std::vector<std::string> out;
  out.reserve(n);
  for (std::size_t k = 0; k < n; ++k) out.push_back(prefix + std::to_string(k));
  return out;
}

inline TermPtr oracle_apply_tm(const TermPtr& u, const SubstObj& sigma, std::size_t dst_len) {
  std::vector<std::string> src = mk_scope("s", sigma.size());
  std::vector<std::string> dst = mk_scope("d", dst_len);
  NamedSubst s;
  for (std::size_t k = 0; k < sigma.size(); ++k)
    s[src[k]] = to_named(sigma.terms[k], dst);
  return from_named(nsubst(to_named(u, src), s), dst);
}

inline TypePtr oracle_apply_ty(const TypePtr& a, const SubstObj& sigma, std::size_t dst_len) {
  std::vector<std::string> src = mk_scope("s", sigma.size());
  std::vector<std::string> dst = mk_scope("d", dst_len);
  NamedSubst s;
  for (std::size_t k = 0; k < sigma.size(); ++k)
    s[src[k]] = to_named(sigma.terms[k], dst);
  return from_named(nsubst(to_named(a, src), s), dst);
}

/// Weakening via the named route: embed n free variables into a scope of
/// n + amount variables with `amount` fresh ones inserted at position cutoff
/// (counting from the newest end).
inline TermPtr oracle_shift_tm(const TermPtr& u, int amount, int cutoff, std::size_t src_len) {
  if (amount < 0) throw internal_error("named oracle only models weakening");
  std::vector<std::string> src = mk_scope("s", src_len);
  std::vector<std::string> dst = src;
  auto at = dst.end() - cutoff;
  for (int k = 0; k < amount; ++k) at = dst.insert(at, "w" + std::to_string(k));
  return from_named(to_named(u, src), dst);
}

}  // namespace cbt::testing
