#pragma once

// Core nameless syntax: types, terms, telescopic contexts and explicit
// substitution objects, plus the shift/apply/compose calculus acting on them.
//
// Binding is de Bruijn: Var 0 is the newest variable in scope. Contexts and
// substitution objects store their entries oldest-first, so entry k of a
// context of length n is referred to by Var (n-1-k).

#include <cstddef>
#include <memory>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace cbt {

template <class... Fs> struct overloaded : Fs... { using Fs::operator()...; };
template <class... Fs> overloaded(Fs...) -> overloaded<Fs...>;

/// Raised when an index escapes the scope it was promised to live in.
struct scope_error : std::runtime_error {
  explicit scope_error(const std::string& what) : std::runtime_error(what) {}
};

/// Raised when an internal invariant is violated (never on user input that
/// merely fails to typecheck).
struct internal_error : std::logic_error {
  explicit internal_error(const std::string& what) : std::logic_error(what) {}
};

struct Term;
struct Type;
using TermPtr = std::shared_ptr<const Term>;
using TypePtr = std::shared_ptr<const Type>;

// ---------------------------------------------------------------------------
// Term constructors

struct Var { int index = 0; };
struct Star {};
struct Pair { TermPtr fst, snd; };
struct Proj1 { TermPtr arg; };
struct Proj2 { TermPtr arg; };
struct Inl { TermPtr arg; };
struct Inr { TermPtr arg; };
// match carries the scrutinee's coproduct components and the motive, so the
// branch contexts are recoverable without re-inference. Each branch binds one
// variable; the motive does not depend on it.
struct Match {
  TermPtr scrut;
  TypePtr left_ty, right_ty, motive;
  TermPtr left, right;  // scoped under left_ty / right_ty respectively
};
struct Lam { TermPtr body; };            // non-dependent, unannotated
struct App { TermPtr fn, arg; };
struct DLam { TermPtr body; };           // dependent
struct DApp { TermPtr fn, arg; };
struct Refl { TermPtr arg; };
struct PropCode { TypePtr carrier; TermPtr uniq; };  // R(A, p)
// Type ascription inserted by elaboration; transparent to evaluation and to
// the set model, used by the checker to switch from checking to inference.
struct Annot { TermPtr tm; TypePtr ty; };

struct Term {
  std::variant<Var, Star, Pair, Proj1, Proj2, Inl, Inr, Match, Lam, App, DLam,
               DApp, Refl, PropCode, Annot>
      node;
};

// ---------------------------------------------------------------------------
// Type constructors

struct UnitTy {};
struct ProdTy { TypePtr left, right; };
struct CoprodTy { TypePtr left, right; };
struct FunTy { TypePtr dom, cod; };      // non-dependent
struct IdTy { TypePtr carrier; TermPtr lhs, rhs; };
struct PiTy { TypePtr dom, cod; };       // cod scoped under one binder
struct PropTy {};
struct ElTy { TermPtr code; };

struct Type {
  std::variant<UnitTy, ProdTy, CoprodTy, FunTy, IdTy, PiTy, PropTy, ElTy> node;
};

// Factory helpers. All syntax is immutable and freely shared.
inline TermPtr mk(Term t) { return std::make_shared<const Term>(std::move(t)); }
inline TypePtr mk(Type t) { return std::make_shared<const Type>(std::move(t)); }

inline TermPtr var(int i) { return mk(Term{Var{i}}); }
inline TermPtr star() { return mk(Term{Star{}}); }
inline TermPtr pair(TermPtr a, TermPtr b) { return mk(Term{Pair{std::move(a), std::move(b)}}); }
inline TermPtr proj1(TermPtr p) { return mk(Term{Proj1{std::move(p)}}); }
inline TermPtr proj2(TermPtr p) { return mk(Term{Proj2{std::move(p)}}); }
inline TermPtr inl(TermPtr u) { return mk(Term{Inl{std::move(u)}}); }
inline TermPtr inr(TermPtr u) { return mk(Term{Inr{std::move(u)}}); }
inline TermPtr match(TermPtr t, TypePtr a, TypePtr b, TypePtr motive, TermPtr l,
                     TermPtr r) {
  return mk(Term{Match{std::move(t), std::move(a), std::move(b),
                       std::move(motive), std::move(l), std::move(r)}});
}
inline TermPtr lam(TermPtr body) { return mk(Term{Lam{std::move(body)}}); }
inline TermPtr app(TermPtr f, TermPtr x) { return mk(Term{App{std::move(f), std::move(x)}}); }
inline TermPtr dlam(TermPtr body) { return mk(Term{DLam{std::move(body)}}); }
inline TermPtr dapp(TermPtr f, TermPtr x) { return mk(Term{DApp{std::move(f), std::move(x)}}); }
inline TermPtr refl(TermPtr a) { return mk(Term{Refl{std::move(a)}}); }
inline TermPtr prop_code(TypePtr a, TermPtr p) { return mk(Term{PropCode{std::move(a), std::move(p)}}); }
inline TermPtr annot(TermPtr e, TypePtr t) { return mk(Term{Annot{std::move(e), std::move(t)}}); }

inline TypePtr unit_ty() { return mk(Type{UnitTy{}}); }
inline TypePtr prod_ty(TypePtr a, TypePtr b) { return mk(Type{ProdTy{std::move(a), std::move(b)}}); }
inline TypePtr coprod_ty(TypePtr a, TypePtr b) { return mk(Type{CoprodTy{std::move(a), std::move(b)}}); }
inline TypePtr fun_ty(TypePtr a, TypePtr b) { return mk(Type{FunTy{std::move(a), std::move(b)}}); }
inline TypePtr id_ty(TypePtr a, TermPtr l, TermPtr r) {
  return mk(Type{IdTy{std::move(a), std::move(l), std::move(r)}});
}
inline TypePtr pi_ty(TypePtr dom, TypePtr cod) { return mk(Type{PiTy{std::move(dom), std::move(cod)}}); }
inline TypePtr prop_ty() { return mk(Type{PropTy{}}); }
inline TypePtr el_ty(TermPtr code) { return mk(Type{ElTy{std::move(code)}}); }

// ---------------------------------------------------------------------------
// Contexts and substitution objects

/// A telescope: entry k is a type formed in the prefix of length k.
struct Ctx {
  std::vector<TypePtr> entries;  // oldest first

  Ctx() = default;
  explicit Ctx(std::vector<TypePtr> es) : entries(std::move(es)) {}

  std::size_t size() const { return entries.size(); }
  bool empty() const { return entries.empty(); }

  /// New context with `a` appended as the newest entry.
  Ctx extended(TypePtr a) const {
    Ctx out = *this;
    out.entries.push_back(std::move(a));
    return out;
  }

  /// Prefix of length n.
  Ctx prefix(std::size_t n) const {
    if (n > entries.size()) throw scope_error("context prefix out of range");
    return Ctx{std::vector<TypePtr>(entries.begin(), entries.begin() + static_cast<long>(n))};
  }
};

/// A list of terms instantiating a target telescope, oldest entry first.
/// Its length always equals the target context's length.
struct SubstObj {
  std::vector<TermPtr> terms;  // oldest first

  SubstObj() = default;
  explicit SubstObj(std::vector<TermPtr> ts) : terms(std::move(ts)) {}

  std::size_t size() const { return terms.size(); }

  /// Term substituted for Var i (the i-th newest target entry).
  const TermPtr& for_index(int i) const {
    if (i < 0 || static_cast<std::size_t>(i) >= terms.size())
      throw scope_error("variable index " + std::to_string(i) +
                        " out of range for substitution of length " +
                        std::to_string(terms.size()));
    return terms[terms.size() - 1 - static_cast<std::size_t>(i)];
  }
};

// ---------------------------------------------------------------------------
// Shifting

TermPtr shift(const TermPtr& t, int amount, int cutoff);
TypePtr shift(const TypePtr& t, int amount, int cutoff);

namespace detail {
inline int shift_index(int i, int amount, int cutoff) {
  if (i < cutoff) return i;
  int j = i + amount;
  if (j < cutoff) throw scope_error("negative shift underflows index " + std::to_string(i));
  return j;
}
}  // namespace detail

/// Adds `amount` to every free index >= cutoff. Negative amounts are allowed
/// and fail with scope_error if a free index would cross the cutoff.
inline TermPtr shift(const TermPtr& t, int amount, int cutoff) {
  if (amount == 0) return t;
  return std::visit(
      overloaded{
          [&](const Var& v) -> TermPtr { return var(detail::shift_index(v.index, amount, cutoff)); },
          [&](const Star&) -> TermPtr { return t; },
          [&](const Pair& p) -> TermPtr {
            return pair(shift(p.fst, amount, cutoff), shift(p.snd, amount, cutoff));
          },
          [&](const Proj1& p) -> TermPtr { return proj1(shift(p.arg, amount, cutoff)); },
          [&](const Proj2& p) -> TermPtr { return proj2(shift(p.arg, amount, cutoff)); },
          [&](const Inl& u) -> TermPtr { return inl(shift(u.arg, amount, cutoff)); },
          [&](const Inr& u) -> TermPtr { return inr(shift(u.arg, amount, cutoff)); },
          [&](const Match& m) -> TermPtr {
            return match(shift(m.scrut, amount, cutoff), shift(m.left_ty, amount, cutoff),
                         shift(m.right_ty, amount, cutoff), shift(m.motive, amount, cutoff),
                         shift(m.left, amount, cutoff + 1), shift(m.right, amount, cutoff + 1));
          },
          [&](const Lam& l) -> TermPtr { return lam(shift(l.body, amount, cutoff + 1)); },
          [&](const App& a) -> TermPtr {
            return app(shift(a.fn, amount, cutoff), shift(a.arg, amount, cutoff));
          },
          [&](const DLam& l) -> TermPtr { return dlam(shift(l.body, amount, cutoff + 1)); },
          [&](const DApp& a) -> TermPtr {
            return dapp(shift(a.fn, amount, cutoff), shift(a.arg, amount, cutoff));
          },
          [&](const Refl& r) -> TermPtr { return refl(shift(r.arg, amount, cutoff)); },
          [&](const PropCode& c) -> TermPtr {
            return prop_code(shift(c.carrier, amount, cutoff), shift(c.uniq, amount, cutoff));
          },
          [&](const Annot& a) -> TermPtr {
            return annot(shift(a.tm, amount, cutoff), shift(a.ty, amount, cutoff));
          },
      },
      t->node);
}

inline TypePtr shift(const TypePtr& t, int amount, int cutoff) {
  if (amount == 0) return t;
  return std::visit(
      overloaded{
          [&](const UnitTy&) -> TypePtr { return t; },
          [&](const ProdTy& p) -> TypePtr {
            return prod_ty(shift(p.left, amount, cutoff), shift(p.right, amount, cutoff));
          },
          [&](const CoprodTy& c) -> TypePtr {
            return coprod_ty(shift(c.left, amount, cutoff), shift(c.right, amount, cutoff));
          },
          [&](const FunTy& f) -> TypePtr {
            return fun_ty(shift(f.dom, amount, cutoff), shift(f.cod, amount, cutoff));
          },
          [&](const IdTy& i) -> TypePtr {
            return id_ty(shift(i.carrier, amount, cutoff), shift(i.lhs, amount, cutoff),
                         shift(i.rhs, amount, cutoff));
          },
          [&](const PiTy& p) -> TypePtr {
            return pi_ty(shift(p.dom, amount, cutoff), shift(p.cod, amount, cutoff + 1));
          },
          [&](const PropTy&) -> TypePtr { return t; },
          [&](const ElTy& e) -> TypePtr { return el_ty(shift(e.code, amount, cutoff)); },
      },
      t->node);
}

// ---------------------------------------------------------------------------
// Simultaneous substitution

TermPtr apply_tm(const TermPtr& u, const SubstObj& sigma);
TypePtr apply_ty(const TypePtr& a, const SubstObj& sigma);

/// sigma lifted under one binder: all entries weakened, Var 0 appended for
/// the bound variable.
inline SubstObj lift(const SubstObj& sigma) {
  SubstObj out;
  out.terms.reserve(sigma.terms.size() + 1);
  for (const auto& t : sigma.terms) out.terms.push_back(shift(t, 1, 0));
  out.terms.push_back(var(0));
  return out;
}

inline TermPtr apply_tm(const TermPtr& u, const SubstObj& sigma) {
  return std::visit(
      overloaded{
          [&](const Var& v) -> TermPtr { return sigma.for_index(v.index); },
          [&](const Star&) -> TermPtr { return u; },
          [&](const Pair& p) -> TermPtr {
            return pair(apply_tm(p.fst, sigma), apply_tm(p.snd, sigma));
          },
          [&](const Proj1& p) -> TermPtr { return proj1(apply_tm(p.arg, sigma)); },
          [&](const Proj2& p) -> TermPtr { return proj2(apply_tm(p.arg, sigma)); },
          [&](const Inl& i) -> TermPtr { return inl(apply_tm(i.arg, sigma)); },
          [&](const Inr& i) -> TermPtr { return inr(apply_tm(i.arg, sigma)); },
          [&](const Match& m) -> TermPtr {
            SubstObj under = lift(sigma);
            return match(apply_tm(m.scrut, sigma), apply_ty(m.left_ty, sigma),
                         apply_ty(m.right_ty, sigma), apply_ty(m.motive, sigma),
                         apply_tm(m.left, under), apply_tm(m.right, under));
          },
          [&](const Lam& l) -> TermPtr { return lam(apply_tm(l.body, lift(sigma))); },
          [&](const App& a) -> TermPtr {
            return app(apply_tm(a.fn, sigma), apply_tm(a.arg, sigma));
          },
          [&](const DLam& l) -> TermPtr { return dlam(apply_tm(l.body, lift(sigma))); },
          [&](const DApp& a) -> TermPtr {
            return dapp(apply_tm(a.fn, sigma), apply_tm(a.arg, sigma));
          },
          [&](const Refl& r) -> TermPtr { return refl(apply_tm(r.arg, sigma)); },
          [&](const PropCode& c) -> TermPtr {
            return prop_code(apply_ty(c.carrier, sigma), apply_tm(c.uniq, sigma));
          },
          [&](const Annot& a) -> TermPtr {
            return annot(apply_tm(a.tm, sigma), apply_ty(a.ty, sigma));
          },
      },
      u->node);
}

inline TypePtr apply_ty(const TypePtr& a, const SubstObj& sigma) {
  return std::visit(
      overloaded{
          [&](const UnitTy&) -> TypePtr { return a; },
          [&](const ProdTy& p) -> TypePtr {
            return prod_ty(apply_ty(p.left, sigma), apply_ty(p.right, sigma));
          },
          [&](const CoprodTy& c) -> TypePtr {
            return coprod_ty(apply_ty(c.left, sigma), apply_ty(c.right, sigma));
          },
          [&](const FunTy& f) -> TypePtr {
            return fun_ty(apply_ty(f.dom, sigma), apply_ty(f.cod, sigma));
          },
          [&](const IdTy& i) -> TypePtr {
            return id_ty(apply_ty(i.carrier, sigma), apply_tm(i.lhs, sigma),
                         apply_tm(i.rhs, sigma));
          },
          [&](const PiTy& p) -> TypePtr {
            return pi_ty(apply_ty(p.dom, sigma), apply_ty(p.cod, lift(sigma)));
          },
          [&](const PropTy&) -> TypePtr { return a; },
          [&](const ElTy& e) -> TypePtr { return el_ty(apply_tm(e.code, sigma)); },
      },
      a->node);
}

/// Identity substitution for a context of length n: [Var n-1, ..., Var 0].
inline SubstObj id_subst(std::size_t n) {
  SubstObj out;
  out.terms.reserve(n);
  for (std::size_t k = 0; k < n; ++k) out.terms.push_back(var(static_cast<int>(n - 1 - k)));
  return out;
}

/// sigma extended with `a` instantiating the newest target entry.
inline SubstObj extend(const SubstObj& sigma, TermPtr a) {
  SubstObj out = sigma;
  out.terms.push_back(std::move(a));
  return out;
}

/// Composition: apply sigma to every entry of gamma. Satisfies
/// apply_ty(apply_ty(A, gamma), sigma) == apply_ty(A, compose(gamma, sigma)).
inline SubstObj compose(const SubstObj& gamma, const SubstObj& sigma) {
  SubstObj out;
  out.terms.reserve(gamma.terms.size());
  for (const auto& t : gamma.terms) out.terms.push_back(apply_tm(t, sigma));
  return out;
}

/// Substitutes `a` for Var 0, leaving the ambient n free variables alone.
inline SubstObj subst1(std::size_t ambient, TermPtr a) {
  return extend(id_subst(ambient), std::move(a));
}

// ---------------------------------------------------------------------------
// Structural equality (alpha-equality, since the syntax is nameless)

bool equal(const TermPtr& a, const TermPtr& b);
bool equal(const TypePtr& a, const TypePtr& b);

inline bool equal(const TermPtr& a, const TermPtr& b) {
  if (a.get() == b.get()) return true;
  if (a->node.index() != b->node.index()) return false;
  return std::visit(
      overloaded{
          [&](const Var& x) { return x.index == std::get<Var>(b->node).index; },
          [&](const Star&) { return true; },
          [&](const Pair& x) {
            const auto& y = std::get<Pair>(b->node);
            return equal(x.fst, y.fst) && equal(x.snd, y.snd);
          },
          [&](const Proj1& x) { return equal(x.arg, std::get<Proj1>(b->node).arg); },
          [&](const Proj2& x) { return equal(x.arg, std::get<Proj2>(b->node).arg); },
          [&](const Inl& x) { return equal(x.arg, std::get<Inl>(b->node).arg); },
          [&](const Inr& x) { return equal(x.arg, std::get<Inr>(b->node).arg); },
          [&](const Match& x) {
            const auto& y = std::get<Match>(b->node);
            return equal(x.scrut, y.scrut) && equal(x.left_ty, y.left_ty) &&
                   equal(x.right_ty, y.right_ty) && equal(x.motive, y.motive) &&
                   equal(x.left, y.left) && equal(x.right, y.right);
          },
          [&](const Lam& x) { return equal(x.body, std::get<Lam>(b->node).body); },
          [&](const App& x) {
            const auto& y = std::get<App>(b->node);
            return equal(x.fn, y.fn) && equal(x.arg, y.arg);
          },
          [&](const DLam& x) { return equal(x.body, std::get<DLam>(b->node).body); },
          [&](const DApp& x) {
            const auto& y = std::get<DApp>(b->node);
            return equal(x.fn, y.fn) && equal(x.arg, y.arg);
          },
          [&](const Refl& x) { return equal(x.arg, std::get<Refl>(b->node).arg); },
          [&](const PropCode& x) {
            const auto& y = std::get<PropCode>(b->node);
            return equal(x.carrier, y.carrier) && equal(x.uniq, y.uniq);
          },
          [&](const Annot& x) {
            const auto& y = std::get<Annot>(b->node);
            return equal(x.tm, y.tm) && equal(x.ty, y.ty);
          },
      },
      a->node);
}

inline bool equal(const TypePtr& a, const TypePtr& b) {
  if (a.get() == b.get()) return true;
  if (a->node.index() != b->node.index()) return false;
  return std::visit(
      overloaded{
          [&](const UnitTy&) { return true; },
          [&](const ProdTy& x) {
            const auto& y = std::get<ProdTy>(b->node);
            return equal(x.left, y.left) && equal(x.right, y.right);
          },
          [&](const CoprodTy& x) {
            const auto& y = std::get<CoprodTy>(b->node);
            return equal(x.left, y.left) && equal(x.right, y.right);
          },
          [&](const FunTy& x) {
            const auto& y = std::get<FunTy>(b->node);
            return equal(x.dom, y.dom) && equal(x.cod, y.cod);
          },
          [&](const IdTy& x) {
            const auto& y = std::get<IdTy>(b->node);
            return equal(x.carrier, y.carrier) && equal(x.lhs, y.lhs) && equal(x.rhs, y.rhs);
          },
          [&](const PiTy& x) {
            const auto& y = std::get<PiTy>(b->node);
            return equal(x.dom, y.dom) && equal(x.cod, y.cod);
          },
          [&](const PropTy&) { return true; },
          [&](const ElTy& x) { return equal(x.code, std::get<ElTy>(b->node).code); },
      },
      a->node);
}

inline bool equal(const SubstObj& a, const SubstObj& b) {
  if (a.terms.size() != b.terms.size()) return false;
  for (std::size_t k = 0; k < a.terms.size(); ++k)
    if (!equal(a.terms[k], b.terms[k])) return false;
  return true;
}

inline bool equal(const Ctx& a, const Ctx& b) {
  if (a.entries.size() != b.entries.size()) return false;
  for (std::size_t k = 0; k < a.entries.size(); ++k)
    if (!equal(a.entries[k], b.entries[k])) return false;
  return true;
}

// ---------------------------------------------------------------------------
// Scope queries

namespace detail {
bool mentions_in(const TermPtr& t, int lo, int hi);
bool mentions_in(const TypePtr& t, int lo, int hi);

/// True iff some variable with lo <= index < hi occurs.
inline bool mentions_in(const TermPtr& t, int lo, int hi) {
  return std::visit(
      overloaded{
          [&](const Var& v) { return lo <= v.index && v.index < hi; },
          [&](const Star&) { return false; },
          [&](const Pair& p) { return mentions_in(p.fst, lo, hi) || mentions_in(p.snd, lo, hi); },
          [&](const Proj1& p) { return mentions_in(p.arg, lo, hi); },
          [&](const Proj2& p) { return mentions_in(p.arg, lo, hi); },
          [&](const Inl& i) { return mentions_in(i.arg, lo, hi); },
          [&](const Inr& i) { return mentions_in(i.arg, lo, hi); },
          [&](const Match& m) {
            return mentions_in(m.scrut, lo, hi) || mentions_in(m.left_ty, lo, hi) ||
                   mentions_in(m.right_ty, lo, hi) || mentions_in(m.motive, lo, hi) ||
                   mentions_in(m.left, lo + 1, hi + 1) || mentions_in(m.right, lo + 1, hi + 1);
          },
          [&](const Lam& l) { return mentions_in(l.body, lo + 1, hi + 1); },
          [&](const App& a) { return mentions_in(a.fn, lo, hi) || mentions_in(a.arg, lo, hi); },
          [&](const DLam& l) { return mentions_in(l.body, lo + 1, hi + 1); },
          [&](const DApp& a) { return mentions_in(a.fn, lo, hi) || mentions_in(a.arg, lo, hi); },
          [&](const Refl& r) { return mentions_in(r.arg, lo, hi); },
          [&](const PropCode& c) {
            return mentions_in(c.carrier, lo, hi) || mentions_in(c.uniq, lo, hi);
          },
          [&](const Annot& a) { return mentions_in(a.tm, lo, hi) || mentions_in(a.ty, lo, hi); },
      },
      t->node);
}

inline bool mentions_in(const TypePtr& t, int lo, int hi) {
  return std::visit(
      overloaded{
          [&](const UnitTy&) { return false; },
          [&](const ProdTy& p) { return mentions_in(p.left, lo, hi) || mentions_in(p.right, lo, hi); },
          [&](const CoprodTy& c) { return mentions_in(c.left, lo, hi) || mentions_in(c.right, lo, hi); },
          [&](const FunTy& f) { return mentions_in(f.dom, lo, hi) || mentions_in(f.cod, lo, hi); },
          [&](const IdTy& i) {
            return mentions_in(i.carrier, lo, hi) || mentions_in(i.lhs, lo, hi) ||
                   mentions_in(i.rhs, lo, hi);
          },
          [&](const PiTy& p) { return mentions_in(p.dom, lo, hi) || mentions_in(p.cod, lo + 1, hi + 1); },
          [&](const PropTy&) { return false; },
          [&](const ElTy& e) { return mentions_in(e.code, lo, hi); },
      },
      t->node);
}
}  // namespace detail

/// True iff some free variable of t has index < cutoff.
inline bool mentions_below(const TermPtr& t, int cutoff) {
  return detail::mentions_in(t, 0, cutoff);
}
inline bool mentions_below(const TypePtr& t, int cutoff) {
  return detail::mentions_in(t, 0, cutoff);
}

/// Type assigned to Var i in ctx: the entry shifted past everything newer.
inline TypePtr lookup_var(const Ctx& ctx, int i) {
  if (i < 0 || static_cast<std::size_t>(i) >= ctx.size())
    throw scope_error("variable index " + std::to_string(i) +
                      " out of range in context of length " + std::to_string(ctx.size()));
  const TypePtr& entry = ctx.entries[ctx.size() - 1 - static_cast<std::size_t>(i)];
  return shift(entry, i + 1, 0);
}

}  // namespace cbt
