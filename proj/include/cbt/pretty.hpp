#pragma once

// Renders core syntax in the ASCII surface grammar. Output re-parses: the
// printer and the parser agree on precedence (-> right-associative and loosest,
// then +, then *, application left-associative, projections tightest).

#include <string>
#include <vector>

#include "cbt/syntax.hpp"

namespace cbt {

namespace detail {

// Precedence levels: 0 binder bodies and arrows, 1 application / sums,
// 2 projections / products, 3 atoms.
std::string pp_tm(const TermPtr& t, std::vector<std::string>& names, int prec);
std::string pp_ty(const TypePtr& t, std::vector<std::string>& names, int prec);

inline std::string paren_if(bool b, std::string s) {
  return b ? "(" + std::move(s) + ")" : std::move(s);
}

inline std::string fresh_name(const std::vector<std::string>& names) {
  for (std::size_t k = names.size();; ++k) {
    std::string cand = "x" + std::to_string(k);
    bool taken = false;
    for (const auto& n : names)
      if (n == cand) { taken = true; break; }
    if (!taken) return cand;
  }
}

inline std::string var_name(const std::vector<std::string>& names, int i) {
  if (i < 0 || static_cast<std::size_t>(i) >= names.size())
    return "?v" + std::to_string(i);
  return names[names.size() - 1 - static_cast<std::size_t>(i)];
}

struct PushName {
  std::vector<std::string>& names;
  explicit PushName(std::vector<std::string>& ns, std::string n) : names(ns) {
    names.push_back(std::move(n));
  }
  ~PushName() { names.pop_back(); }
};

inline std::string pp_tm(const TermPtr& t, std::vector<std::string>& names, int prec) {
  return std::visit(
      overloaded{
          [&](const Var& v) { return var_name(names, v.index); },
          [&](const Star&) { return std::string("star"); },
          [&](const Pair& p) {
            return "pair(" + pp_tm(p.fst, names, 0) + ", " + pp_tm(p.snd, names, 0) + ")";
          },
          [&](const Proj1& p) { return pp_tm(p.arg, names, 2) + ".1"; },
          [&](const Proj2& p) { return pp_tm(p.arg, names, 2) + ".2"; },
          [&](const Inl& i) {
            return paren_if(prec > 1, "inl " + pp_tm(i.arg, names, 2));
          },
          [&](const Inr& i) {
            return paren_if(prec > 1, "inr " + pp_tm(i.arg, names, 2));
          },
          [&](const Match& m) {
            std::string scrut = pp_tm(m.scrut, names, 1);
            std::string motive = pp_ty(m.motive, names, 0);
            std::string ln = fresh_name(names);
            std::string lbody;
            {
              PushName push(names, ln);
              lbody = pp_tm(m.left, names, 0);
            }
            std::string rn = fresh_name(names);
            std::string rbody;
            {
              PushName push(names, rn);
              rbody = pp_tm(m.right, names, 0);
            }
            return paren_if(prec > 0, "match " + scrut + " as " + motive + " { " + ln +
                                          " => " + lbody + " ; " + rn + " => " + rbody + " }");
          },
          [&](const Lam& l) {
            std::string n = fresh_name(names);
            PushName push(names, n);
            return paren_if(prec > 0, "fun " + n + " => " + pp_tm(l.body, names, 0));
          },
          [&](const App& a) {
            return paren_if(prec > 1,
                            pp_tm(a.fn, names, 1) + " " + pp_tm(a.arg, names, 2));
          },
          [&](const DLam& l) {
            std::string n = fresh_name(names);
            PushName push(names, n);
            return paren_if(prec > 0, "dfun " + n + " => " + pp_tm(l.body, names, 0));
          },
          [&](const DApp& a) {
            return paren_if(prec > 1,
                            pp_tm(a.fn, names, 1) + " " + pp_tm(a.arg, names, 2));
          },
          [&](const Refl& r) {
            return paren_if(prec > 1, "refl " + pp_tm(r.arg, names, 2));
          },
          [&](const PropCode& c) {
            return "R(" + pp_ty(c.carrier, names, 0) + ", " + pp_tm(c.uniq, names, 0) + ")";
          },
          [&](const Annot& a) {
            return "(" + pp_tm(a.tm, names, 0) + " : " + pp_ty(a.ty, names, 0) + ")";
          },
      },
      t->node);
}

inline std::string pp_ty(const TypePtr& t, std::vector<std::string>& names, int prec) {
  return std::visit(
      overloaded{
          [&](const UnitTy&) { return std::string("Unit"); },
          [&](const ProdTy& p) {
            return paren_if(prec > 2,
                            pp_ty(p.left, names, 2) + " * " + pp_ty(p.right, names, 3));
          },
          [&](const CoprodTy& c) {
            return paren_if(prec > 1,
                            pp_ty(c.left, names, 1) + " + " + pp_ty(c.right, names, 2));
          },
          [&](const FunTy& f) {
            return paren_if(prec > 0,
                            pp_ty(f.dom, names, 1) + " -> " + pp_ty(f.cod, names, 0));
          },
          [&](const IdTy& i) {
            return paren_if(prec > 2, "Id " + pp_ty(i.carrier, names, 3) + " " +
                                          pp_tm(i.lhs, names, 3) + " " + pp_tm(i.rhs, names, 3));
          },
          [&](const PiTy& p) {
            std::string dom = pp_ty(p.dom, names, 0);
            std::string n = fresh_name(names);
            PushName push(names, n);
            return paren_if(prec > 0,
                            "Pi (" + n + " : " + dom + ") " + pp_ty(p.cod, names, 0));
          },
          [&](const PropTy&) { return std::string("Prop"); },
          [&](const ElTy& e) {
            return paren_if(prec > 2, "El " + pp_tm(e.code, names, 3));
          },
      },
      t->node);
}

}  // namespace detail

/// Surface rendering of a term; `names` lists the context's binder names,
/// oldest first. Missing names render as ?v<index>.
inline std::string pretty_tm(const TermPtr& t, std::vector<std::string> names = {}) {
  return detail::pp_tm(t, names, 0);
}

inline std::string pretty_ty(const TypePtr& t, std::vector<std::string> names = {}) {
  return detail::pp_ty(t, names, 0);
}

}  // namespace cbt
