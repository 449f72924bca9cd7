#pragma once

// Derived vocabulary on top of the kernel: booleans, branching, propositional
// truncation, the empty type, uniqueness of identity proofs, and
// proposition-valued identity. Everything here is a definition; the rules
// these forms usually come with are re-verified as theorems by the
// derived-rule harness below, so the kernel itself stays minimal.

#include <functional>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "cbt/check.hpp"
#include "cbt/pretty.hpp"
#include "cbt/setmodel.hpp"
#include "cbt/syntax.hpp"

namespace cbt {

// ---------------------------------------------------------------------------
// Builders

inline TypePtr bool_ty() { return coprod_ty(unit_ty(), unit_ty()); }

// The annotations keep both constants synthesizable; they normalize away.
inline TermPtr true_tm() { return annot(inl(star()), bool_ty()); }
inline TermPtr false_tm() { return annot(inr(star()), bool_ty()); }

/// if t then u else v, at result type a. The branches ignore the unit value
/// the match binds, hence the weakening.
inline TermPtr ite(TermPtr t, const TermPtr& u, const TermPtr& v, TypePtr a) {
  return match(std::move(t), unit_ty(), unit_ty(), std::move(a), shift(u, 1, 0),
               shift(v, 1, 0));
}

inline TypePtr void_ty() { return pi_ty(prop_ty(), el_ty(var(0))); }

/// Truncation of a: for every code P, (a -> El P) -> El P.
inline TypePtr trunc_ty(const TypePtr& a) {
  return pi_ty(prop_ty(), fun_ty(fun_ty(shift(a, 1, 0), el_ty(var(0))), el_ty(var(0))));
}

/// The canonical element of a truncation, before annotation. The same term
/// works at every carrier type.
inline TermPtr squash_body(const TermPtr& u) {
  return dlam(lam(app(var(0), shift(u, 2, 0))));
}

/// Annotated squash; the annotation makes the term's type synthesizable.
inline TermPtr squash(const TermPtr& u, const TypePtr& a) {
  return annot(squash_body(u), trunc_ty(a));
}

inline TermPtr trunc_elim(TermPtr u, TermPtr code, TermPtr f) {
  return app(dapp(std::move(u), std::move(code)), std::move(f));
}

/// Any two proofs of an identity are identified; the body is type-independent
/// (checking leans on reflection of the proof hypothesis in scope).
inline TermPtr uip_tm() { return dlam(dlam(dlam(dlam(refl(refl(var(3))))))); }

/// forall x y : a, forall p q : Id a x y, Id (Id a x y) p q.
inline TypePtr uip_ty(const TypePtr& a) {
  return pi_ty(
      a, pi_ty(shift(a, 1, 0),
               pi_ty(id_ty(shift(a, 2, 0), var(1), var(0)),
                     pi_ty(id_ty(shift(a, 3, 0), var(2), var(1)),
                           id_ty(id_ty(shift(a, 4, 0), var(3), var(2)), var(1), var(0))))));
}

/// Identity as a proposition code: the carrier is Id a lhs rhs and the
/// required subsingleton witness is an instance of uip.
inline TermPtr id_prop(const TypePtr& a, const TermPtr& lhs, const TermPtr& rhs) {
  return prop_code(id_ty(a, lhs, rhs),
                   dapp(dapp(annot(uip_tm(), uip_ty(a)), lhs), rhs));
}

/// The canonically true code, carried by the unit type.
inline TermPtr truth_prop() { return prop_code(unit_ty(), dlam(dlam(refl(star())))); }

// ---------------------------------------------------------------------------
// Checked definitions

struct PreludeDef {
  std::string name;
  Ctx params;  // telescope the body lives in
  std::variant<TermPtr, TypePtr> body;
  TypePtr ty;  // declared type; null when the body is itself a type
};

/// Closed instantiation menu used wherever a definition is schematic in a
/// carrier type; each element is exhaustively enumerable in the set model.
inline std::vector<std::pair<std::string, TypePtr>> type_menu() {
  return {
      {"Unit", unit_ty()},
      {"Bool", bool_ty()},
      {"Prop", prop_ty()},
      {"Void", void_ty()},
      {"IdUnit", id_ty(unit_ty(), star(), star())},
  };
}

/// A closed inhabitant of a menu type, when one exists.
inline std::optional<TermPtr> sample_tm(const TypePtr& a) {
  if (std::holds_alternative<UnitTy>(a->node)) return star();
  if (equal(a, bool_ty())) return true_tm();
  if (std::holds_alternative<PropTy>(a->node)) return truth_prop();
  if (std::holds_alternative<IdTy>(a->node))
    return refl(std::get<IdTy>(a->node).lhs);
  return std::nullopt;
}

/// All prelude definitions, re-checked from scratch on every call; a failing
/// definition aborts the load naming the culprit.
inline std::vector<PreludeDef> load_prelude() {
  std::vector<PreludeDef> defs;
  defs.push_back({"Bool", Ctx{}, bool_ty(), nullptr});
  defs.push_back({"true", Ctx{}, true_tm(), bool_ty()});
  defs.push_back({"false", Ctx{}, false_tm(), bool_ty()});
  defs.push_back({"Void", Ctx{}, void_ty(), nullptr});
  defs.push_back({"TruthProp", Ctx{}, truth_prop(), prop_ty()});
  for (const auto& [tag, a] : type_menu()) {
    defs.push_back({"Trunc[" + tag + "]", Ctx{}, trunc_ty(a), nullptr});
    defs.push_back({"uip[" + tag + "]", Ctx{}, uip_tm(), uip_ty(a)});
    defs.push_back({"ite[" + tag + "]", Ctx{{bool_ty(), a, shift(a, 1, 0)}},
                    ite(var(2), var(1), var(0), shift(a, 2, 0)), shift(a, 2, 0)});
    defs.push_back(
        {"squash[" + tag + "]", Ctx{{a}}, squash(var(0), shift(a, 1, 0)),
         trunc_ty(shift(a, 1, 0))});
    defs.push_back({"truncElim[" + tag + "]",
                    Ctx{{trunc_ty(a), prop_ty(), fun_ty(shift(a, 2, 0), el_ty(var(0)))}},
                    trunc_elim(var(2), var(1), var(0)), el_ty(var(1))});
    defs.push_back({"IdP[" + tag + "]", Ctx{{a, shift(a, 1, 0)}},
                    id_prop(shift(a, 2, 0), var(1), var(0)), prop_ty()});
  }
  Checker ck;
  for (const auto& d : defs) {
    try {
      if (const auto* tm = std::get_if<TermPtr>(&d.body)) {
        ck.check_tm(d.params, *tm, d.ty);
      } else {
        ck.check_ty(d.params, std::get<TypePtr>(d.body));
      }
    } catch (const TypeError& e) {
      throw std::runtime_error("prelude definition '" + d.name +
                               "' failed to check: " + e.what());
    }
  }
  return defs;
}

// ---------------------------------------------------------------------------
// Derived-rule harness

struct RuleInstance {
  std::string label;
  std::vector<Judgment> premises;
  Judgment conclusion;
};

struct DerivedRule {
  std::string name;
  std::vector<RuleInstance> instances;
};

inline bool judgment_accepted(Checker& ck, const Judgment& j) {
  try {
    std::visit(overloaded{
                   [&](const CtxWf& x) { ck.check_ctx(x.ctx); },
                   [&](const TyWf& x) { ck.check_ty(x.ctx, x.ty); },
                   [&](const TmHas& x) { ck.check_tm(x.ctx, x.tm, x.ty); },
                   [&](const TmEq& x) { ck.check_eq_tm(x.ctx, x.lhs, x.rhs, x.ty); },
                   [&](const SubstHas& x) { ck.check_subst(x.ctx, x.subst, x.target); },
               },
               j);
  } catch (const TypeError&) {
    return false;
  }
  return true;
}

/// True iff, in every instance, premises-accepted implies conclusion-accepted.
/// The first failing instance label is reported through `first_failure`.
inline bool verify_derived_rule(const DerivedRule& r, std::string* first_failure = nullptr) {
  Checker ck;
  for (const auto& inst : r.instances) {
    bool premises_ok = true;
    for (const auto& p : inst.premises)
      if (!judgment_accepted(ck, p)) {
        premises_ok = false;
        break;
      }
    if (!premises_ok) continue;
    if (!judgment_accepted(ck, inst.conclusion)) {
      if (first_failure) *first_failure = r.name + "/" + inst.label;
      return false;
    }
  }
  return true;
}

/// The rule blocks the derived forms are expected to satisfy, instantiated
/// over the closed type menu.
inline std::vector<DerivedRule> standard_derived_rules() {
  std::vector<DerivedRule> rules;

  rules.push_back({"bool-formation", {{"closed", {}, TyWf{Ctx{}, bool_ty()}}}});
  rules.push_back({"bool-introduction",
                   {{"true", {}, TmHas{Ctx{}, true_tm(), bool_ty()}},
                    {"false", {}, TmHas{Ctx{}, false_tm(), bool_ty()}}}});

  DerivedRule branch{"bool-branching", {}};
  DerivedRule if_true{"if-true-computation", {}};
  DerivedRule if_false{"if-false-computation", {}};
  for (const auto& [tag, a] : type_menu()) {
    Ctx g{{bool_ty()}};
    TypePtr aw = shift(a, 1, 0);
    auto u = sample_tm(a);
    TermPtr uu = u ? shift(*u, 1, 0) : star();  // a deliberate misfit when no sample exists
    branch.instances.push_back(
        {tag,
         {TmHas{g, var(0), bool_ty()}, TmHas{g, uu, aw}, TmHas{g, uu, aw}},
         TmHas{g, ite(var(0), uu, uu, aw), aw}});
    if (!u) continue;
    TermPtr uv = *u;
    if (!equal(a, unit_ty())) {
      // a second, distinct closed sample where the type allows one
      TermPtr w = equal(a, bool_ty()) ? false_tm()
                  : std::holds_alternative<PropTy>(a->node)
                      ? id_prop(unit_ty(), star(), star())
                      : uv;
      if_true.instances.push_back({tag,
                                   {TmHas{Ctx{}, uv, a}, TmHas{Ctx{}, w, a}},
                                   TmEq{Ctx{}, ite(true_tm(), uv, w, a), uv, a}});
      if_false.instances.push_back({tag,
                                    {TmHas{Ctx{}, uv, a}, TmHas{Ctx{}, w, a}},
                                    TmEq{Ctx{}, ite(false_tm(), uv, w, a), w, a}});
    } else {
      if_true.instances.push_back({tag,
                                   {TmHas{Ctx{}, uv, a}},
                                   TmEq{Ctx{}, ite(true_tm(), uv, uv, a), uv, a}});
      if_false.instances.push_back({tag,
                                    {TmHas{Ctx{}, uv, a}},
                                    TmEq{Ctx{}, ite(false_tm(), uv, uv, a), uv, a}});
    }
  }
  rules.push_back(std::move(branch));
  rules.push_back(std::move(if_true));
  rules.push_back(std::move(if_false));

  DerivedRule tform{"trunc-formation", {}};
  DerivedRule tintro{"trunc-introduction", {}};
  DerivedRule telim{"trunc-elimination", {}};
  DerivedRule tbeta{"trunc-computation", {}};
  for (const auto& [tag, a] : type_menu()) {
    tform.instances.push_back({tag, {TyWf{Ctx{}, a}}, TyWf{Ctx{}, trunc_ty(a)}});
    Ctx g{{a}};
    tintro.instances.push_back({tag,
                                {TmHas{g, var(0), shift(a, 1, 0)}},
                                TmHas{g, squash(var(0), shift(a, 1, 0)),
                                      trunc_ty(shift(a, 1, 0))}});
    Ctx ge{{trunc_ty(a), prop_ty(), fun_ty(shift(a, 2, 0), el_ty(var(0)))}};
    telim.instances.push_back(
        {tag,
         {TmHas{ge, var(2), trunc_ty(shift(a, 3, 0))}, TmHas{ge, var(1), prop_ty()},
          TmHas{ge, var(0), fun_ty(shift(a, 3, 0), el_ty(var(1)))}},
         TmHas{ge, trunc_elim(var(2), var(1), var(0)), el_ty(var(1))}});
    Ctx gb{{a, prop_ty(), fun_ty(shift(a, 2, 0), el_ty(var(0)))}};
    tbeta.instances.push_back(
        {tag,
         {TmHas{gb, var(2), shift(a, 3, 0)}},
         TmEq{gb, trunc_elim(squash(var(2), shift(a, 3, 0)), var(1), var(0)),
              app(var(0), var(2)), el_ty(var(1))}});
  }
  rules.push_back(std::move(tform));
  rules.push_back(std::move(tintro));
  rules.push_back(std::move(telim));
  rules.push_back(std::move(tbeta));

  DerivedRule uip_rule{"identity-proof-uniqueness", {}};
  for (const auto& [tag, a] : type_menu())
    uip_rule.instances.push_back({tag, {TyWf{Ctx{}, a}}, TmHas{Ctx{}, uip_tm(), uip_ty(a)}});
  rules.push_back(std::move(uip_rule));

  DerivedRule idp{"idprop-formation", {}};
  for (const auto& [tag, a] : type_menu()) {
    Ctx g{{a, shift(a, 1, 0)}};
    idp.instances.push_back(
        {tag,
         {TmHas{g, var(1), shift(a, 2, 0)}, TmHas{g, var(0), shift(a, 2, 0)}},
         TmHas{g, id_prop(shift(a, 2, 0), var(1), var(0)), prop_ty()}});
  }
  rules.push_back(std::move(idp));

  return rules;
}

// ---------------------------------------------------------------------------
// False-branch discrepancy report

struct DiscrepancyCase {
  std::string label;
  bool equal_to_first_branch = false;
  bool equal_to_second_branch = false;
};

struct DiscrepancyReport {
  std::vector<DiscrepancyCase> cases;
  bool first_branch_law_holds = true;   // "if false then u else v = u" everywhere
  bool second_branch_law_holds = true;  // "if false then u else v = v" everywhere
  std::string note;
};

/// Evaluates "if false then u else v" in the finite-set model against both
/// candidate computation laws and reports which one survives.
inline DiscrepancyReport false_branch_discrepancy_report() {
  struct Inst {
    std::string label;
    TermPtr u, v;
    TypePtr a;
  };
  std::vector<Inst> insts = {
      {"u := inl(star), v := inr(star) at Bool", true_tm(), false_tm(), bool_ty()},
      {"u := star, v := star at Unit", star(), star(), unit_ty()},
      {"u := true, v := false at Bool", true_tm(), false_tm(), bool_ty()},
  };
  DiscrepancyReport rep;
  for (const auto& inst : insts) {
    SetModel m;
    TermPtr scrutinized = ite(false_tm(), inst.u, inst.v, inst.a);
    DiscrepancyCase c;
    c.label = inst.label;
    c.equal_to_first_branch = m.sem_eq_tm(Ctx{}, scrutinized, inst.u, inst.a);
    c.equal_to_second_branch = m.sem_eq_tm(Ctx{}, scrutinized, inst.v, inst.a);
    rep.first_branch_law_holds &= c.equal_to_first_branch;
    rep.second_branch_law_holds &= c.equal_to_second_branch;
    rep.cases.push_back(std::move(c));
  }
  std::ostringstream os;
  os << "branching on false evaluates to the second branch;";
  if (!rep.first_branch_law_holds)
    os << " the variant law \"if false then u else v = u\" is refuted whenever u and v "
          "differ (it only survives degenerate instances where u = v);";
  os << " the law \"if false then u else v = v\" holds on every tested instance.";
  rep.note = os.str();
  return rep;
}

}  // namespace cbt
