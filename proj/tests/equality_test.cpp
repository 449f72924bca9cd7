#include <catch2/catch_amalgamated.hpp>

#include "cbt/equality.hpp"

using namespace cbt;

namespace {
TermPtr canonical_uniq() { return dlam(dlam(refl(star()))); }
}  // namespace

TEST_CASE("beta reduction of projections") {
  NfTm nf = normalize_tm(Ctx{}, unit_ty(), proj1(pair(star(), star())));
  CHECK(equal(nf.term, star()));
}

TEST_CASE("eta-long form at Unit forces Star bodies") {
  NfTm nf = normalize_tm(Ctx{}, fun_ty(unit_ty(), unit_ty()), lam(var(0)));
  CHECK(equal(nf.term, lam(star())));
}

TEST_CASE("stuck match at Unit motive still normalizes to Star") {
  Ctx ctx{{coprod_ty(unit_ty(), unit_ty())}};
  TermPtr m = match(var(0), unit_ty(), unit_ty(), unit_ty(), star(), star());
  NfTm nf = normalize_tm(ctx, unit_ty(), m);
  CHECK(equal(nf.term, star()));
}

TEST_CASE("match beta on injections") {
  // ctx: one Prop hypothesis; branches see it as Var 1, the branch var as Var 0
  TypePtr motive = coprod_ty(unit_ty(), prop_ty());
  Ctx ctx{{prop_ty()}};
  TermPtr branch_l = inl(star()), branch_r = inr(var(1));
  TermPtr on_l = match(inl(star()), unit_ty(), unit_ty(), motive, branch_l, branch_r);
  CHECK(equal(normalize_tm(ctx, motive, on_l).term, inl(star())));
  TermPtr on_r = match(inr(star()), unit_ty(), unit_ty(), motive, branch_l, branch_r);
  CHECK(equal(normalize_tm(ctx, motive, on_r).term, inr(var(0))));
}

TEST_CASE("function beta") {
  NfTm nf = normalize_tm(Ctx{}, coprod_ty(unit_ty(), unit_ty()),
                         app(lam(var(0)), inl(star())));
  CHECK(equal(nf.term, inl(star())));
}

TEST_CASE("dependent application beta substitutes into the motive") {
  // (dfun x => refl x) applied at a coproduct element
  TypePtr two = coprod_ty(unit_ty(), unit_ty());
  TypePtr pi = pi_ty(two, id_ty(shift(two, 1, 0), var(0), var(0)));
  TermPtr f = annot(dlam(refl(var(0))), pi);
  NfTm nf = normalize_tm(Ctx{}, id_ty(two, inr(star()), inr(star())), dapp(f, inr(star())));
  CHECK(equal(nf.term, refl(inr(star()))));
}

TEST_CASE("product eta holds definitionally") {
  TypePtr ab = prod_ty(coprod_ty(unit_ty(), unit_ty()), prop_ty());
  Ctx ctx{{ab}};
  TermPtr t = var(0);
  CHECK(conv_tm(ctx, shift(ab, 1, 0), t, pair(proj1(t), proj2(t))));
}

TEST_CASE("unit eta: every unit inhabitant converts to star") {
  Ctx ctx{{unit_ty()}};
  CHECK(conv_tm(ctx, unit_ty(), var(0), star()));
  CHECK(conv_tm(Ctx{}, unit_ty(), proj2(pair(star(), star())), star()));
}

TEST_CASE("identity proofs are canonical") {
  Ctx ctx{{id_ty(unit_ty(), star(), star())}};
  CHECK(conv_tm(ctx, id_ty(unit_ty(), star(), star()), var(0), refl(star())));
}

TEST_CASE("uip: two hypotheses of one Id type convert") {
  TypePtr two = coprod_ty(unit_ty(), unit_ty());
  TypePtr idt = id_ty(two, inl(star()), inl(star()));
  Ctx ctx{{idt, shift(idt, 1, 0)}};
  CHECK(conv_tm(ctx, shift(idt, 2, 0), var(1), var(0)));
}

TEST_CASE("El inhabitants are all equal") {
  Ctx ctx = Ctx{}.extended(prop_ty()).extended(el_ty(var(0))).extended(el_ty(var(1)));
  CHECK(conv_tm(ctx, el_ty(var(2)), var(1), var(0)));
}

TEST_CASE("reflection makes hypothesized equations definitional") {
  // x y : Prop, p : Id Prop x y
  Ctx ctx = Ctx{}.extended(prop_ty()).extended(prop_ty())
                .extended(id_ty(prop_ty(), var(1), var(0)));
  CHECK(conv_tm(ctx, prop_ty(), var(2), var(1)));
  CHECK(conv_ty(ctx, el_ty(var(2)), el_ty(var(1))));
  CHECK_FALSE(conv_ty(ctx, el_ty(var(2)), prop_ty()));
}

TEST_CASE("reflection is transitive through the partition") {
  // x y z : Prop, p : Id Prop x y, q : Id Prop y z
  Ctx ctx = Ctx{}.extended(prop_ty()).extended(prop_ty()).extended(prop_ty())
                .extended(id_ty(prop_ty(), var(2), var(1)))
                .extended(id_ty(prop_ty(), var(2), var(1)));
  CHECK(conv_tm(ctx, prop_ty(), var(4), var(2)));
}

TEST_CASE("reflection applies under binders to terms not using the bound variable") {
  Ctx ctx = Ctx{}.extended(prop_ty()).extended(prop_ty())
                .extended(id_ty(prop_ty(), var(1), var(0)));
  // fun _ : Unit => x  vs  fun _ : Unit => y
  CHECK(conv_tm(ctx, fun_ty(unit_ty(), prop_ty()), lam(var(3)), lam(var(2))));
}

TEST_CASE("no reflection without hypotheses") {
  Ctx ctx = Ctx{}.extended(prop_ty()).extended(prop_ty());
  CHECK_FALSE(conv_tm(ctx, prop_ty(), var(1), var(0)));
}

TEST_CASE("prop codes normalize their uniqueness proof away") {
  // Any well-typed uniqueness proof over Unit reads back to the same token.
  TermPtr p = prop_code(unit_ty(), dlam(dlam(refl(var(1)))));
  TermPtr q = prop_code(unit_ty(), dlam(dlam(refl(star()))));
  CHECK(equal(normalize_tm(Ctx{}, prop_ty(), p).term,
              prop_code(unit_ty(), canonical_uniq())));
  CHECK(conv_tm(Ctx{}, prop_ty(), p, q));
}

TEST_CASE("codes with different carriers need registered evidence") {
  TermPtr p = prop_code(unit_ty(), canonical_uniq());
  TermPtr q = prop_code(prod_ty(unit_ty(), unit_ty()), dlam(dlam(refl(pair(star(), star())))));
  CHECK_FALSE(conv_tm(Ctx{}, prop_ty(), p, q));
  ExtraEqs extra{{normalize_tm(Ctx{}, prop_ty(), p).term,
                  normalize_tm(Ctx{}, prop_ty(), q).term}};
  CHECK(conv_tm(Ctx{}, prop_ty(), p, q, extra));
  CHECK(conv_ty(Ctx{}, el_ty(p), el_ty(q), extra));
}

TEST_CASE("normalization is idempotent on samples") {
  TypePtr two = coprod_ty(unit_ty(), unit_ty());
  Ctx ctx{{two, fun_ty(shift(two, 1, 0), prop_ty())}};
  std::vector<std::pair<TypePtr, TermPtr>> samples = {
      {prop_ty(), app(var(0), var(1))},
      {fun_ty(shift(two, 2, 0), prop_ty()), var(0)},
      {shift(two, 2, 0), var(1)},
      {prod_ty(unit_ty(), prop_ty()), pair(star(), app(var(0), var(1)))},
  };
  for (const auto& [ty, tm] : samples) {
    NfTm once = normalize_tm(ctx, ty, tm);
    NfTm twice = normalize_tm(ctx, ty, once.term);
    CHECK(equal(once.term, twice.term));
  }
}

TEST_CASE("is_irrelevant recognizes El and Id heads") {
  CHECK(is_irrelevant(Ctx{}, id_ty(unit_ty(), star(), star())));
  CHECK_FALSE(is_irrelevant(Ctx{}, prop_ty()));
  CHECK(is_irrelevant(Ctx{}, el_ty(prop_code(unit_ty(), canonical_uniq()))));
  CHECK_FALSE(is_irrelevant(Ctx{}, coprod_ty(unit_ty(), unit_ty())));
}

TEST_CASE("distinct lambdas at relevant types do not convert") {
  TypePtr pp = fun_ty(prop_ty(), prop_ty());
  CHECK_FALSE(conv_tm(Ctx{}, pp, lam(var(0)),
                      lam(prop_code(unit_ty(), canonical_uniq()))));
}

TEST_CASE("neutral spines convert componentwise") {
  Ctx ctx = Ctx{}.extended(fun_ty(prop_ty(), prop_ty())).extended(prop_ty()).extended(prop_ty())
                .extended(id_ty(prop_ty(), var(1), var(0)));
  // f x vs f y under p : Id Prop x y
  CHECK(conv_tm(ctx, prop_ty(), app(var(3), var(2)), app(var(3), var(1))));
}
