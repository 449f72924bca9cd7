#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>

#include "cbt/setmodel.hpp"

using namespace cbt;

namespace {

TypePtr bool_ty_() { return coprod_ty(unit_ty(), unit_ty()); }
TermPtr true_() { return inl(star()); }
TermPtr false_() { return inr(star()); }

TermPtr ite_(TermPtr t, TermPtr u, TermPtr v, TypePtr a) {
  return match(std::move(t), unit_ty(), unit_ty(), std::move(a), shift(u, 1, 0),
               shift(v, 1, 0));
}

TypePtr void_ty_() { return pi_ty(prop_ty(), el_ty(var(0))); }

TypePtr trunc_(const TypePtr& a) {
  return pi_ty(prop_ty(),
               fun_ty(fun_ty(shift(a, 1, 0), el_ty(var(0))), el_ty(var(0))));
}

TermPtr squash_(const TermPtr& u) {
  return dlam(lam(app(var(0), shift(u, 2, 0))));
}

TermPtr sub_singleton_proof() { return dlam(dlam(refl(var(1)))); }

TermPtr truth_code() { return prop_code(unit_ty(), sub_singleton_proof()); }
TermPtr void_code() { return prop_code(void_ty_(), sub_singleton_proof()); }

SemPtr left_unit() { return smk(SemValue{LeftV{unit_tok()}}); }
SemPtr right_unit() { return smk(SemValue{RightV{unit_tok()}}); }

}  // namespace

TEST_CASE("context interpretation has the expected cardinalities") {
  SetModel m;
  CHECK(m.interp_ctx(Ctx{}).size() == 1);
  CHECK(m.interp_ctx(Ctx{{unit_ty()}}).size() == 1);
  CHECK(m.interp_ctx(Ctx{{prop_ty()}}).size() == 2);
  CHECK(m.interp_ctx(Ctx{{prop_ty(), el_ty(var(0))}}).size() == 1);
  CHECK(m.interp_ctx(Ctx{{prop_ty(), prop_ty()}}).size() == 4);

  auto envs = m.enumerate_envs(Ctx{{prop_ty()}});
  REQUIRE(envs.size() == 2);
  CHECK(sem_eq(envs[0][0], prop_v(false)));
  CHECK(sem_eq(envs[1][0], prop_v(true)));

  // only the environment where the entry code is true extends further
  auto dep = m.enumerate_envs(Ctx{{prop_ty(), el_ty(var(0))}});
  REQUIRE(dep.size() == 1);
  CHECK(sem_eq(dep[0][0], prop_v(true)));
  CHECK(sem_eq(dep[0][1], unit_tok()));
}

TEST_CASE("type interpretation matches the frozen examples") {
  SetModel m;
  FinSet id_fib = m.interp_ty(Ctx{}, id_ty(unit_ty(), star(), star()), {});
  REQUIRE(id_fib.size() == 1);
  CHECK(std::holds_alternative<EqTok>(id_fib.elems[0]->node));

  CHECK(m.interp_ty(Ctx{}, fun_ty(prop_ty(), prop_ty()), {}).size() == 4);
  CHECK(m.interp_ty(Ctx{}, void_ty_(), {}).empty());

  FinSet prop = m.interp_ty(Ctx{}, prop_ty(), {});
  REQUIRE(prop.size() == 2);
  CHECK(sem_eq(prop.elems[0], prop_v(false)));
  CHECK(sem_eq(prop.elems[1], prop_v(true)));

  CHECK(m.interp_ty(Ctx{}, bool_ty_(), {}).size() == 2);
  CHECK(m.interp_ty(Ctx{}, prod_ty(prop_ty(), bool_ty_()), {}).size() == 4);
  CHECK(m.interp_ty(Ctx{}, coprod_ty(prop_ty(), unit_ty()), {}).size() == 3);
}

TEST_CASE("function fibers are canonical graphs") {
  SetModel m;
  FinSet fns = m.interp_ty(Ctx{}, fun_ty(prop_ty(), prop_ty()), {});
  REQUIRE(fns.size() == 4);
  for (const auto& f : fns.elems) {
    const auto& g = std::get<FunV>(f->node).graph;
    REQUIRE(g.size() == 2);
    CHECK(sem_eq(g[0].first, prop_v(false)));
    CHECK(sem_eq(g[1].first, prop_v(true)));
  }
  // the identity graph is among them
  FunV ident;
  ident.graph = {{prop_v(false), prop_v(false)}, {prop_v(true), prop_v(true)}};
  CHECK(fns.contains(smk(SemValue{std::move(ident)})));
}

TEST_CASE("term interpretation produces canonical values") {
  SetModel m;
  Checker ck;
  CHECK(sem_eq(m.interp_tm(Ctx{}, star(), unit_ty(), {}), unit_tok()));
  CHECK(sem_eq(m.interp_tm(Ctx{}, truth_code(), prop_ty(), {}), prop_v(true)));

  // the code over the empty type checks (all of its inhabitants are unifiable
  // definitionally) and classifies to f
  REQUIRE_NOTHROW(ck.check_tm(Ctx{}, void_code(), prop_ty()));
  CHECK(sem_eq(m.interp_tm(Ctx{}, void_code(), prop_ty(), {}), prop_v(false)));

  TypePtr pt = prod_ty(unit_ty(), prop_ty());
  SemPtr pv = m.interp_tm(Ctx{}, pair(star(), truth_code()), pt, {});
  const auto* p = std::get_if<PairV>(&pv->node);
  REQUIRE(p);
  CHECK(sem_eq(p->fst, unit_tok()));
  CHECK(sem_eq(p->snd, prop_v(true)));
  CHECK(m.interp_ty(Ctx{}, pt, {}).contains(pv));

  // match takes the branch matching the injection
  SemPtr l = m.interp_tm(Ctx{}, ite_(true_(), true_(), false_(), bool_ty_()),
                         bool_ty_(), {});
  CHECK(sem_eq(l, left_unit()));
  SemPtr r = m.interp_tm(Ctx{}, ite_(false_(), true_(), false_(), bool_ty_()),
                         bool_ty_(), {});
  CHECK(sem_eq(r, right_unit()));
}

TEST_CASE("application is graph lookup") {
  SetModel m;
  Ctx ctx{{prop_ty()}};
  TermPtr ident = annot(lam(var(0)), fun_ty(prop_ty(), prop_ty()));
  CHECK(sem_eq(m.interp_tm(ctx, app(ident, var(0)), prop_ty(), {prop_v(true)}),
               prop_v(true)));
  CHECK(sem_eq(m.interp_tm(ctx, app(ident, var(0)), prop_ty(), {prop_v(false)}),
               prop_v(false)));

  TermPtr konst = annot(dlam(star()), pi_ty(prop_ty(), unit_ty()));
  CHECK(sem_eq(m.interp_tm(ctx, dapp(konst, var(0)), unit_ty(), {prop_v(true)}),
               unit_tok()));
}

TEST_CASE("substitution interpretation and the composition square") {
  SetModel m;
  Ctx gamma{{prop_ty()}};
  SemEnv env{prop_v(true)};
  SemEnv back = m.interp_subst(gamma, id_subst(1), gamma, env);
  REQUIRE(back.size() == 1);
  CHECK(sem_eq(back[0], prop_v(true)));

  SemEnv one = m.interp_subst(Ctx{}, SubstObj{{star()}}, Ctx{{unit_ty()}}, {});
  REQUIRE(one.size() == 1);
  CHECK(sem_eq(one[0], unit_tok()));

  // interp of a composite = composite of interps
  Ctx delta{{unit_ty()}};
  Ctx theta{{prop_ty(), el_ty(var(0))}};
  SubstObj sigma{{star()}};                       // gamma -> delta
  SubstObj gammasub{{truth_code(), star()}};      // delta -> theta
  SubstObj comp = compose(gammasub, sigma);       // gamma -> theta
  for (const auto& e : m.enumerate_envs(gamma)) {
    SemEnv lhs = m.interp_subst(gamma, comp, theta, e);
    SemEnv mid = m.interp_subst(gamma, sigma, delta, e);
    SemEnv rhs = m.interp_subst(delta, gammasub, theta, mid);
    REQUIRE(lhs.size() == rhs.size());
    for (std::size_t k = 0; k < lhs.size(); ++k) CHECK(sem_eq(lhs[k], rhs[k]));
  }
}

TEST_CASE("semantic term equality is exhaustive over environments") {
  SetModel m;
  Ctx b{{bool_ty_()}};
  CHECK(m.sem_eq_tm(b, ite_(var(0), true_(), false_(), bool_ty_()), var(0), bool_ty_()));
  CHECK_FALSE(m.sem_eq_tm(Ctx{}, true_(), false_(), bool_ty_()));

  // an identity hypothesis restricts enumeration to the diagonal
  Ctx refl_ctx{{prop_ty(), prop_ty(), id_ty(prop_ty(), var(1), var(0))}};
  CHECK(m.sem_eq_tm(refl_ctx, var(2), var(1), prop_ty()));
  Ctx free_ctx{{prop_ty(), prop_ty()}};
  CHECK_FALSE(m.sem_eq_tm(free_ctx, var(1), var(0), prop_ty()));

  // vacuously true over an empty context fiber
  Ctx dead{{void_ty_()}};
  CHECK(m.sem_eq_tm(dead, dapp(var(0), truth_code()), star(), el_ty(truth_code())));
}

TEST_CASE("computation laws hold semantically") {
  SetModel m;
  TermPtr u = true_();
  TermPtr v = false_();
  CHECK(m.sem_eq_tm(Ctx{}, app(annot(lam(var(0)), fun_ty(bool_ty_(), bool_ty_())), u),
                    u, bool_ty_()));
  CHECK(m.sem_eq_tm(Ctx{}, dapp(annot(dlam(var(0)), pi_ty(prop_ty(), prop_ty())),
                                truth_code()),
                    truth_code(), prop_ty()));
  TermPtr pr = annot(pair(star(), truth_code()), prod_ty(unit_ty(), prop_ty()));
  CHECK(m.sem_eq_tm(Ctx{}, proj1(pr), star(), unit_ty()));
  CHECK(m.sem_eq_tm(Ctx{}, proj2(pr), truth_code(), prop_ty()));
  CHECK(m.sem_eq_tm(Ctx{}, ite_(true_(), u, v, bool_ty_()), u, bool_ty_()));
  CHECK(m.sem_eq_tm(Ctx{}, ite_(false_(), u, v, bool_ty_()), v, bool_ty_()));

  // surjective pairing
  Ctx pc{{prod_ty(prop_ty(), prop_ty())}};
  CHECK(m.sem_eq_tm(pc, pair(proj1(var(0)), proj2(var(0))), var(0),
                    prod_ty(prop_ty(), prop_ty())));
}

TEST_CASE("cardinality table is stable") {
  SetModel m;
  CHECK(m.cardinality(prop_ty()) == 2);
  CHECK(m.cardinality(bool_ty_()) == 2);
  CHECK(m.cardinality(void_ty_()) == 0);
  CHECK(m.cardinality(trunc_(unit_ty())) == 1);
  CHECK(m.cardinality(trunc_(void_ty_())) == 0);
  CHECK(m.cardinality(trunc_(bool_ty_())) == 1);
  CHECK(m.cardinality(id_ty(unit_ty(), star(), star())) == 1);
  CHECK(m.cardinality(id_ty(bool_ty_(), true_(), false_())) == 0);
  CHECK(m.cardinality(fun_ty(prop_ty(), prop_ty())) == 4);
}

TEST_CASE("identity fibers are subsingletons inhabited exactly on the diagonal") {
  SetModel m;
  Ctx ctx{{prop_ty()}};
  TypePtr diag = id_ty(prop_ty(), var(0), truth_code());
  for (const auto& env : m.enumerate_envs(ctx)) {
    FinSet fib = m.interp_ty(ctx, diag, env);
    bool same = sem_eq(env[0], prop_v(true));
    CHECK(fib.size() == (same ? 1u : 0u));
  }
}

TEST_CASE("codes classify fibers") {
  SetModel m;
  Checker ck;
  auto classify = [&](const TermPtr& code) {
    return sem_eq(m.interp_tm(Ctx{}, code, prop_ty(), {}), prop_v(true));
  };
  CHECK(classify(truth_code()));
  CHECK_FALSE(classify(void_code()));
  CHECK(m.cardinality(el_ty(truth_code())) == 1);
  CHECK(m.cardinality(el_ty(void_code())) == 0);

  // an identity carrier classifies by endpoint agreement
  TermPtr diag = prop_code(id_ty(unit_ty(), star(), star()), sub_singleton_proof());
  TermPtr off = prop_code(id_ty(bool_ty_(), true_(), false_()), sub_singleton_proof());
  REQUIRE_NOTHROW(ck.check_tm(Ctx{}, diag, prop_ty()));
  REQUIRE_NOTHROW(ck.check_tm(Ctx{}, off, prop_ty()));
  CHECK(classify(diag));
  CHECK_FALSE(classify(off));
}

TEST_CASE("interpretation commutes with substitution") {
  SetModel m;
  Ctx delta{{prop_ty()}};
  std::vector<std::pair<SubstObj, const char*>> subs = {
      {SubstObj{{truth_code()}}, "truth"},
      {SubstObj{{void_code()}}, "void"},
  };
  std::vector<TypePtr> types = {
      el_ty(var(0)),
      fun_ty(el_ty(var(0)), unit_ty()),
      prod_ty(prop_ty(), el_ty(var(0))),
      id_ty(prop_ty(), var(0), truth_code()),
  };
  for (const auto& [sigma, tag] : subs) {
    INFO(tag);
    SemEnv env = m.interp_subst(Ctx{}, sigma, delta, {});
    for (const auto& a : types) {
      CHECK(m.interp_ty(Ctx{}, apply_ty(a, sigma), {}) == m.interp_ty(delta, a, env));
    }
    TermPtr u = var(0);
    CHECK(sem_eq(m.interp_tm(Ctx{}, apply_tm(u, sigma), prop_ty(), {}),
                 m.interp_tm(delta, u, prop_ty(), env)));
  }
}

TEST_CASE("enumeration budget cuts off explosive exponents") {
  TypePtr pp = fun_ty(prop_ty(), prop_ty());
  TypePtr big = fun_ty(fun_ty(pp, pp), prop_ty());
  SetModel small(1000);
  CHECK_THROWS_AS(small.cardinality(big), BudgetExceeded);
  CHECK_THROWS_WITH(SetModel(3).cardinality(pp),
                    Catch::Matchers::ContainsSubstring("budget"));
}

TEST_CASE("budget default honors the environment override") {
  unsetenv("CBT_ENUM_BUDGET");
  CHECK(default_enum_budget() == 1000000);
  setenv("CBT_ENUM_BUDGET", "123", 1);
  CHECK(default_enum_budget() == 123);
  setenv("CBT_ENUM_BUDGET", "nonsense", 1);
  CHECK(default_enum_budget() == 1000000);
  unsetenv("CBT_ENUM_BUDGET");
}

TEST_CASE("checker verdicts agree with the model on sample equations") {
  SetModel m;
  Checker ck;
  struct Eq {
    Ctx ctx;
    TermPtr lhs, rhs;
    TypePtr ty;
  };
  std::vector<Eq> good = {
      {Ctx{}, app(annot(lam(var(0)), fun_ty(unit_ty(), unit_ty())), star()), star(),
       unit_ty()},
      {Ctx{{unit_ty()}}, var(0), star(), unit_ty()},
      {Ctx{{prod_ty(prop_ty(), prop_ty())}}, pair(proj1(var(0)), proj2(var(0))), var(0),
       prod_ty(prop_ty(), prop_ty())},
      {Ctx{{prop_ty(), prop_ty(), id_ty(prop_ty(), var(1), var(0))}}, var(2), var(1),
       prop_ty()},
  };
  for (std::size_t k = 0; k < good.size(); ++k) {
    INFO("accepted equation " << k);
    REQUIRE_NOTHROW(ck.check_eq_tm(good[k].ctx, good[k].lhs, good[k].rhs, good[k].ty));
    CHECK(m.sem_eq_tm(good[k].ctx, good[k].lhs, good[k].rhs, good[k].ty));
  }
  std::vector<Eq> bad = {
      {Ctx{}, true_(), false_(), bool_ty_()},
      {Ctx{{prop_ty()}}, var(0), truth_code(), prop_ty()},
  };
  for (std::size_t k = 0; k < bad.size(); ++k) {
    INFO("rejected equation " << k);
    CHECK_THROWS_AS(ck.check_eq_tm(bad[k].ctx, bad[k].lhs, bad[k].rhs, bad[k].ty),
                    TypeError);
    CHECK_FALSE(m.sem_eq_tm(bad[k].ctx, bad[k].lhs, bad[k].rhs, bad[k].ty));
  }
}

TEST_CASE("truncation fibers are subsingletons without special casing") {
  SetModel m;
  Checker ck;
  for (const auto& a : {unit_ty(), bool_ty_(), void_ty_()}) {
    CHECK(m.cardinality(trunc_(a)) <= 1);
  }
  TermPtr st = squash_(true_());
  TermPtr sf = squash_(false_());
  REQUIRE_NOTHROW(ck.check_tm(Ctx{}, st, trunc_(bool_ty_())));
  CHECK(m.sem_eq_tm(Ctx{}, st, sf, trunc_(bool_ty_())));
  CHECK(m.interp_ty(Ctx{}, trunc_(bool_ty_()), {})
            .contains(m.interp_tm(Ctx{}, st, trunc_(bool_ty_()), {})));
}

TEST_CASE("interpreted terms land in their type's fiber") {
  SetModel m;
  struct Inst {
    Ctx ctx;
    TermPtr tm;
    TypePtr ty;
  };
  std::vector<Inst> insts = {
      {Ctx{}, star(), unit_ty()},
      {Ctx{}, truth_code(), prop_ty()},
      {Ctx{}, ite_(true_(), true_(), false_(), bool_ty_()), bool_ty_()},
      {Ctx{{prop_ty()}}, lam(var(1)), fun_ty(unit_ty(), prop_ty())},
      {Ctx{{bool_ty_()}}, refl(var(0)), id_ty(bool_ty_(), var(0), var(0))},
  };
  for (std::size_t k = 0; k < insts.size(); ++k) {
    INFO("instance " << k);
    for (const auto& env : m.enumerate_envs(insts[k].ctx)) {
      SemPtr v = m.interp_tm(insts[k].ctx, insts[k].tm, insts[k].ty, env);
      CHECK(m.interp_ty(insts[k].ctx, insts[k].ty, env).contains(v));
    }
  }
}
