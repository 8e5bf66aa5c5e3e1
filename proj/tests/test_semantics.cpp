/* Copyright 2026 The TLW Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#include <random>

#include "doctest.h"
#include "random_terms.hpp"
#include "tarski.hpp"
#include "tlw/parser.hpp"
#include "tlw/semantics.hpp"

using namespace tlw;
using tlw::testing::Tarski;
using tlw::testing::TermGen;
using tlw::testing::Value;

namespace {

Interpretation over(const std::string& theory, const FinSpace& x, Flavor flavor) {
  Interpretation m;
  m.theory = parse_theory(theory);
  m.base = x;
  m.flavor = flavor;
  return m;
}

const char* kGroups =
    "%mode lambda\n"
    "type G;\n"
    "const e : G;\n"
    "const m : G^(G*G);\n"
    "const i : G^G;\n"
    "axiom forall x:G. forall y:G. forall z:G. m(m(x, y), z) = m(x, m(y, z));\n"
    "axiom forall x:G. m(e, x) = x;\n"
    "axiom forall x:G. m(i(x), x) = e;\n";

// Z/2 as a constant sheaf over the Sierpinski space, with a pluggable
// multiplication and inverse.
Interpretation z2(const std::function<int(int, int)>& mul, const std::function<int(int)>& inv) {
  FinSpace s = FinSpace::sierpinski();
  Interpretation m = over(kGroups, s, Flavor::Omega);
  Sheaf g = constant_sheaf(s, {"0", "1"});
  m.types["G"] = g;
  m.constants["e"] = {0, 0};
  Exponential em = exponential(g, product(g, g));
  m.constants["m"] = *function_section(em, [&](int, int b) { return mul(b / 2, b % 2); });
  Exponential ei = exponential(g, g);
  m.constants["i"] = *function_section(ei, [&](int, int b) { return inv(b); });
  return m;
}

// A lambda-mode formula over the terms TermGen produces.
Term random_lambda_formula(TermGen& gen, const Signature& sig, std::vector<Var>& scope, int depth) {
  int choice = depth <= 0 ? 0 : gen.pick(7);
  switch (choice) {
    case 1:
      return Term::conj(random_lambda_formula(gen, sig, scope, depth - 1),
                        random_lambda_formula(gen, sig, scope, depth - 1));
    case 2:
      return Term::disj(random_lambda_formula(gen, sig, scope, depth - 1),
                        random_lambda_formula(gen, sig, scope, depth - 1));
    case 3:
      return Term::implies(random_lambda_formula(gen, sig, scope, depth - 1),
                           random_lambda_formula(gen, sig, scope, depth - 1));
    case 4:
      return Term::negation(random_lambda_formula(gen, sig, scope, depth - 1));
    case 5:
    case 6: {
      Var v{"v" + std::to_string(gen.pick(3)), gen.type(1)};
      if (v.type.contains_two()) v.type = Type::basic(sig.types()[0]);
      scope.push_back(v);
      Term body = random_lambda_formula(gen, sig, scope, depth - 1);
      scope.pop_back();
      return choice == 5 ? Term::forall(v, body) : Term::exists(v, body);
    }
    default: {
      if (!sig.relations().empty() && gen.pick(3) == 0) {
        const auto& [name, args] = sig.relations()[gen.pick(static_cast<int>(sig.relations().size()))];
        std::vector<Term> ts;
        for (const auto& a : args) ts.push_back(gen.term(a, scope, 1));
        return Term::rel(name, ts);
      }
      Type t = gen.type(1);
      if (t.contains_two()) t = Type::basic(sig.types()[0]);
      return Term::eq(gen.term(t, scope, 2), gen.term(t, scope, 2));
    }
  }
}

}  // namespace

TEST_CASE("type interpretation") {
  FinSpace s = FinSpace::sierpinski();
  Interpretation m = over("type X;", s, Flavor::Classical);
  m.types["X"] = constant_sheaf(s, {"a", "b"});
  Evaluator ev(m);
  CHECK(ev.interpret_type(Type::two()) == two(s));
  const Sheaf& xx = ev.interpret_type(parse_type("X*X"));
  CHECK(xx.same_shape(constant_sheaf(s, {"1", "2", "3", "4"})));

  FinSpace pt = FinSpace::discrete(1);
  Interpretation p = over("type X;", pt, Flavor::Classical);
  p.types["X"] = constant_sheaf(pt, {"a", "b"});
  Evaluator pe(p);
  CHECK(pe.interpret_type(parse_type("2^X")).stalk_size(0) == 4);

  // missing basic type, and a non-decidable type under classical-c
  Interpretation bad = over("type X; type Y;", s, Flavor::Classical);
  bad.types["X"] = constant_sheaf(s, {"a"});
  CHECK_THROWS_AS(Evaluator{bad}, Error);
  bad.types["Y"] = Sheaf::make(s, {{"a"}, {"a", "b"}}, {{{1, 0}, {0, 0}}});
  try {
    Evaluator e2(bad);
    FAIL("expected NotDecidable");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NotDecidable);
  }
  bad.flavor = Flavor::Omega;
  CHECK_NOTHROW(Evaluator{bad});
}

TEST_CASE("term interpretation examples") {
  FinSpace s = FinSpace::sierpinski();
  Interpretation m = over("type X;", s, Flavor::Classical);
  m.types["X"] = Sheaf::make(s, {{"a", "b", "c"}, {"a", "b"}}, {{{1, 0}, {0, 1}}});
  Evaluator ev(m);
  Signature sig = m.theory.signature;
  Context ctx = parse_context("x:X", sig);
  SheafMorphism id = ev.interpret_term(parse_term("x", sig, ctx), ctx);
  CHECK(id.comp == identity(ev.interpret_type(Type::basic("X"))).comp);
  // x = x is constantly true
  SheafMorphism refl = ev.interpret_term(parse_term("x = x", sig, ctx), ctx);
  for (int p = 0; p < 2; ++p)
    for (int v : refl.comp[p]) CHECK(v == 0);
  // beta redex against the variable
  SheafMorphism beta = ev.interpret_term(parse_term("(\\y:X. y)(x)", sig, ctx), ctx);
  CHECK(beta.comp == id.comp);
}

TEST_CASE("beta against the variable on random models") {
  Theory thy = parse_theory("type X; const c : X;");
  std::mt19937_64 rng(7);
  for (int round = 0; round < 40; ++round) {
    auto spaces = topologies_up_to_homeomorphism(1 + round % 3);
    FinSpace x = spaces[rng() % spaces.size()];
    Flavor fl = round % 2 ? Flavor::Omega : Flavor::Classical;
    Interpretation m = random_interpretation(thy, x, fl, 3, rng);
    Evaluator ev(m);
    Context ctx = parse_context("x:X", thy.signature);
    auto a = ev.interpret_term(parse_term("(\\y:X. <y, c>)(x)", thy.signature, ctx), ctx);
    auto b = ev.interpret_term(parse_term("<x, c>", thy.signature, ctx), ctx);
    CHECK(a.comp == b.comp);
    CHECK(a.is_natural());
  }
}

TEST_CASE("classical equality is the bar of the classified diagonal") {
  std::mt19937_64 rng(11);
  Theory thy = parse_theory("type X;");
  for (int round = 0; round < 30; ++round) {
    auto spaces = topologies_up_to_homeomorphism(1 + round % 3);
    FinSpace x = spaces[rng() % spaces.size()];
    Interpretation m = random_interpretation(thy, x, Flavor::Classical, 3, rng);
    Evaluator ev(m);
    for (const char* ty : {"X", "X*X", "X^X"}) {
      Type t = parse_type(ty);
      const Sheaf& f = ev.interpret_type(t);
      Context ctx({Var{"u", t}, Var{"v", t}});
      auto eq = ev.interpret_term(Term::eq(Term::var("u", t), Term::var("v", t)), ctx);
      // oracle: classify the diagonal in Omega and factor through 1+1
      Omega om = omega(x);
      auto chi = classify(om, diagonal(f));
      auto bar = bar_factor(om, chi);
      REQUIRE(bar.has_value());
      // the context product carries an extra terminal factor; element
      // indices coincide with those of F x F
      CHECK(eq.comp == bar->comp);
    }
  }
}

TEST_CASE("omega formulas over the Sierpinski space") {
  FinSpace s = FinSpace::sierpinski();
  Interpretation m = over("%mode lambda\ntype X;\nrel p : ();", s, Flavor::Omega);
  m.types["X"] = constant_sheaf(s, {"a", "b"});
  // p holds at g only
  m.relations["p"] = Subsheaf::make(terminal(s), {{1}, {0}});
  Evaluator ev(m);
  const Signature& sig = m.theory.signature;
  Context none;
  CHECK(ev.interpret_formula(Term::top(), none).is_whole());
  CHECK(ev.interpret_formula(Term::bot(), none).is_empty());
  Subsheaf lem = ev.interpret_formula(parse_formula("p \\/ ~p", sig), none);
  CHECK_FALSE(lem.is_whole());
  CHECK_FALSE(lem.is_empty());
  // the same open, computed from the Heyting operations directly
  Subsheaf pv = m.relations["p"];
  CHECK(lem == join(pv, negate(pv)));
  // p \/ ~p denotes the open {g}; Omega has 3 global sections, only one is top
  CHECK(lem.in == std::vector<std::vector<char>>{{1}, {0}});
  CHECK_FALSE(ev.satisfies(parse_formula("p \\/ ~p", sig)));
  CHECK(ev.satisfies(parse_formula("~~(p \\/ ~p)", sig)));
  Context ctx = parse_context("x:X", sig);
  CHECK(ev.interpret_formula(parse_formula("x = x", sig, ctx), ctx).is_whole());
  // bar_factor of the classifier of p does not exist
  Omega om = omega(s);
  CHECK_FALSE(bar_factor(om, classify(om, pv)).has_value());
}

TEST_CASE("satisfaction basics") {
  FinSpace s = FinSpace::sierpinski();
  for (Flavor fl : {Flavor::Classical, Flavor::Omega}) {
    Interpretation m = over("type X;", s, fl);
    m.types["X"] = initial(s);
    Evaluator ev(m);
    CHECK(ev.satisfies(Term::top()));
    CHECK_FALSE(ev.satisfies(parse_formula("exists x:X. true", m.theory.signature)));
    CHECK(ev.satisfies(parse_formula("forall x:X. false", m.theory.signature)));
    Interpretation l = over("%mode lambda\ntype X;", s, fl);
    l.types["X"] = initial(s);
    Evaluator lev(l);
    CHECK_FALSE(lev.satisfies(parse_formula("exists x:X. x = x", l.theory.signature)));
  }
}

TEST_CASE("every c-interpretation satisfies excluded middle") {
  Theory thy = parse_theory("type X; const c : X^X;");
  Term lem = parse_formula("forall p:2. p \\/ ~p", thy.signature);
  Term lem_x = parse_formula("forall x:X. forall y:X. x = y \\/ ~(x = y)", thy.signature);
  std::mt19937_64 rng(3);
  for (int n = 1; n <= 2; ++n)
    for (const auto& x : topologies_up_to_homeomorphism(n))
      for (int k = 0; k < 4; ++k) {
        Interpretation m = random_interpretation(thy, x, Flavor::Classical, 2, rng);
        Evaluator ev(m);
        CHECK(ev.satisfies(lem));
        CHECK(ev.satisfies(lem_x));
      }
}

TEST_CASE("groups as a sheaf of groups") {
  auto mul = [](int a, int b) { return a ^ b; };
  auto inv = [](int a) { return a; };
  ModelVerdict good = check_model(z2(mul, inv));
  CHECK(good.valid);
  ModelVerdict bad_inv = check_model(z2(mul, [](int) { return 0; }));
  CHECK_FALSE(bad_inv.valid);
  CHECK(bad_inv.failing_axiom == 2);
  ModelVerdict bad_mul = check_model(z2([](int a, int) { return 1 - a; }, inv));
  CHECK_FALSE(bad_mul.valid);
  CHECK(bad_mul.failing_axiom == 0);
  // oracle: the axioms checked directly on the tables
  for (int x = 0; x < 2; ++x)
    for (int y = 0; y < 2; ++y)
      for (int z = 0; z < 2; ++z) CHECK(mul(mul(x, y), z) == mul(x, mul(y, z)));
  Interpretation empty = over("type X;", FinSpace::sierpinski(), Flavor::Omega);
  empty.types["X"] = terminal(empty.base);
  CHECK(check_model(empty).valid);
}

TEST_CASE("one-point base agrees with set semantics") {
  Theory thy = parse_theory("type X; const c : X; const f : X^X;");
  FinSpace pt = FinSpace::discrete(1);
  for (int size = 1; size <= 2; ++size) {
    for (int fcode = 0; fcode < size * size; ++fcode) {
      Value cv{size - 1, {}};
      Value fv;
      for (int i = 0; i < size; ++i) fv.kids.push_back(Value{(fcode / (i == 0 ? 1 : size)) % size, {}});
      Tarski oracle(thy.signature, {{"X", size}}, {{"c", cv}, {"f", fv}});
      for (Flavor fl : {Flavor::Classical, Flavor::Omega}) {
        Interpretation m;
        m.theory = thy;
        m.base = pt;
        m.flavor = fl;
        std::vector<std::string> labels;
        for (int i = 0; i < size; ++i) labels.push_back("e" + std::to_string(i));
        m.types["X"] = constant_sheaf(pt, labels);
        m.constants["c"] = {0};
        m.constants["f"] = {0};
        {
          Interpretation shape = m;
          shape.theory = parse_theory("type X;");
          Evaluator tmp(shape);
          m.constants["c"] = {oracle.sheaf_index(tmp, Type::basic("X"), cv)};
          m.constants["f"] = {oracle.sheaf_index(tmp, parse_type("X^X"), fv)};
        }
        Evaluator ev(m);
        TermGen gen(thy.signature, 100 + size * 10 + fcode);
        gen.set_max_type_depth(2);
        gen.set_max_arg_depth(1);
        for (int k = 0; k < 60; ++k) {
          std::vector<Var> scope;
          Term phi = gen.term(Type::two(), scope, 4);
          CHECK_MESSAGE(ev.satisfies(phi) == oracle.holds(phi), phi.str());
        }
      }
    }
  }
}

TEST_CASE("substitution and semantics commute") {
  Theory thy = parse_theory("type X; const c : X; const g : X^X;");
  std::mt19937_64 rng(9);
  TermGen gen(thy.signature, 21);
  gen.set_max_type_depth(2);
  gen.set_max_arg_depth(0);
  int checked = 0;
  for (int round = 0; round < 60; ++round) {
    auto spaces = topologies_up_to_homeomorphism(1 + round % 3);
    FinSpace x = spaces[rng() % spaces.size()];
    Flavor fl = round % 2 ? Flavor::Omega : Flavor::Classical;
    Interpretation m = random_interpretation(thy, x, fl, 2, rng);
    Evaluator ev(m);
    Var a{"a", Type::basic("X")};
    Type yt = gen.type(1);
    if (yt.kind() == Type::Kind::Exp && yt.argument().kind() == Type::Kind::Exp) yt = Type::basic("X");
    Var y{"y", yt};
    std::vector<Var> scope{a, y};
    Term phi = gen.term(Type::two(), scope, 3);
    std::vector<Var> scope_a{a};
    Term tau = gen.term(yt, scope_a, 2);
    Context ca({a});
    Context cay({a, y});
    try {
      Subsheaf lhs = ev.interpret_formula(substitute(phi, tau, y), ca);
      Subsheaf whole = ev.interpret_formula(phi, cay);
      SheafMorphism t = ev.interpret_term(tau, ca);
      const Sheaf& ys = ev.interpret_type(yt);
      // pull back along <id, tau>
      for (int p = 0; p < x.size(); ++p)
        for (int e = 0; e < lhs.parent.stalk_size(p); ++e)
          CHECK(lhs.in[p][e] == whole.in[p][e * ys.stalk_size(p) + t.comp[p][e]]);
      ++checked;
    } catch (const Error& e) {
      CHECK((e.kind() == ErrorKind::NotDecidable || e.kind() == ErrorKind::SizeLimit));
    }
  }
  CHECK(checked >= 40);
}

TEST_CASE("lambda-mode Kripke-Joyal agrees with the HOL Omega reading") {
  std::mt19937_64 rng(13);
  Theory lam = parse_theory("%mode lambda\ntype X;\nconst c : X;\nconst g : X^X;");
  Theory hol = parse_theory("%mode hol-intuitionistic\ntype X;\nconst c : X;\nconst g : X^X;");
  TermGen gen(lam.signature, 33);
  gen.set_max_type_depth(2);
  gen.set_max_arg_depth(0);
  int checked = 0;
  for (int round = 0; round < 40; ++round) {
    auto spaces = topologies_up_to_homeomorphism(1 + round % 3);
    FinSpace x = spaces[rng() % spaces.size()];
    Interpretation m = random_interpretation(lam, x, Flavor::Omega, 2, rng);
    Interpretation h = m;
    h.theory = hol;
    Evaluator el(m), eh(h);
    Var a{"a", Type::basic("X")};
    std::vector<Var> scope{a};
    Term phi = random_lambda_formula(gen, lam.signature, scope, 3);
    Context ca({a});
    try {
      CHECK_MESSAGE(el.interpret_formula(phi, ca) == eh.interpret_formula(phi, ca), phi.str());
      ++checked;
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::SizeLimit);
    }
  }
  CHECK(checked >= 30);
}

TEST_CASE("flavors agree over discrete bases") {
  std::mt19937_64 rng(17);
  Theory lam = parse_theory("%mode lambda\ntype X;\nconst c : X;\nrel R : (X, X);\nrel q : ();");
  TermGen gen(lam.signature, 44);
  gen.set_max_type_depth(2);
  gen.set_max_arg_depth(0);
  for (int round = 0; round < 60; ++round) {
    FinSpace x = FinSpace::discrete(1 + round % 3);
    Interpretation m = random_interpretation(lam, x, Flavor::Omega, 2, rng);
    Interpretation c = m;
    c.flavor = Flavor::Classical;
    Evaluator eo(m), ec(c);
    std::vector<Var> scope;
    Term phi = random_lambda_formula(gen, lam.signature, scope, 3);
    CHECK_MESSAGE(eo.satisfies(phi) == ec.satisfies(phi), phi.str());
  }
}

TEST_CASE("countermodel search") {
  Theory empty = parse_theory("%mode lambda\nrel p : ();");
  Term lem = parse_formula("p \\/ ~p", empty.signature);
  SearchBounds b;
  b.max_points = 2;
  b.max_stalk = 1;
  b.flavor = Flavor::Omega;
  SearchResult r = search_countermodel(empty, lem, b);
  REQUIRE(r.model.has_value());
  CHECK(homeomorphic(r.model->base, FinSpace::sierpinski()));
  {
    Evaluator ev(*r.model);
    CHECK_FALSE(ev.satisfies(lem));
    Omega om = omega(r.model->base);
    CHECK_FALSE(bar_factor(om, classify(om, r.model->relations.at("p"))).has_value());
  }
  CHECK_FALSE(search_countermodel(empty, Term::top(), b).model.has_value());
  Theory with = empty;
  with.axioms.push_back(lem);
  SearchResult none = search_countermodel(with, lem, b);
  CHECK_FALSE(none.model.has_value());
  CHECK(none.exhausted);
  // classical-c never refutes excluded middle
  b.flavor = Flavor::Classical;
  CHECK_FALSE(search_countermodel(empty, lem, b).model.has_value());
  // budget
  b.flavor = Flavor::Omega;
  b.max_candidates = 1;
  SearchResult cut = search_countermodel(with, lem, b);
  CHECK_FALSE(cut.exhausted);
}

TEST_CASE("definability over the Sierpinski space") {
  FinSpace s = FinSpace::sierpinski();
  Interpretation m = over("type X; const c : X;", s, Flavor::Classical);
  Sheaf xs = constant_sheaf(s, {"a", "b"});
  m.types["X"] = xs;
  m.constants["c"] = {1, 1};
  Evaluator ev(m);
  Type X = Type::basic("X");
  Type XX = Type::prod(X, X);
  struct Case {
    Type y;
    std::function<int(int, int)> fn;
  };
  std::vector<Case> cases{{X, [](int, int a) { return a; }},
                          {X, [](int, int) { return 1; }},
                          {XX, [](int, int e) { return e / 2; }},
                          {XX, [](int, int e) { return e % 2; }}};
  for (const auto& c : cases) {
    const Sheaf& ys = ev.interpret_type(c.y);
    std::vector<std::vector<int>> comp(2);
    for (int p = 0; p < 2; ++p)
      for (int e = 0; e < ys.stalk_size(p); ++e) comp[p].push_back(c.fn(p, e));
    SheafMorphism f = SheafMorphism::make(ys, xs, comp);
    auto phi = find_defining_formula(ev, c.y, X, f, 4);
    REQUIRE(phi.has_value());
    Context ctx({Var{"y", c.y}, Var{"z", X}});
    CHECK(ev.interpret_formula(*phi, ctx) == graph_of(f, ev.context_sheaf(ctx)));
  }
  // identity is found as an equation between the variables
  const Sheaf& ys = ev.interpret_type(X);
  auto phi = find_defining_formula(ev, X, X, identity(ys), 4);
  REQUIRE(phi.has_value());
  CHECK(phi->str() == "y = z");
}

TEST_CASE("evaluator memo checkpoints") {
  Theory thy = parse_theory("type X; const c : X;");
  std::mt19937_64 rng(1);
  Interpretation m = random_interpretation(thy, FinSpace::sierpinski(), Flavor::Classical, 2, rng);
  Evaluator ev(m);
  Term keep = parse_formula("forall x:X. x = c", thy.signature);
  bool before = ev.satisfies(keep);
  std::size_t mk = ev.mark();
  Term tmp = parse_formula("exists x:X. ~(x = c)", thy.signature);
  bool t1 = ev.satisfies(tmp);
  ev.rollback(mk);
  CHECK(ev.satisfies(tmp) == t1);
  CHECK(ev.satisfies(keep) == before);
  CHECK(t1 == !before);
}
