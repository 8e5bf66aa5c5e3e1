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

#include <map>
#include <random>

#include "doctest.h"
#include "tlw/formats.hpp"
#include "tlw/parser.hpp"

using namespace tlw;

namespace {

Resolve files(std::map<std::string, std::string> contents) {
  return [contents](const std::string& path) {
    auto it = contents.find(path);
    if (it == contents.end()) fail(ErrorKind::Io, "no file " + path);
    return it->second;
  };
}

std::string error_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.what();
  }
  return "";
}

const char* kSierpinski = "points: g c;\nopens: {} {g} {g c};\n";

}  // namespace

TEST_CASE("spaces") {
  FinSpace s = parse_space(kSierpinski);
  CHECK(s.same_topology(FinSpace::sierpinski()));
  CHECK(parse_space(print_space(s)) == s);
  FinSpace sub = parse_space("points: a b c; subbasis: {a b} {b c};");
  CHECK(sub.is_open(bit(1)));
  CHECK(sub.opens().size() == 5);
  std::mt19937_64 rng(3);
  for (int n = 1; n <= 3; ++n)
    for (const auto& x : all_topologies(n)) CHECK(parse_space(print_space(x)) == x);
  CHECK(error_of([] { parse_space("points: a b; opens: {} {a} {b} {a b};"); }).empty());
  // the full set is missing
  std::string bad = error_of([] { parse_space("points: a b;\nopens: {} {a} {b};"); });
  CHECK(bad.find("<space>:1") != std::string::npos);
  CHECK(error_of([] { parse_space("points: a b;\nopens: {} {q};\n"); }).find(":2: unknown point q") != std::string::npos);
  CHECK_THROWS_AS(parse_space("points: a b c d e f g; subbasis: {a};"), Error);
}

TEST_CASE("sheaves") {
  const char* text =
      "space: s.space;\n"
      "stalk c: x y;\n"
      "stalk g: u v w;\n"
      "trans c->g: x|->u y|->w;\n";
  Resolve r = files({{"s.space", kSierpinski}});
  Sheaf f = parse_sheaf(text, r);
  CHECK(f.stalk_size(0) == 3);
  CHECK(f.stalk_size(1) == 2);
  CHECK(f.label(0, f.trans(1, 0, 1)) == "w");
  CHECK(parse_sheaf(print_sheaf(f), r) == f);
  std::mt19937_64 rng(11);
  for (int k = 0; k < 60; ++k) {
    auto spaces = all_topologies(1 + static_cast<int>(rng() % 3));
    Sheaf g = random_sheaf(spaces[rng() % spaces.size()], 3, rng);
    CHECK(parse_sheaf(print_sheaf(g), r) == g);
  }
  // restriction into a point outside the minimal open
  CHECK(error_of([&] { parse_sheaf("space: s.space; stalk g: u; stalk c: x; trans g->c: u|->x;", r); })
            .find("minimal open") != std::string::npos);
  CHECK_THROWS_AS(parse_sheaf("space: s.space; stalk c: x; stalk g: u; trans c->g: y|->u;", r), Error);
  CHECK_THROWS_AS(parse_sheaf("space: missing.space; stalk c: x;", r), Error);
}

TEST_CASE("model literals") {
  Theory thy = parse_theory("type X; const c : X; const f : X^X; const p : 2;");
  const char* text =
      "flavor classical-c;\n"
      "points: g c;\n"
      "opens: {} {g} {g c};\n"
      "stalk X g: a b;\n"
      "stalk X c: a b;\n"
      "trans X c->g: a|->a b|->b;\n"
      "const c = g=a c=a;\n"
      "const f = fun a|->b b|->a;\n"
      "const p = tt;\n";
  Interpretation m = parse_model(text, thy, files({}));
  Evaluator ev(m);
  CHECK(ev.satisfies(parse_term("f(f(c)) = c", thy.signature)));
  CHECK_FALSE(ev.satisfies(parse_term("f(c) = c", thy.signature)));
  CHECK(ev.satisfies(parse_term("p", thy.signature)));
  // #k picks global sections in order
  std::string alt = std::string(text);
  alt.replace(alt.find("const c = g=a c=a;"), 18, "const c = #1;");
  Interpretation m2 = parse_model(alt, thy, files({}));
  CHECK(m2.constants["c"] == ev.interpret_type(Type::basic("X")).global_sections()[1]);
  // printed models parse back to the same data
  Interpretation back = parse_model(print_model(m), thy, files({}));
  CHECK(back.constants == m.constants);
  CHECK(back.types.at("X") == m.types.at("X"));
  CHECK(back.base == m.base);
  // mixed-point section: not global on Sierpinski? a at g, b at c restricts b|->b, so not a section
  std::string broken = std::string(text);
  broken.replace(broken.find("const c = g=a c=a;"), 18, "const c = g=a c=b;");
  CHECK(error_of([&] { parse_model(broken, thy, files({})); }).find("not a global section") != std::string::npos);
  CHECK(error_of([&] { parse_model("points: a; opens: {} {a}; stalk X a: x; const c = x; const f = fun x|->x; const p = tt;", thy, files({})); })
            .find("flavor") != std::string::npos);
}

TEST_CASE("relations in lambda models") {
  Theory thy = parse_theory("%mode lambda\ntype X; rel R : (X, X); rel q : ();");
  const char* text =
      "flavor omega;\n"
      "points: g c;\n"
      "opens: {} {g} {g c};\n"
      "stalk X g: a b;\n"
      "stalk X c: a;\n"
      "trans X c->g: a|->a;\n"
      "rel R = <a,a> g:<b,b>;\n"
      "rel q = g:*;\n";
  Interpretation m = parse_model(text, thy, files({}));
  CHECK(m.relations.at("R").count() == 3);
  CHECK(m.relations.at("q").count() == 1);
  Evaluator ev(m);
  CHECK(ev.satisfies(parse_formula("forall x:X. R(x, x)", thy.signature)));
  CHECK_FALSE(ev.satisfies(parse_formula("q", thy.signature)));
  Interpretation back = parse_model(print_model(m), thy, files({}));
  CHECK(back.relations.at("R") == m.relations.at("R"));
  CHECK(back.relations.at("q") == m.relations.at("q"));
  // not closed under restriction
  std::string open_only = text;
  open_only.replace(open_only.find("rel q = g:*;"), 12, "rel q = c:*;");
  CHECK_THROWS_AS(parse_model(open_only, thy, files({})), Error);
}

TEST_CASE("random models round trip") {
  std::mt19937_64 rng(8);
  Theory thy = parse_theory("type X; type Y; const c : X; const g : Y^X; const p : 2^X;");
  Theory lam = parse_theory("%mode lambda\ntype X; const c : X; rel R : (X, X); rel q : ();");
  int done = 0;
  for (int k = 0; k < 40; ++k) {
    auto spaces = topologies_up_to_homeomorphism(1 + static_cast<int>(rng() % 3));
    FinSpace x = spaces[rng() % spaces.size()];
    const Theory& t = k % 2 ? thy : lam;
    Flavor fl = k % 4 == 1 ? Flavor::Classical : Flavor::Omega;
    Interpretation m;
    try {
      m = random_interpretation(t, x, fl, 2, rng);
    } catch (const Error&) {
      continue;
    }
    Interpretation back = parse_model(print_model(m), t, files({}));
    CHECK(back.flavor == m.flavor);
    CHECK(back.constants == m.constants);
    CHECK(back.types == m.types);
    for (const auto& [n, s] : m.relations) CHECK(back.relations.at(n) == s);
    ++done;
  }
  CHECK(done > 30);
}

TEST_CASE("referenced files") {
  Theory thy = parse_theory("type X;");
  Resolve r = files({{"s.space", kSierpinski},
                     {"x.sheaf", "space: s.space; stalk g: a; stalk c: a; trans c->g: a|->a;"},
                     {"other.sheaf", "points: g c; opens: {} {c} {g c}; stalk g: a; stalk c: a; trans g->c: a|->a;"}});
  Interpretation m = parse_model("flavor omega; space: s.space; sheaf X = x.sheaf;", thy, r);
  CHECK(m.types.at("X").stalk_size(0) == 1);
  std::string e = error_of([&] { parse_model("flavor omega; space: s.space;\nsheaf X = other.sheaf;", thy, r); });
  CHECK(e.find(":2:") != std::string::npos);
  CHECK(e.find("different space") != std::string::npos);
}

TEST_CASE("morphisms") {
  Theory thy = parse_theory("type X;");
  Interpretation m = parse_model(
      "flavor classical-c; points: g c; opens: {} {g} {g c};"
      "stalk X g: a b; stalk X c: a b; trans X c->g: a|->a b|->b;",
      thy, files({}));
  Evaluator ev(m);
  MorphismFile f = parse_morphism("source: X; target: X*X;\nmap g: a|-><a,a> b|-><b,b>;\nmap c: a|-><a,a> b|-><b,b>;", ev);
  CHECK(f.map.is_natural());
  MorphismFile back = parse_morphism(print_morphism(f), ev);
  CHECK(back.map == f.map);
  CHECK(back.target == f.target);
  // swapping at c only breaks naturality
  CHECK_THROWS_AS(parse_morphism("source: X; target: X; map g: a|->a b|->b; map c: a|->b b|->a;", ev), Error);
  CHECK_THROWS_AS(parse_morphism("source: X; target: X; map g: a|->a;", ev), Error);
}
