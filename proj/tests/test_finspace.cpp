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

#include <set>

#include "doctest.h"
#include "tlw/finspace.hpp"

using namespace tlw;

namespace {

// Closure of a family under pairwise union and intersection, from scratch.
std::set<PointSet> close_family(int n, const std::vector<PointSet>& sub) {
  std::set<PointSet> fam{0, bit(n) - 1};
  // finite intersections of subbasis members first
  for (PointSet s : sub) fam.insert(s);
  bool grew = true;
  while (grew) {
    grew = false;
    std::vector<PointSet> cur(fam.begin(), fam.end());
    for (PointSet a : cur)
      for (PointSet b : cur) {
        grew |= fam.insert(a | b).second;
        grew |= fam.insert(a & b).second;
      }
  }
  return fam;
}

std::set<PointSet> as_set(const std::vector<PointSet>& v) { return {v.begin(), v.end()}; }

}  // namespace

TEST_CASE("subbasis examples") {
  FinSpace s = FinSpace::from_subbasis({"g", "c"}, {bit(0)});
  CHECK(as_set(s.opens()) == std::set<PointSet>{0, 1, 3});
  CHECK(s.min_open(0) == bit(0));
  CHECK(s.min_open(1) == 3);
  CHECK(s.leq(1, 0));
  CHECK_FALSE(s.leq(0, 1));

  FinSpace d = FinSpace::from_subbasis({"0", "1"}, {bit(0), bit(1)});
  CHECK(d.opens().size() == 4);
  CHECK(d.is_discrete());
  CHECK(d.min_open(0) == bit(0));

  FinSpace i = FinSpace::from_subbasis({"0", "1", "2"}, {});
  CHECK(as_set(i.opens()) == std::set<PointSet>{0, 7});

  CHECK_THROWS_AS(FinSpace::from_subbasis({"a"}, {bit(3)}), Error);
  try {
    FinSpace::from_subbasis({"a"}, {bit(3)});
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::MemberOutOfRange);
  }
}

TEST_CASE("open family validation") {
  CHECK_NOTHROW(FinSpace({"a", "b"}, {0, 1, 3}));
  CHECK_THROWS(FinSpace({"a", "b"}, {1, 3}));     // no empty set
  CHECK_THROWS(FinSpace({"a", "b"}, {0, 1}));     // no full set
  CHECK_THROWS(FinSpace({"a", "b", "c"}, {0, 1, 2, 7}));  // union {a,b} missing
  CHECK_THROWS(FinSpace({"a", "a"}, {0, 3}));
}

TEST_CASE("specialization of the Sierpinski space") {
  FinSpace s = FinSpace::sierpinski();
  auto rel = s.specialization();
  CHECK(rel[1][0]);
  CHECK(rel[0][0]);
  CHECK(rel[1][1]);
  CHECK_FALSE(rel[0][1]);
  // up-closure oracle: every open is an up-set and every up-set is open
  for (PointSet u = 0; u < 4; ++u) {
    bool up = true;
    for (int p : members(u))
      for (int q = 0; q < 2; ++q)
        if (rel[p][q] && !has(u, q)) up = false;
    CHECK(up == as_set(s.opens()).count(u));
  }
  auto d = FinSpace::discrete(3).specialization();
  for (int p = 0; p < 3; ++p)
    for (int q = 0; q < 3; ++q) CHECK(d[p][q] == (p == q));
  auto ind = FinSpace::indiscrete(2).specialization();
  CHECK((ind[0][1] && ind[1][0]));
}

TEST_CASE("continuity") {
  FinSpace s = FinSpace::sierpinski();
  CHECK(is_continuous({0, 1}, s, s));
  CHECK_FALSE(is_continuous({1, 0}, s, s));
  CHECK(is_continuous({1, 1}, s, s));
  CHECK(is_continuous({0, 0}, s, s));
  // brute-force preimage oracle over all maps between all 2- and 3-point spaces
  for (const auto& x : all_topologies(2))
    for (const auto& y : all_topologies(3))
      for (int code = 0; code < 9; ++code) {
        std::vector<int> f{code % 3, code / 3};
        bool cont = true;
        for (PointSet o : y.opens()) {
          PointSet pre = 0;
          for (int p = 0; p < 2; ++p)
            if (has(o, f[p])) pre |= bit(p);
          if (!as_set(x.opens()).count(pre)) cont = false;
        }
        CHECK(is_continuous(f, x, y) == cont);
      }
}

TEST_CASE("topology counts") {
  // labelled topologies on n points: 1, 1, 4, 29, 355
  CHECK(all_topologies(1).size() == 1);
  CHECK(all_topologies(2).size() == 4);
  CHECK(all_topologies(3).size() == 29);
  CHECK(all_topologies(4).size() == 355);
  // up to homeomorphism: 1, 3, 9, 33
  CHECK(topologies_up_to_homeomorphism(2).size() == 3);
  CHECK(topologies_up_to_homeomorphism(3).size() == 9);
  CHECK(topologies_up_to_homeomorphism(4).size() == 33);
}

TEST_CASE("properties over all spaces with at most four points") {
  for (int n = 1; n <= 4; ++n)
    for (const auto& x : all_topologies(n)) {
      // closure of the opens computed independently
      std::set<PointSet> opens = as_set(x.opens());
      CHECK(close_family(n, x.opens()) == opens);
      // idempotence of from_subbasis
      FinSpace again = FinSpace::from_subbasis(x.names(), x.opens());
      CHECK(again.same_topology(x));
      // opens are the up-sets
      for (PointSet u = 0; u < bit(n); ++u) {
        bool up = true;
        for (int p : members(u))
          for (int q = 0; q < n; ++q)
            if (x.leq(p, q) && !has(u, q)) up = false;
        CHECK(up == static_cast<bool>(opens.count(u)));
      }
      // components: via clopen sets vs equivalence closure of the preorder
      std::vector<int> comp_ids = x.component_ids();
      for (int p = 0; p < n; ++p)
        for (int q = 0; q < n; ++q) {
          // p, q in the same component iff no clopen separates them
          bool separated = false;
          for (PointSet o : opens)
            if (opens.count(x.full() & ~o) && has(o, p) != has(o, q)) separated = true;
          CHECK((comp_ids[p] == comp_ids[q]) == !separated);
        }
      // min_open is the intersection of all opens containing p
      for (int p = 0; p < n; ++p) {
        PointSet m = x.full();
        for (PointSet o : opens)
          if (has(o, p)) m &= o;
        CHECK(m == x.min_open(p));
      }
    }
}

TEST_CASE("homeomorphism") {
  FinSpace a = FinSpace::from_subbasis({"x", "y"}, {bit(0)});
  FinSpace b = FinSpace::from_subbasis({"x", "y"}, {bit(1)});
  CHECK(homeomorphic(a, b));
  CHECK_FALSE(a.same_topology(b));
  CHECK_FALSE(homeomorphic(a, FinSpace::discrete(2)));
}

TEST_CASE("size cap") {
  CHECK(max_points() >= 1);
  CHECK_NOTHROW(check_point_cap(max_points()));
  CHECK_THROWS_AS(check_point_cap(max_points() + 1), Error);
}

TEST_CASE("file form") {
  CHECK(FinSpace::sierpinski().str() == "points: g c; opens: {} {g} {g c};");
}
