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

#include "tlw/finspace.hpp"

#include <algorithm>
#include <bit>
#include <cstdlib>
#include <mutex>
#include <numeric>
#include <set>

namespace tlw {

int popcount(PointSet s) { return std::popcount(s); }

std::vector<int> members(PointSet s) {
  std::vector<int> out;
  while (s) {
    int p = std::countr_zero(s);
    out.push_back(p);
    s &= s - 1;
  }
  return out;
}

int max_points() {
  if (const char* env = std::getenv("TLW_MAX_POINTS")) {
    int v = std::atoi(env);
    if (v > 0 && v <= 64) return v;
  }
  return 6;
}

void check_point_cap(int n) {
  if (n > max_points())
    fail(ErrorKind::SizeLimit, "space has " + std::to_string(n) + " points, limit is " +
                                   std::to_string(max_points()) + " (set TLW_MAX_POINTS)");
}

std::vector<std::string> default_point_names(int n) {
  std::vector<std::string> names;
  for (int i = 0; i < n; ++i) names.push_back(std::to_string(i));
  return names;
}

struct FinSpace::Cache {
  std::once_flag once;
  std::vector<PointSet> opens;
};

namespace {

void check_names(const std::vector<std::string>& names) {
  if (names.size() > 64) fail(ErrorKind::SizeLimit, "at most 64 points are supported");
  std::set<std::string> seen;
  for (const auto& n : names)
    if (!seen.insert(n).second) fail(ErrorKind::DuplicateName, "point '" + n + "' repeated");
}

}  // namespace

FinSpace::FinSpace() : FinSpace(std::vector<std::string>{"*"}, {0, 1}) {}

FinSpace FinSpace::from_min_opens(std::vector<std::string> names, std::vector<PointSet> min_opens) {
  check_names(names);
  if (names.size() != min_opens.size()) fail(ErrorKind::InvalidSpace, "one minimal open per point");
  FinSpace s;
  s.names_ = std::move(names);
  s.min_open_ = std::move(min_opens);
  s.cache_ = std::make_shared<Cache>();
  const PointSet full = s.full();
  for (int p = 0; p < s.size(); ++p) {
    PointSet m = s.min_open_[p];
    if (m & ~full) fail(ErrorKind::MemberOutOfRange, "minimal open mentions an unknown point");
    if (!has(m, p)) fail(ErrorKind::InvalidSpace, "minimal open of a point must contain it");
    for (int q : members(m))
      if ((s.min_open_[q] & ~m) != 0) fail(ErrorKind::InvalidSpace, "minimal opens are not transitive");
  }
  return s;
}

FinSpace::FinSpace(std::vector<std::string> names, const std::vector<PointSet>& opens) {
  check_names(names);
  names_ = std::move(names);
  const int n = static_cast<int>(names_.size());
  const PointSet full = n == 64 ? ~PointSet{0} : bit(n) - 1;
  std::set<PointSet> family(opens.begin(), opens.end());
  for (PointSet o : family)
    if (o & ~full) fail(ErrorKind::MemberOutOfRange, "open set mentions an unknown point");
  if (!family.count(0)) fail(ErrorKind::InvalidSpace, "the empty set must be open");
  if (!family.count(full)) fail(ErrorKind::InvalidSpace, "the whole space must be open");
  for (PointSet a : family)
    for (PointSet b : family) {
      if (!family.count(a | b)) fail(ErrorKind::InvalidSpace, "opens not closed under union");
      if (!family.count(a & b)) fail(ErrorKind::InvalidSpace, "opens not closed under intersection");
    }
  min_open_.assign(n, full);
  for (PointSet o : family)
    for (int p : members(o)) min_open_[p] &= o;
  cache_ = std::make_shared<Cache>();
}

FinSpace FinSpace::from_subbasis(std::vector<std::string> names, const std::vector<PointSet>& subbasis) {
  check_names(names);
  const int n = static_cast<int>(names.size());
  const PointSet full = n == 64 ? ~PointSet{0} : bit(n) - 1;
  std::vector<PointSet> mins(n, full);
  for (PointSet s : subbasis) {
    if (s & ~full) fail(ErrorKind::MemberOutOfRange, "subbasis set mentions an unknown point");
    for (int p : members(s)) mins[p] &= s;
  }
  return from_min_opens(std::move(names), std::move(mins));
}

FinSpace FinSpace::discrete(int n) {
  std::vector<PointSet> mins;
  for (int p = 0; p < n; ++p) mins.push_back(bit(p));
  return from_min_opens(default_point_names(n), mins);
}

FinSpace FinSpace::indiscrete(int n) {
  PointSet full = bit(n) - 1;
  return from_min_opens(default_point_names(n), std::vector<PointSet>(n, full));
}

FinSpace FinSpace::sierpinski() { return from_subbasis({"g", "c"}, {bit(0)}); }

std::optional<int> FinSpace::index_of(const std::string& name) const {
  for (int p = 0; p < size(); ++p)
    if (names_[p] == name) return p;
  return std::nullopt;
}

std::vector<std::vector<bool>> FinSpace::specialization() const {
  std::vector<std::vector<bool>> rel(size(), std::vector<bool>(size(), false));
  for (int p = 0; p < size(); ++p)
    for (int q = 0; q < size(); ++q) rel[p][q] = leq(p, q);
  return rel;
}

bool FinSpace::is_open(PointSet s) const {
  if (s & ~full()) return false;
  for (int p : members(s))
    if ((min_open_[p] & ~s) != 0) return false;
  return true;
}

PointSet FinSpace::interior(PointSet s) const {
  PointSet out = 0;
  for (int p : members(s & full()))
    if ((min_open_[p] & ~s) == 0) out |= bit(p);
  return out;
}

PointSet FinSpace::up_closure(PointSet s) const {
  PointSet out = 0;
  for (int p : members(s & full())) out |= min_open_[p];
  return out;
}

const std::vector<PointSet>& FinSpace::opens() const {
  std::call_once(cache_->once, [this] {
    std::set<PointSet> seen{0};
    std::vector<PointSet> frontier{0};
    while (!frontier.empty()) {
      PointSet o = frontier.back();
      frontier.pop_back();
      for (int p = 0; p < size(); ++p) {
        PointSet next = o | min_open_[p];
        if (seen.insert(next).second) {
          if (seen.size() > (std::size_t{1} << 22))
            fail(ErrorKind::SizeLimit, "too many open sets to enumerate");
          frontier.push_back(next);
        }
      }
    }
    cache_->opens.assign(seen.begin(), seen.end());
  });
  return cache_->opens;
}

std::vector<int> FinSpace::component_ids() const {
  std::vector<int> parent(size());
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (int p = 0; p < size(); ++p)
    for (int q : members(min_open_[p])) {
      int a = find(p), b = find(q);
      if (a != b) parent[std::max(a, b)] = std::min(a, b);
    }
  std::vector<int> ids(size());
  std::vector<int> canon(size(), -1);
  int next = 0;
  for (int p = 0; p < size(); ++p) {
    int r = find(p);
    if (canon[r] < 0) canon[r] = next++;
    ids[p] = canon[r];
  }
  return ids;
}

int FinSpace::num_components() const {
  auto ids = component_ids();
  return ids.empty() ? 0 : *std::max_element(ids.begin(), ids.end()) + 1;
}

bool FinSpace::is_t0() const {
  for (int p = 0; p < size(); ++p)
    for (int q = p + 1; q < size(); ++q)
      if (equivalent(p, q)) return false;
  return true;
}

bool FinSpace::is_discrete() const {
  for (int p = 0; p < size(); ++p)
    if (min_open_[p] != bit(p)) return false;
  return true;
}

std::string FinSpace::str() const {
  std::string s = "points:";
  for (const auto& n : names_) s += " " + n;
  s += "; opens:";
  for (PointSet o : opens()) {
    s += " {";
    bool first = true;
    for (int p : members(o)) {
      s += (first ? "" : " ") + names_[p];
      first = false;
    }
    s += "}";
  }
  return s + ";";
}

bool is_continuous(const std::vector<int>& f, const FinSpace& x, const FinSpace& y) {
  if (static_cast<int>(f.size()) != x.size()) return false;
  for (int v : f)
    if (v < 0 || v >= y.size()) return false;
  // Continuity of maps between finite spaces is monotonicity for the
  // specialization preorders.
  for (int p = 0; p < x.size(); ++p)
    for (int q : members(x.min_open(p)))
      if (!y.leq(f[p], f[q])) return false;
  return true;
}

std::vector<FinSpace> all_topologies(int n) {
  std::vector<FinSpace> out;
  if (n == 0) {
    out.push_back(FinSpace::from_min_opens({}, {}));
    return out;
  }
  std::vector<PointSet> mins(n);
  const PointSet full = bit(n) - 1;
  std::vector<std::vector<PointSet>> choices(n);
  for (int p = 0; p < n; ++p)
    for (PointSet m = 0; m <= full; ++m)
      if (has(m, p)) choices[p].push_back(m);
  auto transitive = [&]() {
    for (int p = 0; p < n; ++p)
      for (int q : members(mins[p]))
        if (mins[q] & ~mins[p]) return false;
    return true;
  };
  std::vector<std::size_t> idx(n, 0);
  while (true) {
    for (int p = 0; p < n; ++p) mins[p] = choices[p][idx[p]];
    if (transitive()) out.push_back(FinSpace::from_min_opens(default_point_names(n), mins));
    int k = 0;
    while (k < n && ++idx[k] == choices[k].size()) idx[k++] = 0;
    if (k == n) break;
  }
  return out;
}

namespace {

std::vector<bool> relation_under(const FinSpace& s, const std::vector<int>& perm) {
  const int n = s.size();
  std::vector<bool> bits(n * n);
  for (int p = 0; p < n; ++p)
    for (int q = 0; q < n; ++q) bits[perm[p] * n + perm[q]] = s.leq(p, q);
  return bits;
}

std::vector<bool> canonical_key(const FinSpace& s) {
  std::vector<int> perm(s.size());
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<bool> best = relation_under(s, perm);
  while (std::next_permutation(perm.begin(), perm.end())) {
    auto key = relation_under(s, perm);
    if (key < best) best = key;
  }
  return best;
}

}  // namespace

bool homeomorphic(const FinSpace& a, const FinSpace& b) {
  if (a.size() != b.size()) return false;
  return canonical_key(a) == canonical_key(b);
}

std::vector<FinSpace> topologies_up_to_homeomorphism(int n) {
  std::vector<FinSpace> out;
  std::set<std::vector<bool>> seen;
  for (auto& t : all_topologies(n))
    if (seen.insert(canonical_key(t)).second) out.push_back(t);
  return out;
}

}  // namespace tlw
