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

#include "tlw/sheaf.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <sstream>

namespace tlw {

struct Sheaf::Impl {
  FinSpace base;
  std::vector<std::vector<std::string>> labels;
  std::vector<std::vector<Table>> trans;  // trans[p][q], p <= q
};

namespace {

std::string element_name(int k) {
  if (k < 26) return std::string(1, static_cast<char>('a' + k));
  return "e" + std::to_string(k);
}

// Points of u, most specialized (smallest minimal open) first.
std::vector<int> top_down_order(const FinSpace& x, PointSet u) {
  std::vector<int> pts = members(u);
  std::stable_sort(pts.begin(), pts.end(), [&](int a, int b) {
    return popcount(x.min_open(a)) < popcount(x.min_open(b));
  });
  return pts;
}

}  // namespace

//------------------------------------------------------------------------------
// Sheaf

Sheaf::Sheaf() : Sheaf(initial(FinSpace())) {}

Sheaf Sheaf::make_full(FinSpace base, std::vector<std::vector<std::string>> labels,
                       std::vector<std::vector<Table>> trans, bool validate) {
  const int n = base.size();
  if (static_cast<int>(labels.size()) != n || static_cast<int>(trans.size()) != n)
    fail(ErrorKind::InvalidSheaf, "one stalk per point of the base");
  if (validate) {
    for (int p = 0; p < n; ++p) {
      if (static_cast<int>(trans[p].size()) != n) fail(ErrorKind::InvalidSheaf, "transition matrix shape");
      for (int q = 0; q < n; ++q) {
        if (!base.leq(p, q)) continue;
        const Table& t = trans[p][q];
        if (t.size() != labels[p].size())
          fail(ErrorKind::InvalidSheaf, "missing or partial transition " + base.name(p) + "->" + base.name(q));
        for (int v : t)
          if (v < 0 || v >= static_cast<int>(labels[q].size()))
            fail(ErrorKind::InvalidSheaf, "transition " + base.name(p) + "->" + base.name(q) + " leaves the stalk");
      }
      for (std::size_t a = 0; a < labels[p].size(); ++a)
        if (trans[p][p][a] != static_cast<int>(a))
          fail(ErrorKind::InvalidSheaf, "transition at " + base.name(p) + " is not the identity");
    }
    for (int p = 0; p < n; ++p)
      for (int q : members(base.min_open(p)))
        for (int r : members(base.min_open(q)))
          for (std::size_t a = 0; a < labels[p].size(); ++a)
            if (trans[q][r][trans[p][q][a]] != trans[p][r][a])
              fail(ErrorKind::InvalidSheaf, "transitions " + base.name(p) + "->" + base.name(q) + "->" +
                                                base.name(r) + " do not compose");
  }
  auto impl = std::make_shared<Impl>();
  impl->base = std::move(base);
  impl->labels = std::move(labels);
  impl->trans = std::move(trans);
  return Sheaf(std::move(impl));
}

Sheaf Sheaf::make(FinSpace base, std::vector<std::vector<std::string>> labels,
                  const std::map<std::pair<int, int>, Table>& edges) {
  const int n = base.size();
  if (static_cast<int>(labels.size()) != n) fail(ErrorKind::InvalidSheaf, "one stalk per point of the base");
  std::vector<std::vector<Table>> trans(n, std::vector<Table>(n));
  std::vector<std::vector<bool>> known(n, std::vector<bool>(n, false));
  for (int p = 0; p < n; ++p) {
    trans[p][p].resize(labels[p].size());
    std::iota(trans[p][p].begin(), trans[p][p].end(), 0);
    known[p][p] = true;
  }
  for (const auto& [edge, table] : edges) {
    auto [p, q] = edge;
    if (p < 0 || q < 0 || p >= n || q >= n) fail(ErrorKind::MemberOutOfRange, "transition between unknown points");
    if (!base.leq(p, q))
      fail(ErrorKind::InvalidSheaf, "no specialization " + base.name(p) + " <= " + base.name(q));
    if (table.size() != labels[p].size())
      fail(ErrorKind::InvalidSheaf, "transition " + base.name(p) + "->" + base.name(q) + " is not total");
    for (int v : table)
      if (v < 0 || v >= static_cast<int>(labels[q].size()))
        fail(ErrorKind::InvalidSheaf, "transition " + base.name(p) + "->" + base.name(q) + " leaves the stalk");
    if (p == q) {
      for (std::size_t a = 0; a < table.size(); ++a)
        if (table[a] != static_cast<int>(a)) fail(ErrorKind::InvalidSheaf, "self transition is not the identity");
      continue;
    }
    trans[p][q] = table;
    known[p][q] = true;
  }
  bool changed = true;
  while (changed) {
    changed = false;
    for (int p = 0; p < n; ++p)
      for (int q = 0; q < n; ++q) {
        if (!known[p][q]) continue;
        for (int r = 0; r < n; ++r) {
          if (known[p][r] || !known[q][r]) continue;
          Table t(labels[p].size());
          for (std::size_t a = 0; a < t.size(); ++a) t[a] = trans[q][r][trans[p][q][a]];
          trans[p][r] = std::move(t);
          known[p][r] = true;
          changed = true;
        }
      }
  }
  for (int p = 0; p < n; ++p)
    for (int q : members(base.min_open(p)))
      if (!known[p][q])
        fail(ErrorKind::InvalidSheaf, "missing transition " + base.name(p) + "->" + base.name(q));
  return make_full(std::move(base), std::move(labels), std::move(trans), true);
}

const FinSpace& Sheaf::base() const { return impl_->base; }
int Sheaf::stalk_size(int p) const { return static_cast<int>(impl_->labels[p].size()); }
const std::string& Sheaf::label(int p, int a) const { return impl_->labels[p][a]; }
const std::vector<std::string>& Sheaf::labels(int p) const { return impl_->labels[p]; }

std::optional<int> Sheaf::find_label(int p, const std::string& label) const {
  const auto& l = impl_->labels[p];
  auto it = std::find(l.begin(), l.end(), label);
  if (it == l.end()) return std::nullopt;
  return static_cast<int>(it - l.begin());
}

int Sheaf::total_size() const {
  int n = 0;
  for (const auto& l : impl_->labels) n += static_cast<int>(l.size());
  return n;
}

int Sheaf::trans(int p, int q, int a) const { return impl_->trans[p][q][a]; }
const Sheaf::Table& Sheaf::trans_table(int p, int q) const { return impl_->trans[p][q]; }

std::vector<std::vector<int>> Sheaf::sections(PointSet u) const {
  const FinSpace& x = base();
  if (!x.is_open(u)) fail(ErrorKind::InvalidSpace, "sections requested over a non-open set");
  std::vector<int> order = top_down_order(x, u);
  std::vector<std::vector<int>> out;
  std::vector<int> family(x.size(), -1);
  std::function<void(std::size_t)> go = [&](std::size_t k) {
    if (k == order.size()) {
      out.push_back(family);
      return;
    }
    int p = order[k];
    for (int a = 0; a < stalk_size(p); ++a) {
      bool ok = true;
      for (std::size_t j = 0; j < k && ok; ++j) {
        int q = order[j];
        if (x.leq(p, q) && trans(p, q, a) != family[q]) ok = false;
        if (x.leq(q, p) && trans(q, p, family[q]) != a) ok = false;
      }
      if (!ok) continue;
      family[p] = a;
      go(k + 1);
      family[p] = -1;
    }
  };
  go(0);
  std::sort(out.begin(), out.end());
  return out;
}

bool Sheaf::is_section(PointSet u, const std::vector<int>& family) const {
  const FinSpace& x = base();
  if (static_cast<int>(family.size()) != x.size()) return false;
  for (int p : members(u)) {
    if (family[p] < 0 || family[p] >= stalk_size(p)) return false;
    for (int q : members(x.min_open(p)))
      if (has(u, q) && trans(p, q, family[p]) != family[q]) return false;
  }
  return true;
}

bool Sheaf::transitions_injective() const {
  const FinSpace& x = base();
  for (int p = 0; p < x.size(); ++p)
    for (int q : members(x.min_open(p))) {
      std::vector<char> seen(stalk_size(q), 0);
      for (int a = 0; a < stalk_size(p); ++a) {
        int b = trans(p, q, a);
        if (seen[b]) return false;
        seen[b] = 1;
      }
    }
  return true;
}

std::string Sheaf::str() const {
  const FinSpace& x = base();
  std::ostringstream out;
  for (int p = 0; p < x.size(); ++p) {
    out << "stalk " << x.name(p) << ":";
    for (const auto& l : labels(p)) out << " " << l;
    out << ";\n";
  }
  for (int p = 0; p < x.size(); ++p)
    for (int q = 0; q < x.size(); ++q) {
      if (p == q || !x.leq(p, q)) continue;
      bool covering = x.equivalent(p, q);
      if (!covering) {
        covering = true;
        for (int r = 0; r < x.size(); ++r)
          if (!x.equivalent(r, p) && !x.equivalent(r, q) && x.leq(p, r) && x.leq(r, q)) covering = false;
      }
      if (!covering) continue;
      out << "trans " << x.name(p) << "->" << x.name(q) << ":";
      for (int a = 0; a < stalk_size(p); ++a) out << " " << label(p, a) << "|->" << label(q, trans(p, q, a));
      out << ";\n";
    }
  return out.str();
}

bool Sheaf::same_shape(const Sheaf& other) const {
  if (!base().same_topology(other.base())) return false;
  for (int p = 0; p < base().size(); ++p)
    if (stalk_size(p) != other.stalk_size(p)) return false;
  return impl_->trans == other.impl_->trans;
}

bool operator==(const Sheaf& a, const Sheaf& b) {
  if (a.impl_ == b.impl_) return true;
  return a.same_shape(b) && a.impl_->labels == b.impl_->labels;
}

//------------------------------------------------------------------------------
// Morphisms and subsheaves

SheafMorphism SheafMorphism::make(Sheaf source, Sheaf target, std::vector<std::vector<int>> comp) {
  if (!source.base().same_topology(target.base())) fail(ErrorKind::BaseMismatch, "morphism between different bases");
  const int n = source.base().size();
  if (static_cast<int>(comp.size()) != n) fail(ErrorKind::InvalidSheaf, "one component per point");
  for (int p = 0; p < n; ++p) {
    if (static_cast<int>(comp[p].size()) != source.stalk_size(p))
      fail(ErrorKind::InvalidSheaf, "component at " + source.base().name(p) + " is not total");
    for (int v : comp[p])
      if (v < 0 || v >= target.stalk_size(p))
        fail(ErrorKind::InvalidSheaf, "component at " + source.base().name(p) + " leaves the target");
  }
  SheafMorphism m{std::move(source), std::move(target), std::move(comp)};
  if (!m.is_natural()) fail(ErrorKind::InvalidSheaf, "components do not commute with transitions");
  return m;
}

bool SheafMorphism::is_natural() const {
  const FinSpace& x = source.base();
  for (int p = 0; p < x.size(); ++p)
    for (int q : members(x.min_open(p)))
      for (int a = 0; a < source.stalk_size(p); ++a)
        if (target.trans(p, q, comp[p][a]) != comp[q][source.trans(p, q, a)]) return false;
  return true;
}

Subsheaf Subsheaf::make(Sheaf parent, std::vector<std::vector<char>> in) {
  const int n = parent.base().size();
  if (static_cast<int>(in.size()) != n) fail(ErrorKind::InvalidSheaf, "one subset per point");
  for (int p = 0; p < n; ++p)
    if (static_cast<int>(in[p].size()) != parent.stalk_size(p))
      fail(ErrorKind::InvalidSheaf, "subset at " + parent.base().name(p) + " has the wrong size");
  Subsheaf s{std::move(parent), std::move(in)};
  if (!s.is_closed()) fail(ErrorKind::InvalidSheaf, "chosen subsets are not closed under transitions");
  return s;
}

Subsheaf Subsheaf::whole(const Sheaf& f) {
  Subsheaf s{f, {}};
  for (int p = 0; p < f.base().size(); ++p) s.in.emplace_back(f.stalk_size(p), 1);
  return s;
}

Subsheaf Subsheaf::none(const Sheaf& f) {
  Subsheaf s{f, {}};
  for (int p = 0; p < f.base().size(); ++p) s.in.emplace_back(f.stalk_size(p), 0);
  return s;
}

bool Subsheaf::is_closed() const {
  const FinSpace& x = parent.base();
  for (int p = 0; p < x.size(); ++p)
    for (int a = 0; a < parent.stalk_size(p); ++a) {
      if (!in[p][a]) continue;
      for (int q : members(x.min_open(p)))
        if (!in[q][parent.trans(p, q, a)]) return false;
    }
  return true;
}

bool Subsheaf::is_whole() const {
  for (const auto& v : in)
    for (char c : v)
      if (!c) return false;
  return true;
}

bool Subsheaf::is_empty() const {
  for (const auto& v : in)
    for (char c : v)
      if (c) return false;
  return true;
}

bool Subsheaf::leq(const Subsheaf& other) const {
  for (std::size_t p = 0; p < in.size(); ++p)
    for (std::size_t a = 0; a < in[p].size(); ++a)
      if (in[p][a] && !other.in[p][a]) return false;
  return true;
}

int Subsheaf::count() const {
  int n = 0;
  for (const auto& v : in)
    for (char c : v) n += c ? 1 : 0;
  return n;
}

//------------------------------------------------------------------------------
// Basic sheaves

namespace {

std::vector<std::vector<Sheaf::Table>> identity_trans(const FinSpace& x, const std::vector<int>& sizes) {
  const int n = x.size();
  std::vector<std::vector<Sheaf::Table>> trans(n, std::vector<Sheaf::Table>(n));
  for (int p = 0; p < n; ++p)
    for (int q : members(x.min_open(p))) {
      if (sizes[p] != sizes[q]) fail(ErrorKind::InvalidSheaf, "constant sheaf with varying stalks");
      trans[p][q].resize(sizes[p]);
      std::iota(trans[p][q].begin(), trans[p][q].end(), 0);
    }
  return trans;
}

void check_same_base(const Sheaf& f, const Sheaf& g) {
  if (!f.base().same_topology(g.base())) fail(ErrorKind::BaseMismatch, "sheaves over different bases");
}

}  // namespace

Sheaf constant_sheaf(const FinSpace& x, const std::vector<std::string>& labels) {
  std::vector<std::vector<std::string>> l(x.size(), labels);
  std::vector<int> sizes(x.size(), static_cast<int>(labels.size()));
  return Sheaf::make_full(x, std::move(l), identity_trans(x, sizes), false);
}

Sheaf terminal(const FinSpace& x) { return constant_sheaf(x, {"*"}); }
Sheaf initial(const FinSpace& x) { return constant_sheaf(x, {}); }
Sheaf two(const FinSpace& x) { return constant_sheaf(x, {"tt", "ff"}); }

SheafMorphism identity(const Sheaf& f) {
  std::vector<std::vector<int>> comp;
  for (int p = 0; p < f.base().size(); ++p) {
    comp.emplace_back(f.stalk_size(p));
    std::iota(comp.back().begin(), comp.back().end(), 0);
  }
  return SheafMorphism{f, f, std::move(comp)};
}

SheafMorphism compose(const SheafMorphism& g, const SheafMorphism& f) {
  check_same_base(f.target, g.source);
  std::vector<std::vector<int>> comp(f.comp.size());
  for (std::size_t p = 0; p < comp.size(); ++p)
    for (int v : f.comp[p]) comp[p].push_back(g.comp[p][v]);
  return SheafMorphism{f.source, g.target, std::move(comp)};
}

SheafMorphism to_terminal(const Sheaf& f) {
  std::vector<std::vector<int>> comp;
  for (int p = 0; p < f.base().size(); ++p) comp.emplace_back(f.stalk_size(p), 0);
  return SheafMorphism{f, terminal(f.base()), std::move(comp)};
}

SheafMorphism point_morphism(const Sheaf& f, const std::vector<int>& section) {
  if (!f.is_section(f.base().full(), section)) fail(ErrorKind::InvalidSheaf, "not a global section");
  std::vector<std::vector<int>> comp;
  for (int p = 0; p < f.base().size(); ++p) comp.push_back({section[p]});
  return SheafMorphism{terminal(f.base()), f, std::move(comp)};
}

//------------------------------------------------------------------------------
// Products, coproducts, equalizers

Sheaf product(const Sheaf& f, const Sheaf& g) {
  check_same_base(f, g);
  const FinSpace& x = f.base();
  const int n = x.size();
  std::vector<std::vector<std::string>> labels(n);
  std::vector<std::vector<Sheaf::Table>> trans(n, std::vector<Sheaf::Table>(n));
  for (int p = 0; p < n; ++p) {
    for (int a = 0; a < f.stalk_size(p); ++a)
      for (int b = 0; b < g.stalk_size(p); ++b) labels[p].push_back("<" + f.label(p, a) + "," + g.label(p, b) + ">");
    for (int q : members(x.min_open(p))) {
      auto& t = trans[p][q];
      t.reserve(labels[p].size());
      for (int a = 0; a < f.stalk_size(p); ++a)
        for (int b = 0; b < g.stalk_size(p); ++b)
          t.push_back(f.trans(p, q, a) * g.stalk_size(q) + g.trans(p, q, b));
    }
  }
  return Sheaf::make_full(x, std::move(labels), std::move(trans), false);
}

SheafMorphism proj1(const Sheaf& f, const Sheaf& g) {
  Sheaf fg = product(f, g);
  std::vector<std::vector<int>> comp(f.base().size());
  for (int p = 0; p < f.base().size(); ++p)
    for (int a = 0; a < f.stalk_size(p); ++a)
      for (int b = 0; b < g.stalk_size(p); ++b) comp[p].push_back(a);
  return SheafMorphism{fg, f, std::move(comp)};
}

SheafMorphism proj2(const Sheaf& f, const Sheaf& g) {
  Sheaf fg = product(f, g);
  std::vector<std::vector<int>> comp(f.base().size());
  for (int p = 0; p < f.base().size(); ++p)
    for (int a = 0; a < f.stalk_size(p); ++a)
      for (int b = 0; b < g.stalk_size(p); ++b) comp[p].push_back(b);
  return SheafMorphism{fg, g, std::move(comp)};
}

SheafMorphism pairing(const SheafMorphism& f, const SheafMorphism& g) {
  check_same_base(f.source, g.source);
  std::vector<std::vector<int>> comp(f.comp.size());
  for (std::size_t p = 0; p < comp.size(); ++p)
    for (std::size_t a = 0; a < f.comp[p].size(); ++a)
      comp[p].push_back(pair_index(g.target, static_cast<int>(p), f.comp[p][a], g.comp[p][a]));
  return SheafMorphism{f.source, product(f.target, g.target), std::move(comp)};
}

Sheaf coproduct(const Sheaf& f, const Sheaf& g) {
  check_same_base(f, g);
  const FinSpace& x = f.base();
  const int n = x.size();
  std::vector<std::vector<std::string>> labels(n);
  std::vector<std::vector<Sheaf::Table>> trans(n, std::vector<Sheaf::Table>(n));
  for (int p = 0; p < n; ++p) {
    for (int a = 0; a < f.stalk_size(p); ++a) labels[p].push_back("in1(" + f.label(p, a) + ")");
    for (int b = 0; b < g.stalk_size(p); ++b) labels[p].push_back("in2(" + g.label(p, b) + ")");
    for (int q : members(x.min_open(p))) {
      auto& t = trans[p][q];
      for (int a = 0; a < f.stalk_size(p); ++a) t.push_back(f.trans(p, q, a));
      for (int b = 0; b < g.stalk_size(p); ++b) t.push_back(f.stalk_size(q) + g.trans(p, q, b));
    }
  }
  return Sheaf::make_full(x, std::move(labels), std::move(trans), false);
}

SheafMorphism inj1(const Sheaf& f, const Sheaf& g) {
  std::vector<std::vector<int>> comp(f.base().size());
  for (int p = 0; p < f.base().size(); ++p)
    for (int a = 0; a < f.stalk_size(p); ++a) comp[p].push_back(a);
  return SheafMorphism{f, coproduct(f, g), std::move(comp)};
}

SheafMorphism inj2(const Sheaf& f, const Sheaf& g) {
  std::vector<std::vector<int>> comp(f.base().size());
  for (int p = 0; p < f.base().size(); ++p)
    for (int b = 0; b < g.stalk_size(p); ++b) comp[p].push_back(f.stalk_size(p) + b);
  return SheafMorphism{g, coproduct(f, g), std::move(comp)};
}

SheafMorphism copairing(const SheafMorphism& f, const SheafMorphism& g) {
  check_same_base(f.target, g.target);
  std::vector<std::vector<int>> comp(f.comp.size());
  for (std::size_t p = 0; p < comp.size(); ++p) {
    comp[p] = f.comp[p];
    comp[p].insert(comp[p].end(), g.comp[p].begin(), g.comp[p].end());
  }
  return SheafMorphism{coproduct(f.source, g.source), f.target, std::move(comp)};
}

SubObject as_subobject(const Subsheaf& s) {
  const Sheaf& f = s.parent;
  const FinSpace& x = f.base();
  const int n = x.size();
  std::vector<std::vector<int>> keep(n), pos(n);
  std::vector<std::vector<std::string>> labels(n);
  for (int p = 0; p < n; ++p) {
    pos[p].assign(f.stalk_size(p), -1);
    for (int a = 0; a < f.stalk_size(p); ++a)
      if (s.contains(p, a)) {
        pos[p][a] = static_cast<int>(keep[p].size());
        keep[p].push_back(a);
        labels[p].push_back(f.label(p, a));
      }
  }
  std::vector<std::vector<Sheaf::Table>> trans(n, std::vector<Sheaf::Table>(n));
  for (int p = 0; p < n; ++p)
    for (int q : members(x.min_open(p)))
      for (int a : keep[p]) trans[p][q].push_back(pos[q][f.trans(p, q, a)]);
  Sheaf sub = Sheaf::make_full(x, std::move(labels), std::move(trans), false);
  return SubObject{sub, SheafMorphism{sub, f, keep}};
}

SubObject equalizer(const SheafMorphism& f, const SheafMorphism& g) {
  check_same_base(f.source, g.source);
  Subsheaf s = Subsheaf::none(f.source);
  for (std::size_t p = 0; p < f.comp.size(); ++p)
    for (std::size_t a = 0; a < f.comp[p].size(); ++a) s.in[p][a] = f.comp[p][a] == g.comp[p][a];
  return as_subobject(s);
}

//------------------------------------------------------------------------------
// Morphism enumeration

namespace {

// Natural families h_q : G_q -> F_q for q in the up-set u.
class FamilySearch {
 public:
  FamilySearch(const Sheaf& g, const Sheaf& f, PointSet u, bool injective)
      : g_(g), f_(f), x_(g.base()), order_(top_down_order(g.base(), u)), injective_(injective),
        h_(g.base().size()) {
    for (int q : order_) h_[q].assign(g.stalk_size(q), -1);
  }

  std::size_t run(const std::function<bool(const std::vector<std::vector<int>>&)>& visit) {
    visit_ = &visit;
    count_ = 0;
    stop_ = false;
    for (int q : order_)
      if (injective_ && g_.stalk_size(q) > f_.stalk_size(q)) return 0;
    go(0, 0);
    return count_;
  }

 private:
  void go(std::size_t k, int b) {
    if (stop_) return;
    if (k == order_.size()) {
      ++count_;
      if (!(*visit_)(h_)) stop_ = true;
      return;
    }
    const int q = order_[k];
    if (b == g_.stalk_size(q)) {
      // equivalent points assigned earlier: check the reverse squares
      for (std::size_t j = 0; j < k; ++j) {
        int r = order_[j];
        if (!x_.leq(r, q)) continue;
        for (int c = 0; c < g_.stalk_size(r); ++c)
          if (h_[q][g_.trans(r, q, c)] != f_.trans(r, q, h_[r][c])) return;
      }
      go(k + 1, 0);
      return;
    }
    const int gb_size = f_.stalk_size(q);
    for (int v = 0; v < gb_size; ++v) {
      bool ok = true;
      if (injective_)
        for (int c = 0; c < b && ok; ++c) ok = h_[q][c] != v;
      for (std::size_t j = 0; j < k && ok; ++j) {
        int r = order_[j];
        if (r == q || !x_.leq(q, r)) continue;
        ok = f_.trans(q, r, v) == h_[r][g_.trans(q, r, b)];
      }
      if (!ok) continue;
      h_[q][b] = v;
      go(k, b + 1);
      h_[q][b] = -1;
      if (stop_) return;
    }
  }

  const Sheaf& g_;
  const Sheaf& f_;
  const FinSpace& x_;
  std::vector<int> order_;
  bool injective_;
  std::vector<std::vector<int>> h_;
  const std::function<bool(const std::vector<std::vector<int>>&)>* visit_ = nullptr;
  std::size_t count_ = 0;
  bool stop_ = false;
};

}  // namespace

std::size_t for_each_morphism(const Sheaf& src, const Sheaf& dst,
                              const std::function<bool(const SheafMorphism&)>& visit) {
  check_same_base(src, dst);
  FamilySearch search(src, dst, src.base().full(), false);
  return search.run([&](const std::vector<std::vector<int>>& h) { return visit(SheafMorphism{src, dst, h}); });
}

std::size_t count_morphisms(const Sheaf& src, const Sheaf& dst) {
  check_same_base(src, dst);
  FamilySearch search(src, dst, src.base().full(), false);
  return search.run([](const std::vector<std::vector<int>>&) { return true; });
}

std::optional<SheafMorphism> find_isomorphism(const Sheaf& f, const Sheaf& g) {
  if (!f.base().same_topology(g.base())) return std::nullopt;
  for (int p = 0; p < f.base().size(); ++p)
    if (f.stalk_size(p) != g.stalk_size(p)) return std::nullopt;
  std::optional<SheafMorphism> found;
  FamilySearch search(f, g, f.base().full(), true);
  search.run([&](const std::vector<std::vector<int>>& h) {
    found = SheafMorphism{f, g, h};
    return false;
  });
  return found;
}

//------------------------------------------------------------------------------
// Exponentials

std::optional<int> Exponential::index_of(int p, const std::vector<int>& table) const {
  auto it = index[p].find(table);
  if (it == index[p].end()) return std::nullopt;
  return it->second;
}

std::optional<std::vector<int>> function_section(const Exponential& e, const std::function<int(int, int)>& fn) {
  const FinSpace& x = e.sheaf.base();
  std::vector<int> section(x.size());
  std::vector<int> table;
  for (int p = 0; p < x.size(); ++p) {
    table.clear();
    for (int q : members(x.min_open(p)))
      for (int b = 0; b < e.argument.stalk_size(q); ++b) {
        int v = fn(q, b);
        if (v < 0 || v >= e.result.stalk_size(q)) return std::nullopt;
        table.push_back(v);
      }
    auto idx = e.index_of(p, table);
    if (!idx) return std::nullopt;
    section[p] = *idx;
  }
  return section;
}

Exponential exponential(const Sheaf& f, const Sheaf& g) {
  check_same_base(f, g);
  const FinSpace& x = f.base();
  const int n = x.size();
  Exponential e;
  e.result = f;
  e.argument = g;
  e.tables.resize(n);
  e.offset.assign(n, std::vector<int>(n, -1));
  e.index.resize(n);
  std::vector<std::vector<std::string>> labels(n);
  for (int p = 0; p < n; ++p) {
    const PointSet u = x.min_open(p);
    int off = 0;
    for (int q : members(u)) {
      e.offset[p][q] = off;
      off += g.stalk_size(q);
    }
    FamilySearch search(g, f, u, false);
    search.run([&](const std::vector<std::vector<int>>& h) {
      std::vector<int> flat;
      flat.reserve(off);
      for (int q : members(u)) flat.insert(flat.end(), h[q].begin(), h[q].end());
      e.tables[p].push_back(std::move(flat));
      if (e.tables[p].size() > 200000) fail(ErrorKind::SizeLimit, "exponential stalk too large");
      return true;
    });
    std::sort(e.tables[p].begin(), e.tables[p].end());
    for (std::size_t k = 0; k < e.tables[p].size(); ++k) {
      e.index[p].emplace(e.tables[p][k], static_cast<int>(k));
      std::string l = "[";
      bool first_pt = true;
      for (int q : members(u)) {
        l += (first_pt ? "" : "/") + x.name(q) + ":";
        first_pt = false;
        for (int b = 0; b < g.stalk_size(q); ++b)
          l += (b ? "," : "") + f.label(q, e.tables[p][k][e.offset[p][q] + b]);
      }
      labels[p].push_back(l + "]");
    }
  }
  std::vector<std::vector<Sheaf::Table>> trans(n, std::vector<Sheaf::Table>(n));
  for (int p = 0; p < n; ++p)
    for (int r : members(x.min_open(p))) {
      auto& t = trans[p][r];
      for (const auto& table : e.tables[p]) {
        std::vector<int> restricted;
        for (int q : members(x.min_open(r))) {
          auto begin = table.begin() + e.offset[p][q];
          restricted.insert(restricted.end(), begin, begin + g.stalk_size(q));
        }
        t.push_back(e.index[r].at(restricted));
      }
    }
  e.sheaf = Sheaf::make_full(x, std::move(labels), std::move(trans), false);
  return e;
}

SheafMorphism eval(const Exponential& e) {
  Sheaf src = product(e.sheaf, e.argument);
  std::vector<std::vector<int>> comp(src.base().size());
  for (int p = 0; p < src.base().size(); ++p)
    for (int h = 0; h < e.sheaf.stalk_size(p); ++h)
      for (int b = 0; b < e.argument.stalk_size(p); ++b) comp[p].push_back(e.apply(p, h, b));
  return SheafMorphism{src, e.result, std::move(comp)};
}

SheafMorphism transpose(const Exponential& e, const Sheaf& h_source, const SheafMorphism& h) {
  const FinSpace& x = e.sheaf.base();
  const Sheaf& g = e.argument;
  for (int p = 0; p < x.size(); ++p)
    if (static_cast<int>(h.comp[p].size()) != h_source.stalk_size(p) * g.stalk_size(p))
      fail(ErrorKind::BaseMismatch, "transpose expects a morphism out of H x G");
  std::vector<std::vector<int>> comp(x.size());
  for (int p = 0; p < x.size(); ++p)
    for (int c = 0; c < h_source.stalk_size(p); ++c) {
      std::vector<int> table;
      for (int q : members(x.min_open(p))) {
        int cq = h_source.trans(p, q, c);
        for (int b = 0; b < g.stalk_size(q); ++b) table.push_back(h.comp[q][pair_index(g, q, cq, b)]);
      }
      auto idx = e.index_of(p, table);
      if (!idx) fail(ErrorKind::InvalidSheaf, "transpose of a non-natural morphism");
      comp[p].push_back(*idx);
    }
  return SheafMorphism{h_source, e.sheaf, std::move(comp)};
}

//------------------------------------------------------------------------------
// Omega

int Omega::index_of(int p, PointSet v) const {
  const auto& vals = values[p];
  auto it = std::lower_bound(vals.begin(), vals.end(), v);
  if (it == vals.end() || *it != v) fail(ErrorKind::InvalidSheaf, "not an element of Omega");
  return static_cast<int>(it - vals.begin());
}

Omega omega(const FinSpace& x) {
  const int n = x.size();
  Omega om;
  om.values.resize(n);
  std::vector<std::vector<std::string>> labels(n);
  for (int p = 0; p < n; ++p) {
    const PointSet u = x.min_open(p);
    // submasks of u that are open
    for (PointSet v = u;; v = (v - 1) & u) {
      if (x.is_open(v)) om.values[p].push_back(v);
      if (v == 0) break;
    }
    std::sort(om.values[p].begin(), om.values[p].end());
    for (PointSet v : om.values[p]) {
      std::string l = "{";
      bool first = true;
      for (int q : members(v)) {
        l += (first ? "" : ",") + x.name(q);
        first = false;
      }
      labels[p].push_back(l + "}");
    }
  }
  std::vector<std::vector<Sheaf::Table>> trans(n, std::vector<Sheaf::Table>(n));
  for (int p = 0; p < n; ++p)
    for (int q : members(x.min_open(p)))
      for (PointSet v : om.values[p]) trans[p][q].push_back(om.index_of(q, v & x.min_open(q)));
  om.sheaf = Sheaf::make_full(x, std::move(labels), std::move(trans), false);
  return om;
}

SheafMorphism true_map(const Omega& om) {
  const FinSpace& x = om.sheaf.base();
  std::vector<std::vector<int>> comp;
  for (int p = 0; p < x.size(); ++p) comp.push_back({om.top(p)});
  return SheafMorphism{terminal(x), om.sheaf, std::move(comp)};
}

SheafMorphism truth_map(const Omega& om) {
  const FinSpace& x = om.sheaf.base();
  std::vector<std::vector<int>> comp;
  for (int p = 0; p < x.size(); ++p) comp.push_back({om.top(p), om.bottom(p)});
  return SheafMorphism{two(x), om.sheaf, std::move(comp)};
}

SheafMorphism classify(const Omega& om, const Subsheaf& s) {
  const Sheaf& f = s.parent;
  const FinSpace& x = f.base();
  std::vector<std::vector<int>> comp(x.size());
  for (int p = 0; p < x.size(); ++p)
    for (int a = 0; a < f.stalk_size(p); ++a) {
      PointSet v = 0;
      for (int q : members(x.min_open(p)))
        if (s.contains(q, f.trans(p, q, a))) v |= bit(q);
      comp[p].push_back(om.index_of(p, v));
    }
  return SheafMorphism{f, om.sheaf, std::move(comp)};
}

Subsheaf unclassify(const Omega& om, const SheafMorphism& chi) {
  Subsheaf s = Subsheaf::none(chi.source);
  for (int p = 0; p < chi.source.base().size(); ++p)
    for (int a = 0; a < chi.source.stalk_size(p); ++a) s.in[p][a] = chi.comp[p][a] == om.top(p);
  return s;
}

std::optional<Subsheaf> complement(const Subsheaf& s) {
  Subsheaf c = s;
  for (auto& v : c.in)
    for (char& b : v) b = !b;
  if (!c.is_closed()) return std::nullopt;
  return c;
}

Subsheaf diagonal(const Sheaf& f) {
  Sheaf ff = product(f, f);
  Subsheaf d = Subsheaf::none(ff);
  for (int p = 0; p < f.base().size(); ++p)
    for (int a = 0; a < f.stalk_size(p); ++a) d.in[p][pair_index(f, p, a, a)] = 1;
  return d;
}

bool is_decidable(const Sheaf& f) { return complement(diagonal(f)).has_value(); }

std::optional<SheafMorphism> bar_factor(const Omega& om, const SheafMorphism& phi) {
  Subsheaf s = unclassify(om, phi);
  if (!complement(s)) return std::nullopt;
  const FinSpace& x = phi.source.base();
  std::vector<std::vector<int>> comp(x.size());
  for (int p = 0; p < x.size(); ++p)
    for (int a = 0; a < phi.source.stalk_size(p); ++a) comp[p].push_back(s.contains(p, a) ? 0 : 1);
  SheafMorphism bar{phi.source, two(x), std::move(comp)};
  if (!(compose(truth_map(om), bar) == phi)) return std::nullopt;
  return bar;
}

//------------------------------------------------------------------------------
// Heyting operations and quantifiers

namespace {

void check_parent(const Subsheaf& s, const Subsheaf& t) {
  if (!s.parent.same_shape(t.parent)) fail(ErrorKind::ParentMismatch, "subsheaves of different sheaves");
}

}  // namespace

Subsheaf meet(const Subsheaf& s, const Subsheaf& t) {
  check_parent(s, t);
  Subsheaf r = s;
  for (std::size_t p = 0; p < r.in.size(); ++p)
    for (std::size_t a = 0; a < r.in[p].size(); ++a) r.in[p][a] = s.in[p][a] && t.in[p][a];
  return r;
}

Subsheaf join(const Subsheaf& s, const Subsheaf& t) {
  check_parent(s, t);
  Subsheaf r = s;
  for (std::size_t p = 0; p < r.in.size(); ++p)
    for (std::size_t a = 0; a < r.in[p].size(); ++a) r.in[p][a] = s.in[p][a] || t.in[p][a];
  return r;
}

Subsheaf implies(const Subsheaf& s, const Subsheaf& t) {
  check_parent(s, t);
  const Sheaf& f = s.parent;
  const FinSpace& x = f.base();
  Subsheaf r = Subsheaf::none(f);
  for (int p = 0; p < x.size(); ++p)
    for (int a = 0; a < f.stalk_size(p); ++a) {
      bool ok = true;
      for (int q : members(x.min_open(p))) {
        int aq = f.trans(p, q, a);
        if (s.in[q][aq] && !t.in[q][aq]) {
          ok = false;
          break;
        }
      }
      r.in[p][a] = ok;
    }
  return r;
}

Subsheaf negate(const Subsheaf& s) { return implies(s, Subsheaf::none(s.parent)); }

Subsheaf pullback(const SheafMorphism& f, const Subsheaf& s) {
  if (!f.target.same_shape(s.parent)) fail(ErrorKind::ParentMismatch, "pullback along a morphism into another sheaf");
  Subsheaf r = Subsheaf::none(f.source);
  for (std::size_t p = 0; p < r.in.size(); ++p)
    for (std::size_t a = 0; a < r.in[p].size(); ++a) r.in[p][a] = s.in[p][f.comp[p][a]];
  return r;
}

Subsheaf exists_along(const SheafMorphism& f, const Subsheaf& s) {
  if (!f.source.same_shape(s.parent)) fail(ErrorKind::ParentMismatch, "image along a morphism out of another sheaf");
  Subsheaf r = Subsheaf::none(f.target);
  for (std::size_t p = 0; p < s.in.size(); ++p)
    for (std::size_t a = 0; a < s.in[p].size(); ++a)
      if (s.in[p][a]) r.in[p][f.comp[p][a]] = 1;
  return r;
}

Subsheaf forall_along(const SheafMorphism& f, const Subsheaf& s) {
  if (!f.source.same_shape(s.parent)) fail(ErrorKind::ParentMismatch, "forall along a morphism out of another sheaf");
  const FinSpace& x = f.source.base();
  // bad[q][b]: some a over b at q lies outside S
  std::vector<std::vector<char>> bad(x.size());
  for (int q = 0; q < x.size(); ++q) {
    bad[q].assign(f.target.stalk_size(q), 0);
    for (int a = 0; a < f.source.stalk_size(q); ++a)
      if (!s.in[q][a]) bad[q][f.comp[q][a]] = 1;
  }
  Subsheaf r = Subsheaf::none(f.target);
  for (int p = 0; p < x.size(); ++p)
    for (int b = 0; b < f.target.stalk_size(p); ++b) {
      bool ok = true;
      for (int q : members(x.min_open(p)))
        if (bad[q][f.target.trans(p, q, b)]) {
          ok = false;
          break;
        }
      r.in[p][b] = ok;
    }
  return r;
}

//------------------------------------------------------------------------------
// Subsheaf enumeration

std::size_t for_each_subsheaf(const Sheaf& f, const std::function<bool(const Subsheaf&)>& visit) {
  const FinSpace& x = f.base();
  for (int p = 0; p < x.size(); ++p)
    if (f.stalk_size(p) > 24) fail(ErrorKind::SizeLimit, "stalk too large for subsheaf enumeration");
  std::vector<int> order = top_down_order(x, x.full());
  Subsheaf cur = Subsheaf::none(f);
  std::size_t count = 0;
  bool stop = false;
  std::function<void(std::size_t)> go = [&](std::size_t k) {
    if (stop) return;
    if (k == order.size()) {
      ++count;
      if (!visit(cur)) stop = true;
      return;
    }
    const int p = order[k];
    const int m = f.stalk_size(p);
    std::uint32_t allowed = 0, forced = 0;
    for (int a = 0; a < m; ++a) {
      bool ok = true;
      for (std::size_t j = 0; j < k && ok; ++j) {
        int q = order[j];
        if (x.leq(p, q)) ok = cur.in[q][f.trans(p, q, a)] != 0;
      }
      if (ok) allowed |= 1U << a;
    }
    for (std::size_t j = 0; j < k; ++j) {
      int r = order[j];
      if (!x.leq(r, p)) continue;
      for (int c = 0; c < f.stalk_size(r); ++c)
        if (cur.in[r][c]) forced |= 1U << f.trans(r, p, c);
    }
    if (forced & ~allowed) return;
    // subsets between forced and allowed
    std::uint32_t free_bits = allowed & ~forced;
    for (std::uint32_t sub = free_bits;; sub = (sub - 1) & free_bits) {
      std::uint32_t chosen = sub | forced;
      for (int a = 0; a < m; ++a) cur.in[p][a] = (chosen >> a) & 1U;
      go(k + 1);
      if (stop || sub == 0) break;
    }
    for (int a = 0; a < m; ++a) cur.in[p][a] = 0;
  };
  go(0);
  return count;
}

//------------------------------------------------------------------------------
// Random and exhaustive generation

namespace {

// Builds a sheaf class by class (equivalence classes of the preorder), most
// specialized first. Each element of the stalk of a class is a choice of a
// compatible family over the strictly larger part of its minimal open.
class SheafBuilder {
 public:
  explicit SheafBuilder(const FinSpace& x) : x_(x), n_(x.size()) {
    std::vector<bool> done(n_, false);
    for (int p : top_down_order(x, x.full())) {
      if (done[p]) continue;
      std::vector<int> cls;
      for (int q = 0; q < n_; ++q)
        if (x.equivalent(p, q)) {
          cls.push_back(q);
          done[q] = true;
        }
      classes_.push_back(cls);
    }
    sizes_.assign(n_, 0);
    trans_.assign(n_, std::vector<Sheaf::Table>(n_));
  }

  std::size_t num_classes() const { return classes_.size(); }

  // Compatible families over the boundary of class k, given earlier classes.
  std::vector<std::vector<int>> boundary_sections(std::size_t k) const {
    const int rep = classes_[k][0];
    PointSet boundary = x_.min_open(rep);
    for (int q : classes_[k]) boundary &= ~bit(q);
    std::vector<int> pts = top_down_order(x_, boundary);
    std::vector<std::vector<int>> out;
    std::vector<int> fam(n_, -1);
    std::function<void(std::size_t)> go = [&](std::size_t i) {
      if (i == pts.size()) {
        out.push_back(fam);
        return;
      }
      int p = pts[i];
      for (int a = 0; a < sizes_[p]; ++a) {
        bool ok = true;
        for (std::size_t j = 0; j < i && ok; ++j) {
          int q = pts[j];
          if (x_.leq(p, q) && trans_[p][q][a] != fam[q]) ok = false;
          if (x_.leq(q, p) && trans_[q][p][fam[q]] != a) ok = false;
        }
        if (!ok) continue;
        fam[p] = a;
        go(i + 1);
      }
      fam[p] = -1;
    };
    go(0);
    return out;
  }

  // Stalk of class k: element e restricts to secs[choice[e]].
  void assign(std::size_t k, const std::vector<std::vector<int>>& secs, const std::vector<int>& choice) {
    const int size = static_cast<int>(choice.size());
    for (int p : classes_[k]) {
      sizes_[p] = size;
      for (int q : classes_[k]) {
        trans_[p][q].resize(size);
        std::iota(trans_[p][q].begin(), trans_[p][q].end(), 0);
      }
      for (int q : members(x_.min_open(p))) {
        if (x_.equivalent(p, q)) continue;
        trans_[p][q].clear();
        for (int c : choice) trans_[p][q].push_back(secs[c][q]);
      }
    }
  }

  Sheaf build() const {
    std::vector<std::vector<std::string>> labels(n_);
    for (int p = 0; p < n_; ++p)
      for (int a = 0; a < sizes_[p]; ++a) labels[p].push_back(element_name(a));
    return Sheaf::make_full(x_, std::move(labels), trans_, true);
  }

 private:
  const FinSpace& x_;
  int n_;
  std::vector<std::vector<int>> classes_;
  std::vector<int> sizes_;
  std::vector<std::vector<Sheaf::Table>> trans_;
};

}  // namespace

Sheaf random_sheaf(const FinSpace& x, int max_stalk, std::mt19937_64& rng, int min_stalk) {
  SheafBuilder builder(x);
  for (std::size_t k = 0; k < builder.num_classes(); ++k) {
    auto secs = builder.boundary_sections(k);
    int size = 0;
    if (!secs.empty()) size = std::uniform_int_distribution<int>(min_stalk, max_stalk)(rng);
    std::vector<int> choice;
    std::uniform_int_distribution<int> pick(0, static_cast<int>(secs.size()) - 1);
    for (int e = 0; e < size; ++e) choice.push_back(secs.empty() ? 0 : pick(rng));
    builder.assign(k, secs, choice);
  }
  return builder.build();
}

std::vector<Sheaf> all_sheaves(const FinSpace& x, int max_stalk) {
  std::vector<Sheaf> out;
  SheafBuilder builder(x);
  std::function<void(std::size_t)> go = [&](std::size_t k) {
    if (k == builder.num_classes()) {
      out.push_back(builder.build());
      return;
    }
    auto secs = builder.boundary_sections(k);
    const int m = static_cast<int>(secs.size());
    // multisets of sections of size 0..max_stalk as non-decreasing sequences
    std::vector<int> choice;
    std::function<void(int)> pick = [&](int start) {
      builder.assign(k, secs, choice);
      go(k + 1);
      if (static_cast<int>(choice.size()) == max_stalk) return;
      for (int c = start; c < m; ++c) {
        choice.push_back(c);
        pick(c);
        choice.pop_back();
      }
    };
    pick(0);
  };
  go(0);
  // automorphisms of the earlier stalks can identify different choices
  std::vector<Sheaf> unique;
  for (const auto& f : out) {
    bool seen = false;
    for (const auto& g : unique)
      if (isomorphic(f, g)) {
        seen = true;
        break;
      }
    if (!seen) unique.push_back(f);
  }
  return unique;
}

//------------------------------------------------------------------------------
// Etale spaces

EtaleSpace to_etale(const Sheaf& f) {
  const FinSpace& x = f.base();
  std::vector<std::string> names;
  std::vector<int> proj;
  std::vector<std::vector<int>> id(x.size());
  for (int p = 0; p < x.size(); ++p)
    for (int a = 0; a < f.stalk_size(p); ++a) {
      id[p].push_back(static_cast<int>(names.size()));
      names.push_back(f.label(p, a) + "@" + x.name(p));
      proj.push_back(p);
    }
  if (names.size() > 64) fail(ErrorKind::SizeLimit, "total space exceeds 64 points");
  std::vector<PointSet> subbasis;
  for (int q = 0; q < x.size(); ++q) {
    PointSet pre = 0;
    for (int e = 0; e < static_cast<int>(proj.size()); ++e)
      if (has(x.min_open(q), proj[e])) pre |= bit(e);
    subbasis.push_back(pre);
  }
  for (int p = 0; p < x.size(); ++p)
    for (int a = 0; a < f.stalk_size(p); ++a) {
      PointSet image = 0;
      for (int q : members(x.min_open(p))) image |= bit(id[q][f.trans(p, q, a)]);
      subbasis.push_back(image);
    }
  return EtaleSpace{FinSpace::from_subbasis(names, subbasis), x, proj};
}

std::optional<std::string> local_homeomorphism_error(const EtaleSpace& e) {
  const FinSpace& t = e.total;
  const FinSpace& x = e.base;
  if (static_cast<int>(e.proj.size()) != t.size()) return "projection is not total";
  for (int v : e.proj)
    if (v < 0 || v >= x.size()) return "projection leaves the base";
  if (!is_continuous(e.proj, t, x)) return "projection is not continuous";
  for (int s = 0; s < t.size(); ++s) {
    const PointSet u = t.min_open(s);
    PointSet image = 0;
    for (int a : members(u)) {
      if (has(image, e.proj[a])) return "projection not injective near " + t.name(s);
      image |= bit(e.proj[a]);
    }
    if (!x.is_open(image)) return "image of the neighbourhood of " + t.name(s) + " is not open";
    for (int a : members(u))
      for (int b : members(u))
        if (t.leq(a, b) != x.leq(e.proj[a], e.proj[b]))
          return "projection is not a homeomorphism near " + t.name(s);
  }
  return std::nullopt;
}

Sheaf from_etale(const EtaleSpace& e) {
  if (auto err = local_homeomorphism_error(e)) fail(ErrorKind::NotEtale, *err);
  const FinSpace& t = e.total;
  const FinSpace& x = e.base;
  const int n = x.size();
  std::vector<std::vector<int>> fiber(n);
  std::vector<int> pos(t.size());
  for (int s = 0; s < t.size(); ++s) {
    pos[s] = static_cast<int>(fiber[e.proj[s]].size());
    fiber[e.proj[s]].push_back(s);
  }
  std::vector<std::vector<std::string>> labels(n);
  for (int p = 0; p < n; ++p)
    for (int s : fiber[p]) labels[p].push_back(t.name(s));
  std::vector<std::vector<Sheaf::Table>> trans(n, std::vector<Sheaf::Table>(n));
  for (int p = 0; p < n; ++p)
    for (int q : members(x.min_open(p)))
      for (int s : fiber[p]) {
        int target = -1;
        for (int r : members(t.min_open(s)))
          if (e.proj[r] == q) target = r;
        if (target < 0) fail(ErrorKind::NotEtale, "no germ over " + x.name(q) + " for " + t.name(s));
        trans[p][q].push_back(pos[target]);
      }
  return Sheaf::make_full(x, std::move(labels), std::move(trans), true);
}

}  // namespace tlw
