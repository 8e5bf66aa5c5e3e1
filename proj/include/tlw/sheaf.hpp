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

// Sheaves on a finite space, stored stalkwise over the specialization
// preorder: a finite set F_p per point and restriction maps F_p -> F_q for
// every p <= q (q in the minimal open of p). Elements of a stalk are
// 0..|F_p|-1 with display labels.
//
// Conventions for derived stalks:
//   product      <a,b>      ~>  a * |G_p| + b
//   coproduct    in1 a, in2 b ~> a, |F_p| + b
//   two(X) = 1+1 element 0 is true, element 1 is false.

#ifndef TLW_SHEAF_HPP_
#define TLW_SHEAF_HPP_

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "tlw/finspace.hpp"

namespace tlw {

class Sheaf {
 public:
  using Table = std::vector<int>;
  // edges[{p,q}] is the restriction F_p -> F_q; identities and composites
  // along the preorder are filled in, then functoriality is checked.
  static Sheaf make(FinSpace base, std::vector<std::vector<std::string>> labels,
                    const std::map<std::pair<int, int>, Table>& edges);

  // trans[p][q] supplied for every p <= q (empty tables elsewhere).
  static Sheaf make_full(FinSpace base, std::vector<std::vector<std::string>> labels,
                         std::vector<std::vector<Table>> trans, bool validate = true);

  Sheaf();  // empty sheaf over the point

  const FinSpace& base() const;
  int stalk_size(int p) const;
  const std::string& label(int p, int a) const;
  const std::vector<std::string>& labels(int p) const;
  std::optional<int> find_label(int p, const std::string& label) const;
  int total_size() const;

  // Requires p <= q.
  int trans(int p, int q, int a) const;
  const Table& trans_table(int p, int q) const;

  // Compatible families over an open set; entries outside U are -1.
  std::vector<std::vector<int>> sections(PointSet u) const;
  std::vector<std::vector<int>> global_sections() const { return sections(base().full()); }
  bool is_section(PointSet u, const std::vector<int>& family) const;

  bool transitions_injective() const;
  std::string str() const;

  // Same stalks, labels and transitions.
  friend bool operator==(const Sheaf& a, const Sheaf& b);
  friend bool operator!=(const Sheaf& a, const Sheaf& b) { return !(a == b); }
  bool same_shape(const Sheaf& other) const;  // ignores labels

 private:
  struct Impl;
  explicit Sheaf(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}
  std::shared_ptr<const Impl> impl_;
};

struct SheafMorphism {
  Sheaf source;
  Sheaf target;
  std::vector<std::vector<int>> comp;  // comp[p][a]

  static SheafMorphism make(Sheaf source, Sheaf target, std::vector<std::vector<int>> comp);
  int operator()(int p, int a) const { return comp[p][a]; }
  bool is_natural() const;
  friend bool operator==(const SheafMorphism& a, const SheafMorphism& b) { return a.comp == b.comp; }
};

struct Subsheaf {
  Sheaf parent;
  std::vector<std::vector<char>> in;  // in[p][a]

  static Subsheaf make(Sheaf parent, std::vector<std::vector<char>> in);
  static Subsheaf whole(const Sheaf& f);
  static Subsheaf none(const Sheaf& f);
  bool contains(int p, int a) const { return in[p][a] != 0; }
  bool is_closed() const;
  bool is_whole() const;
  bool is_empty() const;
  bool leq(const Subsheaf& other) const;
  int count() const;
  friend bool operator==(const Subsheaf& a, const Subsheaf& b) { return a.in == b.in; }
  friend bool operator!=(const Subsheaf& a, const Subsheaf& b) { return a.in != b.in; }
};

// A subobject presented as a sheaf with its monic inclusion.
struct SubObject {
  Sheaf sheaf;
  SheafMorphism inclusion;
};

//------------------------------------------------------------------------------
// Basic sheaves and limits/colimits

Sheaf terminal(const FinSpace& x);
Sheaf initial(const FinSpace& x);
Sheaf constant_sheaf(const FinSpace& x, const std::vector<std::string>& labels);
Sheaf two(const FinSpace& x);  // 1+1 with labels tt, ff

SheafMorphism identity(const Sheaf& f);
SheafMorphism compose(const SheafMorphism& g, const SheafMorphism& f);  // g . f
SheafMorphism to_terminal(const Sheaf& f);
// Global section as a morphism from the terminal sheaf.
SheafMorphism point_morphism(const Sheaf& f, const std::vector<int>& section);

Sheaf product(const Sheaf& f, const Sheaf& g);
SheafMorphism proj1(const Sheaf& f, const Sheaf& g);
SheafMorphism proj2(const Sheaf& f, const Sheaf& g);
SheafMorphism pairing(const SheafMorphism& f, const SheafMorphism& g);
inline int pair_index(const Sheaf& g, int p, int a, int b) { return a * g.stalk_size(p) + b; }

Sheaf coproduct(const Sheaf& f, const Sheaf& g);
SheafMorphism inj1(const Sheaf& f, const Sheaf& g);
SheafMorphism inj2(const Sheaf& f, const Sheaf& g);
SheafMorphism copairing(const SheafMorphism& f, const SheafMorphism& g);

SubObject equalizer(const SheafMorphism& f, const SheafMorphism& g);
SubObject as_subobject(const Subsheaf& s);

//------------------------------------------------------------------------------
// Exponentials

struct Exponential {
  Sheaf sheaf;  // F^G
  Sheaf result;    // F
  Sheaf argument;  // G
  // tables[p][h] is the natural family over the minimal open of p,
  // concatenated in increasing point order, |G_q| entries per point q.
  std::vector<std::vector<std::vector<int>>> tables;
  std::vector<std::vector<int>> offset;  // offset[p][q] into a table at p

  int apply(int p, int h, int b) const { return tables[p][h][offset[p][p] + b]; }
  int apply_at(int p, int h, int q, int b) const { return tables[p][h][offset[p][q] + b]; }
  std::optional<int> index_of(int p, const std::vector<int>& table) const;

  std::vector<std::map<std::vector<int>, int>> index;
};

Exponential exponential(const Sheaf& f, const Sheaf& g);
// Global section of F^G given stalkwise by fn(q, b) in F_q for b in G_q;
// empty when fn is not natural.
std::optional<std::vector<int>> function_section(const Exponential& e, const std::function<int(int, int)>& fn);
// eval : F^G x G -> F
SheafMorphism eval(const Exponential& e);
// transpose of h : H x G -> F is the unique H -> F^G with eval . (t x id) = h.
SheafMorphism transpose(const Exponential& e, const Sheaf& h_source, const SheafMorphism& h);

//------------------------------------------------------------------------------
// Subobject classifier

struct Omega {
  Sheaf sheaf;
  // values[p][k] is the open subset of min_open(p) that element k denotes.
  std::vector<std::vector<PointSet>> values;
  int index_of(int p, PointSet v) const;
  int top(int p) const { return index_of(p, sheaf.base().min_open(p)); }
  int bottom(int p) const { return index_of(p, 0); }
};

Omega omega(const FinSpace& x);
SheafMorphism true_map(const Omega& om);  // 1 -> Omega
SheafMorphism classify(const Omega& om, const Subsheaf& s);
Subsheaf unclassify(const Omega& om, const SheafMorphism& chi);
// |-| : 1+1 -> Omega, true to top and false to bottom.
SheafMorphism truth_map(const Omega& om);

std::optional<Subsheaf> complement(const Subsheaf& s);
Subsheaf diagonal(const Sheaf& f);  // inside product(f, f)
// Decidable in the sense of a complemented diagonal.
bool is_decidable(const Sheaf& f);
// phi-bar : F -> 1+1 with |phi-bar| = phi, when the classified subsheaf is
// complemented.
std::optional<SheafMorphism> bar_factor(const Omega& om, const SheafMorphism& phi);

//------------------------------------------------------------------------------
// Heyting structure on subsheaves and quantifiers

Subsheaf meet(const Subsheaf& s, const Subsheaf& t);
Subsheaf join(const Subsheaf& s, const Subsheaf& t);
Subsheaf implies(const Subsheaf& s, const Subsheaf& t);
Subsheaf negate(const Subsheaf& s);

// f^* S for f : A -> B and S <= B.
Subsheaf pullback(const SheafMorphism& f, const Subsheaf& s);
// exists_f S = image, forall_f S = right adjoint to pullback.
Subsheaf exists_along(const SheafMorphism& f, const Subsheaf& s);
Subsheaf forall_along(const SheafMorphism& f, const Subsheaf& s);

//------------------------------------------------------------------------------
// Enumeration, isomorphism, random generation

// Calls visit for every morphism src -> dst; stops early when visit returns
// false. Returns the number visited.
std::size_t for_each_morphism(const Sheaf& src, const Sheaf& dst,
                              const std::function<bool(const SheafMorphism&)>& visit);
std::size_t count_morphisms(const Sheaf& src, const Sheaf& dst);
std::optional<SheafMorphism> find_isomorphism(const Sheaf& f, const Sheaf& g);
inline bool isomorphic(const Sheaf& f, const Sheaf& g) { return find_isomorphism(f, g).has_value(); }

std::size_t for_each_subsheaf(const Sheaf& f, const std::function<bool(const Subsheaf&)>& visit);

// Random sheaf with stalks of size at most max_stalk (min_stalk at least).
Sheaf random_sheaf(const FinSpace& x, int max_stalk, std::mt19937_64& rng, int min_stalk = 0);
// Every sheaf with stalks of size <= max_stalk, one per isomorphism class.
std::vector<Sheaf> all_sheaves(const FinSpace& x, int max_stalk);

//------------------------------------------------------------------------------
// Etale spaces

struct EtaleSpace {
  FinSpace total;
  FinSpace base;
  std::vector<int> proj;
};

EtaleSpace to_etale(const Sheaf& f);
// Empty when proj is a local homeomorphism, else the reason.
std::optional<std::string> local_homeomorphism_error(const EtaleSpace& e);
Sheaf from_etale(const EtaleSpace& e);

}  // namespace tlw

#endif  // TLW_SHEAF_HPP_
