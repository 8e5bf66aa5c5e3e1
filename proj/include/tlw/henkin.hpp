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

// General (Henkin) models over finite carriers, labelings, basic opens and
// the fibred sets Z_Phi over a finite list of labeled points.

#ifndef TLW_HENKIN_HPP_
#define TLW_HENKIN_HPP_

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "tlw/sheaf.hpp"
#include "tlw/syntax.hpp"

namespace tlw {

// Carrier of 2 is {tt, ff} with tt at index 0, as in two().
inline constexpr int kTT = 0;
inline constexpr int kFF = 1;

// Carriers of basic types are named lists. An exponential either has an
// explicit carrier (a subset of the full function set, each function a
// table over the argument carrier) or is full. Products are always full,
// index a * |right| + b.
class GeneralModel {
 public:
  explicit GeneralModel(Theory theory, int max_type_depth = 3);

  // Full hierarchy with basic carriers x0, x1, ...; constants default to 0.
  static GeneralModel full(Theory theory, const std::map<std::string, int>& sizes, int max_type_depth = 3);

  const Theory& theory() const { return theory_; }
  const Signature& signature() const { return theory_.signature; }
  int max_type_depth() const { return cap_; }

  void set_basic(const std::string& type, std::vector<std::string> names);
  void set_functions(const Type& exp, std::vector<std::string> names, std::vector<std::vector<int>> tables);
  void set_constant(const std::string& name, int index);
  void validate() const;  // InvalidModel

  bool is_explicit(const Type& t) const { return explicit_.count(t) > 0; }
  std::vector<Type> explicit_types() const;  // by depth, then order
  int size(const Type& t) const;             // SizeLimit beyond the depth cap
  std::vector<int> table(const Type& exp, int f) const;
  std::optional<int> find_function(const Type& exp, const std::vector<int>& table) const;
  int apply(const Type& exp, int f, int a) const;
  int pair(const Type& prod, int a, int b) const { return a * size(prod.right()) + b; }
  int fst(const Type& prod, int v) const { return v / size(prod.right()); }
  int snd(const Type& prod, int v) const { return v % size(prod.right()); }
  int constant(const std::string& name) const;

  std::string element_name(const Type& t, int i) const;
  std::optional<int> parse_element(const Type& t, std::string_view name) const;

  friend bool operator==(const GeneralModel& a, const GeneralModel& b);
  friend bool operator!=(const GeneralModel& a, const GeneralModel& b) { return !(a == b); }

 private:
  struct Functions {
    std::vector<std::string> names;
    std::vector<std::vector<int>> tables;
    std::map<std::vector<int>, int> index;
  };

  Theory theory_;
  int cap_;
  std::map<std::string, std::vector<std::string>> basic_;
  std::map<Type, Functions> explicit_;
  std::map<std::string, int> constants_;
};

using HenkinEnv = std::vector<std::pair<Var, int>>;

// Denotation of a term; lambda-abstractions outside their carrier throw
// EscapesCarrier.
int henkin_eval(const GeneralModel& m, const Term& term, const HenkinEnv& env = {});
bool henkin_satisfies(const GeneralModel& m, const Term& formula, const HenkinEnv& env = {});

struct WitnessTerm {
  Context ctx;
  Term term;
};

// Every subterm of the axioms, in the context of its enclosing binders.
std::vector<WitnessTerm> theory_witnesses(const Theory& theory);

struct ClosureVerdict {
  bool valid = true;
  int witness = -1;  // index into the witness list
  std::string term;
  std::string message;
};

ClosureVerdict check_closure(const GeneralModel& m, const std::vector<WitnessTerm>& witnesses);

// True iff every sentence flagged non-provable fails in some model.
bool is_sufficient(const std::vector<GeneralModel>& models, const std::vector<Term>& sentences,
                   const std::vector<bool>& provable);

struct Element {
  Type type;
  int index = 0;
  friend bool operator==(const Element& a, const Element& b) { return a.type == b.type && a.index == b.index; }
};

using Labeling = std::map<int, Element>;

struct LabeledPoint {
  std::string name;
  GeneralModel model;
  Labeling labels;
  void validate() const;
};

// alpha(n_i) defined with the type of z_i for each i, and M |= phi(alpha(n)).
bool in_basic_open(const LabeledPoint& pt, const Context& zs, const Term& phi, const std::vector<int>& ns);

struct BasicOpen {
  Context zs;
  Term phi;
  std::vector<int> ns;
};

struct FiberElement {
  int point;
  int index;
};

// Z_Phi restricted to finitely many points. The base carries the topology
// generated by the relative opens U_{z1 = z2, (n, m)} for labels of type Z
// plus any extra basic opens; the total space adds the V_n.
struct PhiFiber {
  Type type;
  std::vector<FiberElement> elements;  // grouped by point
  std::vector<int> labels;
  std::vector<PointSet> v;  // V_n over elements, parallel to labels
  std::vector<PointSet> base_subbasis;
  EtaleSpace space;
};

PhiFiber phi_fiber(const std::vector<LabeledPoint>& points, const Type& z, const std::vector<BasicOpen>& extra = {});
// Each V_n meets each fiber at most once.
bool sections_injective(const PhiFiber& fiber);

// The model read back off the fibres over points[i], for every basic type
// and every explicit exponential.
GeneralModel stalk_is_model(const std::vector<LabeledPoint>& points, int i);

//------------------------------------------------------------------------------
// Model files
//
//   %theory groups.thy          (or inline type/const/axiom declarations)
//   point p;                    (optional; starts a new point)
//   carrier X: a b;
//   carrier X^X: id swap;       (omitted exponentials are full)
//   fun id: a|->a b|->b;
//   fun swap: a|->b b|->a;
//   const c = a;
//   label 3 = a;                (or "label 3 = swap : X^X")
//
// Elements of full carriers are written [r0,r1,...], pairs <a,b>, truth
// values tt and ff.

struct HenkinFile {
  Theory theory;
  std::string theory_path;
  std::vector<LabeledPoint> points;
};

HenkinFile parse_henkin(std::string_view text, const std::function<Theory(const std::string&)>& load_theory,
                        std::string_view source = "<model>");
std::string print_henkin(const HenkinFile& file);

}  // namespace tlw

#endif  // TLW_HENKIN_HPP_
