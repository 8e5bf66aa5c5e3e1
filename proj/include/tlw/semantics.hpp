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

// Sheaf semantics over a finite space.
//
// classical-c: 2 is 1+1 (element 0 true), every type must be decidable and
//   equality is the bar of the classified diagonal, i.e. stalkwise equality.
//   Connectives are evaluated after compiling to the primitive basis.
// omega: lambda-mode formulas denote subsheaves (Kripke-Joyal); in HOL
//   modes 2 is Omega and equality is the classifier of the diagonal.
//
// A term in context x1..xn denotes a morphism out of 1 x X1 x .. x Xn
// (left nested); an element of that product at p is the mixed-radix number
// (..(a1 |X2_p| + a2)..)|Xn_p| + an.

#ifndef TLW_SEMANTICS_HPP_
#define TLW_SEMANTICS_HPP_

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "tlw/sheaf.hpp"
#include "tlw/syntax.hpp"

namespace tlw {

enum class Flavor { Classical, Omega };

const char* flavor_name(Flavor flavor);  // "classical-c" | "omega"
Flavor parse_flavor(std::string_view text);

struct Interpretation {
  Theory theory;
  FinSpace base;
  Flavor flavor = Flavor::Classical;
  std::map<std::string, Sheaf> types;
  // Global sections of the interpreted constant types.
  std::map<std::string, std::vector<int>> constants;
  // Lambda mode: subsheaf of the interpreted argument tuple (terminal for
  // 0-ary relations).
  std::map<std::string, Subsheaf> relations;
};

class Evaluator {
 public:
  // Validates the interpretation (InvalidModel, BaseMismatch, NotDecidable).
  explicit Evaluator(const Interpretation& model);
  ~Evaluator();
  Evaluator(const Evaluator&) = delete;
  Evaluator& operator=(const Evaluator&) = delete;

  const Interpretation& model() const;

  // Memoized. NotDecidable for a non-decidable type under classical-c.
  const Sheaf& interpret_type(const Type& type);
  const Exponential& interpret_exponential(const Type& exp_type);
  const Sheaf& context_sheaf(const Context& ctx);
  // The truth-value object: 1+1 or Omega.
  const Sheaf& truth_sheaf();
  int true_value(int p) const;

  // Morphism from the context product to the type of `term`.
  SheafMorphism interpret_term(const Term& term, const Context& ctx);
  // The subsheaf of the context product where `formula` holds.
  Subsheaf interpret_formula(const Term& formula, const Context& ctx);

  bool satisfies(const Term& sentence);
  // lhs |-_ctx rhs holds: the lhs subsheaf is contained in the rhs one.
  bool entails(const Context& ctx, const Term& lhs, const Term& rhs);

  // Memo checkpoints for callers that evaluate many one-off terms sharing
  // long-lived subterms.
  std::size_t mark() const;
  void rollback(std::size_t mark);

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

struct ModelVerdict {
  bool valid = true;
  int failing_axiom = -1;  // index into theory.axioms
  std::string message;
};

// Structural validation only; throws on a malformed interpretation.
void validate_interpretation(const Interpretation& model);
ModelVerdict check_model(const Interpretation& model);
ModelVerdict check_model(Evaluator& eval);

// Random interpretation over `base` (not necessarily a model). Under
// classical-c basic types get injective transitions and relations are
// complemented; draws that make a reachable type non-decidable are redrawn.
Interpretation random_interpretation(const Theory& theory, const FinSpace& base, Flavor flavor, int max_stalk,
                                     std::mt19937_64& rng);
// Random transition-closed subsheaf.
Subsheaf random_subsheaf(const Sheaf& f, std::mt19937_64& rng);

struct SearchBounds {
  int max_points = 2;
  int max_stalk = 2;
  Flavor flavor = Flavor::Omega;
  // Largest number of global sections tried for a single constant.
  std::size_t max_candidates = 2000000;
};

struct SearchResult {
  std::optional<Interpretation> model;
  std::size_t candidates = 0;  // interpretations evaluated
  bool exhausted = true;       // false when max_candidates cut the search
};

// Finds a model of `theory` refuting `sentence`. Spaces are tried by size and
// up to homeomorphism, type sheaves up to isomorphism.
SearchResult search_countermodel(const Theory& theory, const Term& sentence, const SearchBounds& bounds);

// Enumerates formulas phi(y, z) of increasing depth and returns the first
// whose extension in Y x Z is the graph of f. y and z are named "y" and "z".
std::optional<Term> find_defining_formula(Evaluator& eval, const Type& y_type, const Type& z_type,
                                          const SheafMorphism& f, int depth);
// Graph of f as a subsheaf of Y x Z.
Subsheaf graph_of(const SheafMorphism& f, const Sheaf& y_z);

}  // namespace tlw

#endif  // TLW_SEMANTICS_HPP_
