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

// Object language: types, terms, formulas, signatures and theories for
// higher-order logic and its lambda-logic fragment (no type of formulas).
//
// Terms are immutable and shared; every operation here is pure.

#ifndef TLW_SYNTAX_HPP_
#define TLW_SYNTAX_HPP_

#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "tlw/error.hpp"

namespace tlw {

enum class Mode { HolClassical, HolIntuitionistic, Lambda };

const char* mode_name(Mode mode);
Mode parse_mode(std::string_view text);
inline bool is_hol(Mode mode) { return mode != Mode::Lambda; }

//------------------------------------------------------------------------------
// Types

class Type {
 public:
  enum class Kind { Basic, Two, Prod, Exp };

  Type();  // the type 2
  static Type basic(std::string name);
  static Type two();
  static Type prod(Type left, Type right);
  // Z^Y is exp(Z, Y): functions from `argument` to `result`.
  static Type exp(Type result, Type argument);

  Kind kind() const;
  const std::string& name() const;  // Basic only
  const Type& left() const;         // Prod
  const Type& right() const;        // Prod
  const Type& result() const;       // Exp
  const Type& argument() const;     // Exp

  bool is_two() const { return kind() == Kind::Two; }
  bool contains_two() const;
  int depth() const;
  std::string str() const;

  friend int compare(const Type& a, const Type& b);
  friend bool operator==(const Type& a, const Type& b) { return compare(a, b) == 0; }
  friend bool operator!=(const Type& a, const Type& b) { return compare(a, b) != 0; }
  friend bool operator<(const Type& a, const Type& b) { return compare(a, b) < 0; }

 private:
  struct Node;
  explicit Type(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

// Power type 2^Y.
inline Type power_type(Type y) { return Type::exp(Type::two(), std::move(y)); }

//------------------------------------------------------------------------------
// Variables and terms

struct Var {
  std::string name;
  Type type;

  std::string str() const;
  friend bool operator==(const Var& a, const Var& b) {
    return a.name == b.name && a.type == b.type;
  }
  friend bool operator!=(const Var& a, const Var& b) { return !(a == b); }
  friend bool operator<(const Var& a, const Var& b) {
    if (a.name != b.name) return a.name < b.name;
    return a.type < b.type;
  }
};

enum class TermKind {
  Var, Const, Pair, Proj1, Proj2, Lambda, App,
  Eq, Top, Bot, Not, And, Or, Implies, Forall, Exists, RelApp,
};

class Term {
 public:
  Term();  // Top

  static Term var(Var v);
  static Term var(std::string name, Type type);
  static Term constant(std::string name);
  static Term pair(Term first, Term second);
  static Term proj(int index, Term tuple);  // index 1 or 2
  static Term lambda(Var binder, Term body);
  static Term app(Term fun, Term arg);
  static Term eq(Term lhs, Term rhs);
  static Term top();
  static Term bot();
  static Term negation(Term f);
  static Term conj(Term a, Term b);
  static Term disj(Term a, Term b);
  static Term implies(Term a, Term b);
  static Term forall(Var binder, Term body);
  static Term exists(Var binder, Term body);
  static Term rel(std::string name, std::vector<Term> args);

  TermKind kind() const;
  // Variable, constant, relation or binder name.
  const std::string& name() const;
  // Variable type or binder type.
  const Type& var_type() const;
  Var as_var() const { return Var{name(), var_type()}; }
  Var binder() const { return as_var(); }
  const std::vector<Term>& args() const;
  const Term& arg(std::size_t i) const { return args()[i]; }
  const Term& body() const { return args()[0]; }

  bool is(TermKind k) const { return kind() == k; }
  bool is_binder() const;
  // True for the formula-only constructors (equality, connectives,
  // quantifiers, relation application).
  bool is_logical() const;

  int size() const;
  int depth() const;
  std::string str() const;

  // Identity of the shared node; stable for the lifetime of the term.
  const void* id() const { return node_.get(); }

  friend bool operator==(const Term& a, const Term& b);
  friend bool operator!=(const Term& a, const Term& b) { return !(a == b); }

 private:
  struct Node;
  explicit Term(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

// Left-nested tuple <<a1,a2>,a3>... ; the empty tuple is not representable.
Term tuple(const std::vector<Term>& items);
Type tuple_type(const std::vector<Type>& items);

//------------------------------------------------------------------------------
// Contexts, signatures, theories

// Ordered list of distinct typed variables.
class Context {
 public:
  Context() = default;
  explicit Context(std::vector<Var> vars);

  const std::vector<Var>& vars() const { return vars_; }
  std::size_t size() const { return vars_.size(); }
  bool empty() const { return vars_.empty(); }
  const Var& operator[](std::size_t i) const { return vars_[i]; }
  auto begin() const { return vars_.begin(); }
  auto end() const { return vars_.end(); }

  const Var* find(const std::string& name) const;
  int index_of(const std::string& name) const;
  bool contains(const Var& v) const;
  Context with(const Var& v) const;           // append; fails on duplicate name
  Context with_front(const Var& v) const;     // prepend; fails on duplicate name
  Context without(const std::string& name) const;
  std::set<std::string> names() const;
  std::string str() const;

  friend bool operator==(const Context& a, const Context& b) { return a.vars_ == b.vars_; }
  friend bool operator!=(const Context& a, const Context& b) { return !(a == b); }

 private:
  std::vector<Var> vars_;
};

class Signature {
 public:
  explicit Signature(Mode mode = Mode::HolClassical) : mode_(mode) {}

  Mode mode() const { return mode_; }
  void add_type(const std::string& name);
  void add_constant(const std::string& name, const Type& type);
  // In HOL modes a relation R : (Y1..Yk) is encoded as a constant of type
  // 2^(Y1 x .. x Yk) (plain 2 when k = 0).
  void add_relation(const std::string& name, const std::vector<Type>& args);

  bool has_type(const std::string& name) const;
  const std::vector<std::string>& types() const { return types_; }
  std::optional<Type> constant_type(const std::string& name) const;
  const std::vector<std::pair<std::string, Type>>& constants() const { return constants_; }
  const std::vector<Type>* relation(const std::string& name) const;
  const std::vector<std::pair<std::string, std::vector<Type>>>& relations() const {
    return relations_;
  }
  // HOL mode: names declared with `rel` and encoded as constants.
  bool is_encoded_relation(const std::string& name) const;
  std::optional<int> encoded_relation_arity(const std::string& name) const;

  // Throws ModeViolation / UnknownBasicType when `type` is not allowed here.
  void check_type(const Type& type) const;

 private:
  bool name_taken(const std::string& name) const;

  Mode mode_;
  std::vector<std::string> types_;
  std::vector<std::pair<std::string, Type>> constants_;
  std::vector<std::pair<std::string, std::vector<Type>>> relations_;
  std::vector<std::pair<std::string, int>> encoded_relations_;
};

struct Theory {
  Signature signature;
  std::vector<Term> axioms;
};

void validate_theory(const Theory& theory);

//------------------------------------------------------------------------------
// Operations

// Unique type of a term. In lambda mode formula constructors are not terms.
Type typecheck(const Term& term, const Context& ctx, const Signature& sig);

// Same as typecheck but ignores the mode restrictions; used internally on
// compiled terms that mention 2 in lambda mode.
Type type_of(const Term& term, const Context& ctx, const Signature& sig);

// Throws unless `formula` is a formula in ctx: a term of type 2 in HOL modes,
// a first-order formula over terms in lambda mode.
void check_formula(const Term& formula, const Context& ctx, const Signature& sig);

std::set<Var> free_vars(const Term& term);
std::set<std::string> free_var_names(const Term& term);

// body[tau/y], capture avoiding; binders that would capture are renamed by
// appending primes.
Term substitute(const Term& body, const Term& tau, const Var& y);
// As above, first checking that tau has the type of y in ctx.
Term substitute_checked(const Term& body, const Term& tau, const Var& y,
                        const Context& ctx, const Signature& sig);

bool alpha_eq(const Term& a, const Term& b);

std::string fresh_name(const std::string& base, const std::set<std::string>& avoid);

// Rewrites connectives and quantifiers into =, <-,->, {x|-} and membership;
// projections at formula positions are eliminated through pairing. HOL only.
Term compile_to_primitive_basis(const Term& term, const Context& ctx, const Signature& sig);

namespace detail {
// Mode-agnostic variant used by the classical evaluator for lambda-logic
// formulas; relation atoms are kept as primitives.
Term compile_any(const Term& term, const Context& ctx, const Signature& sig);

// compile_any with a memo that survives between calls; shared subterms are
// compiled once. mark/rollback discard entries added since a mark.
class BasisCache {
 public:
  explicit BasisCache(const Signature& sig);
  ~BasisCache();
  BasisCache(const BasisCache&) = delete;
  BasisCache& operator=(const BasisCache&) = delete;
  Term compile(const Term& term);
  std::size_t mark() const;
  void rollback(std::size_t mark);

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};
}  // namespace detail

}  // namespace tlw

#endif  // TLW_SYNTAX_HPP_
