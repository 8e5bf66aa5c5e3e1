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

// Proof trees for the context-indexed entailment calculus.
//
// Rule schemas (x the conclusion context, "x,y" appends y):
//   1a  phi |- phi                 1b  phi |- psi, psi |- chi  =>  phi |- chi
//   1c  phi |-_{x,y} psi  =>  phi[t/y] |-_x psi[t/y]        (FV(t) in x)
//   2a  T |- t = t                 2b  t = t' |- phi[t/y] => phi[t'/y]
//   2c  th |- a => b, th |- b => a  =>  th |- a = b         (HOL only)
//   2d  forall y. f(y) = g(y) |- f = g
//   3a  T |- <fst t, snd t> = t    3b  T |- pi_i <t1, t2> = t_i
//   4a  T |- (\x. t)(x) = t        4b  T |- \x. f(x) = f
//   5a  F |- phi                   5b  phi |- T
//   5c  phi |- ~psi          <=>  phi /\ psi |- F
//   5d  th |- phi, th |- psi <=>  th |- phi /\ psi
//   5e  th \/ phi |- psi     <=>  th |- psi, phi |- psi
//   5f  th /\ phi |- psi     <=>  th |- phi => psi
//   5g  th |-_{x,y} phi      <=>  th |-_x forall y. phi
//   5h  exists y. th |-_x phi <=> th |-_{x,y} phi
//   classical  T |- forall p:2. p \/ ~p                     (hol-classical)
//   axiom i    T |- sigma_i
// "fwd" reads a biconditional left to right. Directions with two
// conclusions (5d-bwd, 5e-fwd) select one by data.index (1 or 2).

#ifndef TLW_DEDUCTION_HPP_
#define TLW_DEDUCTION_HPP_

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "tlw/syntax.hpp"

namespace tlw {

struct Sequent {
  Context ctx;
  Term lhs;
  Term rhs;
  std::string str() const;  // "x:X | phi |- psi"
};

// Same context, alpha-equivalent sides.
bool same_sequent(const Sequent& a, const Sequent& b);

enum class RuleId {
  R1a, R1b, R1c,
  R2a, R2b, R2c, R2d,
  R3a, R3b,
  R4a, R4b,
  R5a, R5b,
  R5cFwd, R5cBwd, R5dFwd, R5dBwd, R5eFwd, R5eBwd, R5fFwd, R5fBwd, R5gFwd, R5gBwd, R5hFwd, R5hBwd,
  Classical,
  Axiom,
};

inline constexpr int kRuleCount = static_cast<int>(RuleId::Axiom) + 1;

const char* rule_name(RuleId rule);  // "1a", "5c-fwd", "classical", "axiom"
RuleId parse_rule(std::string_view name);
int premise_count(RuleId rule);
bool rule_in_mode(RuleId rule, Mode mode);

// Rule-specific instantiation. `ctx` is the conclusion context for leaf
// rules and for 1c; elsewhere it is optional and checked when present.
struct RuleData {
  std::optional<Context> ctx;
  std::vector<Term> terms;
  std::optional<Var> var;
  int index = 0;
};

struct ProofTree {
  RuleId rule = RuleId::R1a;
  RuleData data;
  std::vector<ProofTree> premises;
  std::optional<Sequent> conclusion;  // filled by generators; checked when present

  int size() const;
  int height() const;
};

// The conclusion licensed by one rule instance. Throws RuleNotInMode,
// SideConditionViolated or SchemaMismatch (and typing errors).
Sequent check_step(RuleId rule, const RuleData& data, const std::vector<Sequent>& premises, const Theory& theory);

struct ProofVerdict {
  bool valid = false;
  std::optional<Sequent> conclusion;
  int node = -1;  // preorder index of the failing node
  ErrorKind error = ErrorKind::SchemaMismatch;
  std::string message;
};

ProofVerdict check_proof(const ProofTree& proof, const Theory& theory);

struct DerivationBounds {
  int depth = 4;
  int max_term_size = 12;
  int max_type_depth = 3;
};

// Random valid derivation of height at most bounds.depth, deterministic per
// seed. Uses every rule available in the signature's mode.
ProofTree random_derivation(std::uint64_t seed, const Theory& theory, const DerivationBounds& bounds);

// Weakening: from a proof of phi |-_x psi, a proof of phi |-_{x,y} psi
// built from 1a, 5g and 1b.
ProofTree weaken(const ProofTree& proof, const Theory& theory, const Var& y);

//------------------------------------------------------------------------------
// Proof files
//
//   %theory groups.thy        (or %mode lambda for the empty theory)
//   (rule 1b :premises (
//     (rule 1a :data (:ctx "x:X" :terms ("x = x")))
//     (rule 5b :data (:ctx "x:X" :terms ("x = x")))))
//
// Data keys: :ctx "<context>", :terms ("<term>" ...), :var "<y:Y>",
// :index <n>. Terms are read in :ctx, except the formula of 2b, which is
// read with :var in place of any context variable of the same name.

struct ProofFile {
  Theory theory;
  std::string theory_path;  // as written after %theory, empty for %mode
  ProofTree proof;
};

// `load_theory` resolves the %theory argument.
ProofFile parse_proof(std::string_view text, const std::function<Theory(const std::string&)>& load_theory,
                      std::string_view source = "<proof>");
std::string print_proof(const ProofTree& proof, const Signature& sig);

}  // namespace tlw

#endif  // TLW_DEDUCTION_HPP_
