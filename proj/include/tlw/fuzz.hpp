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

// Soundness fuzzing: random derivations checked by the kernel, then their
// conclusions evaluated in random finite interpretations.

#ifndef TLW_FUZZ_HPP_
#define TLW_FUZZ_HPP_

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "tlw/deduction.hpp"
#include "tlw/semantics.hpp"

namespace tlw {

// The theory used when none is given: X, c : X, f : X^X and a predicate
// (HOL) or relations R, q (lambda).
Theory default_fuzz_theory(Mode mode);

// classical-c for hol-classical, omega otherwise.
Flavor default_flavor(Mode mode);

struct FuzzConfig {
  int count = 100;
  std::uint64_t seed = 0;
  std::optional<Theory> theory;  // default_fuzz_theory(mode) when empty
  Mode mode = Mode::HolClassical;
  std::optional<Flavor> flavor;
  int depth = 5;
  int models = 20;  // interpretations per derivation
  int max_points = 3;
  int max_stalk = 3;
};

struct FuzzFailure {
  int derivation = -1;
  std::string sequent;
  std::string reason;
  std::string model;  // print_model text, empty for kernel failures
};

struct FuzzReport {
  int derivations = 0;
  int valid_proofs = 0;
  int checks = 0;    // (derivation, model) pairs evaluated
  int holds = 0;
  int redraws = 0;   // draws discarded: not decidable, or none found on the base
  int max_height = 0;
  std::map<std::string, int> rules;  // rule name -> uses
  std::vector<FuzzFailure> failures;
  bool ok() const { return failures.empty() && holds == checks && valid_proofs == derivations; }
};

// One mt19937_64 seeded from config.seed drives everything.
FuzzReport fuzz_soundness(const FuzzConfig& config);

}  // namespace tlw

#endif  // TLW_FUZZ_HPP_
