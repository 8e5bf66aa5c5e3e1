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

#include "tlw/fuzz.hpp"

#include <functional>
#include <random>

#include "tlw/formats.hpp"
#include "tlw/parser.hpp"

namespace tlw {

namespace {

constexpr int kMaxRedraws = 50;

void count_rules(const ProofTree& t, std::map<std::string, int>& out) {
  ++out[rule_name(t.rule)];
  for (const auto& p : t.premises) count_rules(p, out);
}

}  // namespace

Theory default_fuzz_theory(Mode mode) {
  if (mode == Mode::Lambda)
    return parse_theory("%mode lambda\ntype X;\nconst c : X;\nconst f : X^X;\nrel R : (X, X);\nrel q : ();\n");
  std::string head = std::string("%mode ") + mode_name(mode) + "\n";
  return parse_theory(head + "type X;\nconst c : X;\nconst f : X^X;\nconst P : 2^X;\n");
}

Flavor default_flavor(Mode mode) { return mode == Mode::HolClassical ? Flavor::Classical : Flavor::Omega; }

FuzzReport fuzz_soundness(const FuzzConfig& config) {
  if (config.count < 0 || config.depth < 1 || config.models < 1 || config.max_points < 1 || config.max_stalk < 1)
    fail(ErrorKind::Parse, "fuzz bounds must be positive");
  check_point_cap(config.max_points);
  Theory thy = config.theory ? *config.theory : default_fuzz_theory(config.mode);
  if (thy.signature.mode() != config.mode)
    fail(ErrorKind::ModeViolation, std::string("theory is in mode ") + mode_name(thy.signature.mode()));
  Flavor flavor = config.flavor.value_or(default_flavor(config.mode));
  std::mt19937_64 rng(config.seed);
  std::vector<std::vector<FinSpace>> spaces;
  for (int n = 1; n <= config.max_points; ++n) spaces.push_back(topologies_up_to_homeomorphism(n));

  FuzzReport rep;
  DerivationBounds bounds;
  bounds.depth = config.depth;
  for (int i = 0; i < config.count; ++i) {
    ++rep.derivations;
    ProofTree t = random_derivation(rng(), thy, bounds);
    count_rules(t, rep.rules);
    rep.max_height = std::max(rep.max_height, t.height());
    ProofVerdict v = check_proof(t, thy);
    if (!v.valid) {
      rep.failures.push_back({i, "", "kernel rejected generated proof: " + v.message, ""});
      continue;
    }
    ++rep.valid_proofs;
    const Sequent& s = *v.conclusion;
    for (int k = 0; k < config.models; ++k) {
      for (int tries = 0;; ++tries) {
        const auto& pool = spaces[rng() % spaces.size()];
        const FinSpace& x = pool[rng() % pool.size()];
        Interpretation m;
        try {
          m = random_interpretation(thy, x, flavor, config.max_stalk, rng);
          Evaluator ev(m);
          bool ok = ev.entails(s.ctx, s.lhs, s.rhs);
          ++rep.checks;
          if (ok) ++rep.holds;
          else rep.failures.push_back({i, s.str(), "sequent fails", print_model(m)});
          break;
        } catch (const Error& e) {
          // a draw that is not a c-interpretation, or none found on this base
          bool redraw = e.kind() == ErrorKind::NotDecidable || e.kind() == ErrorKind::SizeLimit;
          if (!redraw || tries >= kMaxRedraws) {
            ++rep.checks;
            rep.failures.push_back({i, s.str(), error_kind_name(e.kind()) + std::string(": ") + e.what(), ""});
            break;
          }
          ++rep.redraws;
        }
      }
    }
  }
  return rep;
}

}  // namespace tlw
