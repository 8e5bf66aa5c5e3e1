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

// Random labeled points and a bridge from general models to the Tarski
// oracle, for theories with one basic type X, a constant c : X and
// f : X^X.

#ifndef TLW_TESTS_HENKIN_GEN_HPP_
#define TLW_TESTS_HENKIN_GEN_HPP_

#include <algorithm>
#include <random>
#include <set>

#include "tarski.hpp"
#include "tlw/henkin.hpp"

namespace tlw::testing {

inline const char* kHenkinTheory = "type X; const c : X; const f : X^X;";

// Oracle over the same carriers, with translations both ways.
class Bridge {
 public:
  explicit Bridge(const GeneralModel& m) : m_(m), oracle_(m.signature(), sizes(m)) {
    for (const auto& t : m.explicit_types()) {
      std::vector<Value> vals;
      for (int i = 0; i < m.size(t); ++i) vals.push_back(to_value(t, i));
      oracle_.set_carrier(t, vals);
    }
    for (const auto& [c, t] : m.signature().constants()) oracle_.set_constant(c, to_value(t, m.constant(c)));
  }

  Tarski& oracle() { return oracle_; }

  Value to_value(const Type& t, int i) {
    switch (t.kind()) {
      case Type::Kind::Basic:
        return Value{i, {}};
      case Type::Kind::Two:
        return Value{i == kTT ? 1 : 0, {}};
      case Type::Kind::Prod:
        return Value{0, {to_value(t.left(), m_.fst(t, i)), to_value(t.right(), m_.snd(t, i))}};
      case Type::Kind::Exp: {
        Value f;
        for (const auto& a : oracle_.elements(t.argument()))
          f.kids.push_back(to_value(t.result(), m_.apply(t, i, from_value(t.argument(), a))));
        return f;
      }
    }
    return {};
  }

  int from_value(const Type& t, const Value& v) {
    switch (t.kind()) {
      case Type::Kind::Basic:
        return v.atom;
      case Type::Kind::Two:
        return v.atom == 1 ? kTT : kFF;
      case Type::Kind::Prod:
        return m_.pair(t, from_value(t.left(), v.kids[0]), from_value(t.right(), v.kids[1]));
      case Type::Kind::Exp: {
        const auto& dom = oracle_.elements(t.argument());
        std::vector<int> tab(m_.size(t.argument()));
        for (int a = 0; a < m_.size(t.argument()); ++a) {
          Value av = to_value(t.argument(), a);
          auto pos = std::find(dom.begin(), dom.end(), av) - dom.begin();
          tab[a] = from_value(t.result(), v.kids[pos]);
        }
        return *m_.find_function(t, tab);
      }
    }
    return -1;
  }

 private:
  static std::map<std::string, int> sizes(const GeneralModel& m) {
    std::map<std::string, int> out;
    for (const auto& b : m.signature().types()) out[b] = m.size(Type::basic(b));
    return out;
  }

  const GeneralModel& m_;
  Tarski oracle_;
};

// |X| in {1, 2}; with probability 1/2 an explicit X^X carrier holding f.
// Every element of X gets at least one label; some labels point at truth
// values and functions.
inline LabeledPoint random_point(const Theory& thy, std::mt19937_64& rng, const std::string& name) {
  auto pick = [&](int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng); };
  int nx = 1 + pick(2);
  GeneralModel m(thy);
  std::vector<std::string> xs;
  for (int i = 0; i < nx; ++i) xs.push_back(std::string(1, static_cast<char>('a' + i)));
  m.set_basic("X", xs);
  Type xx = Type::exp(Type::basic("X"), Type::basic("X"));
  int full = m.size(xx);
  std::vector<int> chosen;
  if (pick(2)) {
    for (int g = 0; g < full; ++g)
      if (pick(2)) chosen.push_back(g);
    if (chosen.empty()) chosen.push_back(pick(full));
    std::vector<std::string> names;
    std::vector<std::vector<int>> tables;
    for (int g : chosen) {
      names.push_back("g" + std::to_string(g));
      tables.push_back(m.table(xx, g));
    }
    m.set_functions(xx, names, tables);
  }
  m.set_constant("c", pick(nx));
  m.set_constant("f", pick(m.size(xx)));

  LabeledPoint pt{name, m, {}};
  std::vector<int> free;
  for (int n = 0; n < 12; ++n) free.push_back(n);
  std::shuffle(free.begin(), free.end(), rng);
  std::size_t next = 0;
  for (int a = 0; a < nx; ++a) {
    int copies = 1 + pick(2);
    for (int k = 0; k < copies; ++k) pt.labels[free[next++]] = Element{Type::basic("X"), a};
  }
  if (pick(2)) pt.labels[free[next++]] = Element{Type::two(), pick(2)};
  if (pick(2)) pt.labels[free[next++]] = Element{xx, pick(m.size(xx))};
  return pt;
}

}  // namespace tlw::testing

#endif  // TLW_TESTS_HENKIN_GEN_HPP_
