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

// Textbook set-model evaluation of higher-order terms. Values are trees:
// basic elements and booleans are atoms, pairs have two kids, functions
// list their results in the enumeration order of the argument type.

#ifndef TLW_TESTS_TARSKI_HPP_
#define TLW_TESTS_TARSKI_HPP_

#include <map>
#include <string>
#include <vector>

#include "tlw/semantics.hpp"

namespace tlw::testing {

struct Value {
  int atom = 0;
  std::vector<Value> kids;
  friend bool operator==(const Value& a, const Value& b) { return a.atom == b.atom && a.kids == b.kids; }
  friend bool operator<(const Value& a, const Value& b) {
    if (a.atom != b.atom) return a.atom < b.atom;
    return a.kids < b.kids;
  }
};

class Tarski {
 public:
  Tarski(Signature sig, std::map<std::string, int> sizes, std::map<std::string, Value> constants = {})
      : sig_(std::move(sig)), sizes_(std::move(sizes)), constants_(std::move(constants)) {}

  // Quantifiers over t range over the given values only (general models).
  void set_carrier(const Type& t, std::vector<Value> values) { cache_[t] = std::move(values); }
  void set_constant(const std::string& name, Value v) { constants_[name] = std::move(v); }

  const std::vector<Value>& elements(const Type& t) {
    auto it = cache_.find(t);
    if (it != cache_.end()) return it->second;
    std::vector<Value> out;
    switch (t.kind()) {
      case Type::Kind::Basic:
        for (int i = 0; i < sizes_.at(t.name()); ++i) out.push_back(Value{i, {}});
        break;
      case Type::Kind::Two:
        out = {Value{0, {}}, Value{1, {}}};
        break;
      case Type::Kind::Prod:
        for (const auto& a : elements(t.left()))
          for (const auto& b : elements(t.right())) out.push_back(Value{0, {a, b}});
        break;
      case Type::Kind::Exp: {
        const auto& res = elements(t.result());
        std::size_t n = elements(t.argument()).size();
        std::vector<std::size_t> digit(n, 0);
        if (res.empty() && n > 0) break;
        while (true) {
          Value f;
          for (std::size_t i = 0; i < n; ++i) f.kids.push_back(res[digit[i]]);
          out.push_back(f);
          std::size_t k = 0;
          while (k < n && ++digit[k] == res.size()) digit[k++] = 0;
          if (k == n) break;
        }
        break;
      }
    }
    return cache_.emplace(t, std::move(out)).first->second;
  }

  using Env = std::vector<std::pair<Var, Value>>;

  Value eval(const Term& t, Env& env) {
    switch (t.kind()) {
      case TermKind::Var:
        for (auto it = env.rbegin(); it != env.rend(); ++it)
          if (it->first.name == t.name()) return it->second;
        throw std::runtime_error("unbound " + t.name());
      case TermKind::Const:
        return constants_.at(t.name());
      case TermKind::Pair:
        return Value{0, {eval(t.arg(0), env), eval(t.arg(1), env)}};
      case TermKind::Proj1:
        return eval(t.arg(0), env).kids[0];
      case TermKind::Proj2:
        return eval(t.arg(0), env).kids[1];
      case TermKind::Lambda: {
        Value f;
        for (const auto& a : elements(t.var_type())) {
          env.emplace_back(t.binder(), a);
          f.kids.push_back(eval(t.body(), env));
          env.pop_back();
        }
        return f;
      }
      case TermKind::App: {
        Value f = eval(t.arg(0), env);
        Value a = eval(t.arg(1), env);
        Context ctx;
        std::vector<Var> vars;
        for (const auto& [v, val] : env) vars.push_back(v);
        // typing only needs the innermost binding of each name
        std::vector<Var> uniq;
        for (auto it = vars.rbegin(); it != vars.rend(); ++it) {
          bool seen = false;
          for (const auto& u : uniq) seen = seen || u.name == it->name;
          if (!seen) uniq.push_back(*it);
        }
        Type ft = type_of(t.arg(0), Context(uniq), sig_);
        const auto& dom = elements(ft.argument());
        for (std::size_t i = 0; i < dom.size(); ++i)
          if (dom[i] == a) return f.kids[i];
        throw std::runtime_error("argument outside its type");
      }
      case TermKind::Eq:
        return truth(eval(t.arg(0), env) == eval(t.arg(1), env));
      case TermKind::Top:
        return truth(true);
      case TermKind::Bot:
        return truth(false);
      case TermKind::Not:
        return truth(!holds(t.arg(0), env));
      case TermKind::And:
        return truth(holds(t.arg(0), env) && holds(t.arg(1), env));
      case TermKind::Or:
        return truth(holds(t.arg(0), env) || holds(t.arg(1), env));
      case TermKind::Implies:
        return truth(!holds(t.arg(0), env) || holds(t.arg(1), env));
      case TermKind::Forall:
      case TermKind::Exists: {
        bool all = true, any = false;
        for (const auto& a : elements(t.var_type())) {
          env.emplace_back(t.binder(), a);
          bool h = holds(t.body(), env);
          env.pop_back();
          all = all && h;
          any = any || h;
        }
        return truth(t.is(TermKind::Forall) ? all : any);
      }
      case TermKind::RelApp:
        throw std::runtime_error("relation symbols are not supported here");
    }
    throw std::runtime_error("unreachable");
  }

  bool holds(const Term& t, Env& env) { return eval(t, env).atom == 1; }
  bool holds(const Term& sentence) {
    Env env;
    return holds(sentence, env);
  }

  // Index of a value in the one-point-base sheaf the evaluator builds, for
  // transferring constants.
  int sheaf_index(Evaluator& ev, const Type& t, const Value& v) {
    switch (t.kind()) {
      case Type::Kind::Basic:
        return v.atom;
      case Type::Kind::Two:
        return v.atom == 1 ? ev.true_value(0) : 1 - ev.true_value(0);
      case Type::Kind::Prod:
        return sheaf_index(ev, t.left(), v.kids[0]) * ev.interpret_type(t.right()).stalk_size(0) +
               sheaf_index(ev, t.right(), v.kids[1]);
      case Type::Kind::Exp: {
        const auto& dom = elements(t.argument());
        std::vector<int> table(dom.size());
        for (std::size_t i = 0; i < dom.size(); ++i)
          table[sheaf_index(ev, t.argument(), dom[i])] = sheaf_index(ev, t.result(), v.kids[i]);
        return *ev.interpret_exponential(t).index_of(0, table);
      }
    }
    return -1;
  }

 private:
  static Value truth(bool b) { return Value{b ? 1 : 0, {}}; }

  Signature sig_;
  std::map<std::string, int> sizes_;
  std::map<std::string, Value> constants_;
  std::map<Type, std::vector<Value>> cache_;
};

}  // namespace tlw::testing

#endif  // TLW_TESTS_TARSKI_HPP_
