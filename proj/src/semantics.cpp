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

#include "tlw/semantics.hpp"

#include <algorithm>
#include <array>
#include <set>
#include <unordered_map>
#include <unordered_set>

namespace tlw {

const char* flavor_name(Flavor flavor) { return flavor == Flavor::Classical ? "classical-c" : "omega"; }

Flavor parse_flavor(std::string_view text) {
  if (text == "classical-c" || text == "classical") return Flavor::Classical;
  if (text == "omega" || text == "omega-intuitionistic") return Flavor::Omega;
  fail(ErrorKind::Parse, "unknown flavor '" + std::string(text) + "'");
}

namespace {

using Tab = std::vector<std::vector<int>>;

struct Key {
  const void* node;
  int vars;
  bool operator==(const Key& o) const { return node == o.node && vars == o.vars; }
};

struct KeyHash {
  std::size_t operator()(const Key& k) const {
    return std::hash<const void*>()(k.node) * 31 + static_cast<std::size_t>(k.vars);
  }
};

struct Val {
  Term hold;
  Type type;
  Tab tab;
};

struct Fv {
  Term hold;
  std::vector<std::string> names;  // sorted
};

void subtypes(const Type& t, std::set<Type>& out) {
  if (!out.insert(t).second) return;
  switch (t.kind()) {
    case Type::Kind::Prod:
      subtypes(t.left(), out);
      subtypes(t.right(), out);
      break;
    case Type::Kind::Exp:
      subtypes(t.result(), out);
      subtypes(t.argument(), out);
      break;
    default:
      break;
  }
}

void binder_types(const Term& t, std::set<Type>& out) {
  if (t.is_binder()) subtypes(t.var_type(), out);
  if (t.is(TermKind::Var)) subtypes(t.var_type(), out);
  for (const auto& a : t.args()) binder_types(a, out);
}

}  // namespace

struct Evaluator::Impl {
  explicit Impl(const Interpretation& model) : m(model), basis(model.theory.signature) {}

  Interpretation m;
  detail::BasisCache basis;
  std::optional<Omega> om;
  std::map<Type, Sheaf> types;
  std::map<Type, Exponential> exps;
  std::map<std::vector<Type>, Sheaf> ctx_sheaves;

  std::map<std::vector<Var>, int> varlist_ids;
  std::vector<std::vector<Var>> varlists;
  std::vector<const Sheaf*> varlist_sheaf;
  std::map<std::pair<int, int>, Tab> restrict_maps;

  std::unordered_map<const void*, Fv> fv;
  std::vector<const void*> fv_log;
  std::unordered_map<Key, Val, KeyHash> memo;
  std::vector<Key> memo_log;
  std::vector<std::array<std::size_t, 3>> marks;

  const Signature& sig() const { return m.theory.signature; }
  bool lambda_mode() const { return sig().mode() == Mode::Lambda; }
  bool kripke_joyal() const { return lambda_mode() && m.flavor == Flavor::Omega; }

  const Omega& omega_obj() {
    if (!om) om = omega(m.base);
    return *om;
  }

  int true_value(int p) const { return m.flavor == Flavor::Classical ? 0 : om->top(p); }

  const Sheaf& type_sheaf(const Type& t) {
    auto it = types.find(t);
    if (it != types.end()) return it->second;
    Sheaf s;
    switch (t.kind()) {
      case Type::Kind::Basic: {
        auto f = m.types.find(t.name());
        if (f == m.types.end()) fail(ErrorKind::UnknownBasicType, "no sheaf for type " + t.name());
        s = f->second;
        break;
      }
      case Type::Kind::Two:
        s = m.flavor == Flavor::Classical ? two(m.base) : omega_obj().sheaf;
        break;
      case Type::Kind::Prod:
        s = product(type_sheaf(t.left()), type_sheaf(t.right()));
        break;
      case Type::Kind::Exp:
        s = exponential_of(t).sheaf;
        break;
    }
    if (m.flavor == Flavor::Classical && !s.transitions_injective())
      fail(ErrorKind::NotDecidable, "type " + t.str() + " is not decidable in this interpretation");
    return types.emplace(t, std::move(s)).first->second;
  }

  const Exponential& exponential_of(const Type& t) {
    auto it = exps.find(t);
    if (it != exps.end()) return it->second;
    const Sheaf& res = type_sheaf(t.result());
    const Sheaf& arg = type_sheaf(t.argument());
    return exps.emplace(t, exponential(res, arg)).first->second;
  }

  const Sheaf& ctx_sheaf(const std::vector<Type>& ts) {
    auto it = ctx_sheaves.find(ts);
    if (it != ctx_sheaves.end()) return it->second;
    Sheaf s = ts.empty() ? terminal(m.base)
                         : product(ctx_sheaf(std::vector<Type>(ts.begin(), ts.end() - 1)), type_sheaf(ts.back()));
    return ctx_sheaves.emplace(ts, std::move(s)).first->second;
  }

  int intern(const std::vector<Var>& vars) {
    auto it = varlist_ids.find(vars);
    if (it != varlist_ids.end()) return it->second;
    std::vector<Type> ts;
    for (const auto& v : vars) ts.push_back(v.type);
    const Sheaf& s = ctx_sheaf(ts);
    int id = static_cast<int>(varlists.size());
    varlists.push_back(vars);
    varlist_sheaf.push_back(&s);
    varlist_ids.emplace(vars, id);
    return id;
  }

  const std::vector<std::string>& free_names(const Term& t) {
    auto it = fv.find(t.id());
    if (it != fv.end()) return it->second.names;
    std::vector<std::string> names;
    if (t.is(TermKind::Var)) {
      names.push_back(t.name());
    } else {
      std::set<std::string> acc;
      for (const auto& a : t.args())
        for (const auto& n : free_names(a)) acc.insert(n);
      if (t.is_binder()) acc.erase(t.name());
      names.assign(acc.begin(), acc.end());
    }
    fv_log.push_back(t.id());
    return fv.emplace(t.id(), Fv{t, std::move(names)}).first->second.names;
  }

  // Map from elements of the product over varlist `from` to the product
  // over `to`, where `to` picks positions `pos` of `from`.
  const Tab& restriction(int from, int to, const std::vector<int>& pos) {
    auto key = std::make_pair(from, to);
    auto it = restrict_maps.find(key);
    if (it != restrict_maps.end()) return it->second;
    const auto& vars = varlists[from];
    std::vector<const Sheaf*> ts;
    for (const auto& v : vars) ts.push_back(&type_sheaf(v.type));
    const int n = m.base.size();
    Tab map(n);
    const Sheaf& src = *varlist_sheaf[from];
    std::vector<int> digits(vars.size());
    for (int p = 0; p < n; ++p) {
      map[p].resize(src.stalk_size(p));
      for (int e = 0; e < src.stalk_size(p); ++e) {
        int rest = e;
        for (int i = static_cast<int>(vars.size()) - 1; i >= 0; --i) {
          int size = ts[i]->stalk_size(p);
          digits[i] = rest % size;
          rest /= size;
        }
        int out = 0;
        for (int i : pos) out = out * ts[i]->stalk_size(p) + digits[i];
        map[p][e] = out;
      }
    }
    return restrict_maps.emplace(key, std::move(map)).first->second;
  }

  const Val& eval(const Term& t, int vl) {
    Key key{t.id(), vl};
    auto it = memo.find(key);
    if (it != memo.end()) return it->second;
    const auto& names = free_names(t);
    const auto& vars = varlists[vl];
    std::vector<int> pos;
    std::set<std::string> taken;
    for (int i = static_cast<int>(vars.size()) - 1; i >= 0; --i)
      if (std::binary_search(names.begin(), names.end(), vars[i].name) && taken.insert(vars[i].name).second)
        pos.push_back(i);
    if (taken.size() != names.size()) {
      for (const auto& nm : names)
        if (!taken.count(nm)) fail(ErrorKind::UnboundVariable, "unbound variable '" + nm + "'");
    }
    std::reverse(pos.begin(), pos.end());
    Val val;
    if (pos.size() == vars.size()) {
      val = core(t, vl);
    } else {
      std::vector<Var> sub;
      for (int i : pos) sub.push_back(vars[i]);
      int svl = intern(sub);
      const Val& inner = eval(t, svl);
      const Tab& map = restriction(vl, svl, pos);
      val.hold = t;
      val.type = inner.type;
      val.tab.resize(map.size());
      for (std::size_t p = 0; p < map.size(); ++p) {
        val.tab[p].resize(map[p].size());
        for (std::size_t e = 0; e < map[p].size(); ++e) val.tab[p][e] = inner.tab[p][map[p][e]];
      }
    }
    memo_log.push_back(key);
    return memo.emplace(key, std::move(val)).first->second;
  }

  int tuple_value(const std::vector<const Val*>& parts, int p, int e) {
    int v = parts[0]->tab[p][e];
    for (std::size_t i = 1; i < parts.size(); ++i)
      v = v * type_sheaf(parts[i]->type).stalk_size(p) + parts[i]->tab[p][e];
    return v;
  }

  const Subsheaf& relation(const std::string& name) {
    auto it = m.relations.find(name);
    if (it == m.relations.end()) fail(ErrorKind::UnknownRelation, "no interpretation for relation " + name);
    return it->second;
  }

  Val core(const Term& t, int vl) {
    const Sheaf& env = *varlist_sheaf[vl];
    const int n = m.base.size();
    Val out;
    out.hold = t;
    out.tab.resize(n);
    auto each = [&](auto&& fn) {
      for (int p = 0; p < n; ++p) {
        out.tab[p].resize(env.stalk_size(p));
        for (int e = 0; e < env.stalk_size(p); ++e) out.tab[p][e] = fn(p, e);
      }
    };
    switch (t.kind()) {
      case TermKind::Var:
        out.type = t.var_type();
        each([](int, int e) { return e; });
        break;
      case TermKind::Const: {
        auto type = sig().constant_type(t.name());
        if (!type) fail(ErrorKind::UnknownConstant, "unknown constant '" + t.name() + "'");
        auto c = m.constants.find(t.name());
        if (c == m.constants.end()) fail(ErrorKind::InvalidModel, "no value for constant " + t.name());
        out.type = *type;
        const auto& sec = c->second;
        each([&](int p, int) { return sec[p]; });
        break;
      }
      case TermKind::Pair: {
        const Val& a = eval(t.arg(0), vl);
        const Val& b = eval(t.arg(1), vl);
        out.type = Type::prod(a.type, b.type);
        const Sheaf& bs = type_sheaf(b.type);
        each([&](int p, int e) { return a.tab[p][e] * bs.stalk_size(p) + b.tab[p][e]; });
        break;
      }
      case TermKind::Proj1:
      case TermKind::Proj2: {
        const Val& s = eval(t.arg(0), vl);
        if (s.type.kind() != Type::Kind::Prod) fail(ErrorKind::TypeMismatch, "projection of a non-product");
        const Sheaf& rs = type_sheaf(s.type.right());
        bool first = t.is(TermKind::Proj1);
        out.type = first ? s.type.left() : s.type.right();
        each([&](int p, int e) {
          int v = s.tab[p][e];
          return first ? v / rs.stalk_size(p) : v % rs.stalk_size(p);
        });
        break;
      }
      case TermKind::Lambda: {
        Var y = t.binder();
        std::vector<Var> ext = varlists[vl];
        ext.push_back(y);
        int bvl = intern(ext);
        const Val& body = eval(t.body(), bvl);
        out.type = Type::exp(body.type, y.type);
        const Exponential& ex = exponential_of(out.type);
        const Sheaf& ys = type_sheaf(y.type);
        std::vector<int> table;
        each([&](int p, int e) {
          table.clear();
          for (int q : members(m.base.min_open(p))) {
            int eq = env.trans(p, q, e);
            int ny = ys.stalk_size(q);
            for (int b = 0; b < ny; ++b) table.push_back(body.tab[q][eq * ny + b]);
          }
          auto idx = ex.index_of(p, table);
          if (!idx) fail(ErrorKind::InvalidSheaf, "abstraction is not natural");
          return *idx;
        });
        break;
      }
      case TermKind::App: {
        const Val& f = eval(t.arg(0), vl);
        const Val& a = eval(t.arg(1), vl);
        if (f.type.kind() != Type::Kind::Exp) fail(ErrorKind::TypeMismatch, "application of a non-function");
        const Exponential& ex = exponential_of(f.type);
        out.type = f.type.result();
        each([&](int p, int e) { return ex.apply(p, f.tab[p][e], a.tab[p][e]); });
        break;
      }
      case TermKind::Eq: {
        const Val& a = eval(t.arg(0), vl);
        const Val& b = eval(t.arg(1), vl);
        out.type = Type::two();
        if (m.flavor == Flavor::Classical) {
          each([&](int p, int e) { return a.tab[p][e] == b.tab[p][e] ? 0 : 1; });
        } else {
          const Sheaf& ts = type_sheaf(a.type);
          const Omega& o = omega_obj();
          each([&](int p, int e) {
            PointSet v = 0;
            for (int q : members(m.base.min_open(p)))
              if (ts.trans(p, q, a.tab[p][e]) == ts.trans(p, q, b.tab[p][e])) v |= bit(q);
            return o.index_of(p, v);
          });
        }
        break;
      }
      case TermKind::RelApp: {
        const Subsheaf& rel = relation(t.name());
        std::vector<const Val*> parts;
        for (const auto& a : t.args()) parts.push_back(&eval(a, vl));
        out.type = Type::two();
        if (m.flavor == Flavor::Classical) {
          each([&](int p, int e) {
            int v = parts.empty() ? 0 : tuple_value(parts, p, e);
            return rel.contains(p, v) ? 0 : 1;
          });
        } else {
          const Omega& o = omega_obj();
          each([&](int p, int e) {
            int v = parts.empty() ? 0 : tuple_value(parts, p, e);
            PointSet s = 0;
            for (int q : members(m.base.min_open(p)))
              if (rel.contains(q, rel.parent.trans(p, q, v))) s |= bit(q);
            return o.index_of(p, s);
          });
        }
        break;
      }
      default:
        fail(ErrorKind::TypeMismatch, "formula constructor reached the term evaluator: " + t.str());
    }
    return out;
  }

  // Kripke-Joyal clauses over the product of `vl`.
  Subsheaf kj(const Term& phi, int vl) {
    const Sheaf& env = *varlist_sheaf[vl];
    const int n = m.base.size();
    auto fill = [&](auto&& fn) {
      Subsheaf s = Subsheaf::none(env);
      for (int p = 0; p < n; ++p)
        for (int e = 0; e < env.stalk_size(p); ++e) s.in[p][e] = fn(p, e) ? 1 : 0;
      return s;
    };
    switch (phi.kind()) {
      case TermKind::Top:
        return Subsheaf::whole(env);
      case TermKind::Bot:
        return Subsheaf::none(env);
      case TermKind::Eq: {
        const Val& a = eval(phi.arg(0), vl);
        const Val& b = eval(phi.arg(1), vl);
        return fill([&](int p, int e) { return a.tab[p][e] == b.tab[p][e]; });
      }
      case TermKind::RelApp: {
        const Subsheaf& rel = relation(phi.name());
        std::vector<const Val*> parts;
        for (const auto& a : phi.args()) parts.push_back(&eval(a, vl));
        return fill([&](int p, int e) { return rel.contains(p, parts.empty() ? 0 : tuple_value(parts, p, e)); });
      }
      case TermKind::Not:
        return negate(kj(phi.arg(0), vl));
      case TermKind::And:
        return meet(kj(phi.arg(0), vl), kj(phi.arg(1), vl));
      case TermKind::Or:
        return join(kj(phi.arg(0), vl), kj(phi.arg(1), vl));
      case TermKind::Implies:
        return implies(kj(phi.arg(0), vl), kj(phi.arg(1), vl));
      case TermKind::Forall:
      case TermKind::Exists: {
        Var y = phi.binder();
        std::vector<Var> ext = varlists[vl];
        ext.push_back(y);
        int bvl = intern(ext);
        const Sheaf& big = *varlist_sheaf[bvl];
        const Sheaf& ys = type_sheaf(y.type);
        Subsheaf body = kj(phi.body(), bvl);
        SheafMorphism pi{big, env, Tab(n)};
        for (int p = 0; p < n; ++p)
          for (int e = 0; e < big.stalk_size(p); ++e) pi.comp[p].push_back(e / ys.stalk_size(p));
        return phi.is(TermKind::Forall) ? forall_along(pi, body) : exists_along(pi, body);
      }
      default:
        fail(ErrorKind::ModeViolation, "not a formula: " + phi.str());
    }
  }

  Subsheaf formula(const Term& phi, const Context& ctx) {
    int vl = intern(ctx.vars());
    if (kripke_joyal()) return kj(phi, vl);
    Term compiled = basis.compile(phi);
    const Val& v = eval(compiled, vl);
    const Sheaf& env = *varlist_sheaf[vl];
    Subsheaf s = Subsheaf::none(env);
    for (int p = 0; p < m.base.size(); ++p)
      for (int e = 0; e < env.stalk_size(p); ++e) s.in[p][e] = v.tab[p][e] == true_value(p);
    return s;
  }

  void validate() {
    const Signature& s = sig();
    if (m.flavor == Flavor::Omega) omega_obj();
    for (const auto& name : s.types()) {
      auto it = m.types.find(name);
      if (it == m.types.end()) fail(ErrorKind::InvalidModel, "basic type " + name + " has no sheaf");
      if (!it->second.base().same_topology(m.base))
        fail(ErrorKind::BaseMismatch, "sheaf for " + name + " lives over another space");
    }
    std::set<Type> needed;
    for (const auto& name : s.types()) needed.insert(Type::basic(name));
    for (const auto& [name, type] : s.constants()) subtypes(type, needed);
    for (const auto& [name, args] : s.relations())
      for (const auto& a : args) subtypes(a, needed);
    for (const auto& ax : m.theory.axioms) binder_types(ax, needed);
    for (const auto& t : needed)
      if (!(lambda_mode() && t.contains_two())) type_sheaf(t);
    for (const auto& [name, type] : s.constants()) {
      auto it = m.constants.find(name);
      if (it == m.constants.end()) fail(ErrorKind::InvalidModel, "constant " + name + " has no value");
      const Sheaf& ts = type_sheaf(type);
      if (!ts.is_section(m.base.full(), it->second))
        fail(ErrorKind::InvalidModel, "value of " + name + " is not a global section of its type");
    }
    if (lambda_mode()) {
      for (const auto& [name, args] : s.relations()) {
        auto it = m.relations.find(name);
        if (it == m.relations.end()) fail(ErrorKind::InvalidModel, "relation " + name + " has no subsheaf");
        const Sheaf& parent = args.empty() ? terminal(m.base) : type_sheaf(tuple_type(args));
        if (!it->second.parent.same_shape(parent))
          fail(ErrorKind::InvalidModel, "relation " + name + " is not a subsheaf of its argument sheaf");
        if (!it->second.is_closed()) fail(ErrorKind::InvalidModel, "relation " + name + " is not transition-closed");
        if (m.flavor == Flavor::Classical && !complement(it->second))
          fail(ErrorKind::NotDecidable, "relation " + name + " is not complemented");
      }
    }
  }
};

Evaluator::Evaluator(const Interpretation& model) : impl_(std::make_unique<Impl>(model)) {
  validate_theory(model.theory);
  impl_->validate();
}

Evaluator::~Evaluator() = default;

const Interpretation& Evaluator::model() const { return impl_->m; }
const Sheaf& Evaluator::interpret_type(const Type& type) { return impl_->type_sheaf(type); }
const Exponential& Evaluator::interpret_exponential(const Type& t) { return impl_->exponential_of(t); }

const Sheaf& Evaluator::context_sheaf(const Context& ctx) {
  return *impl_->varlist_sheaf[impl_->intern(ctx.vars())];
}

const Sheaf& Evaluator::truth_sheaf() { return impl_->type_sheaf(Type::two()); }

int Evaluator::true_value(int p) const { return impl_->true_value(p); }

SheafMorphism Evaluator::interpret_term(const Term& term, const Context& ctx) {
  Term t = impl_->lambda_mode() ? term : impl_->basis.compile(term);
  int vl = impl_->intern(ctx.vars());
  const Val& v = impl_->eval(t, vl);
  return SheafMorphism{*impl_->varlist_sheaf[vl], impl_->type_sheaf(v.type), v.tab};
}

Subsheaf Evaluator::interpret_formula(const Term& formula, const Context& ctx) {
  return impl_->formula(formula, ctx);
}

bool Evaluator::satisfies(const Term& sentence) { return interpret_formula(sentence, Context()).is_whole(); }

bool Evaluator::entails(const Context& ctx, const Term& lhs, const Term& rhs) {
  return interpret_formula(lhs, ctx).leq(interpret_formula(rhs, ctx));
}

std::size_t Evaluator::mark() const {
  auto& marks = impl_->marks;
  marks.push_back({impl_->memo_log.size(), impl_->fv_log.size(), impl_->basis.mark()});
  return marks.size() - 1;
}

void Evaluator::rollback(std::size_t mark) {
  auto& marks = impl_->marks;
  if (mark >= marks.size()) fail(ErrorKind::InvalidModel, "stale evaluator mark");
  auto [memo_mark, fv_mark, basis_mark] = marks[mark];
  marks.resize(mark);
  while (impl_->memo_log.size() > memo_mark) {
    impl_->memo.erase(impl_->memo_log.back());
    impl_->memo_log.pop_back();
  }
  while (impl_->fv_log.size() > fv_mark) {
    impl_->fv.erase(impl_->fv_log.back());
    impl_->fv_log.pop_back();
  }
  impl_->basis.rollback(basis_mark);
}

void validate_interpretation(const Interpretation& model) { Evaluator check(model); }

ModelVerdict check_model(Evaluator& eval) {
  const auto& axioms = eval.model().theory.axioms;
  for (std::size_t i = 0; i < axioms.size(); ++i)
    if (!eval.satisfies(axioms[i])) {
      ModelVerdict v;
      v.valid = false;
      v.failing_axiom = static_cast<int>(i);
      v.message = "axiom " + std::to_string(i + 1) + " fails: " + axioms[i].str();
      return v;
    }
  return {};
}

ModelVerdict check_model(const Interpretation& model) {
  Evaluator eval(model);
  return check_model(eval);
}

//------------------------------------------------------------------------------
// Random interpretations

Subsheaf random_subsheaf(const Sheaf& f, std::mt19937_64& rng) {
  Subsheaf s = Subsheaf::none(f);
  const FinSpace& x = f.base();
  for (int p = 0; p < x.size(); ++p)
    for (int a = 0; a < f.stalk_size(p); ++a) s.in[p][a] = static_cast<char>(rng() & 1);
  for (int p = 0; p < x.size(); ++p)
    for (int a = 0; a < f.stalk_size(p); ++a)
      if (s.in[p][a])
        for (int q : members(x.min_open(p))) s.in[q][f.trans(p, q, a)] = 1;
  return s;
}

Interpretation random_interpretation(const Theory& theory, const FinSpace& base, Flavor flavor, int max_stalk,
                                     std::mt19937_64& rng) {
  const Signature& sig = theory.signature;
  for (int attempt = 0; attempt < 200; ++attempt) {
    Interpretation m;
    m.theory = theory;
    m.base = base;
    m.flavor = flavor;
    for (const auto& name : sig.types()) {
      Sheaf f = random_sheaf(base, max_stalk, rng);
      for (int k = 0; k < 50 && flavor == Flavor::Classical && !f.transitions_injective(); ++k)
        f = random_sheaf(base, max_stalk, rng);
      if (flavor == Flavor::Classical && !f.transitions_injective()) f = constant_sheaf(base, {"a"});
      m.types[name] = f;
    }
    Interpretation shape = m;
    shape.theory = Theory{Signature(sig.mode()), {}};
    for (const auto& name : sig.types()) shape.theory.signature.add_type(name);
    try {
      Evaluator types_only(shape);
      bool ok = true;
      for (const auto& [name, type] : sig.constants()) {
        auto secs = types_only.interpret_type(type).global_sections();
        if (secs.empty()) {
          ok = false;
          break;
        }
        m.constants[name] = secs[rng() % secs.size()];
      }
      if (!ok) continue;
      for (const auto& [name, args] : sig.relations()) {
        Sheaf parent = args.empty() ? terminal(base) : types_only.interpret_type(tuple_type(args));
        Subsheaf s = random_subsheaf(parent, rng);
        for (int k = 0; k < 20 && flavor == Flavor::Classical && !complement(s); ++k) s = random_subsheaf(parent, rng);
        if (flavor == Flavor::Classical && !complement(s)) s = Subsheaf::none(parent);
        m.relations[name] = s;
      }
      validate_interpretation(m);
      return m;
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::NotDecidable) throw;
    }
  }
  fail(ErrorKind::SizeLimit, "no random interpretation found in 200 draws");
}

//------------------------------------------------------------------------------
// Countermodel search

namespace {

// Cartesian product driver; returns false when visit stopped the walk.
bool product_walk(const std::vector<std::size_t>& sizes, const std::function<bool(const std::vector<std::size_t>&)>& visit) {
  std::vector<std::size_t> idx(sizes.size(), 0);
  for (auto s : sizes)
    if (s == 0) return true;
  while (true) {
    if (!visit(idx)) return false;
    std::size_t k = 0;
    while (k < sizes.size() && ++idx[k] == sizes[k]) idx[k++] = 0;
    if (k == sizes.size()) return true;
  }
}

}  // namespace

SearchResult search_countermodel(const Theory& theory, const Term& sentence, const SearchBounds& bounds) {
  validate_theory(theory);
  check_formula(sentence, Context(), theory.signature);
  const Signature& sig = theory.signature;
  const bool lambda = sig.mode() == Mode::Lambda;
  SearchResult result;
  for (int n = 1; n <= bounds.max_points; ++n) {
    for (const FinSpace& x : topologies_up_to_homeomorphism(n)) {
      std::vector<Sheaf> candidates;
      for (auto& f : all_sheaves(x, bounds.max_stalk))
        if (bounds.flavor == Flavor::Omega || f.transitions_injective()) candidates.push_back(f);
      std::vector<std::size_t> type_sizes(sig.types().size(), candidates.size());
      bool stop = false;
      product_walk(type_sizes, [&](const std::vector<std::size_t>& choice) {
        Interpretation m;
        m.theory = theory;
        m.base = x;
        m.flavor = bounds.flavor;
        for (std::size_t i = 0; i < choice.size(); ++i) m.types[sig.types()[i]] = candidates[choice[i]];
        // sheaves for constants and relations, via a throwaway evaluator
        // over an interpretation with the constants still missing
        Interpretation shape = m;
        shape.theory.axioms.clear();
        Signature bare(sig.mode());
        for (const auto& t : sig.types()) bare.add_type(t);
        shape.theory.signature = bare;
        std::vector<std::vector<std::vector<int>>> sections;
        std::vector<std::vector<Subsheaf>> rels;
        try {
          Evaluator types_only(shape);
          for (const auto& [name, type] : sig.constants()) {
            sections.push_back(types_only.interpret_type(type).global_sections());
          }
          for (const auto& [name, args] : sig.relations()) {
            Sheaf parent = args.empty() ? terminal(x) : types_only.interpret_type(tuple_type(args));
            std::vector<Subsheaf> subs;
            for_each_subsheaf(parent, [&](const Subsheaf& s) {
              if (bounds.flavor == Flavor::Omega || complement(s)) subs.push_back(s);
              return true;
            });
            rels.push_back(std::move(subs));
          }
        } catch (const Error& e) {
          if (e.kind() == ErrorKind::NotDecidable) return true;
          throw;
        }
        std::vector<std::size_t> sizes;
        for (const auto& s : sections) sizes.push_back(s.size());
        for (const auto& r : rels) sizes.push_back(r.size());
        product_walk(sizes, [&](const std::vector<std::size_t>& pick) {
          if (result.candidates >= bounds.max_candidates) {
            result.exhausted = false;
            stop = true;
            return false;
          }
          ++result.candidates;
          std::size_t k = 0;
          for (const auto& [name, type] : sig.constants()) m.constants[name] = sections[k][pick[k]], ++k;
          std::size_t r = 0;
          for (const auto& [name, args] : sig.relations()) m.relations[name] = rels[r][pick[k + r]], ++r;
          try {
            Evaluator ev(m);
            if (!check_model(ev).valid) return true;
            if (!ev.satisfies(sentence)) {
              result.model = m;
              stop = true;
              return false;
            }
          } catch (const Error& e) {
            if (e.kind() != ErrorKind::NotDecidable) throw;
          }
          return true;
        });
        (void)lambda;
        return !stop;
      });
      if (stop) return result;
    }
  }
  return result;
}

//------------------------------------------------------------------------------
// Definability search

Subsheaf graph_of(const SheafMorphism& f, const Sheaf& y_z) {
  Subsheaf g = Subsheaf::none(y_z);
  const FinSpace& x = f.source.base();
  for (int p = 0; p < x.size(); ++p) {
    // y_z = (1 x Y) x Z, with 1 x Y indexed like Y
    int nz = f.target.stalk_size(p);
    for (int a = 0; a < f.source.stalk_size(p); ++a) g.in[p][a * nz + f.comp[p][a]] = 1;
  }
  return g;
}

namespace {

std::string subsheaf_key(const Subsheaf& s) {
  std::string k;
  for (const auto& v : s.in) {
    for (char c : v) k.push_back(c ? '1' : '0');
    k.push_back('|');
  }
  return k;
}

std::string tab_key(const SheafMorphism& m) {
  std::string k;
  for (const auto& v : m.comp) {
    for (int c : v) k += std::to_string(c) + ",";
    k.push_back('|');
  }
  return k;
}

}  // namespace

std::optional<Term> find_defining_formula(Evaluator& eval, const Type& y_type, const Type& z_type,
                                          const SheafMorphism& f, int depth) {
  const Signature& sig = eval.model().theory.signature;
  Var y{"y", y_type}, z{"z", z_type};
  Context ctx({y, z});
  const Sheaf& env = eval.context_sheaf(ctx);
  Subsheaf target = graph_of(f, env);
  const bool lambda = sig.mode() == Mode::Lambda;

  // terms by type, one per denotation
  std::map<Type, std::vector<Term>> terms;
  std::set<std::string> seen_terms;
  auto add_term = [&](const Term& t) {
    Type ty = type_of(t, ctx, sig);
    if (lambda && ty.contains_two()) return;
    if (t.depth() >= depth) return;
    SheafMorphism m = eval.interpret_term(t, ctx);
    if (!seen_terms.insert(ty.str() + "#" + tab_key(m)).second) return;
    terms[ty].push_back(t);
  };
  add_term(Term::var(y));
  add_term(Term::var(z));
  for (const auto& [name, type] : sig.constants())
    if (!(lambda && type.contains_two())) add_term(Term::constant(name));
  for (int round = 1; round < depth - 1; ++round) {
    auto snapshot = terms;
    for (const auto& [ty, ts] : snapshot)
      for (const auto& t : ts) {
        if (ty.kind() == Type::Kind::Prod) {
          add_term(Term::proj(1, t));
          add_term(Term::proj(2, t));
        }
        if (ty.kind() == Type::Kind::Exp) {
          auto it = snapshot.find(ty.argument());
          if (it != snapshot.end())
            for (const auto& a : it->second) add_term(Term::app(t, a));
        }
      }
  }

  std::vector<Term> formulas;
  std::set<std::string> seen;
  auto try_formula = [&](const Term& phi) -> bool {
    if (phi.depth() > depth) return false;
    Subsheaf s = eval.interpret_formula(phi, ctx);
    if (!seen.insert(subsheaf_key(s)).second) return false;
    formulas.push_back(phi);
    return s == target;
  };
  auto found = [&]() -> std::optional<Term> {
    // re-check the last accepted formula from scratch
    const Term& phi = formulas.back();
    if (eval.interpret_formula(phi, ctx) == target) return phi;
    return std::nullopt;
  };
  // atoms, by the depth of the equation
  std::vector<Term> atoms;
  for (const auto& [ty, ts] : terms)
    for (std::size_t i = 0; i < ts.size(); ++i)
      for (std::size_t j = i + 1; j < ts.size(); ++j) atoms.push_back(Term::eq(ts[i], ts[j]));
  std::stable_sort(atoms.begin(), atoms.end(), [](const Term& a, const Term& b) { return a.depth() < b.depth(); });
  for (const auto& a : atoms)
    if (try_formula(a)) return found();
  // boolean combinations
  for (int round = 0; round < depth; ++round) {
    std::vector<Term> layer = formulas;
    for (const auto& a : layer)
      if (try_formula(Term::negation(a))) return found();
    for (std::size_t i = 0; i < layer.size(); ++i)
      for (std::size_t j = i + 1; j < layer.size(); ++j) {
        if (try_formula(Term::conj(layer[i], layer[j]))) return found();
        if (try_formula(Term::disj(layer[i], layer[j]))) return found();
      }
    if (formulas.size() == layer.size()) break;
  }
  return std::nullopt;
}

}  // namespace tlw
