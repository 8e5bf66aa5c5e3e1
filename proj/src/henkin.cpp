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

#include "tlw/henkin.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include "tlw/parser.hpp"

namespace tlw {

namespace {

constexpr long long kCarrierLimit = 1 << 20;

long long checked_pow(long long base, long long exp) {
  long long r = 1;
  for (long long i = 0; i < exp; ++i) {
    r *= base;
    if (r > kCarrierLimit) fail(ErrorKind::SizeLimit, "carrier too large");
  }
  return r;
}

}  // namespace

GeneralModel::GeneralModel(Theory theory, int max_type_depth) : theory_(std::move(theory)), cap_(max_type_depth) {
  if (!is_hol(theory_.signature.mode()))
    fail(ErrorKind::InvalidModel, "general models interpret higher-order signatures only");
}

GeneralModel GeneralModel::full(Theory theory, const std::map<std::string, int>& sizes, int max_type_depth) {
  GeneralModel m(std::move(theory), max_type_depth);
  for (const auto& t : m.signature().types()) {
    auto it = sizes.find(t);
    int n = it == sizes.end() ? 1 : it->second;
    std::vector<std::string> names;
    for (int i = 0; i < n; ++i) names.push_back("x" + std::to_string(i));
    m.set_basic(t, names);
  }
  for (const auto& [c, t] : m.signature().constants()) m.set_constant(c, 0);
  return m;
}

void GeneralModel::set_basic(const std::string& type, std::vector<std::string> names) {
  if (!signature().has_type(type)) fail(ErrorKind::UnknownBasicType, "unknown basic type " + type);
  basic_[type] = std::move(names);
}

void GeneralModel::set_functions(const Type& exp, std::vector<std::string> names,
                                 std::vector<std::vector<int>> tables) {
  if (exp.kind() != Type::Kind::Exp) fail(ErrorKind::InvalidModel, "explicit carriers are for exponentials: " + exp.str());
  if (names.size() != tables.size()) fail(ErrorKind::InvalidModel, "carrier " + exp.str() + ": names and tables differ");
  Functions f;
  f.names = std::move(names);
  f.tables = std::move(tables);
  for (std::size_t i = 0; i < f.tables.size(); ++i)
    if (!f.index.emplace(f.tables[i], static_cast<int>(i)).second)
      fail(ErrorKind::InvalidModel, "carrier " + exp.str() + " lists " + f.names[i] + " twice");
  explicit_[exp] = std::move(f);
}

void GeneralModel::set_constant(const std::string& name, int index) {
  if (!signature().constant_type(name)) fail(ErrorKind::UnknownConstant, "unknown constant " + name);
  constants_[name] = index;
}

std::vector<Type> GeneralModel::explicit_types() const {
  std::vector<Type> out;
  for (const auto& [t, f] : explicit_) out.push_back(t);
  std::stable_sort(out.begin(), out.end(), [](const Type& a, const Type& b) { return a.depth() < b.depth(); });
  return out;
}

int GeneralModel::size(const Type& t) const {
  switch (t.kind()) {
    case Type::Kind::Basic: {
      auto it = basic_.find(t.name());
      if (it == basic_.end()) fail(ErrorKind::InvalidModel, "no carrier for " + t.name());
      return static_cast<int>(it->second.size());
    }
    case Type::Kind::Two:
      return 2;
    case Type::Kind::Prod: {
      long long n = static_cast<long long>(size(t.left())) * size(t.right());
      if (n > kCarrierLimit) fail(ErrorKind::SizeLimit, "carrier of " + t.str() + " too large");
      return static_cast<int>(n);
    }
    case Type::Kind::Exp: {
      auto it = explicit_.find(t);
      if (it != explicit_.end()) return static_cast<int>(it->second.tables.size());
      if (t.depth() > cap_) fail(ErrorKind::SizeLimit, "type " + t.str() + " exceeds the carrier depth cap");
      return static_cast<int>(checked_pow(size(t.result()), size(t.argument())));
    }
  }
  return 0;
}

std::vector<int> GeneralModel::table(const Type& exp, int f) const {
  auto it = explicit_.find(exp);
  if (it != explicit_.end()) return it->second.tables.at(f);
  int r = size(exp.result()), n = size(exp.argument());
  std::vector<int> out(n);
  for (int i = 0; i < n; ++i) {
    out[i] = f % r;
    f /= r;
  }
  return out;
}

std::optional<int> GeneralModel::find_function(const Type& exp, const std::vector<int>& tab) const {
  auto it = explicit_.find(exp);
  if (it != explicit_.end()) {
    auto j = it->second.index.find(tab);
    if (j == it->second.index.end()) return std::nullopt;
    return j->second;
  }
  int r = size(exp.result());
  long long f = 0;
  for (std::size_t i = tab.size(); i-- > 0;) f = f * r + tab[i];
  return static_cast<int>(f);
}

int GeneralModel::apply(const Type& exp, int f, int a) const {
  auto it = explicit_.find(exp);
  if (it != explicit_.end()) return it->second.tables[f][a];
  int r = size(exp.result());
  for (int i = 0; i < a; ++i) f /= r;
  return f % r;
}

int GeneralModel::constant(const std::string& name) const {
  auto it = constants_.find(name);
  if (it == constants_.end()) fail(ErrorKind::InvalidModel, "constant " + name + " has no denotation");
  return it->second;
}

std::string GeneralModel::element_name(const Type& t, int i) const {
  switch (t.kind()) {
    case Type::Kind::Basic:
      return basic_.at(t.name()).at(i);
    case Type::Kind::Two:
      return i == kTT ? "tt" : "ff";
    case Type::Kind::Prod:
      return "<" + element_name(t.left(), fst(t, i)) + "," + element_name(t.right(), snd(t, i)) + ">";
    case Type::Kind::Exp: {
      auto it = explicit_.find(t);
      if (it != explicit_.end()) return it->second.names.at(i);
      std::string s = "[";
      auto tab = table(t, i);
      for (std::size_t k = 0; k < tab.size(); ++k) s += (k ? "," : "") + element_name(t.result(), tab[k]);
      return s + "]";
    }
  }
  return "";
}

std::optional<int> GeneralModel::parse_element(const Type& t, std::string_view name) const {
  int n = size(t);
  for (int i = 0; i < n; ++i)
    if (element_name(t, i) == name) return i;
  return std::nullopt;
}

void GeneralModel::validate() const {
  const Signature& sig = signature();
  for (const auto& t : sig.types()) {
    auto it = basic_.find(t);
    if (it == basic_.end()) fail(ErrorKind::InvalidModel, "no carrier for " + t);
    std::set<std::string> seen;
    for (const auto& n : it->second)
      if (n.empty() || !seen.insert(n).second) fail(ErrorKind::InvalidModel, "carrier " + t + ": bad or repeated name '" + n + "'");
  }
  for (const auto& [t, f] : explicit_) {
    sig.check_type(t);
    if (t.depth() > cap_) fail(ErrorKind::InvalidModel, "carrier " + t.str() + " exceeds the depth cap");
    int n = size(t.argument()), r = size(t.result());
    std::set<std::string> seen;
    for (std::size_t i = 0; i < f.tables.size(); ++i) {
      if (f.names[i].empty() || !seen.insert(f.names[i]).second)
        fail(ErrorKind::InvalidModel, "carrier " + t.str() + ": bad or repeated name '" + f.names[i] + "'");
      if (static_cast<int>(f.tables[i].size()) != n)
        fail(ErrorKind::InvalidModel, "function " + f.names[i] + " is not total on " + t.argument().str());
      for (int v : f.tables[i])
        if (v < 0 || v >= r) fail(ErrorKind::InvalidModel, "function " + f.names[i] + " leaves " + t.result().str());
    }
  }
  for (const auto& [c, t] : sig.constants()) {
    auto it = constants_.find(c);
    if (it == constants_.end()) fail(ErrorKind::InvalidModel, "constant " + c + " has no denotation");
    if (it->second < 0 || it->second >= size(t)) fail(ErrorKind::InvalidModel, "constant " + c + " outside its carrier");
  }
}

bool operator==(const GeneralModel& a, const GeneralModel& b) {
  if (a.basic_ != b.basic_ || a.constants_ != b.constants_ || a.explicit_.size() != b.explicit_.size()) return false;
  for (const auto& [t, f] : a.explicit_) {
    auto it = b.explicit_.find(t);
    if (it == b.explicit_.end() || it->second.names != f.names || it->second.tables != f.tables) return false;
  }
  return true;
}

//------------------------------------------------------------------------------
// Evaluation

namespace {

struct Den {
  Type type;
  int value;
};

class HenkinEval {
 public:
  HenkinEval(const GeneralModel& m, HenkinEnv env) : m_(m), env_(std::move(env)) {}

  Den eval(const Term& t) {
    switch (t.kind()) {
      case TermKind::Var:
        for (auto it = env_.rbegin(); it != env_.rend(); ++it)
          if (it->first.name == t.name()) return {it->first.type, it->second};
        fail(ErrorKind::UnboundVariable, "unbound variable " + t.name());
      case TermKind::Const: {
        auto ty = m_.signature().constant_type(t.name());
        if (!ty) fail(ErrorKind::UnknownConstant, "unknown constant " + t.name());
        return {*ty, m_.constant(t.name())};
      }
      case TermKind::Pair: {
        Den a = eval(t.arg(0)), b = eval(t.arg(1));
        Type p = Type::prod(a.type, b.type);
        return {p, m_.pair(p, a.value, b.value)};
      }
      case TermKind::Proj1:
      case TermKind::Proj2: {
        Den v = eval(t.arg(0));
        if (v.type.kind() != Type::Kind::Prod) fail(ErrorKind::TypeMismatch, "projection of a non-pair");
        if (t.is(TermKind::Proj1)) return {v.type.left(), m_.fst(v.type, v.value)};
        return {v.type.right(), m_.snd(v.type, v.value)};
      }
      case TermKind::Lambda: {
        const Type& y = t.var_type();
        int n = m_.size(y);
        std::vector<int> tab(n);
        std::optional<Type> res;
        for (int a = 0; a < n; ++a) {
          env_.emplace_back(t.binder(), a);
          Den d = eval(t.body());
          env_.pop_back();
          res = d.type;
          tab[a] = d.value;
        }
        if (!res) res = body_type(t);
        Type e = Type::exp(*res, y);
        auto f = m_.find_function(e, tab);
        if (!f) fail(ErrorKind::EscapesCarrier, t.str() + " escapes the carrier of " + e.str());
        return {e, *f};
      }
      case TermKind::App: {
        Den f = eval(t.arg(0)), a = eval(t.arg(1));
        if (f.type.kind() != Type::Kind::Exp) fail(ErrorKind::TypeMismatch, "application of a non-function");
        return {f.type.result(), m_.apply(f.type, f.value, a.value)};
      }
      case TermKind::Eq: {
        Den a = eval(t.arg(0)), b = eval(t.arg(1));
        return truth(a.value == b.value);
      }
      case TermKind::Top:
        return truth(true);
      case TermKind::Bot:
        return truth(false);
      case TermKind::Not:
        return truth(!holds(t.arg(0)));
      case TermKind::And:
        return truth(holds(t.arg(0)) && holds(t.arg(1)));
      case TermKind::Or:
        return truth(holds(t.arg(0)) || holds(t.arg(1)));
      case TermKind::Implies:
        return truth(!holds(t.arg(0)) || holds(t.arg(1)));
      case TermKind::Forall:
      case TermKind::Exists: {
        bool all = true, any = false;
        const bool forall = t.is(TermKind::Forall);
        int n = m_.size(t.var_type());
        for (int a = 0; a < n && (forall ? all : !any); ++a) {
          env_.emplace_back(t.binder(), a);
          bool h = holds(t.body());
          env_.pop_back();
          all = all && h;
          any = any || h;
        }
        return truth(forall ? all : any);
      }
      case TermKind::RelApp:
        fail(ErrorKind::ModeViolation, "relation application outside lambda mode");
    }
    fail(ErrorKind::TypeMismatch, "ill-formed term");
  }

  bool holds(const Term& t) { return eval(t).value == kTT; }

 private:
  static Den truth(bool b) { return {Type::two(), b ? kTT : kFF}; }

  // Only needed when the binder's carrier is empty.
  Type body_type(const Term& lam) {
    std::vector<Var> vars;
    for (auto it = env_.rbegin(); it != env_.rend(); ++it) {
      bool seen = lam.binder().name == it->first.name;
      for (const auto& v : vars) seen = seen || v.name == it->first.name;
      if (!seen) vars.push_back(it->first);
    }
    vars.push_back(lam.binder());
    return type_of(lam.body(), Context(vars), m_.signature());
  }

  const GeneralModel& m_;
  HenkinEnv env_;
};

void walk_subterms(const Term& t, const Context& ctx, std::vector<WitnessTerm>& out, std::set<std::string>& seen) {
  if (seen.insert(ctx.str() + "|" + t.str()).second) out.push_back({ctx, t});
  if (t.is(TermKind::Var) || t.is(TermKind::Const)) return;
  if (t.is_binder()) {
    Context inner = ctx.find(t.name()) ? ctx.without(t.name()).with(t.binder()) : ctx.with(t.binder());
    walk_subterms(t.body(), inner, out, seen);
    return;
  }
  for (const auto& a : t.args()) walk_subterms(a, ctx, out, seen);
}

// Calls fn for every environment over ctx; stops when fn returns false.
void for_each_env(const GeneralModel& m, const Context& ctx, const std::function<bool(const HenkinEnv&)>& fn) {
  std::vector<int> sizes;
  for (const auto& v : ctx) sizes.push_back(m.size(v.type));
  for (int s : sizes)
    if (s == 0) return;
  HenkinEnv env;
  for (const auto& v : ctx) env.emplace_back(v, 0);
  while (true) {
    if (!fn(env)) return;
    std::size_t k = 0;
    while (k < env.size() && ++env[k].second == sizes[k]) env[k++].second = 0;
    if (k == env.size()) return;
  }
}

}  // namespace

int henkin_eval(const GeneralModel& m, const Term& term, const HenkinEnv& env) {
  return HenkinEval(m, env).eval(term).value;
}

bool henkin_satisfies(const GeneralModel& m, const Term& formula, const HenkinEnv& env) {
  return HenkinEval(m, env).holds(formula);
}

std::vector<WitnessTerm> theory_witnesses(const Theory& theory) {
  std::vector<WitnessTerm> out;
  std::set<std::string> seen;
  for (const auto& ax : theory.axioms) walk_subterms(ax, Context(), out, seen);
  return out;
}

ClosureVerdict check_closure(const GeneralModel& m, const std::vector<WitnessTerm>& witnesses) {
  ClosureVerdict v;
  for (std::size_t i = 0; i < witnesses.size() && v.valid; ++i) {
    for_each_env(m, witnesses[i].ctx, [&](const HenkinEnv& env) {
      try {
        HenkinEval(m, env).eval(witnesses[i].term);
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::EscapesCarrier) throw;
        v.valid = false;
        v.witness = static_cast<int>(i);
        v.term = witnesses[i].term.str();
        v.message = e.what();
        return false;
      }
      return true;
    });
  }
  return v;
}

bool is_sufficient(const std::vector<GeneralModel>& models, const std::vector<Term>& sentences,
                   const std::vector<bool>& provable) {
  for (std::size_t i = 0; i < sentences.size(); ++i) {
    if (i < provable.size() && provable[i]) continue;
    bool refuted = false;
    for (const auto& m : models) {
      try {
        refuted = !henkin_satisfies(m, sentences[i]);
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::EscapesCarrier) throw;
      }
      if (refuted) break;
    }
    if (!refuted) return false;
  }
  return true;
}

//------------------------------------------------------------------------------
// Labeled points

void LabeledPoint::validate() const {
  model.validate();
  for (const auto& [n, e] : labels) {
    if (n < 0) fail(ErrorKind::InvalidModel, "negative label " + std::to_string(n));
    model.signature().check_type(e.type);
    if (e.index < 0 || e.index >= model.size(e.type))
      fail(ErrorKind::InvalidModel, "label " + std::to_string(n) + " outside the carrier of " + e.type.str());
  }
}

bool in_basic_open(const LabeledPoint& pt, const Context& zs, const Term& phi, const std::vector<int>& ns) {
  if (ns.size() != zs.size())
    fail(ErrorKind::MemberOutOfRange, "expected " + std::to_string(zs.size()) + " labels, got " + std::to_string(ns.size()));
  HenkinEnv env;
  for (std::size_t i = 0; i < ns.size(); ++i) {
    auto it = pt.labels.find(ns[i]);
    if (it == pt.labels.end() || it->second.type != zs[i].type) return false;
    env.emplace_back(zs[i], it->second.index);
  }
  return henkin_satisfies(pt.model, phi, env);
}

PhiFiber phi_fiber(const std::vector<LabeledPoint>& points, const Type& z, const std::vector<BasicOpen>& extra) {
  PhiFiber out;
  out.type = z;
  check_point_cap(static_cast<int>(points.size()));
  std::vector<int> first(points.size());
  std::vector<std::string> base_names, total_names;
  for (std::size_t p = 0; p < points.size(); ++p) {
    first[p] = static_cast<int>(out.elements.size());
    base_names.push_back(points[p].name.empty() ? "p" + std::to_string(p) : points[p].name);
    int n = points[p].model.size(z);
    for (int a = 0; a < n; ++a) {
      out.elements.push_back({static_cast<int>(p), a});
      total_names.push_back(base_names.back() + ":" + points[p].model.element_name(z, a));
    }
  }
  if (out.elements.size() > 64) fail(ErrorKind::SizeLimit, "fibred set has more than 64 elements");

  std::set<int> labels;
  for (const auto& pt : points)
    for (const auto& [n, e] : pt.labels)
      if (e.type == z) labels.insert(n);
  out.labels.assign(labels.begin(), labels.end());

  auto label_at = [&](std::size_t p, int n) -> std::optional<int> {
    auto it = points[p].labels.find(n);
    if (it == points[p].labels.end() || it->second.type != z) return std::nullopt;
    return it->second.index;
  };

  for (int n : out.labels) {
    PointSet v = 0;
    for (std::size_t p = 0; p < points.size(); ++p)
      if (auto a = label_at(p, n)) v |= bit(first[p] + *a);
    out.v.push_back(v);
  }

  // U_{z1 = z2, (n, m)}, which includes the domains of definition (n = m)
  for (std::size_t i = 0; i < out.labels.size(); ++i)
    for (std::size_t j = i; j < out.labels.size(); ++j) {
      PointSet u = 0;
      for (std::size_t p = 0; p < points.size(); ++p) {
        auto a = label_at(p, out.labels[i]), b = label_at(p, out.labels[j]);
        if (a && b && *a == *b) u |= bit(static_cast<int>(p));
      }
      out.base_subbasis.push_back(u);
    }
  for (const auto& b : extra) {
    PointSet u = 0;
    for (std::size_t p = 0; p < points.size(); ++p)
      if (in_basic_open(points[p], b.zs, b.phi, b.ns)) u |= bit(static_cast<int>(p));
    out.base_subbasis.push_back(u);
  }

  std::vector<PointSet> total_subbasis = out.v;
  for (PointSet u : out.base_subbasis) {
    PointSet pre = 0;
    for (std::size_t e = 0; e < out.elements.size(); ++e)
      if (has(u, out.elements[e].point)) pre |= bit(static_cast<int>(e));
    total_subbasis.push_back(pre);
  }
  out.space.base = FinSpace::from_subbasis(base_names, out.base_subbasis);
  out.space.total = FinSpace::from_subbasis(total_names, total_subbasis);
  for (const auto& e : out.elements) out.space.proj.push_back(e.point);
  return out;
}

bool sections_injective(const PhiFiber& fiber) {
  for (PointSet v : fiber.v) {
    std::set<int> pts;
    for (int e : members(v))
      if (!pts.insert(fiber.elements[e].point).second) return false;
  }
  return true;
}

GeneralModel stalk_is_model(const std::vector<LabeledPoint>& points, int i) {
  const GeneralModel& src = points.at(i).model;
  GeneralModel out(src.theory(), src.max_type_depth());
  auto over = [&](const Type& t) {
    std::vector<int> idx;
    for (const auto& e : phi_fiber(points, t).elements)
      if (e.point == i) idx.push_back(e.index);
    return idx;
  };
  for (const auto& b : src.signature().types()) {
    Type t = Type::basic(b);
    std::vector<std::string> names;
    for (int a : over(t)) names.push_back(src.element_name(t, a));
    out.set_basic(b, names);
  }
  for (const auto& t : src.explicit_types()) {
    std::vector<std::string> names;
    std::vector<std::vector<int>> tables;
    for (int f : over(t)) {
      names.push_back(src.element_name(t, f));
      tables.push_back(src.table(t, f));
    }
    out.set_functions(t, names, tables);
  }
  for (const auto& [c, t] : src.signature().constants()) out.set_constant(c, src.constant(c));
  return out;
}

//------------------------------------------------------------------------------
// Files

namespace {

struct Statement {
  int line;
  std::string text;
};

std::string trim(std::string_view s) {
  std::size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string_view::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(a, b - a + 1));
}

std::vector<std::string> words(std::string_view s) {
  std::istringstream in{std::string(s)};
  std::vector<std::string> out;
  for (std::string w; in >> w;) out.push_back(w);
  return out;
}

struct PointDraft {
  std::string name;
  std::vector<Statement> carriers, funs, consts, labels;
};

}  // namespace

HenkinFile parse_henkin(std::string_view text, const std::function<Theory(const std::string&)>& load_theory,
                        std::string_view source) {
  HenkinFile out;
  std::string theory_text;
  std::vector<Statement> stmts;
  std::string mode_line;
  {
    std::string cur;
    int cur_line = 0, line = 1;
    std::size_t i = 0;
    while (i < text.size()) {
      std::size_t eol = text.find('\n', i);
      if (eol == std::string_view::npos) eol = text.size();
      std::string_view l = text.substr(i, eol - i);
      std::size_t hash = l.find('#');
      std::size_t slash = l.find("//");
      l = l.substr(0, std::min(hash, slash));
      std::string t = trim(l);
      if (!t.empty() && t[0] == '%') {
        auto w = words(t.substr(1));
        if (w.size() == 2 && w[0] == "theory") out.theory_path = w[1];
        else if (w.size() == 2 && w[0] == "mode") mode_line = t;
        else fail(ErrorKind::Parse, std::string(source) + ":" + std::to_string(line) + ": unknown directive " + t);
      } else {
        for (char c : l) {
          if (c == ';') {
            if (!trim(cur).empty()) stmts.push_back({cur_line, trim(cur)});
            cur.clear();
            continue;
          }
          if (trim(cur).empty() && c != ' ' && c != '\t') cur_line = line;
          cur += c;
        }
        cur += ' ';
      }
      i = eol + 1;
      ++line;
    }
    if (!trim(cur).empty()) fail(ErrorKind::Parse, std::string(source) + ":" + std::to_string(cur_line) + ": missing ';'");
  }
  auto where = [&](const Statement& s) { return std::string(source) + ":" + std::to_string(s.line) + ": "; };

  std::vector<PointDraft> drafts;
  for (const auto& s : stmts) {
    auto w = words(s.text);
    const std::string& head = w[0];
    bool is_decl = head == "type" || head == "axiom" || head == "rel" ||
                   (head == "const" && s.text.find('=') == std::string::npos);
    if (is_decl) {
      if (!drafts.empty()) fail(ErrorKind::Parse, where(s) + "declarations must precede the model");
      theory_text += s.text + ";\n";
      continue;
    }
    if (head == "point") {
      if (w.size() != 2) fail(ErrorKind::Parse, where(s) + "expected 'point NAME'");
      drafts.push_back({w[1], {}, {}, {}, {}});
      continue;
    }
    if (drafts.empty()) drafts.push_back({"p0", {}, {}, {}, {}});
    if (head == "carrier") drafts.back().carriers.push_back(s);
    else if (head == "fun") drafts.back().funs.push_back(s);
    else if (head == "const") drafts.back().consts.push_back(s);
    else if (head == "label") drafts.back().labels.push_back(s);
    else fail(ErrorKind::Parse, where(s) + "unknown statement '" + head + "'");
  }

  if (!out.theory_path.empty()) {
    if (!theory_text.empty()) fail(ErrorKind::Parse, std::string(source) + ": both %theory and inline declarations");
    out.theory = load_theory(out.theory_path);
  } else {
    out.theory = parse_theory((mode_line.empty() ? "" : mode_line + "\n") + theory_text, source);
  }
  const Signature& sig = out.theory.signature;

  try {
    for (const auto& d : drafts) {
      GeneralModel m(out.theory);
      // carriers: basic first, then exponentials by depth
      std::vector<std::pair<Type, std::vector<std::string>>> exps;
      for (const auto& s : d.carriers) {
        std::size_t colon = s.text.find(':');
        if (colon == std::string::npos) fail(ErrorKind::Parse, where(s) + "expected 'carrier TYPE: names'");
        Type t = parse_type(trim(s.text.substr(7, colon - 7)));
        auto names = words(s.text.substr(colon + 1));
        if (t.kind() == Type::Kind::Basic) m.set_basic(t.name(), names);
        else if (t.kind() == Type::Kind::Exp) exps.emplace_back(t, names);
        else fail(ErrorKind::Parse, where(s) + "carriers are declared for basic types and exponentials");
      }
      std::stable_sort(exps.begin(), exps.end(), [](const auto& a, const auto& b) { return a.first.depth() < b.first.depth(); });
      std::map<std::string, const Statement*> fun_of;
      for (const auto& s : d.funs) {
        std::size_t colon = s.text.find(':');
        if (colon == std::string::npos) fail(ErrorKind::Parse, where(s) + "expected 'fun NAME: a|->b ...'");
        fun_of[trim(s.text.substr(3, colon - 3))] = &s;
      }
      for (const auto& [t, names] : exps) {
        std::vector<std::vector<int>> tables;
        int n = m.size(t.argument());
        for (const auto& name : names) {
          auto it = fun_of.find(name);
          if (it == fun_of.end()) fail(ErrorKind::Parse, std::string(source) + ": function " + name + " has no table");
          const Statement& s = *it->second;
          std::vector<int> tab(n, -1);
          for (const auto& entry : words(s.text.substr(s.text.find(':') + 1))) {
            std::size_t arrow = entry.find("|->");
            if (arrow == std::string::npos) fail(ErrorKind::Parse, where(s) + "expected a|->b, got " + entry);
            auto a = m.parse_element(t.argument(), entry.substr(0, arrow));
            auto b = m.parse_element(t.result(), entry.substr(arrow + 3));
            if (!a || !b) fail(ErrorKind::Parse, where(s) + "unknown element in " + entry);
            if (tab[*a] != -1) fail(ErrorKind::Parse, where(s) + "argument given twice in " + entry);
            tab[*a] = *b;
          }
          if (std::count(tab.begin(), tab.end(), -1))
            fail(ErrorKind::Parse, where(s) + "function " + name + " is not total");
          tables.push_back(tab);
          fun_of.erase(it);
        }
        m.set_functions(t, names, tables);
      }
      if (!fun_of.empty())
        fail(ErrorKind::Parse, where(*fun_of.begin()->second) + "function " + fun_of.begin()->first + " is in no carrier");
      for (const auto& s : d.consts) {
        std::size_t eq = s.text.find('=');
        std::string name = trim(s.text.substr(5, eq - 5));
        auto t = sig.constant_type(name);
        if (!t) fail(ErrorKind::UnknownConstant, where(s) + "unknown constant " + name);
        auto v = m.parse_element(*t, trim(s.text.substr(eq + 1)));
        if (!v) fail(ErrorKind::Parse, where(s) + "unknown element for " + name);
        m.set_constant(name, *v);
      }
      LabeledPoint pt{d.name, m, {}};
      for (const auto& s : d.labels) {
        std::size_t eq = s.text.find('=');
        if (eq == std::string::npos) fail(ErrorKind::Parse, where(s) + "expected 'label N = element'");
        int n = 0;
        try {
          n = std::stoi(trim(s.text.substr(5, eq - 5)));
        } catch (const std::exception&) {
          fail(ErrorKind::Parse, where(s) + "label must be a natural number");
        }
        std::string rhs = trim(s.text.substr(eq + 1));
        std::optional<Type> ty;
        std::size_t colon = rhs.rfind(':');
        if (colon != std::string::npos) {
          ty = parse_type(trim(rhs.substr(colon + 1)));
          rhs = trim(rhs.substr(0, colon));
        }
        std::vector<Type> candidates;
        if (ty) {
          candidates.push_back(*ty);
        } else {
          for (const auto& b : sig.types()) candidates.push_back(Type::basic(b));
          candidates.push_back(Type::two());
          for (const auto& t : m.explicit_types()) candidates.push_back(t);
        }
        std::optional<Element> found;
        for (const auto& t : candidates)
          if (auto v = m.parse_element(t, rhs)) {
            if (found) fail(ErrorKind::Parse, where(s) + "ambiguous element " + rhs + "; add ': TYPE'");
            found = Element{t, *v};
          }
        if (!found) fail(ErrorKind::Parse, where(s) + "unknown element " + rhs);
        if (!pt.labels.emplace(n, *found).second) fail(ErrorKind::Parse, where(s) + "label given twice");
      }
      pt.validate();
      out.points.push_back(std::move(pt));
    }
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::Parse || std::string(e.what()).rfind(std::string(source), 0) == 0) throw;
    fail(e.kind(), std::string(source) + ": " + e.what());
  }
  return out;
}

std::string print_henkin(const HenkinFile& file) {
  std::ostringstream out;
  if (!file.theory_path.empty()) out << "%theory " << file.theory_path << "\n";
  else out << print_theory(file.theory);
  for (const auto& pt : file.points) {
    const GeneralModel& m = pt.model;
    out << "\npoint " << pt.name << ";\n";
    for (const auto& b : m.signature().types()) {
      out << "carrier " << b << ":";
      Type t = Type::basic(b);
      for (int i = 0; i < m.size(t); ++i) out << " " << m.element_name(t, i);
      out << ";\n";
    }
    for (const auto& t : m.explicit_types()) {
      out << "carrier " << t.str() << ":";
      for (int i = 0; i < m.size(t); ++i) out << " " << m.element_name(t, i);
      out << ";\n";
    }
    for (const auto& t : m.explicit_types())
      for (int i = 0; i < m.size(t); ++i) {
        out << "fun " << m.element_name(t, i) << ":";
        auto tab = m.table(t, i);
        for (std::size_t a = 0; a < tab.size(); ++a)
          out << " " << m.element_name(t.argument(), static_cast<int>(a)) << "|->" << m.element_name(t.result(), tab[a]);
        out << ";\n";
      }
    for (const auto& [c, t] : m.signature().constants()) out << "const " << c << " = " << m.element_name(t, m.constant(c)) << ";\n";
    for (const auto& [n, e] : pt.labels)
      out << "label " << n << " = " << m.element_name(e.type, e.index) << " : " << e.type.str() << ";\n";
  }
  return out.str();
}

}  // namespace tlw
