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

#include "tlw/syntax.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <unordered_map>

namespace tlw {

const char* error_kind_name(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::UnboundVariable: return "UnboundVariable";
    case ErrorKind::UnknownConstant: return "UnknownConstant";
    case ErrorKind::UnknownRelation: return "UnknownRelation";
    case ErrorKind::UnknownBasicType: return "UnknownBasicType";
    case ErrorKind::TypeMismatch: return "TypeMismatch";
    case ErrorKind::ModeViolation: return "ModeViolation";
    case ErrorKind::DuplicateName: return "DuplicateName";
    case ErrorKind::Parse: return "ParseError";
    case ErrorKind::RuleNotInMode: return "RuleNotInMode";
    case ErrorKind::SideConditionViolated: return "SideConditionViolated";
    case ErrorKind::SchemaMismatch: return "SchemaMismatch";
    case ErrorKind::MemberOutOfRange: return "MemberOutOfRange";
    case ErrorKind::InvalidSpace: return "InvalidSpace";
    case ErrorKind::InvalidSheaf: return "InvalidSheaf";
    case ErrorKind::BaseMismatch: return "BaseMismatch";
    case ErrorKind::ParentMismatch: return "ParentMismatch";
    case ErrorKind::NotEtale: return "NotEtale";
    case ErrorKind::NotDecidable: return "NotDecidable";
    case ErrorKind::InvalidModel: return "InvalidModel";
    case ErrorKind::EscapesCarrier: return "EscapesCarrier";
    case ErrorKind::SizeLimit: return "SizeLimit";
    case ErrorKind::Io: return "IoError";
  }
  return "Error";
}

const char* mode_name(Mode mode) {
  switch (mode) {
    case Mode::HolClassical: return "hol-classical";
    case Mode::HolIntuitionistic: return "hol-intuitionistic";
    case Mode::Lambda: return "lambda";
  }
  return "?";
}

Mode parse_mode(std::string_view text) {
  if (text == "hol-classical") return Mode::HolClassical;
  if (text == "hol-intuitionistic") return Mode::HolIntuitionistic;
  if (text == "lambda") return Mode::Lambda;
  fail(ErrorKind::Parse, "unknown mode '" + std::string(text) + "'");
}

//------------------------------------------------------------------------------
// Type

struct Type::Node {
  Kind kind;
  std::string name;
  std::vector<Type> parts;
};

Type::Type() : Type(two()) {}

Type Type::basic(std::string name) {
  return Type(std::make_shared<const Node>(Node{Kind::Basic, std::move(name), {}}));
}

Type Type::two() {
  static const auto node = std::make_shared<const Node>(Node{Kind::Two, "", {}});
  return Type(node);
}

Type Type::prod(Type left, Type right) {
  return Type(std::make_shared<const Node>(
      Node{Kind::Prod, "", {std::move(left), std::move(right)}}));
}

Type Type::exp(Type result, Type argument) {
  return Type(std::make_shared<const Node>(
      Node{Kind::Exp, "", {std::move(result), std::move(argument)}}));
}

Type::Kind Type::kind() const { return node_->kind; }
const std::string& Type::name() const { return node_->name; }
const Type& Type::left() const { return node_->parts[0]; }
const Type& Type::right() const { return node_->parts[1]; }
const Type& Type::result() const { return node_->parts[0]; }
const Type& Type::argument() const { return node_->parts[1]; }

bool Type::contains_two() const {
  if (kind() == Kind::Two) return true;
  for (const auto& p : node_->parts)
    if (p.contains_two()) return true;
  return false;
}

int Type::depth() const {
  int d = 0;
  for (const auto& p : node_->parts) d = std::max(d, p.depth());
  return node_->parts.empty() ? 0 : d + 1;
}

namespace {

std::string type_str(const Type& t, int prec) {
  // prec: 0 top, 1 product operand, 2 exponent operand
  switch (t.kind()) {
    case Type::Kind::Basic: return t.name();
    case Type::Kind::Two: return "2";
    case Type::Kind::Prod: {
      std::string s = type_str(t.left(), 1) + "*" + type_str(t.right(), 2);
      return prec >= 2 ? "(" + s + ")" : s;
    }
    case Type::Kind::Exp: {
      std::string s = type_str(t.result(), 3) + "^" + type_str(t.argument(), 3);
      return prec >= 3 ? "(" + s + ")" : s;
    }
  }
  return "?";
}

}  // namespace

std::string Type::str() const { return type_str(*this, 0); }

int compare(const Type& a, const Type& b) {
  if (a.node_ == b.node_) return 0;
  if (a.kind() != b.kind()) return static_cast<int>(a.kind()) < static_cast<int>(b.kind()) ? -1 : 1;
  if (a.kind() == Type::Kind::Basic) return a.name().compare(b.name()) < 0 ? -1 : (a.name() == b.name() ? 0 : 1);
  for (std::size_t i = 0; i < a.node_->parts.size(); ++i) {
    int c = compare(a.node_->parts[i], b.node_->parts[i]);
    if (c != 0) return c;
  }
  return 0;
}

std::string Var::str() const { return name + ":" + type.str(); }

//------------------------------------------------------------------------------
// Term

struct Term::Node {
  TermKind kind;
  std::string name;
  Type type;
  std::vector<Term> args;
};

Term::Term() : Term(top()) {}

Term Term::var(Var v) {
  return Term(std::make_shared<const Node>(Node{TermKind::Var, std::move(v.name), std::move(v.type), {}}));
}
Term Term::var(std::string name, Type type) { return var(Var{std::move(name), std::move(type)}); }
Term Term::constant(std::string name) {
  return Term(std::make_shared<const Node>(Node{TermKind::Const, std::move(name), Type(), {}}));
}
Term Term::pair(Term first, Term second) {
  return Term(std::make_shared<const Node>(Node{TermKind::Pair, "", Type(), {std::move(first), std::move(second)}}));
}
Term Term::proj(int index, Term tuple) {
  if (index != 1 && index != 2) fail(ErrorKind::SchemaMismatch, "projection index must be 1 or 2");
  return Term(std::make_shared<const Node>(
      Node{index == 1 ? TermKind::Proj1 : TermKind::Proj2, "", Type(), {std::move(tuple)}}));
}
Term Term::lambda(Var binder, Term body) {
  return Term(std::make_shared<const Node>(
      Node{TermKind::Lambda, std::move(binder.name), std::move(binder.type), {std::move(body)}}));
}
Term Term::app(Term fun, Term arg) {
  return Term(std::make_shared<const Node>(Node{TermKind::App, "", Type(), {std::move(fun), std::move(arg)}}));
}
Term Term::eq(Term lhs, Term rhs) {
  return Term(std::make_shared<const Node>(Node{TermKind::Eq, "", Type(), {std::move(lhs), std::move(rhs)}}));
}
Term Term::top() {
  static const auto node = std::make_shared<const Node>(Node{TermKind::Top, "", Type(), {}});
  return Term(node);
}
Term Term::bot() {
  static const auto node = std::make_shared<const Node>(Node{TermKind::Bot, "", Type(), {}});
  return Term(node);
}
Term Term::negation(Term f) {
  return Term(std::make_shared<const Node>(Node{TermKind::Not, "", Type(), {std::move(f)}}));
}
Term Term::conj(Term a, Term b) {
  return Term(std::make_shared<const Node>(Node{TermKind::And, "", Type(), {std::move(a), std::move(b)}}));
}
Term Term::disj(Term a, Term b) {
  return Term(std::make_shared<const Node>(Node{TermKind::Or, "", Type(), {std::move(a), std::move(b)}}));
}
Term Term::implies(Term a, Term b) {
  return Term(std::make_shared<const Node>(Node{TermKind::Implies, "", Type(), {std::move(a), std::move(b)}}));
}
Term Term::forall(Var binder, Term body) {
  return Term(std::make_shared<const Node>(
      Node{TermKind::Forall, std::move(binder.name), std::move(binder.type), {std::move(body)}}));
}
Term Term::exists(Var binder, Term body) {
  return Term(std::make_shared<const Node>(
      Node{TermKind::Exists, std::move(binder.name), std::move(binder.type), {std::move(body)}}));
}
Term Term::rel(std::string name, std::vector<Term> args) {
  return Term(std::make_shared<const Node>(Node{TermKind::RelApp, std::move(name), Type(), std::move(args)}));
}

TermKind Term::kind() const { return node_->kind; }
const std::string& Term::name() const { return node_->name; }
const Type& Term::var_type() const { return node_->type; }
const std::vector<Term>& Term::args() const { return node_->args; }

bool Term::is_binder() const {
  return kind() == TermKind::Lambda || kind() == TermKind::Forall || kind() == TermKind::Exists;
}

bool Term::is_logical() const {
  switch (kind()) {
    case TermKind::Eq: case TermKind::Top: case TermKind::Bot: case TermKind::Not:
    case TermKind::And: case TermKind::Or: case TermKind::Implies:
    case TermKind::Forall: case TermKind::Exists: case TermKind::RelApp:
      return true;
    default:
      return false;
  }
}

int Term::size() const {
  int n = 1;
  for (const auto& a : args()) n += a.size();
  return n;
}

int Term::depth() const {
  int d = 0;
  for (const auto& a : args()) d = std::max(d, a.depth());
  return args().empty() ? 0 : d + 1;
}

bool operator==(const Term& a, const Term& b) {
  if (a.node_ == b.node_) return true;
  if (a.kind() != b.kind() || a.name() != b.name()) return false;
  if ((a.kind() == TermKind::Var || a.is_binder()) && a.var_type() != b.var_type()) return false;
  if (a.args().size() != b.args().size()) return false;
  for (std::size_t i = 0; i < a.args().size(); ++i)
    if (!(a.args()[i] == b.args()[i])) return false;
  return true;
}

Term tuple(const std::vector<Term>& items) {
  if (items.empty()) fail(ErrorKind::SchemaMismatch, "empty tuple");
  Term t = items[0];
  for (std::size_t i = 1; i < items.size(); ++i) t = Term::pair(t, items[i]);
  return t;
}

Type tuple_type(const std::vector<Type>& items) {
  if (items.empty()) fail(ErrorKind::SchemaMismatch, "empty tuple type");
  Type t = items[0];
  for (std::size_t i = 1; i < items.size(); ++i) t = Type::prod(t, items[i]);
  return t;
}

//------------------------------------------------------------------------------
// Printer

namespace {

// Precedence levels, higher binds tighter.
enum Prec { kBinder = 0, kImplies = 1, kOr = 2, kAnd = 3, kNot = 4, kEq = 5, kApp = 6, kAtom = 7 };

std::string print(const Term& t, int ctx_prec);

std::string wrap(const std::string& s, int own, int ctx_prec) {
  return own < ctx_prec ? "(" + s + ")" : s;
}

std::string print(const Term& t, int ctx_prec) {
  switch (t.kind()) {
    case TermKind::Var:
    case TermKind::Const:
      return t.name();
    case TermKind::Pair:
      return "<" + print(t.arg(0), kBinder) + ", " + print(t.arg(1), kBinder) + ">";
    case TermKind::Proj1:
      return "fst(" + print(t.arg(0), kBinder) + ")";
    case TermKind::Proj2:
      return "snd(" + print(t.arg(0), kBinder) + ")";
    case TermKind::Lambda:
      return wrap("\\" + t.binder().str() + ". " + print(t.body(), kBinder), kBinder, ctx_prec);
    case TermKind::App:
      return wrap(print(t.arg(0), kApp) + "(" + print(t.arg(1), kBinder) + ")", kApp, ctx_prec);
    case TermKind::Eq:
      return wrap(print(t.arg(0), kApp) + " = " + print(t.arg(1), kApp), kEq, ctx_prec);
    case TermKind::Top:
      return "true";
    case TermKind::Bot:
      return "false";
    case TermKind::Not:
      return wrap("~" + print(t.arg(0), kNot), kNot, ctx_prec);
    case TermKind::And:
      return wrap(print(t.arg(0), kAnd) + " /\\ " + print(t.arg(1), kAnd + 1), kAnd, ctx_prec);
    case TermKind::Or:
      return wrap(print(t.arg(0), kOr) + " \\/ " + print(t.arg(1), kOr + 1), kOr, ctx_prec);
    case TermKind::Implies:
      return wrap(print(t.arg(0), kImplies + 1) + " -> " + print(t.arg(1), kImplies), kImplies, ctx_prec);
    case TermKind::Forall:
      return wrap("forall " + t.binder().str() + ". " + print(t.body(), kBinder), kBinder, ctx_prec);
    case TermKind::Exists:
      return wrap("exists " + t.binder().str() + ". " + print(t.body(), kBinder), kBinder, ctx_prec);
    case TermKind::RelApp: {
      if (t.args().empty()) return t.name();
      std::string s = t.name() + "(";
      for (std::size_t i = 0; i < t.args().size(); ++i) {
        if (i) s += ", ";
        s += print(t.arg(i), kBinder);
      }
      return s + ")";
    }
  }
  return "?";
}

}  // namespace

std::string Term::str() const { return print(*this, kBinder); }

//------------------------------------------------------------------------------
// Context

Context::Context(std::vector<Var> vars) : vars_(std::move(vars)) {
  std::set<std::string> seen;
  for (const auto& v : vars_)
    if (!seen.insert(v.name).second)
      fail(ErrorKind::DuplicateName, "context variable '" + v.name + "' repeated");
}

const Var* Context::find(const std::string& name) const {
  for (const auto& v : vars_)
    if (v.name == name) return &v;
  return nullptr;
}

int Context::index_of(const std::string& name) const {
  for (std::size_t i = 0; i < vars_.size(); ++i)
    if (vars_[i].name == name) return static_cast<int>(i);
  return -1;
}

bool Context::contains(const Var& v) const {
  const Var* found = find(v.name);
  return found && found->type == v.type;
}

Context Context::with(const Var& v) const {
  auto vars = vars_;
  vars.push_back(v);
  return Context(std::move(vars));
}

Context Context::with_front(const Var& v) const {
  std::vector<Var> vars{v};
  vars.insert(vars.end(), vars_.begin(), vars_.end());
  return Context(std::move(vars));
}

Context Context::without(const std::string& name) const {
  std::vector<Var> vars;
  for (const auto& v : vars_)
    if (v.name != name) vars.push_back(v);
  return Context(std::move(vars));
}

std::set<std::string> Context::names() const {
  std::set<std::string> out;
  for (const auto& v : vars_) out.insert(v.name);
  return out;
}

std::string Context::str() const {
  std::string s;
  for (std::size_t i = 0; i < vars_.size(); ++i) {
    if (i) s += ", ";
    s += vars_[i].str();
  }
  return s;
}

//------------------------------------------------------------------------------
// Signature

bool Signature::name_taken(const std::string& name) const {
  if (has_type(name)) return true;
  if (constant_type(name)) return true;
  return relation(name) != nullptr;
}

void Signature::add_type(const std::string& name) {
  if (has_type(name)) fail(ErrorKind::DuplicateName, "type '" + name + "' declared twice");
  if (name == "2") fail(ErrorKind::DuplicateName, "'2' is reserved");
  types_.push_back(name);
}

void Signature::check_type(const Type& type) const {
  switch (type.kind()) {
    case Type::Kind::Basic:
      if (!has_type(type.name()))
        fail(ErrorKind::UnknownBasicType, "unknown basic type '" + type.name() + "'");
      return;
    case Type::Kind::Two:
      if (mode_ == Mode::Lambda)
        fail(ErrorKind::ModeViolation, "type 2 is not available in lambda mode");
      return;
    case Type::Kind::Prod:
      check_type(type.left());
      check_type(type.right());
      return;
    case Type::Kind::Exp:
      check_type(type.result());
      check_type(type.argument());
      return;
  }
}

void Signature::add_constant(const std::string& name, const Type& type) {
  if (constant_type(name) || relation(name))
    fail(ErrorKind::DuplicateName, "symbol '" + name + "' declared twice");
  check_type(type);
  constants_.emplace_back(name, type);
}

void Signature::add_relation(const std::string& name, const std::vector<Type>& args) {
  if (constant_type(name) || relation(name))
    fail(ErrorKind::DuplicateName, "symbol '" + name + "' declared twice");
  for (const auto& a : args) {
    check_type(a);
    if (a.contains_two() && mode_ == Mode::Lambda)
      fail(ErrorKind::ModeViolation, "relation arguments may not mention 2");
  }
  if (mode_ == Mode::Lambda) {
    relations_.emplace_back(name, args);
    return;
  }
  Type type = args.empty() ? Type::two() : power_type(tuple_type(args));
  constants_.emplace_back(name, type);
  encoded_relations_.emplace_back(name, static_cast<int>(args.size()));
}

bool Signature::has_type(const std::string& name) const {
  return std::find(types_.begin(), types_.end(), name) != types_.end();
}

std::optional<Type> Signature::constant_type(const std::string& name) const {
  for (const auto& [n, t] : constants_)
    if (n == name) return t;
  return std::nullopt;
}

const std::vector<Type>* Signature::relation(const std::string& name) const {
  for (const auto& r : relations_)
    if (r.first == name) return &r.second;
  return nullptr;
}

bool Signature::is_encoded_relation(const std::string& name) const {
  return encoded_relation_arity(name).has_value();
}

std::optional<int> Signature::encoded_relation_arity(const std::string& name) const {
  for (const auto& [n, k] : encoded_relations_)
    if (n == name) return k;
  return std::nullopt;
}

//------------------------------------------------------------------------------
// Typing

namespace {

struct Scope {
  std::vector<Var> vars;
  const Var* lookup(const std::string& name) const {
    for (auto it = vars.rbegin(); it != vars.rend(); ++it)
      if (it->name == name) return &*it;
    return nullptr;
  }
};

class Typer {
 public:
  Typer(const Signature& sig, bool strict) : sig_(sig), strict_(strict) {}

  Type term(const Term& t, Scope& scope) {
    const bool lambda_mode = strict_ && sig_.mode() == Mode::Lambda;
    switch (t.kind()) {
      case TermKind::Var: {
        const Var* v = scope.lookup(t.name());
        if (!v) fail(ErrorKind::UnboundVariable, "unbound variable '" + t.name() + "'");
        if (v->type != t.var_type())
          fail(ErrorKind::TypeMismatch, "variable '" + t.name() + "' used at type " +
                                            t.var_type().str() + " but bound at " + v->type.str());
        if (strict_) sig_.check_type(v->type);
        return v->type;
      }
      case TermKind::Const: {
        auto type = sig_.constant_type(t.name());
        if (!type) fail(ErrorKind::UnknownConstant, "unknown constant '" + t.name() + "'");
        return *type;
      }
      case TermKind::Pair:
        return Type::prod(term(t.arg(0), scope), term(t.arg(1), scope));
      case TermKind::Proj1:
      case TermKind::Proj2: {
        Type inner = term(t.arg(0), scope);
        if (inner.kind() != Type::Kind::Prod)
          fail(ErrorKind::TypeMismatch, "projection of non-product " + inner.str() + " in " + t.str());
        return t.kind() == TermKind::Proj1 ? inner.left() : inner.right();
      }
      case TermKind::Lambda: {
        if (strict_) sig_.check_type(t.var_type());
        scope.vars.push_back(t.binder());
        Type body = term(t.body(), scope);
        scope.vars.pop_back();
        return Type::exp(body, t.var_type());
      }
      case TermKind::App: {
        Type f = term(t.arg(0), scope);
        Type a = term(t.arg(1), scope);
        if (f.kind() != Type::Kind::Exp)
          fail(ErrorKind::TypeMismatch, "application of non-function of type " + f.str() + " in " + t.str());
        if (f.argument() != a)
          fail(ErrorKind::TypeMismatch, "argument of type " + a.str() + " where " +
                                            f.argument().str() + " expected in " + t.str());
        return f.result();
      }
      default:
        break;
    }
    // Logical constructors.
    if (lambda_mode)
      fail(ErrorKind::ModeViolation, "formula '" + t.str() + "' used as a term in lambda mode");
    switch (t.kind()) {
      case TermKind::Eq: {
        Type a = term(t.arg(0), scope);
        Type b = term(t.arg(1), scope);
        if (a != b) fail(ErrorKind::TypeMismatch, "equation between " + a.str() + " and " + b.str());
        return Type::two();
      }
      case TermKind::Top:
      case TermKind::Bot:
        return Type::two();
      case TermKind::Not:
      case TermKind::And:
      case TermKind::Or:
      case TermKind::Implies:
        for (const auto& a : t.args()) expect_two(a, scope);
        return Type::two();
      case TermKind::Forall:
      case TermKind::Exists: {
        if (strict_) sig_.check_type(t.var_type());
        scope.vars.push_back(t.binder());
        expect_two(t.body(), scope);
        scope.vars.pop_back();
        return Type::two();
      }
      case TermKind::RelApp: {
        if (strict_)
          fail(ErrorKind::ModeViolation, "relation symbols are encoded as constants in HOL mode");
        relation(t, scope);
        return Type::two();
      }
      default:
        break;
    }
    fail(ErrorKind::TypeMismatch, "ill-formed term");
  }

  void formula(const Term& t, Scope& scope) {
    if (sig_.mode() != Mode::Lambda || !strict_) {
      expect_two(t, scope);
      return;
    }
    switch (t.kind()) {
      case TermKind::Top:
      case TermKind::Bot:
        return;
      case TermKind::Eq: {
        Type a = term(t.arg(0), scope);
        Type b = term(t.arg(1), scope);
        if (a != b) fail(ErrorKind::TypeMismatch, "equation between " + a.str() + " and " + b.str());
        return;
      }
      case TermKind::RelApp:
        relation(t, scope);
        return;
      case TermKind::Not:
      case TermKind::And:
      case TermKind::Or:
      case TermKind::Implies:
        for (const auto& a : t.args()) formula(a, scope);
        return;
      case TermKind::Forall:
      case TermKind::Exists:
        sig_.check_type(t.var_type());
        scope.vars.push_back(t.binder());
        formula(t.body(), scope);
        scope.vars.pop_back();
        return;
      default:
        fail(ErrorKind::ModeViolation, "term '" + t.str() + "' used as a formula in lambda mode");
    }
  }

 private:
  void expect_two(const Term& t, Scope& scope) {
    Type ty = term(t, scope);
    if (!ty.is_two()) fail(ErrorKind::TypeMismatch, "'" + t.str() + "' has type " + ty.str() + ", not 2");
  }

  void relation(const Term& t, Scope& scope) {
    const auto* args = sig_.relation(t.name());
    if (!args) fail(ErrorKind::UnknownRelation, "unknown relation '" + t.name() + "'");
    if (args->size() != t.args().size())
      fail(ErrorKind::TypeMismatch, "relation '" + t.name() + "' expects " +
                                        std::to_string(args->size()) + " arguments");
    for (std::size_t i = 0; i < args->size(); ++i) {
      Type a = term(t.arg(i), scope);
      if (a != (*args)[i])
        fail(ErrorKind::TypeMismatch, "argument " + std::to_string(i + 1) + " of '" + t.name() +
                                          "' has type " + a.str());
    }
  }

  const Signature& sig_;
  bool strict_;
};

Scope scope_of(const Context& ctx) { return Scope{ctx.vars()}; }

}  // namespace

Type typecheck(const Term& term, const Context& ctx, const Signature& sig) {
  Scope scope = scope_of(ctx);
  for (const auto& v : ctx) sig.check_type(v.type);
  return Typer(sig, true).term(term, scope);
}

Type type_of(const Term& term, const Context& ctx, const Signature& sig) {
  Scope scope = scope_of(ctx);
  return Typer(sig, false).term(term, scope);
}

void check_formula(const Term& formula, const Context& ctx, const Signature& sig) {
  Scope scope = scope_of(ctx);
  for (const auto& v : ctx) sig.check_type(v.type);
  Typer(sig, true).formula(formula, scope);
}

void validate_theory(const Theory& theory) {
  for (std::size_t i = 0; i < theory.axioms.size(); ++i) {
    const Term& ax = theory.axioms[i];
    check_formula(ax, Context(), theory.signature);
    if (!free_vars(ax).empty())
      fail(ErrorKind::UnboundVariable, "axiom " + std::to_string(i + 1) + " is not closed");
  }
}

//------------------------------------------------------------------------------
// Free variables, substitution, alpha-equivalence

namespace {

void collect_free(const Term& t, std::vector<std::string>& bound, std::set<Var>& out) {
  if (t.kind() == TermKind::Var) {
    if (std::find(bound.begin(), bound.end(), t.name()) == bound.end()) out.insert(t.as_var());
    return;
  }
  if (t.is_binder()) {
    bound.push_back(t.name());
    collect_free(t.body(), bound, out);
    bound.pop_back();
    return;
  }
  for (const auto& a : t.args()) collect_free(a, bound, out);
}

Term rebuild(const Term& t, std::vector<Term> args) {
  switch (t.kind()) {
    case TermKind::Var:
    case TermKind::Const:
    case TermKind::Top:
    case TermKind::Bot:
      return t;
    case TermKind::Pair: return Term::pair(args[0], args[1]);
    case TermKind::Proj1: return Term::proj(1, args[0]);
    case TermKind::Proj2: return Term::proj(2, args[0]);
    case TermKind::Lambda: return Term::lambda(t.binder(), args[0]);
    case TermKind::App: return Term::app(args[0], args[1]);
    case TermKind::Eq: return Term::eq(args[0], args[1]);
    case TermKind::Not: return Term::negation(args[0]);
    case TermKind::And: return Term::conj(args[0], args[1]);
    case TermKind::Or: return Term::disj(args[0], args[1]);
    case TermKind::Implies: return Term::implies(args[0], args[1]);
    case TermKind::Forall: return Term::forall(t.binder(), args[0]);
    case TermKind::Exists: return Term::exists(t.binder(), args[0]);
    case TermKind::RelApp: return Term::rel(t.name(), std::move(args));
  }
  return t;
}

Term rebind(const Term& t, const Var& binder, Term body) {
  switch (t.kind()) {
    case TermKind::Lambda: return Term::lambda(binder, std::move(body));
    case TermKind::Forall: return Term::forall(binder, std::move(body));
    case TermKind::Exists: return Term::exists(binder, std::move(body));
    default: return t;
  }
}

Term subst_rec(const Term& t, const Term& tau, const Var& y, const std::set<std::string>& tau_fv) {
  if (t.kind() == TermKind::Var) return t.name() == y.name ? tau : t;
  if (t.is_binder()) {
    if (t.name() == y.name) return t;
    std::set<std::string> body_fv = free_var_names(t.body());
    if (!body_fv.count(y.name)) return t;
    Var binder = t.binder();
    Term body = t.body();
    if (tau_fv.count(binder.name)) {
      std::set<std::string> avoid = tau_fv;
      avoid.insert(body_fv.begin(), body_fv.end());
      avoid.insert(y.name);
      Var fresh{fresh_name(binder.name, avoid), binder.type};
      body = subst_rec(body, Term::var(fresh), binder, {fresh.name});
      binder = fresh;
    }
    return rebind(t, binder, subst_rec(body, tau, y, tau_fv));
  }
  if (t.args().empty()) return t;
  std::vector<Term> args;
  args.reserve(t.args().size());
  bool changed = false;
  for (const auto& a : t.args()) {
    args.push_back(subst_rec(a, tau, y, tau_fv));
    changed = changed || args.back().id() != a.id();
  }
  return changed ? rebuild(t, std::move(args)) : t;
}

bool alpha_rec(const Term& a, const Term& b, std::vector<std::pair<std::string, std::string>>& env) {
  if (a.kind() != b.kind()) return false;
  switch (a.kind()) {
    case TermKind::Var: {
      for (auto it = env.rbegin(); it != env.rend(); ++it) {
        bool left = it->first == a.name();
        bool right = it->second == b.name();
        if (left || right) return left && right && a.var_type() == b.var_type();
      }
      return a.name() == b.name() && a.var_type() == b.var_type();
    }
    case TermKind::Const:
      return a.name() == b.name();
    case TermKind::RelApp:
      if (a.name() != b.name()) return false;
      break;
    default:
      break;
  }
  if (a.is_binder()) {
    if (a.var_type() != b.var_type()) return false;
    env.emplace_back(a.name(), b.name());
    bool ok = alpha_rec(a.body(), b.body(), env);
    env.pop_back();
    return ok;
  }
  if (a.args().size() != b.args().size()) return false;
  for (std::size_t i = 0; i < a.args().size(); ++i)
    if (!alpha_rec(a.arg(i), b.arg(i), env)) return false;
  return true;
}

}  // namespace

std::set<Var> free_vars(const Term& term) {
  std::set<Var> out;
  std::vector<std::string> bound;
  collect_free(term, bound, out);
  return out;
}

std::set<std::string> free_var_names(const Term& term) {
  std::set<std::string> out;
  for (const auto& v : free_vars(term)) out.insert(v.name);
  return out;
}

std::string fresh_name(const std::string& base, const std::set<std::string>& avoid) {
  std::string name = base + "'";
  while (avoid.count(name)) name += "'";
  return name;
}

Term substitute(const Term& body, const Term& tau, const Var& y) {
  return subst_rec(body, tau, y, free_var_names(tau));
}

Term substitute_checked(const Term& body, const Term& tau, const Var& y, const Context& ctx,
                        const Signature& sig) {
  Type t = typecheck(tau, ctx, sig);
  if (t != y.type)
    fail(ErrorKind::TypeMismatch, "substituting " + t.str() + " for variable " + y.str());
  return substitute(body, tau, y);
}

bool alpha_eq(const Term& a, const Term& b) {
  std::vector<std::pair<std::string, std::string>> env;
  return alpha_rec(a, b, env);
}

//------------------------------------------------------------------------------
// Primitive basis

namespace {

class BasisCompiler {
 public:
  explicit BasisCompiler(const Signature& sig) : sig_(sig) {
    Var x{"x", Type::two()};
    Term comp = Term::lambda(x, Term::eq(Term::var(x), Term::var(x)));
    top_ = Term::eq(comp, comp);
  }

  struct Typed {
    Term term;
    Type type;
  };

  Typed compile(const Term& t) {
    auto it = memo_.find(t.id());
    if (it != memo_.end()) return it->second.second;
    Typed out = compile_node(t);
    memo_.emplace(t.id(), std::make_pair(t, out));
    log_.push_back(t.id());
    return out;
  }

  std::size_t mark() const { return log_.size(); }
  void rollback(std::size_t mark) {
    while (log_.size() > mark) {
      memo_.erase(log_.back());
      log_.pop_back();
    }
  }

 private:
  Typed compile_node(const Term& t) {
    const Type two = Type::two();
    switch (t.kind()) {
      case TermKind::Var:
        return {t, t.var_type()};
      case TermKind::Const: {
        auto type = sig_.constant_type(t.name());
        if (!type) fail(ErrorKind::UnknownConstant, "unknown constant '" + t.name() + "'");
        return {t, *type};
      }
      case TermKind::Pair: {
        Typed a = compile(t.arg(0));
        Typed b = compile(t.arg(1));
        return {Term::pair(a.term, b.term), Type::prod(a.type, b.type)};
      }
      case TermKind::Proj1:
      case TermKind::Proj2: {
        Typed inner = compile(t.arg(0));
        if (inner.type.kind() != Type::Kind::Prod)
          fail(ErrorKind::TypeMismatch, "projection of non-product in " + t.str());
        const bool first = t.kind() == TermKind::Proj1;
        Type type = first ? inner.type.left() : inner.type.right();
        if (inner.term.kind() == TermKind::Pair) return {inner.term.arg(first ? 0 : 1), type};
        Term r = Term::proj(first ? 1 : 2, inner.term);
        return {type.is_two() ? lift_projections(r) : r, type};
      }
      case TermKind::Lambda: {
        Typed body = compile(t.body());
        return {Term::lambda(t.binder(), body.term), Type::exp(body.type, t.var_type())};
      }
      case TermKind::App: {
        Typed f = compile(t.arg(0));
        Typed a = compile(t.arg(1));
        if (f.type.kind() != Type::Kind::Exp)
          fail(ErrorKind::TypeMismatch, "application of non-function in " + t.str());
        Term r = Term::app(f.term, a.term);
        return {f.type.result().is_two() ? lift_projections(r) : r, f.type.result()};
      }
      case TermKind::Eq:
        return {lift_projections(Term::eq(compile(t.arg(0)).term, compile(t.arg(1)).term)), two};
      case TermKind::RelApp: {
        std::vector<Term> args;
        for (const auto& a : t.args()) args.push_back(compile(a).term);
        return {lift_projections(Term::rel(t.name(), std::move(args))), two};
      }
      case TermKind::Top:
        return {top_, two};
      case TermKind::Bot:
        return {bot(), two};
      case TermKind::Not:
        return {imp(compile(t.arg(0)).term, bot()), two};
      case TermKind::And:
        return {conj(compile(t.arg(0)).term, compile(t.arg(1)).term), two};
      case TermKind::Implies:
        return {imp(compile(t.arg(0)).term, compile(t.arg(1)).term), two};
      case TermKind::Or:
        return {disj(compile(t.arg(0)).term, compile(t.arg(1)).term), two};
      case TermKind::Forall:
        return {all(t.binder(), compile(t.body()).term), two};
      case TermKind::Exists:
        return {some(t.binder(), compile(t.body()).term), two};
    }
    return {t, two};
  }

  // phi /\ psi  :=  <phi,psi> = <T,T>
  Term conj(const Term& a, const Term& b) const {
    return Term::eq(Term::pair(a, b), Term::pair(top_, top_));
  }
  // phi -> psi  :=  (phi /\ psi) = phi
  Term imp(const Term& a, const Term& b) const { return Term::eq(conj(a, b), a); }
  // forall y. phi  :=  {y | phi} = {y | T}
  Term all(const Var& y, const Term& body) const {
    return Term::eq(Term::lambda(y, body), Term::lambda(y, top_));
  }
  // F  :=  forall p:2. p
  Term bot() const {
    Var p{"p", Type::two()};
    return all(p, Term::var(p));
  }
  // phi \/ psi  :=  forall r:2. ((phi -> r) /\ (psi -> r)) -> r
  Term disj(const Term& a, const Term& b) const {
    std::set<std::string> avoid = free_var_names(a);
    for (const auto& n : free_var_names(b)) avoid.insert(n);
    Var r{fresh_name("r", avoid), Type::two()};
    Term rv = Term::var(r);
    return all(r, imp(conj(imp(a, rv), imp(b, rv)), rv));
  }
  // exists y. phi  :=  forall r:2. (forall y. (phi -> r)) -> r
  Term some(const Var& y, const Term& body) const {
    std::set<std::string> avoid = free_var_names(body);
    avoid.insert(y.name);
    Var r{fresh_name("r", avoid), Type::two()};
    Term rv = Term::var(r);
    return all(r, imp(all(y, imp(body, rv)), rv));
  }

  // A projection fst(s)/snd(s) with s projection-free and not mentioning
  // variables bound inside `t`.
  static std::optional<Term> find_liftable(const Term& t, std::vector<std::string>& bound) {
    if (t.kind() == TermKind::Proj1 || t.kind() == TermKind::Proj2) {
      const Term& s = t.arg(0);
      if (!contains_proj(s)) {
        bool clash = false;
        for (const auto& n : free_var_names(s))
          if (std::find(bound.begin(), bound.end(), n) != bound.end()) clash = true;
        if (!clash) return s;
      }
    }
    if (t.is_binder()) {
      bound.push_back(t.name());
      auto r = find_liftable(t.body(), bound);
      bound.pop_back();
      return r;
    }
    for (const auto& a : t.args())
      if (auto r = find_liftable(a, bound)) return r;
    return std::nullopt;
  }

  static void collect_names(const Term& t, std::set<std::string>& out) {
    if (t.kind() == TermKind::Var || t.is_binder()) out.insert(t.name());
    for (const auto& a : t.args()) collect_names(a, out);
  }

  static bool contains_proj(const Term& t) {
    if (t.kind() == TermKind::Proj1 || t.kind() == TermKind::Proj2) return true;
    for (const auto& a : t.args())
      if (contains_proj(a)) return true;
    return false;
  }

  // Replaces fst(s) by u and snd(s) by v wherever no binder captures s.
  static Term replace(const Term& t, const Term& s, const Term& u, const Term& v,
                      const std::set<std::string>& s_fv) {
    if ((t.kind() == TermKind::Proj1 || t.kind() == TermKind::Proj2) && t.arg(0) == s)
      return t.kind() == TermKind::Proj1 ? u : v;
    if (t.is_binder() && s_fv.count(t.name())) return t;
    if (t.args().empty()) return t;
    std::vector<Term> args;
    for (const auto& a : t.args()) args.push_back(replace(a, s, u, v, s_fv));
    return rebuild(t, std::move(args));
  }

  // A[fst s, snd s]  ~>  exists u v. <u,v> = s /\ A[u, v]
  Term lift_projections(const Term& atom) {
    if (!contains_proj(atom)) return atom;
    std::vector<std::string> bound;
    auto s = find_liftable(atom, bound);
    if (!s) return atom;
    Type st = compile(*s).type;
    std::set<std::string> avoid;
    collect_names(atom, avoid);
    Var u{fresh_name("u", avoid), st.left()};
    avoid.insert(u.name);
    Var v{fresh_name("v", avoid), st.right()};
    Term body = replace(atom, *s, Term::var(u), Term::var(v), free_var_names(*s));
    Term eq = Term::eq(Term::pair(Term::var(u), Term::var(v)), *s);
    return some(u, some(v, conj(eq, lift_projections(body))));
  }

  const Signature& sig_;
  Term top_;
  std::unordered_map<const void*, std::pair<Term, Typed>> memo_;
  std::vector<const void*> log_;
};

}  // namespace

Term compile_to_primitive_basis(const Term& term, const Context& ctx, const Signature& sig) {
  if (sig.mode() == Mode::Lambda)
    fail(ErrorKind::ModeViolation, "lambda-logic terms are not compiled to the primitive basis");
  typecheck(term, ctx, sig);
  return detail::compile_any(term, ctx, sig);
}

namespace detail {

Term compile_any(const Term& term, const Context& ctx, const Signature& sig) {
  (void)ctx;
  BasisCompiler compiler(sig);
  return compiler.compile(term).term;
}

struct BasisCache::Impl {
  explicit Impl(Signature s) : sig(std::move(s)), compiler(sig) {}
  Signature sig;
  BasisCompiler compiler;
};

BasisCache::BasisCache(const Signature& sig) : impl_(std::make_unique<Impl>(sig)) {}
BasisCache::~BasisCache() = default;
Term BasisCache::compile(const Term& term) { return impl_->compiler.compile(term).term; }
std::size_t BasisCache::mark() const { return impl_->compiler.mark(); }
void BasisCache::rollback(std::size_t mark) { impl_->compiler.rollback(mark); }

}  // namespace detail

}  // namespace tlw
