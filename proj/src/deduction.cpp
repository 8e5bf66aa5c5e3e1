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

#include "tlw/deduction.hpp"

#include <algorithm>
#include <cctype>
#include <random>
#include <set>

#include "tlw/parser.hpp"

namespace tlw {

std::string Sequent::str() const { return ctx.str() + " | " + lhs.str() + " |- " + rhs.str(); }

bool same_sequent(const Sequent& a, const Sequent& b) {
  return a.ctx.vars() == b.ctx.vars() && alpha_eq(a.lhs, b.lhs) && alpha_eq(a.rhs, b.rhs);
}

namespace {

struct RuleInfo {
  RuleId id;
  const char* name;
  int premises;
};

constexpr RuleInfo kRules[] = {
    {RuleId::R1a, "1a", 0},         {RuleId::R1b, "1b", 2},         {RuleId::R1c, "1c", 1},
    {RuleId::R2a, "2a", 0},         {RuleId::R2b, "2b", 0},         {RuleId::R2c, "2c", 2},
    {RuleId::R2d, "2d", 0},         {RuleId::R3a, "3a", 0},         {RuleId::R3b, "3b", 0},
    {RuleId::R4a, "4a", 0},         {RuleId::R4b, "4b", 0},         {RuleId::R5a, "5a", 0},
    {RuleId::R5b, "5b", 0},         {RuleId::R5cFwd, "5c-fwd", 1},  {RuleId::R5cBwd, "5c-bwd", 1},
    {RuleId::R5dFwd, "5d-fwd", 2},  {RuleId::R5dBwd, "5d-bwd", 1},  {RuleId::R5eFwd, "5e-fwd", 1},
    {RuleId::R5eBwd, "5e-bwd", 2},  {RuleId::R5fFwd, "5f-fwd", 1},  {RuleId::R5fBwd, "5f-bwd", 1},
    {RuleId::R5gFwd, "5g-fwd", 1},  {RuleId::R5gBwd, "5g-bwd", 1},  {RuleId::R5hFwd, "5h-fwd", 1},
    {RuleId::R5hBwd, "5h-bwd", 1},  {RuleId::Classical, "classical", 0}, {RuleId::Axiom, "axiom", 0},
};

const RuleInfo& info(RuleId r) { return kRules[static_cast<int>(r)]; }

}  // namespace

const char* rule_name(RuleId rule) { return info(rule).name; }

RuleId parse_rule(std::string_view name) {
  for (const auto& r : kRules)
    if (name == r.name) return r.id;
  fail(ErrorKind::Parse, "unknown rule '" + std::string(name) + "'");
}

int premise_count(RuleId rule) { return info(rule).premises; }

bool rule_in_mode(RuleId rule, Mode mode) {
  if (rule == RuleId::R2c) return mode != Mode::Lambda;
  if (rule == RuleId::Classical) return mode == Mode::HolClassical;
  return true;
}

int ProofTree::size() const {
  int n = 1;
  for (const auto& p : premises) n += p.size();
  return n;
}

int ProofTree::height() const {
  int h = 0;
  for (const auto& p : premises) h = std::max(h, p.height());
  return h + 1;
}

//------------------------------------------------------------------------------
// Checking

namespace {

[[noreturn]] void mismatch(const std::string& msg) { fail(ErrorKind::SchemaMismatch, msg); }
[[noreturn]] void side(const std::string& msg) { fail(ErrorKind::SideConditionViolated, msg); }

bool free_in(const std::string& name, const Term& t) { return free_var_names(t).count(name) > 0; }

Context drop_last(const Context& ctx) {
  std::vector<Var> vars = ctx.vars();
  vars.pop_back();
  return Context(std::move(vars));
}

void same_ctx(const Sequent& a, const Sequent& b) {
  if (a.ctx.vars() != b.ctx.vars()) mismatch("premises have different contexts");
}

}  // namespace

Sequent check_step(RuleId rule, const RuleData& data, const std::vector<Sequent>& prem, const Theory& theory) {
  const Signature& sig = theory.signature;
  if (!rule_in_mode(rule, sig.mode()))
    fail(ErrorKind::RuleNotInMode, std::string("rule ") + rule_name(rule) + " is not available in mode " +
                                       mode_name(sig.mode()));
  if (static_cast<int>(prem.size()) != premise_count(rule))
    mismatch(std::string("rule ") + rule_name(rule) + " takes " + std::to_string(premise_count(rule)) +
             " premises, got " + std::to_string(prem.size()));
  auto ctx = [&]() -> const Context& {
    if (!data.ctx) mismatch(std::string("rule ") + rule_name(rule) + " needs a context");
    return *data.ctx;
  };
  auto term = [&](std::size_t i) -> const Term& {
    if (data.terms.size() <= i) mismatch(std::string("rule ") + rule_name(rule) + " needs " + std::to_string(i + 1) + " terms");
    return data.terms[i];
  };
  auto var = [&]() -> const Var& {
    if (!data.var) mismatch(std::string("rule ") + rule_name(rule) + " needs a variable");
    return *data.var;
  };
  auto index12 = [&]() {
    if (data.index != 1 && data.index != 2) mismatch("index must be 1 or 2");
    return data.index;
  };
  auto expect = [&](const Term& t, TermKind k, const char* what) {
    if (!t.is(k)) mismatch(std::string("expected ") + what + ", found " + t.str());
  };
  // A term (not a formula in lambda mode) and its type.
  auto term_type = [&](const Term& t, const Context& c) { return typecheck(t, c, sig); };

  bool ctx_checked = false;  // rules whose conclusion context comes from data
  Sequent out;
  switch (rule) {
    case RuleId::R1a:
      out = {ctx(), term(0), term(0)};
      ctx_checked = true;
      break;
    case RuleId::R1b:
      same_ctx(prem[0], prem[1]);
      if (!alpha_eq(prem[0].rhs, prem[1].lhs)) mismatch("middle formulas differ");
      out = {prem[0].ctx, prem[0].lhs, prem[1].rhs};
      break;
    case RuleId::R1c: {
      if (prem[0].ctx.empty()) mismatch("1c needs a variable to substitute");
      const Var y = prem[0].ctx.vars().back();
      Context c = drop_last(prem[0].ctx);
      const Term& tau = term(0);
      for (const auto& n : free_var_names(tau))
        if (!c.find(n)) side("substituted term mentions " + n + " outside the context");
      if (term_type(tau, c) != y.type) fail(ErrorKind::TypeMismatch, "substituted term has the wrong type");
      out = {c, substitute(prem[0].lhs, tau, y), substitute(prem[0].rhs, tau, y)};
      break;
    }
    case RuleId::R2a:
      term_type(term(0), ctx());
      out = {ctx(), Term::top(), Term::eq(term(0), term(0))};
      ctx_checked = true;
      break;
    case RuleId::R2b: {
      const Var& y = var();
      Type a = term_type(term(0), ctx());
      Type b = term_type(term(1), ctx());
      if (a != b || a != y.type) fail(ErrorKind::TypeMismatch, "2b terms and variable disagree in type");
      check_formula(term(2), ctx().without(y.name).with(y), sig);
      out = {ctx(), Term::eq(term(0), term(1)),
             Term::implies(substitute(term(2), term(0), y), substitute(term(2), term(1), y))};
      ctx_checked = true;
      break;
    }
    case RuleId::R2c: {
      same_ctx(prem[0], prem[1]);
      if (!alpha_eq(prem[0].lhs, prem[1].lhs)) mismatch("2c premises have different left sides");
      expect(prem[0].rhs, TermKind::Implies, "an implication");
      expect(prem[1].rhs, TermKind::Implies, "an implication");
      const Term& a = prem[0].rhs.arg(0);
      const Term& b = prem[0].rhs.arg(1);
      if (!alpha_eq(prem[1].rhs.arg(0), b) || !alpha_eq(prem[1].rhs.arg(1), a))
        mismatch("2c premises are not converse implications");
      out = {prem[0].ctx, prem[0].lhs, Term::eq(a, b)};
      break;
    }
    case RuleId::R2d: {
      const Var& y = var();
      Type fa = term_type(term(0), ctx());
      Type fb = term_type(term(1), ctx());
      if (fa != fb || fa.kind() != Type::Kind::Exp || fa.argument() != y.type)
        fail(ErrorKind::TypeMismatch, "2d needs two functions on the type of the variable");
      if (free_in(y.name, term(0)) || free_in(y.name, term(1))) side("2d variable occurs free in the functions");
      Term vy = Term::var(y);
      out = {ctx(), Term::forall(y, Term::eq(Term::app(term(0), vy), Term::app(term(1), vy))),
             Term::eq(term(0), term(1))};
      ctx_checked = true;
      break;
    }
    case RuleId::R3a: {
      Type t = term_type(term(0), ctx());
      if (t.kind() != Type::Kind::Prod) fail(ErrorKind::TypeMismatch, "3a needs a term of product type");
      out = {ctx(), Term::top(),
             Term::eq(Term::pair(Term::proj(1, term(0)), Term::proj(2, term(0))), term(0))};
      ctx_checked = true;
      break;
    }
    case RuleId::R3b: {
      int i = index12();
      term_type(term(0), ctx());
      term_type(term(1), ctx());
      out = {ctx(), Term::top(), Term::eq(Term::proj(i, Term::pair(term(0), term(1))), term(i - 1))};
      ctx_checked = true;
      break;
    }
    case RuleId::R4a: {
      const Var& x = var();
      const Var* in_ctx = ctx().find(x.name);
      if (!in_ctx || in_ctx->type != x.type) side("4a variable must belong to the context");
      term_type(term(0), ctx());
      out = {ctx(), Term::top(), Term::eq(Term::app(Term::lambda(x, term(0)), Term::var(x)), term(0))};
      ctx_checked = true;
      break;
    }
    case RuleId::R4b: {
      const Var& x = var();
      Type f = term_type(term(0), ctx());
      if (f.kind() != Type::Kind::Exp || f.argument() != x.type)
        fail(ErrorKind::TypeMismatch, "4b needs a function on the type of the variable");
      if (free_in(x.name, term(0))) side("4b variable occurs free in the function");
      out = {ctx(), Term::top(), Term::eq(Term::lambda(x, Term::app(term(0), Term::var(x))), term(0))};
      ctx_checked = true;
      break;
    }
    case RuleId::R5a:
      out = {ctx(), Term::bot(), term(0)};
      ctx_checked = true;
      break;
    case RuleId::R5b:
      out = {ctx(), term(0), Term::top()};
      ctx_checked = true;
      break;
    case RuleId::R5cFwd:
      expect(prem[0].rhs, TermKind::Not, "a negation");
      out = {prem[0].ctx, Term::conj(prem[0].lhs, prem[0].rhs.arg(0)), Term::bot()};
      break;
    case RuleId::R5cBwd:
      expect(prem[0].lhs, TermKind::And, "a conjunction");
      expect(prem[0].rhs, TermKind::Bot, "falsity");
      out = {prem[0].ctx, prem[0].lhs.arg(0), Term::negation(prem[0].lhs.arg(1))};
      break;
    case RuleId::R5dFwd:
      same_ctx(prem[0], prem[1]);
      if (!alpha_eq(prem[0].lhs, prem[1].lhs)) mismatch("5d premises have different left sides");
      out = {prem[0].ctx, prem[0].lhs, Term::conj(prem[0].rhs, prem[1].rhs)};
      break;
    case RuleId::R5dBwd:
      expect(prem[0].rhs, TermKind::And, "a conjunction");
      out = {prem[0].ctx, prem[0].lhs, prem[0].rhs.arg(index12() - 1)};
      break;
    case RuleId::R5eFwd:
      expect(prem[0].lhs, TermKind::Or, "a disjunction");
      out = {prem[0].ctx, prem[0].lhs.arg(index12() - 1), prem[0].rhs};
      break;
    case RuleId::R5eBwd:
      same_ctx(prem[0], prem[1]);
      if (!alpha_eq(prem[0].rhs, prem[1].rhs)) mismatch("5e premises have different right sides");
      out = {prem[0].ctx, Term::disj(prem[0].lhs, prem[1].lhs), prem[0].rhs};
      break;
    case RuleId::R5fFwd:
      expect(prem[0].lhs, TermKind::And, "a conjunction");
      out = {prem[0].ctx, prem[0].lhs.arg(0), Term::implies(prem[0].lhs.arg(1), prem[0].rhs)};
      break;
    case RuleId::R5fBwd:
      expect(prem[0].rhs, TermKind::Implies, "an implication");
      out = {prem[0].ctx, Term::conj(prem[0].lhs, prem[0].rhs.arg(0)), prem[0].rhs.arg(1)};
      break;
    case RuleId::R5gFwd: {
      if (prem[0].ctx.empty()) mismatch("5g needs a variable to generalize");
      const Var y = prem[0].ctx.vars().back();
      if (free_in(y.name, prem[0].lhs)) side("generalized variable " + y.name + " occurs in the left side");
      out = {drop_last(prem[0].ctx), prem[0].lhs, Term::forall(y, prem[0].rhs)};
      break;
    }
    case RuleId::R5gBwd: {
      expect(prem[0].rhs, TermKind::Forall, "a universal formula");
      Var y = prem[0].rhs.binder();
      if (prem[0].ctx.find(y.name)) side("variable " + y.name + " is already in the context");
      out = {prem[0].ctx.with(y), prem[0].lhs, prem[0].rhs.body()};
      break;
    }
    case RuleId::R5hFwd: {
      expect(prem[0].lhs, TermKind::Exists, "an existential formula");
      Var y = prem[0].lhs.binder();
      if (prem[0].ctx.find(y.name)) side("variable " + y.name + " is already in the context");
      out = {prem[0].ctx.with(y), prem[0].lhs.body(), prem[0].rhs};
      break;
    }
    case RuleId::R5hBwd: {
      if (prem[0].ctx.empty()) mismatch("5h needs a variable to bind");
      const Var y = prem[0].ctx.vars().back();
      if (free_in(y.name, prem[0].rhs)) side("bound variable " + y.name + " occurs in the right side");
      out = {drop_last(prem[0].ctx), Term::exists(y, prem[0].lhs), prem[0].rhs};
      break;
    }
    case RuleId::Classical: {
      Var p{"p", Type::two()};
      out = {ctx(), Term::top(), Term::forall(p, Term::disj(Term::var(p), Term::negation(Term::var(p))))};
      ctx_checked = true;
      break;
    }
    case RuleId::Axiom: {
      if (data.index < 0 || data.index >= static_cast<int>(theory.axioms.size()))
        mismatch("no axiom number " + std::to_string(data.index));
      out = {data.ctx ? *data.ctx : Context(), Term::top(), theory.axioms[data.index]};
      ctx_checked = true;
      break;
    }
  }
  if (!ctx_checked && data.ctx && data.ctx->vars() != out.ctx.vars())
    mismatch("stated context " + data.ctx->str() + " differs from " + out.ctx.str());
  check_formula(out.lhs, out.ctx, sig);
  check_formula(out.rhs, out.ctx, sig);
  return out;
}

namespace {

Sequent check_node(const ProofTree& t, const Theory& thy, int& counter, ProofVerdict& verdict) {
  int me = counter++;
  std::vector<Sequent> prem;
  for (const auto& p : t.premises) prem.push_back(check_node(p, thy, counter, verdict));
  try {
    if (static_cast<int>(t.premises.size()) != premise_count(t.rule))
      mismatch(std::string("rule ") + rule_name(t.rule) + " takes " + std::to_string(premise_count(t.rule)) +
               " premises");
    Sequent s = check_step(t.rule, t.data, prem, thy);
    if (t.conclusion && !same_sequent(*t.conclusion, s))
      mismatch("stated conclusion " + t.conclusion->str() + " differs from " + s.str());
    return s;
  } catch (const Error& e) {
    verdict.node = me;
    verdict.error = e.kind();
    verdict.message = std::string(rule_name(t.rule)) + ": " + e.what();
    throw;
  }
}

}  // namespace

ProofVerdict check_proof(const ProofTree& proof, const Theory& theory) {
  ProofVerdict v;
  int counter = 0;
  try {
    v.conclusion = check_node(proof, theory, counter, v);
    v.valid = true;
  } catch (const Error& e) {
    v.valid = false;
    if (v.node < 0) {
      v.error = e.kind();
      v.message = e.what();
    }
  }
  return v;
}

//------------------------------------------------------------------------------
// Random derivations

namespace {

struct Backtrack {};

class Generator {
 public:
  Generator(std::uint64_t seed, const Theory& thy, const DerivationBounds& b)
      : thy_(thy), sig_(thy.signature), lambda_(sig_.mode() == Mode::Lambda), rng_(seed), b_(b) {}

  ProofTree top() {
    for (int attempt = 0; attempt < 64; ++attempt) {
      try {
        Context ctx = start_context();
        return gen(ctx, b_.depth);
      } catch (const Backtrack&) {
      }
    }
    return leaf(RuleId::R5b, Context(), {Term::top()});
  }

  ProofTree weaken(const ProofTree& p, const Sequent& s, const Var& y) {
    ProofTree a = leaf(RuleId::R1a, s.ctx.with(y), {s.rhs});
    ProofTree g = node(RuleId::R5gFwd, {}, {a});
    ProofTree c = node(RuleId::R1b, {}, {p, g});
    return node(RuleId::R5gBwd, {}, {c});
  }

 private:
  int pick(int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng_); }
  bool coin() { return pick(2) == 0; }

  // Conclusion computed eagerly; schema errors are generator dead ends.
  ProofTree node(RuleId r, RuleData data, std::vector<ProofTree> premises) {
    std::vector<Sequent> prem;
    for (const auto& p : premises) prem.push_back(*p.conclusion);
    ProofTree t;
    t.rule = r;
    try {
      t.conclusion = check_step(r, data, prem, thy_);
    } catch (const Error&) {
      throw Backtrack{};
    }
    t.data = std::move(data);
    t.premises = std::move(premises);
    return t;
  }

  ProofTree leaf(RuleId r, const Context& ctx, std::vector<Term> terms, std::optional<Var> v = {}, int index = 0) {
    RuleData d;
    d.ctx = ctx;
    d.terms = std::move(terms);
    d.var = std::move(v);
    d.index = index;
    return node(r, std::move(d), {});
  }

  static const Sequent& concl(const ProofTree& t) { return *t.conclusion; }

  //-- types and terms

  Type base_type() {
    const auto& ts = sig_.types();
    if (lambda_) {
      if (ts.empty()) throw Backtrack{};
      return Type::basic(ts[pick(static_cast<int>(ts.size()))]);
    }
    if (ts.empty() || pick(3) == 0) return Type::two();
    return Type::basic(ts[pick(static_cast<int>(ts.size()))]);
  }

  Type small_type() {
    int c = b_.max_type_depth >= 1 ? pick(4) : 0;
    if (c == 2) return Type::prod(base_type(), base_type());
    if (c == 3) return Type::exp(base_type(), base_type());
    return base_type();
  }

  std::string fresh(const Context& ctx) {
    static const char* names[] = {"x", "y", "z", "u", "v", "w"};
    for (int k = 0;; ++k) {
      std::string n = std::string(names[pick(6)]) + (k < 6 ? "" : std::to_string(k));
      if (!ctx.find(n) && !sig_.has_type(n) && !sig_.constant_type(n) && !sig_.relation(n)) return n;
    }
  }

  Context start_context() {
    Context ctx;
    int n = pick(3);
    for (int i = 0; i < n; ++i) {
      try {
        ctx = ctx.with(Var{fresh(ctx), base_type()});
      } catch (const Backtrack&) {
        break;
      }
    }
    return ctx;
  }

  std::optional<Term> try_term(const Type& want, const Context& ctx, int budget) {
    std::vector<Term> leaves;
    for (const auto& v : ctx) if (v.type == want) leaves.push_back(Term::var(v));
    for (const auto& [name, t] : sig_.constants()) if (t == want) leaves.push_back(Term::constant(name));
    if (!lambda_ && want.is_two()) {
      leaves.push_back(Term::top());
      leaves.push_back(Term::bot());
    }
    if (!leaves.empty() && (budget <= 1 || pick(3) == 0)) return leaves[pick(static_cast<int>(leaves.size()))];
    if (budget > 1) {
      for (int attempt = 0; attempt < 3; ++attempt) {
        int c = pick(5);
        if (c == 0 && want.kind() == Type::Kind::Prod) {
          auto a = try_term(want.left(), ctx, budget / 2);
          auto b = a ? try_term(want.right(), ctx, budget / 2) : std::nullopt;
          if (b) return Term::pair(*a, *b);
        } else if (c == 1 && want.kind() == Type::Kind::Exp && want.argument().depth() == 0) {
          Var v{fresh(ctx), want.argument()};
          auto body = try_term(want.result(), ctx.with(v), budget - 1);
          if (body) return Term::lambda(v, *body);
        } else if (c == 2 && want.depth() == 0) {
          Type arg = base_type();
          Type f = Type::exp(want, arg);
          if (f.depth() > b_.max_type_depth) continue;
          auto fn = try_term(f, ctx, budget / 2);
          auto a = fn ? try_term(arg, ctx, budget / 2) : std::nullopt;
          if (a) return Term::app(*fn, *a);
        } else if (c == 3 && want.depth() == 0) {
          Type other = base_type();
          auto t = try_term(Type::prod(want, other), ctx, budget - 1);
          if (t) return Term::proj(1, *t);
        } else if (c == 4 && !lambda_ && want.is_two()) {
          return formula(ctx, budget);
        }
      }
    }
    if (!leaves.empty()) return leaves[pick(static_cast<int>(leaves.size()))];
    if (want.kind() == Type::Kind::Prod) {
      auto a = try_term(want.left(), ctx, budget);
      auto b = a ? try_term(want.right(), ctx, budget) : std::nullopt;
      if (b) return Term::pair(*a, *b);
    }
    if (want.kind() == Type::Kind::Exp && want.argument().depth() == 0) {
      Var v{fresh(ctx), want.argument()};
      auto body = try_term(want.result(), ctx.with(v), budget);
      if (body) return Term::lambda(v, *body);
    }
    return std::nullopt;
  }

  Term term(const Type& want, const Context& ctx) {
    for (int attempt = 0; attempt < 4; ++attempt) {
      auto t = try_term(want, ctx, b_.max_term_size / 2);
      if (t && t->size() <= b_.max_term_size) return *t;
    }
    throw Backtrack{};
  }

  // A term of some small inhabited type.
  Term some_term(const Context& ctx) {
    for (int attempt = 0; attempt < 6; ++attempt) {
      try {
        return term(small_type(), ctx);
      } catch (const Backtrack&) {
      }
    }
    throw Backtrack{};
  }

  Term atom(const Context& ctx, int budget) {
    try {
      return try_atom(ctx, budget);
    } catch (const Backtrack&) {
      return Term::top();
    }
  }

  Term try_atom(const Context& ctx, int budget) {
    int c = pick(4);
    if (c == 0) return coin() ? Term::top() : Term::bot();
    if (c == 1 && !sig_.relations().empty() && lambda_) {
      const auto& [name, args] = sig_.relations()[pick(static_cast<int>(sig_.relations().size()))];
      std::vector<Term> ts;
      for (const auto& a : args) {
        auto t = try_term(a, ctx, 2);
        if (!t) return Term::top();
        ts.push_back(*t);
      }
      return Term::rel(name, ts);
    }
    if (c == 2 && !lambda_) {
      auto t = try_term(Type::two(), ctx, budget);
      if (t) return *t;
    }
    for (int attempt = 0; attempt < 4; ++attempt) {
      Type t = small_type();
      auto a = try_term(t, ctx, budget / 2);
      auto b = a ? try_term(t, ctx, budget / 2) : std::nullopt;
      if (b) return Term::eq(*a, *b);
    }
    return Term::top();
  }

  Term formula(const Context& ctx, int budget) {
    if (budget <= 2) return atom(ctx, budget);
    switch (pick(8)) {
      case 0:
        return Term::negation(formula(ctx, budget - 1));
      case 1:
        return Term::conj(formula(ctx, budget / 2), formula(ctx, budget / 2));
      case 2:
        return Term::disj(formula(ctx, budget / 2), formula(ctx, budget / 2));
      case 3:
        return Term::implies(formula(ctx, budget / 2), formula(ctx, budget / 2));
      case 4:
      case 5: {
        Var v;
        try {
          v = Var{fresh(ctx), base_type()};
        } catch (const Backtrack&) {
          return atom(ctx, budget);
        }
        Term body = formula(ctx.with(v), budget - 1);
        return pick(2) ? Term::forall(v, body) : Term::exists(v, body);
      }
      default:
        return atom(ctx, budget);
    }
  }

  Term phi(const Context& ctx) {
    for (int attempt = 0; attempt < 4; ++attempt) {
      Term f = formula(ctx, b_.max_term_size / 2);
      if (f.size() <= b_.max_term_size) return f;
    }
    return Term::top();
  }

  //-- derivations

  std::vector<RuleId> rules(int depth) {
    std::vector<RuleId> out;
    for (int r = 0; r < kRuleCount; ++r) {
      RuleId id = static_cast<RuleId>(r);
      if (!rule_in_mode(id, sig_.mode())) continue;
      if (id == RuleId::Axiom && thy_.axioms.empty()) continue;
      if (depth <= 1 && premise_count(id) > 0) continue;
      out.push_back(id);
    }
    return out;
  }

  ProofTree gen(const Context& ctx, int depth) {
    auto choices = rules(depth);
    std::vector<RuleId> inner;
    for (RuleId id : choices)
      if (premise_count(id) > 0) inner.push_back(id);
    for (int attempt = 0; attempt < 24; ++attempt) {
      // leaves are half the table; lean on inner rules so trees reach depth
      const auto& pool = !inner.empty() && pick(5) > 0 ? inner : choices;
      RuleId r = pool[pick(static_cast<int>(pool.size()))];
      try {
        return build(r, ctx, depth);
      } catch (const Backtrack&) {
      }
    }
    return leaf(RuleId::R1a, ctx, {phi(ctx)});
  }

  // phi |- ?
  ProofTree gen_lhs(const Context& ctx, int depth, const Term& f) {
    for (int attempt = 0; attempt < 12; ++attempt) {
      try {
        int c = depth > 1 ? 2 + pick(4) : pick(3);
        switch (c) {
          case 0:
            return leaf(RuleId::R1a, ctx, {f});
          case 1:
            return leaf(RuleId::R5b, ctx, {f});
          case 2:
            if (f.is(TermKind::Bot)) return leaf(RuleId::R5a, ctx, {phi(ctx)});
            return leaf(RuleId::R1a, ctx, {f});
          case 3: {
            ProofTree p = gen_lhs(ctx, depth - 1, f);
            ProofTree q = gen_lhs(ctx, depth - 1, concl(p).rhs);
            return node(RuleId::R1b, {}, {p, q});
          }
          case 4:
            return node(RuleId::R5dFwd, {}, {gen_lhs(ctx, depth - 1, f), gen_lhs(ctx, depth - 1, f)});
          default:
            if (f.is(TermKind::And)) {
              RuleData d;
              d.index = 1 + pick(2);
              return node(RuleId::R5dBwd, d, {leaf(RuleId::R1a, ctx, {f})});
            }
            if (f.is(TermKind::Or) && depth > 2) {
              // a \/ b |- T
              return node(RuleId::R5eBwd, {}, {leaf(RuleId::R5b, ctx, {f.arg(0)}), leaf(RuleId::R5b, ctx, {f.arg(1)})});
            }
            return leaf(RuleId::R5b, ctx, {f});
        }
      } catch (const Backtrack&) {
      }
    }
    return leaf(RuleId::R1a, ctx, {f});
  }

  // ? |- f
  ProofTree gen_rhs(const Context& ctx, int depth, const Term& f) {
    for (int attempt = 0; attempt < 12; ++attempt) {
      try {
        int c = pick(depth > 1 ? 6 : 3);
        switch (c) {
          case 0:
            return leaf(RuleId::R1a, ctx, {f});
          case 1:
            return leaf(RuleId::R5a, ctx, {f});
          case 2:
            if (f.is(TermKind::Top)) return leaf(RuleId::R5b, ctx, {phi(ctx)});
            return leaf(RuleId::R1a, ctx, {f});
          case 3:
            return node(RuleId::R5eBwd, {}, {gen_rhs(ctx, depth - 1, f), gen_rhs(ctx, depth - 1, f)});
          default: {
            ProofTree q = gen_rhs(ctx, depth - 1, f);
            ProofTree p = gen_rhs(ctx, depth - 1, concl(q).lhs);
            return node(RuleId::R1b, {}, {p, q});
          }
        }
      } catch (const Backtrack&) {
      }
    }
    return leaf(RuleId::R1a, ctx, {f});
  }

  Var fresh_var(const Context& ctx) { return Var{fresh(ctx), base_type()}; }

  ProofTree build(RuleId r, const Context& ctx, int depth) {
    const int d = depth - 1;
    RuleData none;
    switch (r) {
      case RuleId::R1a:
        return leaf(r, ctx, {phi(ctx)});
      case RuleId::R1b: {
        ProofTree p = gen(ctx, d);
        return node(r, none, {p, gen_lhs(ctx, d, concl(p).rhs)});
      }
      case RuleId::R1c: {
        Var y = fresh_var(ctx);
        Term tau = term(y.type, ctx);
        ProofTree p = gen(ctx.with(y), d);
        RuleData data;
        data.ctx = ctx;
        data.terms = {tau};
        return node(r, data, {p});
      }
      case RuleId::R2a:
        return leaf(r, ctx, {some_term(ctx)});
      case RuleId::R2b: {
        Var y = fresh_var(ctx);
        Term a = term(y.type, ctx);
        Term b = term(y.type, ctx);
        return leaf(r, ctx, {a, b, phi(ctx.with(y))}, y);
      }
      case RuleId::R2c: {
        Term a = phi(ctx);
        Term b = coin() ? a : phi(ctx);
        if (depth >= 4 && coin()) {
          // th |- a => a from 5f-fwd over 5d-bwd over 1a(th /\ a)
          Term th = phi(ctx);
          RuleData two;
          two.index = 2;
          ProofTree inner = node(RuleId::R5dBwd, two, {leaf(RuleId::R1a, ctx, {Term::conj(th, a)})});
          ProofTree imp = node(RuleId::R5fFwd, none, {inner});
          return node(r, none, {imp, imp});
        }
        if (alpha_eq(a, b)) {
          ProofTree p = gen_rhs(ctx, d, Term::implies(a, a));
          return node(r, none, {p, p});
        }
        // F on the left
        ProofTree p = leaf(RuleId::R5a, ctx, {Term::implies(a, b)});
        ProofTree q = leaf(RuleId::R5a, ctx, {Term::implies(b, a)});
        return node(r, none, {p, q});
      }
      case RuleId::R2d: {
        Type y = base_type();
        Type z = base_type();
        Type f = Type::exp(z, y);
        Term a = term(f, ctx);
        Term b = term(f, ctx);
        std::set<std::string> avoid = ctx.names();
        for (const auto& n : free_var_names(a)) avoid.insert(n);
        for (const auto& n : free_var_names(b)) avoid.insert(n);
        Var v{fresh_name("y", avoid), y};
        return leaf(r, ctx, {a, b}, v);
      }
      case RuleId::R3a: {
        Type t = Type::prod(base_type(), base_type());
        return leaf(r, ctx, {term(t, ctx)});
      }
      case RuleId::R3b:
        return leaf(r, ctx, {some_term(ctx), some_term(ctx)}, std::nullopt, 1 + pick(2));
      case RuleId::R4a: {
        if (ctx.empty()) throw Backtrack{};
        Var x = ctx.vars()[pick(static_cast<int>(ctx.size()))];
        return leaf(r, ctx, {some_term(ctx)}, x);
      }
      case RuleId::R4b: {
        Type y = base_type();
        Term a = term(Type::exp(base_type(), y), ctx);
        std::set<std::string> avoid = ctx.names();
        for (const auto& n : free_var_names(a)) avoid.insert(n);
        return leaf(r, ctx, {a}, Var{fresh_name("x", avoid), y});
      }
      case RuleId::R5a:
      case RuleId::R5b:
        return leaf(r, ctx, {phi(ctx)});
      case RuleId::R5cFwd:
        return node(r, none, {gen_rhs(ctx, d, Term::negation(phi(ctx)))});
      case RuleId::R5cBwd: {
        if (d < 2) throw Backtrack{};
        if (coin()) return node(r, none, {node(RuleId::R5cFwd, none, {gen_rhs(ctx, d - 1, Term::negation(phi(ctx)))})});
        RuleData two;
        two.index = 2;
        return node(r, none, {node(RuleId::R5dBwd, two, {leaf(RuleId::R1a, ctx, {Term::conj(phi(ctx), Term::bot())})})});
      }
      case RuleId::R5dFwd: {
        ProofTree p = gen(ctx, d);
        return node(r, none, {p, gen_lhs(ctx, d, concl(p).lhs)});
      }
      case RuleId::R5dBwd: {
        RuleData data;
        data.index = 1 + pick(2);
        if (d >= 2 && coin()) {
          ProofTree p = gen(ctx, d - 1);
          ProofTree fwd = node(RuleId::R5dFwd, none, {p, gen_lhs(ctx, d - 1, concl(p).lhs)});
          return node(r, data, {fwd});
        }
        return node(r, data, {gen_rhs(ctx, d, Term::conj(phi(ctx), phi(ctx)))});
      }
      case RuleId::R5eFwd: {
        RuleData data;
        data.index = 1 + pick(2);
        return node(r, data, {gen_lhs(ctx, d, Term::disj(phi(ctx), phi(ctx)))});
      }
      case RuleId::R5eBwd: {
        ProofTree p = gen(ctx, d);
        return node(r, none, {p, gen_rhs(ctx, d, concl(p).rhs)});
      }
      case RuleId::R5fFwd:
        return node(r, none, {gen_lhs(ctx, d, Term::conj(phi(ctx), phi(ctx)))});
      case RuleId::R5fBwd: {
        if (d >= 2 && coin()) return node(r, none, {node(RuleId::R5fFwd, none, {gen_lhs(ctx, d - 1, Term::conj(phi(ctx), phi(ctx)))})});
        return node(r, none, {gen_rhs(ctx, d, Term::implies(phi(ctx), phi(ctx)))});
      }
      case RuleId::R5gFwd: {
        Var y = fresh_var(ctx);
        return node(r, none, {gen_lhs(ctx.with(y), d, phi(ctx))});
      }
      case RuleId::R5gBwd: {
        Var y = fresh_var(ctx);
        if (d >= 2 && coin()) {
          ProofTree p = gen_lhs(ctx.with(y), d - 1, phi(ctx));
          return node(r, none, {node(RuleId::R5gFwd, none, {p})});
        }
        return node(r, none, {gen_rhs(ctx, d, Term::forall(y, phi(ctx.with(y))))});
      }
      case RuleId::R5hFwd: {
        Var y = fresh_var(ctx);
        return node(r, none, {gen_lhs(ctx, d, Term::exists(y, phi(ctx.with(y))))});
      }
      case RuleId::R5hBwd: {
        Var y = fresh_var(ctx);
        return node(r, none, {gen_rhs(ctx.with(y), d, phi(ctx))});
      }
      case RuleId::Classical:
        return leaf(r, ctx, {});
      case RuleId::Axiom:
        return leaf(r, ctx, {}, std::nullopt, pick(static_cast<int>(thy_.axioms.size())));
    }
    throw Backtrack{};
  }

  const Theory& thy_;
  const Signature& sig_;
  bool lambda_;
  std::mt19937_64 rng_;
  DerivationBounds b_;
};

}  // namespace

ProofTree random_derivation(std::uint64_t seed, const Theory& theory, const DerivationBounds& bounds) {
  if (bounds.depth < 1) fail(ErrorKind::SchemaMismatch, "derivation depth must be at least 1");
  Generator g(seed, theory, bounds);
  return g.top();
}

ProofTree weaken(const ProofTree& proof, const Theory& theory, const Var& y) {
  ProofVerdict v = check_proof(proof, theory);
  if (!v.valid) fail(v.error, v.message);
  if (v.conclusion->ctx.find(y.name)) fail(ErrorKind::DuplicateName, "variable " + y.name + " already in context");
  ProofTree p = proof;
  p.conclusion = v.conclusion;
  Generator g(0, theory, DerivationBounds{});
  return g.weaken(p, *v.conclusion, y);
}

//------------------------------------------------------------------------------
// Proof files

namespace {

struct Sx {
  bool atom = true;
  bool quoted = false;
  std::string text;
  std::vector<Sx> list;
  int line = 0;
};

class SxReader {
 public:
  SxReader(std::string_view text, std::string source) : text_(text), source_(std::move(source)) {}

  Sx read() {
    skip();
    if (pos_ >= text_.size()) error("unexpected end of input");
    Sx out;
    out.line = line_;
    char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      out.atom = false;
      while (true) {
        skip();
        if (pos_ >= text_.size()) error("unclosed '('");
        if (text_[pos_] == ')') {
          ++pos_;
          break;
        }
        out.list.push_back(read());
      }
    } else if (c == ')') {
      error("unexpected ')'");
    } else if (c == '"') {
      ++pos_;
      out.quoted = true;
      while (pos_ < text_.size() && text_[pos_] != '"') {
        if (text_[pos_] == '\\' && pos_ + 1 < text_.size() && (text_[pos_ + 1] == '"' || text_[pos_ + 1] == '\\')) ++pos_;
        if (text_[pos_] == '\n') ++line_;
        out.text.push_back(text_[pos_++]);
      }
      if (pos_ >= text_.size()) error("unterminated string");
      ++pos_;
    } else {
      while (pos_ < text_.size() && !std::isspace(static_cast<unsigned char>(text_[pos_])) && text_[pos_] != '(' &&
             text_[pos_] != ')' && text_[pos_] != '"')
        out.text.push_back(text_[pos_++]);
    }
    return out;
  }

  bool at_end() {
    skip();
    return pos_ >= text_.size();
  }

  [[noreturn]] void error(const std::string& msg) const {
    fail(ErrorKind::Parse, source_ + ":" + std::to_string(line_) + ": " + msg);
  }

 private:
  void skip() {
    while (pos_ < text_.size()) {
      char c = text_[pos_];
      if (c == '\n') {
        ++line_;
        ++pos_;
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        ++pos_;
      } else if (c == ';' || c == '#' || c == '%') {
        while (pos_ < text_.size() && text_[pos_] != '\n') ++pos_;
      } else {
        break;
      }
    }
  }

  std::string_view text_;
  std::string source_;
  std::size_t pos_ = 0;
  int line_ = 1;
};

std::string quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
  return out + "\"";
}

ProofTree read_tree(const Sx& sx, const Signature& sig, const std::string& source) {
  auto err = [&](const std::string& msg) -> void {
    fail(ErrorKind::Parse, source + ":" + std::to_string(sx.line) + ": " + msg);
  };
  if (sx.atom || sx.list.size() < 2 || !sx.list[0].atom || sx.list[0].text != "rule")
    err("expected (rule <id> ...)");
  ProofTree t;
  t.rule = parse_rule(sx.list[1].text);
  const Sx* data = nullptr;
  const Sx* premises = nullptr;
  for (std::size_t i = 2; i < sx.list.size(); i += 2) {
    if (!sx.list[i].atom || i + 1 >= sx.list.size()) err("expected :key value pairs");
    const std::string& key = sx.list[i].text;
    if (key == ":data") data = &sx.list[i + 1];
    else if (key == ":premises") premises = &sx.list[i + 1];
    else err("unknown key " + key);
  }
  std::vector<std::string> term_texts;
  if (data) {
    if (data->atom) err(":data takes a list");
    for (std::size_t i = 0; i < data->list.size(); i += 2) {
      if (i + 1 >= data->list.size()) err("dangling data key");
      const std::string& key = data->list[i].text;
      const Sx& val = data->list[i + 1];
      if (key == ":ctx") {
        t.data.ctx = parse_context(val.text, sig);
      } else if (key == ":var") {
        t.data.var = parse_var(val.text, sig);
      } else if (key == ":index") {
        try {
          t.data.index = std::stoi(val.text);
        } catch (...) {
          err("bad index " + val.text);
        }
      } else if (key == ":terms") {
        if (val.atom) err(":terms takes a list of strings");
        for (const auto& s : val.list) term_texts.push_back(s.text);
      } else {
        err("unknown data key " + key);
      }
    }
  }
  Context ctx = t.data.ctx ? *t.data.ctx : Context();
  for (std::size_t i = 0; i < term_texts.size(); ++i) {
    Context c = ctx;
    if (t.rule == RuleId::R2b && i == 2 && t.data.var) c = ctx.without(t.data.var->name).with(*t.data.var);
    t.data.terms.push_back(parse_term(term_texts[i], sig, c));
  }
  if (premises) {
    if (premises->atom) err(":premises takes a list");
    for (const auto& p : premises->list) t.premises.push_back(read_tree(p, sig, source));
  }
  return t;
}

void write_tree(const ProofTree& t, int indent, std::string& out) {
  out += std::string(indent, ' ') + "(rule " + rule_name(t.rule);
  const RuleData& d = t.data;
  std::string data;
  auto add = [&](const std::string& s) {
    if (!data.empty()) data += " ";
    data += s;
  };
  if (d.ctx) add(":ctx " + quote(d.ctx->str()));
  if (!d.terms.empty()) {
    std::string ts;
    for (const auto& term : d.terms) ts += (ts.empty() ? "" : " ") + quote(term.str());
    add(":terms (" + ts + ")");
  }
  if (d.var) add(":var " + quote(d.var->str()));
  if (d.index) add(":index " + std::to_string(d.index));
  if (!data.empty()) out += " :data (" + data + ")";
  if (!t.premises.empty()) {
    out += " :premises (\n";
    for (std::size_t i = 0; i < t.premises.size(); ++i) {
      write_tree(t.premises[i], indent + 2, out);
      out += i + 1 < t.premises.size() ? "\n" : "";
    }
    out += ")";
  }
  out += ")";
}

}  // namespace

ProofFile parse_proof(std::string_view text, const std::function<Theory(const std::string&)>& load_theory,
                      std::string_view source) {
  ProofFile pf;
  bool header = false;
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t end = text.find('\n', start);
    std::string_view line = text.substr(start, end == std::string_view::npos ? std::string_view::npos : end - start);
    std::size_t b = line.find_first_not_of(" \t\r");
    if (b != std::string_view::npos && line[b] == '%') {
      std::string_view rest = line.substr(b + 1);
      auto word_end = rest.find_first_of(" \t");
      std::string key(rest.substr(0, word_end));
      std::string arg;
      if (word_end != std::string_view::npos) {
        std::string_view a = rest.substr(word_end);
        auto s = a.find_first_not_of(" \t");
        auto e = a.find_last_not_of(" \t\r");
        if (s != std::string_view::npos) arg = std::string(a.substr(s, e - s + 1));
      }
      if (header) fail(ErrorKind::Parse, std::string(source) + ": more than one % header");
      header = true;
      if (key == "theory") {
        pf.theory_path = arg;
        pf.theory = load_theory(arg);
      } else if (key == "mode") {
        pf.theory.signature = Signature(parse_mode(arg));
      } else {
        fail(ErrorKind::Parse, std::string(source) + ": unknown header %" + key);
      }
    }
    if (end == std::string_view::npos) break;
    start = end + 1;
  }
  SxReader reader(text, std::string(source));
  Sx sx = reader.read();
  if (!reader.at_end()) reader.error("trailing input after the proof");
  pf.proof = read_tree(sx, pf.theory.signature, std::string(source));
  return pf;
}

std::string print_proof(const ProofTree& proof, const Signature&) {
  std::string out;
  write_tree(proof, 0, out);
  return out + "\n";
}

}  // namespace tlw
