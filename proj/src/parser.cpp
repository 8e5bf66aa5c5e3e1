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

#include "tlw/parser.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

namespace tlw {

namespace {

struct Alias {
  std::string_view utf8;
  std::string_view ascii;
  bool word;  // keyword rather than symbol
};

constexpr Alias kAliases[] = {
    {"⊤", "true", true},    {"⊥", "false", true}, {"¬", "~", false},
    {"∧", "/\\", false},    {"∨", "\\/", false},  {"⇒", "->", false},
    {"→", "->", false},     {"∀", "forall", true}, {"∃", "exists", true},
    {"λ", "\\", false},     {"⟨", "<", false},    {"⟩", ">", false},
    {"∈", "in", true},      {"×", "*", false},    {"π₁", "fst", true},
    {"π₂", "snd", true}, {"↦", "|->", false}, {"⊢", "|-", false},
};

constexpr std::string_view kSymbols[] = {
    "|->", "|-", "->", "/\\", "\\/", "\\", "(", ")", "<", ">", ",", ".", ":", ";",
    "|",   "{",  "}",  "[",   "]",   "=", "~", "^", "*", "+", "!", "@", "-",
};

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\'';
}

}  // namespace

std::vector<Token> tokenize(std::string_view text, std::string_view source) {
  std::vector<Token> out;
  int line = 1;
  int col = 1;
  std::size_t i = 0;
  bool line_start = true;
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n && i < text.size(); ++k, ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
        line_start = true;
      } else if ((static_cast<unsigned char>(text[i]) & 0xC0) != 0x80) {
        ++col;
      }
    }
  };
  auto error = [&](const std::string& msg) {
    fail(ErrorKind::Parse, std::string(source) + ":" + std::to_string(line) + ":" +
                               std::to_string(col) + ": " + msg);
  };

  while (i < text.size()) {
    char c = text[i];
    if (c == '\n' || std::isspace(static_cast<unsigned char>(c))) {
      advance(1);
      continue;
    }
    if (c == '#' || (c == '/' && i + 1 < text.size() && text[i + 1] == '/')) {
      while (i < text.size() && text[i] != '\n') advance(1);
      continue;
    }
    if (c == '%' && line_start) {
      out.push_back({Token::Kind::Symbol, "%", line, col});
      advance(1);
      while (i < text.size() && text[i] != '\n') {
        if (std::isspace(static_cast<unsigned char>(text[i]))) {
          advance(1);
          continue;
        }
        Token tok{Token::Kind::Ident, "", line, col};
        std::size_t start = i;
        while (i < text.size() && !std::isspace(static_cast<unsigned char>(text[i]))) advance(1);
        tok.text = std::string(text.substr(start, i - start));
        out.push_back(tok);
      }
      out.push_back({Token::Kind::Symbol, ";", line, col});
      continue;
    }
    line_start = false;
    Token tok{Token::Kind::Symbol, "", line, col};
    if (ident_start(c)) {
      std::size_t start = i;
      while (i < text.size() && ident_char(text[i])) advance(1);
      tok.kind = Token::Kind::Ident;
      tok.text = std::string(text.substr(start, i - start));
      out.push_back(tok);
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t start = i;
      while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) advance(1);
      tok.kind = Token::Kind::Number;
      tok.text = std::string(text.substr(start, i - start));
      out.push_back(tok);
      continue;
    }
    if (c == '"') {
      advance(1);
      std::string s;
      while (i < text.size() && text[i] != '"') {
        if (text[i] == '\\' && i + 1 < text.size() && text[i + 1] == '"') {
          s += '"';
          advance(2);
          continue;
        }
        s += text[i];
        advance(1);
      }
      if (i >= text.size()) error("unterminated string");
      advance(1);
      tok.kind = Token::Kind::String;
      tok.text = std::move(s);
      out.push_back(tok);
      continue;
    }
    bool matched = false;
    for (const auto& a : kAliases) {
      if (text.substr(i, a.utf8.size()) == a.utf8) {
        tok.kind = a.word ? Token::Kind::Ident : Token::Kind::Symbol;
        tok.text = std::string(a.ascii);
        advance(a.utf8.size());
        out.push_back(tok);
        matched = true;
        break;
      }
    }
    if (matched) continue;
    for (auto sym : kSymbols) {
      if (text.substr(i, sym.size()) == sym) {
        tok.text = std::string(sym);
        advance(sym.size());
        out.push_back(tok);
        matched = true;
        break;
      }
    }
    if (!matched) error(std::string("unexpected character '") + c + "'");
  }
  out.push_back({Token::Kind::End, "", line, col});
  return out;
}

//------------------------------------------------------------------------------
// TokenStream

const Token& TokenStream::peek(std::size_t ahead) const {
  std::size_t k = std::min(pos_ + ahead, tokens_.size() - 1);
  return tokens_[k];
}

const Token& TokenStream::next() {
  const Token& t = tokens_[pos_];
  if (pos_ + 1 < tokens_.size()) ++pos_;
  return t;
}

bool TokenStream::accept(std::string_view symbol) {
  if (peek().kind != Token::Kind::String && peek().text == symbol &&
      peek().kind != Token::Kind::End) {
    next();
    return true;
  }
  return false;
}

void TokenStream::expect(std::string_view symbol) {
  if (!accept(symbol)) {
    const Token& t = peek();
    error("expected '" + std::string(symbol) + "' but found " +
          (t.kind == Token::Kind::End ? std::string("end of input") : "'" + t.text + "'"));
  }
}

std::string TokenStream::expect_ident() {
  if (peek().kind != Token::Kind::Ident)
    error("expected identifier but found " +
          (peek().kind == Token::Kind::End ? std::string("end of input") : "'" + peek().text + "'"));
  return next().text;
}

std::string TokenStream::expect_word() {
  if (peek().kind != Token::Kind::Ident && peek().kind != Token::Kind::Number)
    error("expected name but found " +
          (peek().kind == Token::Kind::End ? std::string("end of input") : "'" + peek().text + "'"));
  return next().text;
}

void TokenStream::error(const std::string& message) const {
  error_at(peek(), ErrorKind::Parse, message);
}

void TokenStream::error_at(const Token& tok, ErrorKind kind, const std::string& message) const {
  fail(kind, source_ + ":" + std::to_string(tok.line) + ":" + std::to_string(tok.col) + ": " +
                 message);
}

//------------------------------------------------------------------------------
// Types

namespace {

Type parse_type_base(TokenStream& in) {
  if (in.accept("(")) {
    Type t = parse_type(in);
    in.expect(")");
    return t;
  }
  if (in.peek().kind == Token::Kind::Number) {
    if (in.peek().text != "2") in.error("the only numeric type is 2");
    in.next();
    return Type::two();
  }
  if (in.peek().is("P") && in.peek(1).is("(")) {
    in.next();
    in.next();
    Type t = parse_type(in);
    in.expect(")");
    return power_type(t);
  }
  return Type::basic(in.expect_ident());
}

Type parse_type_exp(TokenStream& in) {
  Type t = parse_type_base(in);
  while (in.accept("^")) t = Type::exp(t, parse_type_base(in));
  return t;
}

}  // namespace

Type parse_type(TokenStream& in) {
  Type t = parse_type_exp(in);
  while (in.accept("*")) t = Type::prod(t, parse_type_exp(in));
  return t;
}

Type parse_type(std::string_view text) {
  TokenStream in(tokenize(text, "<type>"), "<type>");
  Type t = parse_type(in);
  if (!in.at_end()) in.error("trailing input after type");
  return t;
}

//------------------------------------------------------------------------------
// Terms

namespace {

class TermParser {
 public:
  TermParser(TokenStream& in, const Signature& sig, const Context& ctx)
      : in_(in), sig_(sig), scope_(ctx.vars()) {}

  Term term() {
    if (starts_binder()) return binder();
    Term lhs = disjunction();
    if (in_.accept("->")) return Term::implies(lhs, term());
    return lhs;
  }

 private:
  bool starts_binder() const {
    const Token& t = in_.peek();
    return t.is("\\") || t.is("forall") || t.is("exists");
  }

  Var bound_var() {
    std::string name = in_.expect_ident();
    in_.expect(":");
    return Var{name, parse_type(in_)};
  }

  Term binder() {
    std::string kw = in_.next().text;
    Var v = bound_var();
    in_.expect(".");
    scope_.push_back(v);
    Term body = term();
    scope_.pop_back();
    if (kw == "\\") return Term::lambda(v, body);
    if (kw == "forall") return Term::forall(v, body);
    return Term::exists(v, body);
  }

  Term disjunction() {
    Term t = conjunction();
    while (in_.accept("\\/")) t = Term::disj(t, starts_binder() ? binder() : conjunction());
    return t;
  }

  Term conjunction() {
    Term t = unary();
    while (in_.accept("/\\")) t = Term::conj(t, starts_binder() ? binder() : unary());
    return t;
  }

  Term unary() {
    if (in_.accept("~")) return Term::negation(starts_binder() ? binder() : unary());
    if (starts_binder()) return binder();
    Term lhs = application();
    if (in_.accept("=")) return Term::eq(lhs, application());
    if (in_.accept("in")) return Term::app(application(), lhs);
    return lhs;
  }

  std::vector<Term> arguments() {
    std::vector<Term> args;
    in_.expect("(");
    if (in_.accept(")")) return args;
    args.push_back(term());
    while (in_.accept(",")) args.push_back(term());
    in_.expect(")");
    return args;
  }

  Term application() {
    Term t = atom();
    while (in_.peek().is("(")) {
      const Token at = in_.peek();
      auto args = arguments();
      if (args.empty()) in_.error_at(at, ErrorKind::Parse, "empty argument list");
      t = Term::app(t, tuple(args));
    }
    return t;
  }

  Term atom() {
    const Token tok = in_.peek();
    if (starts_binder()) return binder();
    if (in_.accept("(")) {
      Term t = term();
      in_.expect(")");
      return t;
    }
    if (in_.accept("<")) {
      Term a = term();
      in_.expect(",");
      Term b = term();
      in_.expect(">");
      return Term::pair(a, b);
    }
    if (in_.accept("{")) {
      Var v = bound_var();
      in_.expect("|");
      scope_.push_back(v);
      Term body = term();
      scope_.pop_back();
      in_.expect("}");
      return Term::lambda(v, body);
    }
    if (tok.kind != Token::Kind::Ident) {
      in_.error(tok.kind == Token::Kind::End ? "unexpected end of input"
                                             : "unexpected '" + tok.text + "'");
    }
    in_.next();
    if (tok.text == "true") return Term::top();
    if (tok.text == "false") return Term::bot();
    if (tok.text == "fst" || tok.text == "snd") return Term::proj(tok.text == "fst" ? 1 : 2, atom());
    return identifier(tok);
  }

  Term identifier(const Token& tok) {
    const std::string& name = tok.text;
    for (auto it = scope_.rbegin(); it != scope_.rend(); ++it)
      if (it->name == name) return Term::var(*it);
    if (sig_.constant_type(name)) return Term::constant(name);
    if (sig_.relation(name)) {
      std::vector<Term> args;
      if (in_.peek().is("(")) args = arguments();
      return Term::rel(name, std::move(args));
    }
    in_.error_at(tok, ErrorKind::UnboundVariable, "unknown identifier '" + name + "'");
  }

  TokenStream& in_;
  const Signature& sig_;
  std::vector<Var> scope_;
};

}  // namespace

Term parse_term(TokenStream& in, const Signature& sig, const Context& ctx) {
  return TermParser(in, sig, ctx).term();
}

Term parse_term(std::string_view text, const Signature& sig, const Context& ctx) {
  TokenStream in(tokenize(text, "<term>"), "<term>");
  Term t = parse_term(in, sig, ctx);
  if (!in.at_end()) in.error("trailing input after term");
  return t;
}

Term parse_formula(std::string_view text, const Signature& sig, const Context& ctx) {
  Term t = parse_term(text, sig, ctx);
  check_formula(t, ctx, sig);
  return t;
}

Var parse_var(std::string_view text, const Signature& sig) {
  TokenStream in(tokenize(text, "<var>"), "<var>");
  std::string name = in.expect_ident();
  in.expect(":");
  Type t = parse_type(in);
  if (!in.at_end()) in.error("trailing input after variable");
  sig.check_type(t);
  return Var{name, t};
}

Context parse_context(std::string_view text, const Signature& sig) {
  TokenStream in(tokenize(text, "<context>"), "<context>");
  std::vector<Var> vars;
  while (!in.at_end()) {
    std::string name = in.expect_ident();
    in.expect(":");
    Type t = parse_type(in);
    sig.check_type(t);
    vars.push_back(Var{name, t});
    if (!in.at_end()) in.expect(",");
  }
  return Context(std::move(vars));
}

//------------------------------------------------------------------------------
// Theories

Theory parse_theory(std::string_view text, std::string_view source) {
  TokenStream in(tokenize(text, source), std::string(source));
  Mode mode = Mode::HolClassical;

  // The mode pragma has to be known before any declaration is checked.
  if (in.peek().is("%") && in.peek(1).is("mode")) {
    in.next();
    in.next();
    const Token tok = in.peek();
    try {
      mode = parse_mode(in.expect_ident());
    } catch (const Error& e) {
      in.error_at(tok, ErrorKind::Parse, e.what());
    }
    in.expect(";");
  }
  Theory theory{Signature(mode), {}};
  Signature& sig = theory.signature;

  auto guarded = [&](const Token& at, auto&& fn) {
    try {
      fn();
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::Parse) throw;
      in.error_at(at, e.kind(), e.what());
    }
  };

  while (!in.at_end()) {
    const Token tok = in.peek();
    if (in.accept("%")) {
      std::string word = in.expect_ident();
      if (word == "mode") in.error_at(tok, ErrorKind::Parse, "%mode must precede all declarations");
      while (!in.accept(";")) in.next();
      continue;
    }
    std::string kw = in.expect_ident();
    if (kw == "type") {
      std::string name = in.expect_ident();
      guarded(tok, [&] { sig.add_type(name); });
    } else if (kw == "const") {
      std::string name = in.expect_ident();
      in.expect(":");
      Type t = parse_type(in);
      guarded(tok, [&] { sig.add_constant(name, t); });
    } else if (kw == "rel") {
      std::string name = in.expect_ident();
      in.expect(":");
      in.expect("(");
      std::vector<Type> args;
      if (!in.accept(")")) {
        args.push_back(parse_type(in));
        while (in.accept(",")) args.push_back(parse_type(in));
        in.expect(")");
      }
      guarded(tok, [&] { sig.add_relation(name, args); });
    } else if (kw == "axiom") {
      const Token at = in.peek();
      Term ax = parse_term(in, sig, Context());
      guarded(at, [&] {
        check_formula(ax, Context(), sig);
        if (!free_vars(ax).empty()) fail(ErrorKind::UnboundVariable, "axiom is not closed");
      });
      theory.axioms.push_back(ax);
    } else {
      in.error_at(tok, ErrorKind::Parse, "unknown declaration '" + kw + "'");
    }
    in.expect(";");
  }
  return theory;
}

namespace {

std::vector<Type> untuple(Type t, int arity) {
  std::vector<Type> out;
  for (int k = arity; k > 1; --k) {
    out.insert(out.begin(), t.right());
    t = t.left();
  }
  out.insert(out.begin(), t);
  return out;
}

std::string type_list(const std::vector<Type>& types) {
  std::string s = "(";
  for (std::size_t i = 0; i < types.size(); ++i) s += (i ? ", " : "") + types[i].str();
  return s + ")";
}

}  // namespace

std::string print_theory(const Theory& theory) {
  const Signature& sig = theory.signature;
  std::ostringstream out;
  out << "%mode " << mode_name(sig.mode()) << "\n";
  for (const auto& t : sig.types()) out << "type " << t << ";\n";
  for (const auto& [name, type] : sig.constants()) {
    if (auto k = sig.encoded_relation_arity(name)) {
      out << "rel " << name << " : "
          << type_list(*k == 0 ? std::vector<Type>{} : untuple(type.argument(), *k)) << ";\n";
      continue;
    }
    out << "const " << name << " : " << type.str() << ";\n";
  }
  for (const auto& [name, args] : sig.relations()) out << "rel " << name << " : " << type_list(args) << ";\n";
  for (const auto& ax : theory.axioms) out << "axiom " << ax.str() << ";\n";
  return out.str();
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::Io, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace tlw
