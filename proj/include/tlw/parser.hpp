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

// Text grammar for types, terms and theories, plus the token stream shared by
// every file format in the workbench.
//
//   %mode hol-classical | hol-intuitionistic | lambda
//   type X;
//   const c : X^(X*X);
//   rel R : (X, X);
//   axiom forall x:X. R(x, x);
//
// Terms accept ASCII and Unicode spellings: forall/exists, /\ \/ -> ~,
// <u,v>, fst, snd, \y:Y. t, {x:Y | phi}, t in a, true, false.

#ifndef TLW_PARSER_HPP_
#define TLW_PARSER_HPP_

#include <string>
#include <string_view>
#include <vector>

#include "tlw/syntax.hpp"

namespace tlw {

struct Token {
  enum class Kind { Ident, Number, String, Symbol, End };
  Kind kind = Kind::End;
  std::string text;
  int line = 1;
  int col = 1;

  bool is(std::string_view symbol) const {
    return (kind == Kind::Symbol || kind == Kind::Ident) && text == symbol;
  }
};

// Tokenizes UTF-8 input; `#` and `//` start comments that run to end of line.
// Lines beginning with `%` become a Symbol "%" followed by the line's words.
std::vector<Token> tokenize(std::string_view text, std::string_view source = "<input>");

class TokenStream {
 public:
  TokenStream(std::vector<Token> tokens, std::string source)
      : tokens_(std::move(tokens)), source_(std::move(source)) {}

  const Token& peek(std::size_t ahead = 0) const;
  const Token& next();
  bool at_end() const { return peek().kind == Token::Kind::End; }
  bool accept(std::string_view symbol);
  void expect(std::string_view symbol);
  std::string expect_ident();
  std::string expect_word();  // identifier or number
  [[noreturn]] void error(const std::string& message) const;
  [[noreturn]] void error_at(const Token& tok, ErrorKind kind, const std::string& message) const;
  const std::string& source() const { return source_; }

 private:
  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
  std::string source_;
};

Type parse_type(TokenStream& in);
Type parse_type(std::string_view text);

// Free identifiers resolve to ctx variables, then constants, then relations.
Term parse_term(TokenStream& in, const Signature& sig, const Context& ctx);
Term parse_term(std::string_view text, const Signature& sig, const Context& ctx = {});

// parse_term followed by check_formula.
Term parse_formula(std::string_view text, const Signature& sig, const Context& ctx = {});

// "x:X, y:Y" (possibly empty).
Context parse_context(std::string_view text, const Signature& sig);
Var parse_var(std::string_view text, const Signature& sig);

Theory parse_theory(std::string_view text, std::string_view source = "<input>");
std::string print_theory(const Theory& theory);

std::string read_file(const std::string& path);

}  // namespace tlw

#endif  // TLW_PARSER_HPP_
