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

// Text formats for spaces, sheaves, sheaf models and morphisms. Statements
// end with ';'; '#' (not followed by a digit) and '//' start comments.
//
// space:     points: a b c;  opens: {} {a} {a b c};   (or subbasis: {a} {b};)
// sheaf:     space: base.space;  (or inline points/opens)
//            stalk a: x y;  trans a->b: x|->u y|->u;
// model:     flavor classical-c;  space: ...;  (or inline)
//            sheaf X = x.sheaf;  (or inline: stalk X a: ...; trans X a->b: ...;)
//            const c = x;              same label at every point
//            const c = a=x b=u;        per point
//            const c = #0;             k-th global section
//            const f = fun x|->y a:y|->x;   stalkwise table; "p:" limits an entry to p
//            rel R = a:<x,y> <y,y>;    germs of the subsheaf; unqualified = every point
//            rel q = none;
// morphism:  source: X;  target: X*X;  map a: x|-><x,x> y|-><y,y>;
//
// trans p->q lists the restriction from the stalk at p to the stalk at a
// point q of the minimal open of p.

#ifndef TLW_FORMATS_HPP_
#define TLW_FORMATS_HPP_

#include <functional>
#include <string>
#include <string_view>

#include "tlw/finspace.hpp"
#include "tlw/semantics.hpp"
#include "tlw/sheaf.hpp"

namespace tlw {

// Returns the contents of a referenced file.
using Resolve = std::function<std::string(const std::string& path)>;

// Reads paths relative to the directory of `file`.
Resolve resolver_for(const std::string& file);

FinSpace parse_space(std::string_view text, std::string_view source = "<space>");
std::string print_space(const FinSpace& x);

Sheaf parse_sheaf(std::string_view text, const Resolve& resolve, std::string_view source = "<sheaf>");
std::string print_sheaf(const Sheaf& f);

Interpretation parse_model(std::string_view text, const Theory& theory, const Resolve& resolve,
                           std::string_view source = "<model>");
std::string print_model(const Interpretation& m);

struct MorphismFile {
  Type source;
  Type target;
  SheafMorphism map;
};

MorphismFile parse_morphism(std::string_view text, Evaluator& eval, std::string_view source = "<morphism>");
std::string print_morphism(const MorphismFile& m);

}  // namespace tlw

#endif  // TLW_FORMATS_HPP_
