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

#include "tlw/formats.hpp"

#include <cctype>
#include <filesystem>
#include <map>
#include <optional>
#include <sstream>

#include "tlw/parser.hpp"

namespace tlw {

namespace {

struct Stmt {
  int line;
  std::string head;  // first word, ':' stripped
  std::string rest;  // everything after the first word
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

class Reader {
 public:
  Reader(std::string_view text, std::string_view source) : source_(source) {
    std::string cur;
    int cur_line = 0, line = 1;
    for (std::size_t i = 0; i < text.size();) {
      std::size_t eol = text.find('\n', i);
      if (eol == std::string_view::npos) eol = text.size();
      std::string_view l = text.substr(i, eol - i);
      std::size_t hash = 0;
      while ((hash = l.find('#', hash)) != std::string_view::npos && hash + 1 < l.size() &&
             std::isdigit(static_cast<unsigned char>(l[hash + 1])))
        ++hash;
      l = l.substr(0, std::min(hash, l.find("//")));
      for (char c : l) {
        if (c == ';') {
          push(cur, cur_line);
          cur.clear();
          continue;
        }
        if (trim(cur).empty() && c != ' ' && c != '\t') cur_line = line;
        cur += c;
      }
      cur += ' ';
      i = eol + 1;
      ++line;
    }
    if (!trim(cur).empty()) error(cur_line, "missing ';'");
  }

  const std::vector<Stmt>& statements() const { return stmts_; }

  [[noreturn]] void error(int line, const std::string& msg, ErrorKind kind = ErrorKind::Parse) const {
    fail(kind, source_ + ":" + std::to_string(line) + ": " + msg);
  }

 private:
  void push(const std::string& raw, int line) {
    std::string t = trim(raw);
    if (t.empty()) return;
    std::size_t end = t.find_first_of(" \t:=");
    Stmt s{line, t.substr(0, end), end == std::string::npos ? "" : trim(t.substr(end))};
    if (!s.rest.empty() && s.rest[0] == ':' && s.head != "const" && s.head != "rel") s.rest = trim(s.rest.substr(1));
    stmts_.push_back(std::move(s));
  }

  std::string source_;
  std::vector<Stmt> stmts_;
};

// Adds context to errors raised by library calls.
template <class F>
auto located(const Reader& r, int line, F&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::Parse) throw;
    r.error(line, e.what(), e.kind());
  }
}

std::vector<PointSet> parse_sets(const Reader& r, const Stmt& s, const std::vector<std::string>& names) {
  std::vector<PointSet> out;
  std::size_t i = 0;
  const std::string& t = s.rest;
  while (true) {
    i = t.find_first_not_of(" \t", i);
    if (i == std::string::npos) break;
    if (t[i] != '{') r.error(s.line, "expected '{'");
    std::size_t j = t.find('}', i);
    if (j == std::string::npos) r.error(s.line, "missing '}'");
    PointSet set = 0;
    std::string inner = t.substr(i + 1, j - i - 1);
    for (char& c : inner)
      if (c == ',') c = ' ';
    for (const auto& w : words(inner)) {
      auto it = std::find(names.begin(), names.end(), w);
      if (it == names.end()) r.error(s.line, "unknown point " + w);
      set |= bit(static_cast<int>(it - names.begin()));
    }
    out.push_back(set);
    i = j + 1;
  }
  return out;
}

std::string set_str(const FinSpace& x, PointSet s) {
  std::string out = "{";
  bool first = true;
  for (int p : members(s)) {
    out += (first ? "" : " ") + x.name(p);
    first = false;
  }
  return out + "}";
}

// Space statements among others; returns nullopt when none are present.
std::optional<FinSpace> read_space(const Reader& r, const Resolve* resolve) {
  std::optional<std::vector<std::string>> names;
  std::optional<FinSpace> out;
  int line = 0;
  std::vector<PointSet> opens, subbasis;
  bool have_opens = false, have_sub = false;
  for (const auto& s : r.statements()) {
    if (s.head == "points") {
      if (names) r.error(s.line, "points given twice");
      names = words(s.rest);
      line = s.line;
    } else if (s.head == "opens" || s.head == "subbasis") {
      if (!names) r.error(s.line, "points must come first");
      auto sets = parse_sets(r, s, *names);
      if (s.head == "opens") {
        opens.insert(opens.end(), sets.begin(), sets.end());
        have_opens = true;
      } else {
        subbasis.insert(subbasis.end(), sets.begin(), sets.end());
        have_sub = true;
      }
    } else if (s.head == "space") {
      if (!resolve) r.error(s.line, "space references are not allowed here");
      if (out) r.error(s.line, "space given twice");
      std::string path = trim(s.rest);
      out = located(r, s.line, [&] { return parse_space((*resolve)(path), path); });
    }
  }
  if (names) {
    if (out) r.error(line, "both a space reference and inline points");
    if (have_opens && have_sub) r.error(line, "give opens or subbasis, not both");
    auto n = *names;
    located(r, line, [&] { check_point_cap(static_cast<int>(n.size())); });
    if (have_opens) return located(r, line, [&] { return FinSpace(n, opens); });
    return located(r, line, [&] { return FinSpace::from_subbasis(n, subbasis); });
  }
  return out;
}

int point_of(const Reader& r, int line, const FinSpace& x, const std::string& name) {
  auto p = x.index_of(name);
  if (!p) r.error(line, "unknown point " + name);
  return *p;
}

int label_of(const Reader& r, int line, const Sheaf& f, int p, const std::string& label) {
  auto a = f.find_label(p, label);
  if (!a) r.error(line, "no element '" + label + "' at " + f.base().name(p));
  return *a;
}

// "a->b" into two point names.
std::pair<std::string, std::string> arrow_pair(const Reader& r, int line, const std::string& s) {
  std::size_t k = s.find("->");
  if (k == std::string::npos) r.error(line, "expected p->q");
  return {trim(s.substr(0, k)), trim(s.substr(k + 2))};
}

// "x|->y" entries.
std::vector<std::pair<std::string, std::string>> map_entries(const Reader& r, int line, const std::string& s) {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& w : words(s)) {
    std::size_t k = w.find("|->");
    if (k == std::string::npos) r.error(line, "expected x|->y, got " + w);
    out.emplace_back(w.substr(0, k), w.substr(k + 3));
  }
  return out;
}

struct SheafDraft {
  std::vector<std::vector<std::string>> labels;
  std::vector<std::pair<std::pair<int, int>, std::string>> trans;
  std::vector<int> trans_lines;
  int line = 0;
};

// stalk/trans bodies: "a: x y" and "a->b: x|->u".
void add_stalk(const Reader& r, const FinSpace& x, SheafDraft& d, int line, const std::string& body) {
  std::size_t colon = body.find(':');
  if (colon == std::string::npos) r.error(line, "expected 'stalk p: labels'");
  int p = point_of(r, line, x, trim(body.substr(0, colon)));
  if (!d.labels[p].empty()) r.error(line, "stalk at " + x.name(p) + " given twice");
  d.labels[p] = words(body.substr(colon + 1));
  if (d.line == 0) d.line = line;
}

void add_trans(const Reader& r, const FinSpace& x, SheafDraft& d, int line, const std::string& body) {
  std::size_t colon = body.find(':');
  if (colon == std::string::npos) r.error(line, "expected 'trans p->q: x|->y ...'");
  auto [ps, qs] = arrow_pair(r, line, body.substr(0, colon));
  int p = point_of(r, line, x, ps), q = point_of(r, line, x, qs);
  d.trans.push_back({{p, q}, body.substr(colon + 1)});
  d.trans_lines.push_back(line);
  if (d.line == 0) d.line = line;
}

Sheaf build_sheaf(const Reader& r, const FinSpace& x, const SheafDraft& d) {
  std::map<std::pair<int, int>, Sheaf::Table> edges;
  for (std::size_t k = 0; k < d.trans.size(); ++k) {
    auto [pq, body] = d.trans[k];
    int line = d.trans_lines[k];
    auto [p, q] = pq;
    if (!x.leq(p, q) || p == q) r.error(line, x.name(q) + " is not in the minimal open of " + x.name(p), ErrorKind::InvalidSheaf);
    Sheaf::Table t(d.labels[p].size(), -1);
    for (const auto& [a, b] : map_entries(r, line, body)) {
      auto ia = std::find(d.labels[p].begin(), d.labels[p].end(), a);
      auto ib = std::find(d.labels[q].begin(), d.labels[q].end(), b);
      if (ia == d.labels[p].end() || ib == d.labels[q].end()) r.error(line, "unknown element in " + a + "|->" + b);
      t[ia - d.labels[p].begin()] = static_cast<int>(ib - d.labels[q].begin());
    }
    if (std::count(t.begin(), t.end(), -1)) r.error(line, "restriction is not total", ErrorKind::InvalidSheaf);
    if (!edges.emplace(pq, t).second) r.error(line, "restriction given twice");
  }
  return located(r, d.line, [&] { return Sheaf::make(x, d.labels, edges); });
}

void print_sheaf_body(std::ostringstream& out, const Sheaf& f, const std::string& prefix) {
  const FinSpace& x = f.base();
  for (int p = 0; p < x.size(); ++p) {
    out << "stalk " << prefix << x.name(p) << ":";
    for (const auto& l : f.labels(p)) out << " " << l;
    out << ";\n";
  }
  for (int p = 0; p < x.size(); ++p)
    for (int q : members(x.min_open(p))) {
      if (q == p) continue;
      out << "trans " << prefix << x.name(p) << "->" << x.name(q) << ":";
      for (int a = 0; a < f.stalk_size(p); ++a) out << " " << f.label(p, a) << "|->" << f.label(q, f.trans(p, q, a));
      out << ";\n";
    }
}

}  // namespace

Resolve resolver_for(const std::string& file) {
  std::filesystem::path dir = std::filesystem::path(file).parent_path();
  return [dir](const std::string& path) {
    std::filesystem::path p(path);
    return read_file((p.is_absolute() ? p : dir / p).string());
  };
}

FinSpace parse_space(std::string_view text, std::string_view source) {
  Reader r(text, source);
  for (const auto& s : r.statements())
    if (s.head != "points" && s.head != "opens" && s.head != "subbasis")
      r.error(s.line, "unknown statement '" + s.head + "'");
  auto x = read_space(r, nullptr);
  if (!x) fail(ErrorKind::Parse, std::string(source) + ": no points");
  return *x;
}

std::string print_space(const FinSpace& x) {
  std::ostringstream out;
  out << "points:";
  for (const auto& n : x.names()) out << " " << n;
  out << ";\nopens:";
  for (PointSet u : x.opens()) out << " " << set_str(x, u);
  out << ";\n";
  return out.str();
}

Sheaf parse_sheaf(std::string_view text, const Resolve& resolve, std::string_view source) {
  Reader r(text, source);
  auto x = read_space(r, &resolve);
  if (!x) fail(ErrorKind::Parse, std::string(source) + ": no base space");
  SheafDraft d;
  d.labels.resize(x->size());
  for (const auto& s : r.statements()) {
    if (s.head == "points" || s.head == "opens" || s.head == "subbasis" || s.head == "space") continue;
    if (s.head == "stalk") add_stalk(r, *x, d, s.line, s.rest);
    else if (s.head == "trans") add_trans(r, *x, d, s.line, s.rest);
    else r.error(s.line, "unknown statement '" + s.head + "'");
  }
  if (d.line == 0) d.line = 1;
  return build_sheaf(r, *x, d);
}

std::string print_sheaf(const Sheaf& f) {
  std::ostringstream out;
  out << print_space(f.base());
  print_sheaf_body(out, f, "");
  return out.str();
}

Interpretation parse_model(std::string_view text, const Theory& theory, const Resolve& resolve, std::string_view source) {
  Reader r(text, source);
  Interpretation m;
  m.theory = theory;
  auto x = read_space(r, &resolve);
  if (!x) fail(ErrorKind::Parse, std::string(source) + ": no base space");
  m.base = *x;
  const Signature& sig = theory.signature;

  std::map<std::string, SheafDraft> inline_sheaves;
  std::vector<const Stmt*> consts, rels;
  bool have_flavor = false;
  for (const auto& s : r.statements()) {
    if (s.head == "points" || s.head == "opens" || s.head == "subbasis" || s.head == "space") continue;
    if (s.head == "flavor") {
      m.flavor = located(r, s.line, [&] { return parse_flavor(trim(s.rest)); });
      have_flavor = true;
    } else if (s.head == "sheaf") {
      std::size_t eq = s.rest.find('=');
      if (eq == std::string::npos) r.error(s.line, "expected 'sheaf X = file'");
      std::string type = trim(s.rest.substr(0, eq)), path = trim(s.rest.substr(eq + 1));
      if (!sig.has_type(type)) r.error(s.line, "unknown basic type " + type, ErrorKind::UnknownBasicType);
      if (m.types.count(type) || inline_sheaves.count(type)) r.error(s.line, "sheaf for " + type + " given twice");
      Sheaf f = located(r, s.line, [&] { return parse_sheaf(resolve(path), resolve, path); });
      if (!f.base().same_topology(m.base) || f.base().names() != m.base.names())
        r.error(s.line, "sheaf " + path + " lives over a different space", ErrorKind::BaseMismatch);
      m.types[type] = f;
    } else if (s.head == "stalk" || s.head == "trans") {
      auto w = words(s.rest);
      if (w.empty() || !sig.has_type(w[0])) r.error(s.line, "expected a basic type after " + s.head);
      std::string body = trim(s.rest.substr(s.rest.find(w[0]) + w[0].size()));
      SheafDraft& d = inline_sheaves[w[0]];
      if (d.labels.empty()) d.labels.resize(m.base.size());
      if (s.head == "stalk") add_stalk(r, m.base, d, s.line, body);
      else add_trans(r, m.base, d, s.line, body);
    } else if (s.head == "const") {
      consts.push_back(&s);
    } else if (s.head == "rel") {
      rels.push_back(&s);
    } else {
      r.error(s.line, "unknown statement '" + s.head + "'");
    }
  }
  if (!have_flavor) fail(ErrorKind::Parse, std::string(source) + ": missing 'flavor'");
  for (const auto& [type, d] : inline_sheaves) {
    if (m.types.count(type)) r.error(d.line, "sheaf for " + type + " given twice");
    m.types[type] = build_sheaf(r, m.base, d);
  }

  // sheaves of compound types come from an evaluator over the bare types
  Interpretation bare = m;
  bare.theory = Theory{Signature(sig.mode()), {}};
  for (const auto& t : sig.types()) bare.theory.signature.add_type(t);
  Evaluator shapes(bare);

  for (const Stmt* s : consts) {
    std::size_t eq = s->rest.find('=');
    if (eq == std::string::npos) r.error(s->line, "expected 'const c = literal'");
    std::string name = trim(s->rest.substr(0, eq)), lit = trim(s->rest.substr(eq + 1));
    auto type = sig.constant_type(name);
    if (!type) r.error(s->line, "unknown constant " + name, ErrorKind::UnknownConstant);
    if (m.constants.count(name)) r.error(s->line, "constant " + name + " given twice");
    const Sheaf& f = located(r, s->line, [&]() -> const Sheaf& { return shapes.interpret_type(*type); });
    const int n = m.base.size();
    std::vector<int> section(n, -1);
    if (!lit.empty() && lit[0] == '#') {
      auto all = f.global_sections();
      int k = -1;
      try {
        k = std::stoi(lit.substr(1));
      } catch (const std::exception&) {
        r.error(s->line, "bad section index " + lit);
      }
      if (k < 0 || k >= static_cast<int>(all.size()))
        r.error(s->line, lit + " out of range: " + std::to_string(all.size()) + " global sections", ErrorKind::MemberOutOfRange);
      section = all[k];
    } else if (lit.rfind("fun", 0) == 0 && (lit.size() == 3 || lit[3] == ' ')) {
      if (type->kind() != Type::Kind::Exp) r.error(s->line, "function literal for a non-function constant");
      const Exponential& e = located(r, s->line, [&]() -> const Exponential& { return shapes.interpret_exponential(*type); });
      // entries at a named point win over unqualified ones
      std::map<std::pair<int, std::string>, std::string> at;
      std::map<std::string, std::string> everywhere;
      for (auto [a, b] : map_entries(r, s->line, lit.substr(3))) {
        std::size_t colon = a.find(':');
        if (colon != std::string::npos && m.base.index_of(a.substr(0, colon)))
          at[{*m.base.index_of(a.substr(0, colon)), a.substr(colon + 1)}] = b;
        else
          everywhere[a] = b;
      }
      bool missing = false;
      std::string missing_at;
      auto fn = [&](int q, int b) {
        const std::string& lb = e.argument.label(q, b);
        auto it = at.find({q, lb});
        std::string res;
        if (it != at.end()) res = it->second;
        else if (everywhere.count(lb)) res = everywhere[lb];
        else {
          missing = true;
          missing_at = lb + " at " + m.base.name(q);
          return -1;
        }
        auto v = e.result.find_label(q, res);
        if (!v) {
          missing = true;
          missing_at = res + " at " + m.base.name(q);
          return -1;
        }
        return *v;
      };
      auto sec = function_section(e, fn);
      if (missing) r.error(s->line, "function literal has no value for " + missing_at);
      if (!sec) r.error(s->line, "function literal is not natural", ErrorKind::InvalidModel);
      section = *sec;
    } else {
      std::map<int, std::string> per;
      std::optional<std::string> uniform;
      for (const auto& w : words(lit)) {
        std::size_t k = w.find('=');
        if (k == std::string::npos) {
          if (uniform) r.error(s->line, "several unqualified labels");
          uniform = w;
        } else {
          per[point_of(r, s->line, m.base, w.substr(0, k))] = w.substr(k + 1);
        }
      }
      for (int p = 0; p < n; ++p) {
        auto it = per.find(p);
        if (it == per.end() && !uniform) r.error(s->line, "no value at " + m.base.name(p));
        section[p] = label_of(r, s->line, f, p, it != per.end() ? it->second : *uniform);
      }
      if (!f.is_section(m.base.full(), section))
        r.error(s->line, "value of " + name + " is not a global section", ErrorKind::InvalidModel);
    }
    m.constants[name] = section;
  }

  for (const Stmt* s : rels) {
    std::size_t eq = s->rest.find('=');
    if (eq == std::string::npos) r.error(s->line, "expected 'rel R = germs'");
    std::string name = trim(s->rest.substr(0, eq)), lit = trim(s->rest.substr(eq + 1));
    const std::vector<Type>* args = nullptr;
    for (const auto& [rn, ra] : sig.relations())
      if (rn == name) args = &ra;
    if (!args) r.error(s->line, "unknown relation " + name, ErrorKind::UnknownRelation);
    if (m.relations.count(name)) r.error(s->line, "relation " + name + " given twice");
    Sheaf f = args->empty() ? terminal(m.base)
                            : located(r, s->line, [&] { return shapes.interpret_type(tuple_type(*args)); });
    std::vector<std::vector<char>> in(m.base.size());
    for (int p = 0; p < m.base.size(); ++p) in[p].assign(f.stalk_size(p), 0);
    if (lit != "none") {
      for (const auto& w : words(lit)) {
        std::size_t colon = w.find(':');
        if (colon != std::string::npos && m.base.index_of(w.substr(0, colon))) {
          int p = *m.base.index_of(w.substr(0, colon));
          in[p][label_of(r, s->line, f, p, w.substr(colon + 1))] = 1;
        } else {
          bool any = false;
          for (int p = 0; p < m.base.size(); ++p)
            if (auto a = f.find_label(p, w)) {
              in[p][*a] = 1;
              any = true;
            }
          if (!any) r.error(s->line, "no element '" + w + "' anywhere");
        }
      }
    }
    m.relations[name] = located(r, s->line, [&] { return Subsheaf::make(f, in); });
  }
  return m;
}

std::string print_model(const Interpretation& m) {
  std::ostringstream out;
  out << "flavor " << flavor_name(m.flavor) << ";\n";
  out << print_space(m.base);
  for (const auto& [t, f] : m.types) print_sheaf_body(out, f, t + " ");
  Interpretation bare = m;
  bare.theory = Theory{Signature(m.theory.signature.mode()), {}};
  for (const auto& t : m.theory.signature.types()) bare.theory.signature.add_type(t);
  bare.constants.clear();
  bare.relations.clear();
  Evaluator shapes(bare);
  for (const auto& [c, t] : m.theory.signature.constants()) {
    auto it = m.constants.find(c);
    if (it == m.constants.end()) continue;
    const Sheaf& f = shapes.interpret_type(t);
    out << "const " << c << " =";
    for (int p = 0; p < m.base.size(); ++p) out << " " << m.base.name(p) << "=" << f.label(p, it->second[p]);
    out << ";\n";
  }
  for (const auto& [name, s] : m.relations) {
    out << "rel " << name << " =";
    bool any = false;
    for (int p = 0; p < m.base.size(); ++p)
      for (int a = 0; a < s.parent.stalk_size(p); ++a)
        if (s.contains(p, a)) {
          out << " " << m.base.name(p) << ":" << s.parent.label(p, a);
          any = true;
        }
    if (!any) out << " none";
    out << ";\n";
  }
  return out.str();
}

MorphismFile parse_morphism(std::string_view text, Evaluator& eval, std::string_view source) {
  Reader r(text, source);
  std::optional<Type> src, dst;
  std::vector<const Stmt*> maps;
  for (const auto& s : r.statements()) {
    if (s.head == "source") src = located(r, s.line, [&] { return parse_type(s.rest); });
    else if (s.head == "target") dst = located(r, s.line, [&] { return parse_type(s.rest); });
    else if (s.head == "map") maps.push_back(&s);
    else r.error(s.line, "unknown statement '" + s.head + "'");
  }
  if (!src || !dst) fail(ErrorKind::Parse, std::string(source) + ": need source and target");
  const Sheaf& y = located(r, 1, [&]() -> const Sheaf& { return eval.interpret_type(*src); });
  const Sheaf& z = located(r, 1, [&]() -> const Sheaf& { return eval.interpret_type(*dst); });
  const FinSpace& x = y.base();
  std::vector<std::vector<int>> comp(x.size());
  for (int p = 0; p < x.size(); ++p) comp[p].assign(y.stalk_size(p), -1);
  for (const Stmt* s : maps) {
    std::size_t colon = s->rest.find(':');
    if (colon == std::string::npos) r.error(s->line, "expected 'map p: x|->y ...'");
    int p = point_of(r, s->line, x, trim(s->rest.substr(0, colon)));
    for (const auto& [a, b] : map_entries(r, s->line, s->rest.substr(colon + 1)))
      comp[p][label_of(r, s->line, y, p, a)] = label_of(r, s->line, z, p, b);
  }
  for (int p = 0; p < x.size(); ++p)
    if (std::count(comp[p].begin(), comp[p].end(), -1))
      fail(ErrorKind::Parse, std::string(source) + ": map at " + x.name(p) + " is not total");
  SheafMorphism f = located(r, 1, [&] { return SheafMorphism::make(y, z, comp); });
  return {*src, *dst, f};
}

std::string print_morphism(const MorphismFile& m) {
  std::ostringstream out;
  out << "source: " << m.source.str() << ";\ntarget: " << m.target.str() << ";\n";
  const FinSpace& x = m.map.source.base();
  for (int p = 0; p < x.size(); ++p) {
    out << "map " << x.name(p) << ":";
    for (int a = 0; a < m.map.source.stalk_size(p); ++a)
      out << " " << m.map.source.label(p, a) << "|->" << m.map.target.label(p, m.map(p, a));
    out << ";\n";
  }
  return out.str();
}

}  // namespace tlw
