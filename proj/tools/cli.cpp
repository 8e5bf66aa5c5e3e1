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

#include "cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <set>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "tlw/deduction.hpp"
#include "tlw/formats.hpp"
#include "tlw/fuzz.hpp"
#include "tlw/henkin.hpp"
#include "tlw/parser.hpp"
#include "tlw/semantics.hpp"

namespace tlw::cli {

namespace {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

struct Report {
  json body;
  int exit = 0;
};

Report report(const std::string& command, const std::string& verdict, int exit) {
  Report r;
  r.body["schema"] = kSchema;
  r.body["command"] = command;
  r.body["verdict"] = verdict;
  r.exit = exit;
  return r;
}

bool is_validation(ErrorKind k) {
  switch (k) {
    case ErrorKind::InvalidSpace:
    case ErrorKind::InvalidSheaf:
    case ErrorKind::InvalidModel:
    case ErrorKind::NotDecidable:
    case ErrorKind::BaseMismatch:
    case ErrorKind::ParentMismatch:
    case ErrorKind::NotEtale:
    case ErrorKind::EscapesCarrier:
      return true;
    default:
      return false;
  }
}

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  return s.substr(a, s.find_last_not_of(" \t\r\n") - a + 1);
}

class Files {
 public:
  explicit Files(std::string base) : base_(std::move(base)) {}

  std::string at(const std::string& p) const {
    if (base_.empty() || fs::path(p).is_absolute()) return p;
    return (fs::path(base_) / p).string();
  }
  std::string read(const std::string& p) const {
    try {
      return read_file(at(p));
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::Io) throw;
      fail(ErrorKind::Io, "cannot open '" + p + "'");
    }
  }

  std::function<Theory(const std::string&)> theory_loader(const std::string& file) const {
    fs::path dir = fs::path(at(file)).parent_path();
    return [dir](const std::string& rel) {
      fs::path p(rel);
      return parse_theory(read_file((p.is_absolute() ? p : dir / p).string()), rel);
    };
  }

  Theory theory(const std::string& p) const { return parse_theory(read(p), p); }

  // A model file may start with "%theory FILE"; an explicit theory wins.
  Interpretation model(const std::string& p, const std::optional<Theory>& given) const {
    std::string text = read(p);
    std::optional<Theory> thy = given;
    if (text.rfind("%theory", 0) == 0) {
      std::size_t eol = text.find('\n');
      if (eol == std::string::npos) eol = text.size();
      std::string rel = trim(text.substr(7, eol - 7));
      if (!thy) thy = theory_loader(p)(rel);
      text.erase(0, eol);
    }
    if (!thy) fail(ErrorKind::Parse, p + ": no theory; start the file with '%theory FILE' or pass --theory");
    return parse_model(text, *thy, resolver_for(at(p)), p);
  }

 private:
  std::string base_;
};

json point_set(const FinSpace& x, PointSet s) {
  json out = json::array();
  for (int p : members(s)) out.push_back(x.name(p));
  return out;
}

//------------------------------------------------------------------------------
// Commands

Report cmd_parse(const Files& files, const std::string& file, const std::string& theory_path,
                 const std::string& model_path) {
  std::string ext = fs::path(file).extension().string();
  Report r = report("parse", "ok", 0);
  r.body["file"] = file;
  std::string text;
  std::optional<Theory> thy;
  if (!theory_path.empty()) thy = files.theory(theory_path);
  if (ext == ".thy") {
    Theory t = files.theory(file);
    r.body["kind"] = "theory";
    r.body["mode"] = mode_name(t.signature.mode());
    r.body["axioms"] = t.axioms.size();
    text = print_theory(t);
  } else if (ext == ".prf") {
    ProofFile pf = parse_proof(files.read(file), files.theory_loader(file), file);
    r.body["kind"] = "proof";
    r.body["size"] = pf.proof.size();
    r.body["height"] = pf.proof.height();
    text = (pf.theory_path.empty() ? std::string("%mode ") + mode_name(pf.theory.signature.mode())
                                   : "%theory " + pf.theory_path) +
           "\n" + print_proof(pf.proof, pf.theory.signature);
  } else if (ext == ".space") {
    FinSpace x = parse_space(files.read(file), file);
    r.body["kind"] = "space";
    text = print_space(x);
  } else if (ext == ".sheaf") {
    Sheaf f = parse_sheaf(files.read(file), resolver_for(files.at(file)), file);
    r.body["kind"] = "sheaf";
    text = print_sheaf(f);
  } else if (ext == ".model") {
    Interpretation m = files.model(file, thy);
    r.body["kind"] = "model";
    text = print_model(m);
  } else if (ext == ".henkin") {
    HenkinFile h = parse_henkin(files.read(file), files.theory_loader(file), file);
    r.body["kind"] = "henkin";
    r.body["points"] = h.points.size();
    text = print_henkin(h);
  } else if (ext == ".morph") {
    if (model_path.empty()) fail(ErrorKind::Parse, "parsing a morphism needs --model");
    Interpretation m = files.model(model_path, thy);
    Evaluator ev(m);
    MorphismFile mf = parse_morphism(files.read(file), ev, file);
    r.body["kind"] = "morphism";
    text = print_morphism(mf);
  } else {
    fail(ErrorKind::Parse, file + ": unknown file kind '" + ext + "'");
  }
  r.body["text"] = text;
  return r;
}

Report cmd_check_proof(const Files& files, const std::string& file) {
  ProofFile pf = parse_proof(files.read(file), files.theory_loader(file), file);
  ProofVerdict v = check_proof(pf.proof, pf.theory);
  Report r = report("check-proof", v.valid ? "valid" : "invalid", v.valid ? 0 : 1);
  r.body["file"] = file;
  r.body["mode"] = mode_name(pf.theory.signature.mode());
  r.body["size"] = pf.proof.size();
  r.body["height"] = pf.proof.height();
  if (v.valid) {
    r.body["conclusion"] = v.conclusion->str();
  } else {
    r.body["node"] = v.node;
    r.body["error"] = error_kind_name(v.error);
    r.body["message"] = v.message;
  }
  return r;
}

Report cmd_eval(const Files& files, const std::string& theory, const std::string& model, const std::string& sentence) {
  Theory thy = files.theory(theory);
  Interpretation m = files.model(model, thy);
  Term phi = parse_formula(sentence, thy.signature);
  Evaluator ev(m);
  bool holds = ev.satisfies(phi);
  Report r = report("eval", holds ? "holds" : "fails", holds ? 0 : 1);
  r.body["sentence"] = phi.str();
  r.body["flavor"] = flavor_name(m.flavor);
  r.body["points"] = m.base.size();
  return r;
}

Report cmd_check_model(const Files& files, const std::string& theory, const std::string& model) {
  Theory thy = files.theory(theory);
  Interpretation m = files.model(model, thy);
  ModelVerdict v = check_model(m);
  Report r = report("check-model", v.valid ? "valid" : "invalid", v.valid ? 0 : 1);
  r.body["axioms"] = thy.axioms.size();
  if (!v.valid) {
    r.body["failing_axiom"] = v.failing_axiom;
    if (v.failing_axiom >= 0) r.body["axiom"] = thy.axioms[v.failing_axiom].str();
    r.body["message"] = v.message;
  }
  return r;
}

Report cmd_countermodel(const Files& files, const std::string& theory, const std::string& sentence,
                        const std::string& flavor, int max_points, int max_stalk) {
  check_point_cap(max_points);
  Theory thy = files.theory(theory);
  Term phi = parse_formula(sentence, thy.signature);
  SearchBounds b;
  b.max_points = max_points;
  b.max_stalk = max_stalk;
  b.flavor = parse_flavor(flavor);
  SearchResult res = search_countermodel(thy, phi, b);
  // a countermodel refutes the sentence
  Report r = report("countermodel", res.model ? "refuted" : "no-countermodel", res.model ? 1 : 0);
  r.body["sentence"] = phi.str();
  r.body["flavor"] = flavor_name(b.flavor);
  r.body["max_points"] = max_points;
  r.body["max_stalk"] = max_stalk;
  r.body["candidates"] = res.candidates;
  r.body["exhausted"] = res.exhausted;
  if (res.model) {
    const FinSpace& x = res.model->base;
    json opens = json::array();
    for (PointSet u : x.opens()) opens.push_back(point_set(x, u));
    r.body["witness"] = {{"points", x.names()}, {"opens", opens}, {"model", print_model(*res.model)}};
  }
  return r;
}

Report cmd_define(const Files& files, const std::string& model, const std::string& morphism,
                  const std::string& theory, int depth) {
  std::optional<Theory> thy;
  if (!theory.empty()) thy = files.theory(theory);
  Interpretation m = files.model(model, thy);
  Evaluator ev(m);
  MorphismFile mf = parse_morphism(files.read(morphism), ev, morphism);
  std::optional<Term> phi = find_defining_formula(ev, mf.source, mf.target, mf.map, depth);
  Report r = report("define", phi ? "defined" : "not-found", phi ? 0 : 1);
  r.body["source"] = mf.source.str();
  r.body["target"] = mf.target.str();
  r.body["depth"] = depth;
  if (phi) {
    Context ctx({Var{"y", mf.source}, Var{"z", mf.target}});
    bool ok = ev.interpret_formula(*phi, ctx) == graph_of(mf.map, ev.context_sheaf(ctx));
    r.body["formula"] = phi->str();
    r.body["revalidated"] = ok;
    if (!ok) {
      r.body["verdict"] = "invalid";
      r.exit = 1;
    }
  }
  return r;
}

Report cmd_fuzz(const Files& files, int count, std::uint64_t seed, const std::string& mode, int depth, int models,
                int max_points, int max_stalk, const std::string& theory, const std::string& flavor) {
  FuzzConfig c;
  c.count = count;
  c.seed = seed;
  c.mode = parse_mode(mode);
  c.depth = depth;
  c.models = models;
  c.max_points = max_points;
  c.max_stalk = max_stalk;
  if (!theory.empty()) c.theory = files.theory(theory);
  if (!flavor.empty()) c.flavor = parse_flavor(flavor);
  FuzzReport f = fuzz_soundness(c);
  std::set<int> bad;
  for (const auto& x : f.failures) bad.insert(x.derivation);
  int satisfied = f.derivations - static_cast<int>(bad.size());
  Report r = report("fuzz-soundness", f.ok() ? "sound" : "unsound", f.ok() ? 0 : 1);
  r.body["mode"] = mode_name(c.mode);
  r.body["flavor"] = flavor_name(c.flavor.value_or(default_flavor(c.mode)));
  r.body["seed"] = seed;
  r.body["satisfied"] = std::to_string(satisfied) + "/" + std::to_string(f.derivations);
  r.body["derivations"] = f.derivations;
  r.body["valid_proofs"] = f.valid_proofs;
  r.body["checks"] = f.checks;
  r.body["holds"] = f.holds;
  r.body["redraws"] = f.redraws;
  r.body["max_height"] = f.max_height;
  r.body["rules"] = f.rules;
  json fails = json::array();
  for (std::size_t i = 0; i < f.failures.size() && i < 10; ++i) {
    const auto& x = f.failures[i];
    fails.push_back({{"derivation", x.derivation}, {"sequent", x.sequent}, {"reason", x.reason}, {"model", x.model}});
  }
  r.body["failures"] = fails;
  return r;
}

Report cmd_space_check(const Files& files, const std::string& file) {
  FinSpace x = parse_space(files.read(file), file);
  Report r = report("space check", "valid", 0);
  r.body["points"] = x.names();
  r.body["opens"] = x.opens().size();
  r.body["t0"] = x.is_t0();
  r.body["discrete"] = x.is_discrete();
  r.body["components"] = x.num_components();
  json mins = json::object();
  for (int p = 0; p < x.size(); ++p) mins[x.name(p)] = point_set(x, x.min_open(p));
  r.body["min_opens"] = mins;
  return r;
}

Sheaf load_sheaf(const Files& files, const std::string& file) {
  return parse_sheaf(files.read(file), resolver_for(files.at(file)), file);
}

json section_json(const Sheaf& f, const std::vector<int>& s) {
  json out = json::object();
  for (int p = 0; p < f.base().size(); ++p) out[f.base().name(p)] = f.label(p, s[p]);
  return out;
}

Report cmd_sheaf(const Files& files, const std::string& what, const std::string& file) {
  Sheaf f = load_sheaf(files, file);
  const FinSpace& x = f.base();
  if (what == "check") {
    Report r = report("sheaf check", "valid", 0);
    json stalks = json::object();
    for (int p = 0; p < x.size(); ++p) stalks[x.name(p)] = f.labels(p);
    r.body["stalks"] = stalks;
    r.body["global_sections"] = f.global_sections().size();
    r.body["transitions_injective"] = f.transitions_injective();
    return r;
  }
  if (what == "sections") {
    Report r = report("sheaf sections", "ok", 0);
    json all = json::array();
    for (const auto& s : f.global_sections()) all.push_back(section_json(f, s));
    r.body["count"] = all.size();
    r.body["sections"] = all;
    return r;
  }
  if (what == "decidable") {
    bool dec = is_decidable(f);
    Report r = report("sheaf decidable", dec ? "decidable" : "not-decidable", dec ? 0 : 1);
    r.body["transitions_injective"] = f.transitions_injective();
    r.body["diagonal_complemented"] = complement(diagonal(f)).has_value();
    return r;
  }
  EtaleSpace e = to_etale(f);
  auto err = local_homeomorphism_error(e);
  bool back = isomorphic(from_etale(e), f);
  Report r = report("sheaf etale", !err && back ? "valid" : "invalid", !err && back ? 0 : 1);
  json proj = json::object();
  for (int i = 0; i < e.total.size(); ++i) proj[e.total.name(i)] = x.name(e.proj[i]);
  r.body["total"] = print_space(e.total);
  r.body["projection"] = proj;
  r.body["local_homeomorphism"] = !err;
  if (err) r.body["reason"] = *err;
  r.body["round_trip"] = back;
  return r;
}

HenkinFile load_henkin(const Files& files, const std::string& file) {
  return parse_henkin(files.read(file), files.theory_loader(file), file);
}

Report cmd_henkin_closure(const Files& files, const std::string& file, const std::vector<std::string>& extra,
                          const std::string& ctx_text) {
  HenkinFile h = load_henkin(files, file);
  const Signature& sig = h.theory.signature;
  std::vector<WitnessTerm> ws = theory_witnesses(h.theory);
  Context ctx = parse_context(ctx_text, sig);
  for (const auto& t : extra) ws.push_back({ctx, parse_term(t, sig, ctx)});
  bool all = true;
  json pts = json::array();
  for (const auto& pt : h.points) {
    ClosureVerdict v = check_closure(pt.model, ws);
    all = all && v.valid;
    json j = {{"point", pt.name}, {"valid", v.valid}};
    if (!v.valid) {
      j["witness"] = v.witness;
      j["term"] = v.term;
      j["message"] = v.message;
    }
    pts.push_back(j);
  }
  Report r = report("henkin check-closure", all ? "valid" : "invalid", all ? 0 : 1);
  r.body["witnesses"] = ws.size();
  r.body["points"] = pts;
  return r;
}

std::vector<int> parse_labels(const std::string& text) {
  std::string t = text;
  std::replace(t.begin(), t.end(), ',', ' ');
  std::istringstream in(t);
  std::vector<int> out;
  for (std::string w; in >> w;) {
    try {
      std::size_t used = 0;
      int n = std::stoi(w, &used);
      if (used != w.size() || n < 0) throw std::invalid_argument(w);
      out.push_back(n);
    } catch (const std::exception&) {
      fail(ErrorKind::Parse, "bad label '" + w + "'");
    }
  }
  return out;
}

Report cmd_henkin_open(const Files& files, const std::string& file, const std::string& phi_text,
                       const std::string& ns_text, const std::string& vars) {
  HenkinFile h = load_henkin(files, file);
  const Signature& sig = h.theory.signature;
  Context zs = parse_context(vars, sig);
  Term phi = parse_formula(phi_text, sig, zs);
  std::vector<int> ns = parse_labels(ns_text);
  Report r = report("henkin open", "ok", 0);
  r.body["formula"] = phi.str();
  r.body["vars"] = zs.str();
  r.body["labels"] = ns;
  json in = json::array(), out = json::array();
  for (const auto& pt : h.points) (in_basic_open(pt, zs, phi, ns) ? in : out).push_back(pt.name);
  r.body["inside"] = in;
  r.body["outside"] = out;
  return r;
}

Report cmd_henkin_fiber(const Files& files, const std::string& file, const std::string& type_text) {
  HenkinFile h = load_henkin(files, file);
  Type z = parse_type(type_text);
  h.theory.signature.check_type(z);
  PhiFiber fb = phi_fiber(h.points, z);
  bool inj = sections_injective(fb);
  auto err = local_homeomorphism_error(fb.space);
  json recovered = json::object();
  bool all_back = true;
  for (std::size_t i = 0; i < h.points.size(); ++i) {
    bool same = stalk_is_model(h.points, static_cast<int>(i)) == h.points[i].model;
    all_back = all_back && same;
    recovered[h.points[i].name] = same;
  }
  bool ok = inj && !err && all_back;
  Report r = report("henkin fiber", ok ? "valid" : "invalid", ok ? 0 : 1);
  r.body["type"] = z.str();
  json elems = json::array();
  for (const auto& e : fb.elements) {
    const auto& pt = h.points[e.point];
    elems.push_back(pt.name + ":" + pt.model.element_name(z, e.index));
  }
  r.body["elements"] = elems;
  json vs = json::object();
  for (std::size_t k = 0; k < fb.labels.size(); ++k) {
    json members_json = json::array();
    for (int i : members(fb.v[k])) members_json.push_back(elems[i]);
    vs[std::to_string(fb.labels[k])] = members_json;
  }
  r.body["v"] = vs;
  r.body["sections_injective"] = inj;
  r.body["etale"] = !err;
  if (err) r.body["reason"] = *err;
  r.body["stalks_recover_models"] = recovered;
  return r;
}

Report cmd_corpus(const std::string& dir_arg, const Files& files, bool update) {
  fs::path dir = files.at(dir_arg);
  if (!fs::is_directory(dir)) fail(ErrorKind::Io, "not a directory: " + dir_arg);
  std::vector<fs::path> cases;
  for (const auto& e : fs::directory_iterator(dir))
    if (e.path().extension() == ".args") cases.push_back(e.path());
  std::sort(cases.begin(), cases.end());
  json entries = json::array();
  int passed = 0;
  for (const auto& c : cases) {
    std::string line;
    {
      std::istringstream in(read_file(c.string()));
      for (std::string l; std::getline(in, l);) {
        l = trim(l);
        if (!l.empty() && l[0] != '#') {
          line = l;
          break;
        }
      }
    }
    std::vector<std::string> args = split_command(line);
    if (std::find(args.begin(), args.end(), "--json") == args.end()) args.push_back("--json");
    std::ostringstream out, err;
    int code = run(args, out, err, dir.string());
    std::string got = out.str() + "exit " + std::to_string(code) + "\n";
    fs::path golden = c;
    golden.replace_extension(".json");
    std::string status;
    if (update) {
      std::ofstream(golden, std::ios::binary) << got;
      status = "updated";
    } else if (!fs::exists(golden)) {
      status = "missing";
    } else {
      status = read_file(golden.string()) == got ? "pass" : "stale";
    }
    if (status == "pass" || status == "updated") ++passed;
    entries.push_back({{"case", c.filename().string()}, {"status", status}});
  }
  bool ok = passed == static_cast<int>(cases.size());
  Report r = report("corpus", ok ? "pass" : "fail", ok ? 0 : 1);
  r.body["cases"] = cases.size();
  r.body["passed"] = passed;
  r.body["entries"] = entries;
  return r;
}

//------------------------------------------------------------------------------
// Human-readable output

std::string scalar(const json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (!v.is_array()) return v.dump();
  std::string out = "{";
  for (const auto& e : v) out += (out.size() > 1 ? " " : "") + scalar(e);
  return out + "}";
}

void render(const json& j, std::ostream& out, int indent) {
  std::string pad(indent, ' ');
  for (auto it = j.begin(); it != j.end(); ++it) {
    const std::string& key = it.key();
    const json& v = it.value();
    if (indent == 0 && (key == "schema" || key == "command")) continue;
    if (v.is_string()) {
      std::string s = v.get<std::string>();
      if (s.find('\n') == std::string::npos) {
        out << pad << key << ": " << s << "\n";
      } else {
        out << pad << key << ":\n";
        std::istringstream in(s);
        for (std::string l; std::getline(in, l);) out << pad << "  " << l << "\n";
      }
    } else if (v.is_object()) {
      out << pad << key << ":\n";
      render(v, out, indent + 2);
    } else if (v.is_array() && std::any_of(v.begin(), v.end(), [](const json& e) { return e.is_object(); })) {
      out << pad << key << ":\n";
      for (const auto& e : v) {
        if (e.is_object()) {
          std::ostringstream sub;
          render(e, sub, indent + 4);
          std::string s = sub.str();
          s.replace(indent + 2, 2, "- ");
          out << s;
        } else {
          out << pad << "  - " << e.dump() << "\n";
        }
      }
    } else if (v.is_array()) {
      out << pad << key << ":";
      for (const auto& e : v) out << " " << scalar(e);
      out << "\n";
    } else {
      out << pad << key << ": " << v.dump() << "\n";
    }
  }
}

}  // namespace

std::vector<std::string> split_command(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  bool in_word = false;
  char quote = 0;
  for (char c : line) {
    if (quote) {
      if (c == quote) quote = 0;
      else cur += c;
    } else if (c == '\'' || c == '"') {
      quote = c;
      in_word = true;
    } else if (c == ' ' || c == '\t') {
      if (in_word) out.push_back(cur);
      cur.clear();
      in_word = false;
    } else {
      cur += c;
      in_word = true;
    }
  }
  if (quote) fail(ErrorKind::Parse, "unterminated quote");
  if (in_word) out.push_back(cur);
  return out;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err, const std::string& base_dir) {
  CLI::App app{"Higher-order logic over sheaves on finite spaces."};
  app.name("tlw");
  app.require_subcommand(1);
  bool as_json = false;
  app.add_flag("--json", as_json, "Print a JSON report");
  app.fallthrough();

  std::string file, theory, model, morphism, sentence, flavor = "omega", mode = "hol-classical", fuzz_flavor;
  std::string vars, phi, ns, type_text, witness_ctx;
  std::vector<std::string> witnesses;
  int max_points = 2, max_stalk = 2, depth = 4, count = 100, fuzz_depth = 5, models = 20, fuzz_points = 3,
      fuzz_stalk = 3;
  std::uint64_t seed = 0;
  bool update = false;

  auto* parse = app.add_subcommand("parse", "Parse a file and print it back in canonical form");
  parse->add_option("file", file, "Input (.thy .prf .space .sheaf .model .morph .henkin)")->required();
  parse->add_option("--theory", theory, "Theory for model files");
  parse->add_option("--model", model, "Model for morphism files");

  auto* check_proof_cmd = app.add_subcommand("check-proof", "Check a proof file");
  check_proof_cmd->add_option("proof", file)->required();

  auto* eval_cmd = app.add_subcommand("eval", "Evaluate a sentence in a model");
  eval_cmd->add_option("theory", theory)->required();
  eval_cmd->add_option("model", model)->required();
  eval_cmd->add_option("sentence", sentence)->required();

  auto* check_model_cmd = app.add_subcommand("check-model", "Check that a model satisfies the axioms");
  check_model_cmd->add_option("theory", theory)->required();
  check_model_cmd->add_option("model", model)->required();

  auto* counter = app.add_subcommand("countermodel", "Search for a finite countermodel");
  counter->add_option("theory", theory)->required();
  counter->add_option("sentence", sentence)->required();
  counter->add_option("--flavor", flavor, "classical-c or omega")->capture_default_str();
  counter->add_option("--max-points", max_points)->check(CLI::PositiveNumber)->capture_default_str();
  counter->add_option("--max-stalk", max_stalk)->check(CLI::PositiveNumber)->capture_default_str();

  auto* define = app.add_subcommand("define", "Find a formula defining a morphism");
  define->add_option("model", model)->required();
  define->add_option("morphism", morphism)->required();
  define->add_option("--theory", theory, "Theory, unless the model names one");
  define->add_option("--depth", depth)->check(CLI::PositiveNumber)->capture_default_str();

  auto* fuzz = app.add_subcommand("fuzz-soundness", "Check random derivations in random models");
  fuzz->add_option("--count", count)->check(CLI::NonNegativeNumber)->capture_default_str();
  fuzz->add_option("--seed", seed)->capture_default_str();
  fuzz->add_option("--mode", mode, "hol-classical, hol-intuitionistic or lambda")->capture_default_str();
  fuzz->add_option("--depth", fuzz_depth)->check(CLI::PositiveNumber)->capture_default_str();
  fuzz->add_option("--models", models, "Interpretations per derivation")->check(CLI::PositiveNumber)->capture_default_str();
  fuzz->add_option("--max-points", fuzz_points)->check(CLI::PositiveNumber)->capture_default_str();
  fuzz->add_option("--max-stalk", fuzz_stalk)->check(CLI::PositiveNumber)->capture_default_str();
  fuzz->add_option("--theory", theory);
  fuzz->add_option("--flavor", fuzz_flavor);

  auto* space = app.add_subcommand("space", "Finite spaces");
  space->require_subcommand(1);
  auto* space_check = space->add_subcommand("check", "Validate a space file");
  space_check->add_option("file", file)->required();

  auto* sheaf = app.add_subcommand("sheaf", "Sheaves on finite spaces");
  sheaf->require_subcommand(1);
  std::vector<std::pair<std::string, CLI::App*>> sheaf_cmds;
  for (const char* w : {"check", "sections", "decidable", "etale"}) {
    auto* s = sheaf->add_subcommand(w);
    s->add_option("file", file)->required();
    sheaf_cmds.emplace_back(w, s);
  }

  auto* henkin = app.add_subcommand("henkin", "General models and labeled points");
  henkin->require_subcommand(1);
  auto* closure = henkin->add_subcommand("check-closure", "Check closure under witness terms");
  closure->add_option("file", file)->required();
  closure->add_option("--witness", witnesses, "Extra witness term");
  closure->add_option("--witness-ctx", witness_ctx, "Context of the extra witness terms");
  auto* open = henkin->add_subcommand("open", "Which points lie in a basic open");
  open->add_option("file", file)->required();
  open->add_option("phi", phi)->required();
  open->add_option("ns", ns, "Labels, comma separated")->required();
  open->add_option("--vars", vars, "Free variables of phi, e.g. \"z1:X, z2:X\"");
  auto* fiber = henkin->add_subcommand("fiber", "Build the fibred set over the points");
  fiber->add_option("file", file)->required();
  fiber->add_option("type", type_text)->required();

  auto* corpus = app.add_subcommand("corpus", "Compare JSON reports against goldens");
  corpus->add_option("dir", file)->required();
  corpus->add_flag("--update", update, "Rewrite the goldens");

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  Files files(base_dir);
  std::string command;
  Report rep;
  try {
    if (parse->parsed()) {
      command = "parse";
      rep = cmd_parse(files, file, theory, model);
    } else if (check_proof_cmd->parsed()) {
      command = "check-proof";
      rep = cmd_check_proof(files, file);
    } else if (eval_cmd->parsed()) {
      command = "eval";
      rep = cmd_eval(files, theory, model, sentence);
    } else if (check_model_cmd->parsed()) {
      command = "check-model";
      rep = cmd_check_model(files, theory, model);
    } else if (counter->parsed()) {
      command = "countermodel";
      rep = cmd_countermodel(files, theory, sentence, flavor, max_points, max_stalk);
    } else if (define->parsed()) {
      command = "define";
      rep = cmd_define(files, model, morphism, theory, depth);
    } else if (fuzz->parsed()) {
      command = "fuzz-soundness";
      rep = cmd_fuzz(files, count, seed, mode, fuzz_depth, models, fuzz_points, fuzz_stalk, theory, fuzz_flavor);
    } else if (space_check->parsed()) {
      command = "space check";
      rep = cmd_space_check(files, file);
    } else if (sheaf->parsed()) {
      for (const auto& [w, s] : sheaf_cmds)
        if (s->parsed()) {
          command = "sheaf " + w;
          rep = cmd_sheaf(files, w, file);
        }
    } else if (closure->parsed()) {
      command = "henkin check-closure";
      rep = cmd_henkin_closure(files, file, witnesses, witness_ctx);
    } else if (open->parsed()) {
      command = "henkin open";
      rep = cmd_henkin_open(files, file, phi, ns, vars);
    } else if (fiber->parsed()) {
      command = "henkin fiber";
      rep = cmd_henkin_fiber(files, file, type_text);
    } else if (corpus->parsed()) {
      command = "corpus";
      rep = cmd_corpus(file, files, update);
    }
  } catch (const Error& e) {
    bool invalid = is_validation(e.kind());
    rep = report(command, invalid ? "invalid" : "error", invalid ? 1 : 2);
    rep.body["error"] = {{"kind", error_kind_name(e.kind())}, {"message", e.what()}};
    if (!as_json) {
      err << (invalid ? "invalid: " : "error: ") << e.what() << "\n";
      return rep.exit;
    }
  }

  if (as_json) out << rep.body.dump(2) << "\n";
  else render(rep.body, out, 0);
  return rep.exit;
}

}  // namespace tlw::cli
