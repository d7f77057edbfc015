#pragma once

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "catsq/exactness.hpp"
#include "catsq/generate.hpp"

namespace catsq::cli {

namespace exit_code {
inline constexpr int holds = 0;
inline constexpr int fails = 1;
inline constexpr int invalid = 2;
inline constexpr int size_guard = 3;
}  // namespace exit_code

struct Options {
  std::string command;
  std::string property;
  std::vector<std::string> files;
  std::string localizer = "w0";
  bool json = false;
  bool all_witnesses = false;
  std::uint64_t seed = 0;
  std::optional<std::size_t> max_objects;
  std::optional<std::size_t> max_arrows;
  unsigned threads = 1;
  std::string square, functor, presheaf, category, over, via;
  bool colocal = false;
  std::string dir = "right";
  std::string kind;
  std::string tie_break = "least";
  std::size_t gen_objects = 3;
  std::size_t gen_arrows = 6;
};

/// What a command produced, before rendering.
struct Outcome {
  std::string command;
  std::string target;
  std::optional<std::string> localizer;
  CheckReport report;
  nlohmann::ordered_json result;  // command-specific payload, may be null
  std::vector<std::string> lines;  // human-readable payload lines
};

namespace detail {

using Clock = std::chrono::steady_clock;

inline double ms_since(Clock::time_point t) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t).count();
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::UnresolvedName, "cannot read '" + path + "'");
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

inline Limits limits_from(const Options& o) {
  Limits l;
  if (o.max_objects) l.max_objects = *o.max_objects;
  if (o.max_arrows) {
    l.max_arrows = *o.max_arrows;
  } else if (const char* env = std::getenv("CATSQ_MAX_ARROWS"); env && *env) {
    char* end = nullptr;
    unsigned long long v = std::strtoull(env, &end, 10);
    if (*end != '\0') throw Error(ErrorKind::SyntaxError, std::string("CATSQ_MAX_ARROWS is not a number: ") + env);
    l.max_arrows = static_cast<std::size_t>(v);
  }
  return l;
}

/// The named entry, or the only entry of that kind when no name was given.
inline std::string pick(const Workspace& ws, Workspace::Kind k, const std::string& given, const char* what) {
  if (!given.empty()) return given;
  auto names = ws.names(k);
  if (names.size() == 1) return names.front();
  throw Error(ErrorKind::UnresolvedName, std::string("specify --") + what + " (" + std::to_string(names.size()) +
                                              " candidates in the workspace)");
}

inline std::string square_target(const std::string& prop) {
  if (prop == "exact" || prop == "weak-exact" || prop == "bc-left" || prop == "bc-right") return "square";
  if (prop == "aspheric" || prop == "coaspheric" || prop == "proper" || prop == "smooth" || prop == "local-equiv")
    return "functor";
  return "";
}

inline Outcome run_check(const Options& o, const Workspace& ws, const CheckOptions& copt) {
  Outcome out;
  out.command = "check " + o.property;
  const Localizer l = o.localizer == "wgr" ? Localizer::Wgr : Localizer::W0;
  out.localizer = o.localizer;
  const std::string& p = o.property;
  if (square_target(p) == "square") {
    out.target = pick(ws, Workspace::Kind::Square, o.square, "square");
    const TwoSquare& d = ws.square(out.target);
    if (p == "exact") out.report = is_exact(d, l, copt);
    else if (p == "weak-exact") out.report = is_weak_exact(d, l, copt);
    else {
      out.localizer.reset();
      out.report = p == "bc-left" ? is_bc_left(d, copt) : is_bc_right(d, copt);
    }
    return out;
  }
  out.target = pick(ws, Workspace::Kind::Functor, o.functor, "functor");
  const Functor& u = ws.functor(out.target);
  if (p == "aspheric") out.report = is_aspheric_functor(u, l, copt);
  else if (p == "coaspheric") out.report = is_coaspheric_functor(u, l, copt);
  else if (p == "proper") out.report = is_proper(u, l, copt);
  else if (p == "smooth") out.report = is_smooth(u, l, copt);
  else {
    if (o.over.empty()) throw Error(ErrorKind::UnresolvedName, "local-equiv needs --over <functor>");
    const Functor& w = ws.functor(o.over);
    Functor v = o.via.empty() ? compose(w, u) : ws.functor(o.via);
    out.target += " over " + o.over;
    out.report = o.colocal ? is_colocal_equivalence(u, v, w, l, copt) : is_local_equivalence(u, v, w, l, copt);
  }
  return out;
}

inline Outcome run_kan(const Options& o, const Workspace& ws, const Limits& limits) {
  Outcome out;
  out.command = "kan " + o.dir;
  std::string fname = pick(ws, Workspace::Kind::Functor, o.functor, "functor");
  std::string pname = pick(ws, Workspace::Kind::Presheaf, o.presheaf, "presheaf");
  out.target = fname + " " + pname;
  const Functor& u = ws.functor(fname);
  const Presheaf& f = ws.presheaf(pname);
  Presheaf r = o.dir == "left" ? lan(u, f, limits).result : ran(u, f, limits).result;
  const FinCat& b = r.base();
  nlohmann::ordered_json sizes = nlohmann::ordered_json::object();
  nlohmann::ordered_json elements = nlohmann::ordered_json::object();
  for (ObId y = 0; y < b.object_count(); ++y) {
    sizes[b.object_name(y)] = r.size(y);
    elements[b.object_name(y)] = r.at(y);
    out.lines.push_back(b.object_name(y) + ": " + std::to_string(r.size(y)) + " {" +
                        dsl::join(r.at(y), [](const std::string& s) { return s; }, ",") + "}");
  }
  out.result = {{"sizes", sizes}, {"elements", elements}};
  return out;
}

inline Outcome run_base_change(const Options& o, const Workspace& ws, const Limits& limits) {
  Outcome out;
  std::string sname = pick(ws, Workspace::Kind::Square, o.square, "square");
  std::string pname = pick(ws, Workspace::Kind::Presheaf, o.presheaf, "presheaf");
  const TwoSquare& d = ws.square(sname);
  const Presheaf& p = ws.presheaf(pname);
  std::string kind = o.kind;
  if (kind.empty()) kind = same_category(p.base(), d.a()) ? "coh" : "hom";
  out.command = "base-change " + kind;
  out.target = sname + " " + pname;
  BaseChange bc = kind == "coh" ? base_change_coh(d, p, limits) : base_change_hom(d, p, limits);
  const PresheafMorphism& m = bc.morphism;
  const FinCat& base = m.src().base();
  nlohmann::ordered_json sizes = nlohmann::ordered_json::object();
  for (ObId x = 0; x < base.object_count(); ++x) {
    sizes[base.object_name(x)] = {m.src().size(x), m.dst().size(x)};
    out.lines.push_back(base.object_name(x) + ": " + std::to_string(m.src().size(x)) + " -> " +
                        std::to_string(m.dst().size(x)));
    if (!is_bijection(m.at(x), m.dst().size(x))) {
      out.report.verdict = false;
      out.report.witnesses.push_back({base.object_name(x), "component not bijective: sizes " +
                                                               std::to_string(m.src().size(x)) + " -> " +
                                                               std::to_string(m.dst().size(x)),
                                      {x}});
    }
  }
  out.result = {{"sizes", sizes}};
  return out;
}

inline int verdict_exit(const CheckReport& r) { return r.holds() ? exit_code::holds : exit_code::fails; }

inline void render(const Outcome& oc, bool json, double parse_ms, double run_ms, std::ostream& out) {
  const CheckReport& r = oc.report;
  if (json) {
    nlohmann::ordered_json j;
    j["command"] = oc.command;
    if (!r.applicable) j["verdict"] = "not-applicable";
    else j["verdict"] = r.verdict;
    j["localizer"] = oc.localizer ? nlohmann::ordered_json(*oc.localizer) : nlohmann::ordered_json(nullptr);
    j["witnesses"] = nlohmann::ordered_json::array();
    for (const auto& w : r.witnesses) j["witnesses"].push_back({{"location", w.location}, {"reason", w.reason}});
    j["timings_ms"] = {{"parse", parse_ms}, {"run", run_ms}};
    if (!oc.target.empty()) j["target"] = oc.target;
    if (!oc.result.is_null()) j["result"] = oc.result;
    out << j.dump(2) << "\n";
    return;
  }
  std::string head = oc.command;
  if (oc.localizer) head += " [" + *oc.localizer + "]";
  if (!oc.target.empty()) head += " " + oc.target;
  out << head << ": " << (!r.applicable ? "not-applicable" : r.verdict ? "holds" : "fails") << "\n";
  for (const auto& l : oc.lines) out << l << "\n";
  for (const auto& w : r.witnesses) out << w.location << ": " << w.reason << "\n";
}

}  // namespace detail

/// Runs one invocation; `args` excludes the program name.
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err,
               std::istream& in = std::cin) {
  Options o;
  CLI::App app{"finite 2-square exactness toolkit", "catsq"};
  app.require_subcommand(1);

  auto common = [&](CLI::App* sub) {
    sub->add_option("--localizer", o.localizer, "w0 or wgr")->check(CLI::IsMember({"w0", "wgr"}));
    sub->add_flag("--json", o.json, "emit a JSON report");
    sub->add_flag("--all-witnesses", o.all_witnesses, "collect every failing location");
    sub->add_option("--seed", o.seed, "random seed");
    sub->add_option("--max-objects", o.max_objects, "size guard on objects");
    sub->add_option("--max-arrows", o.max_arrows, "size guard on arrows (also CATSQ_MAX_ARROWS)");
    sub->add_option("--threads", o.threads, "worker threads")->check(CLI::Range(1u, 256u));
  };
  auto inputs = [&](CLI::App* sub) { sub->add_option("files", o.files, ".catsq inputs (stdin when absent)"); };

  CLI::App* check = app.add_subcommand("check", "decide a property of a square or functor");
  check->add_option("property", o.property)
      ->required()
      ->check(CLI::IsMember({"exact", "weak-exact", "bc-left", "bc-right", "aspheric", "coaspheric", "proper", "smooth",
                             "local-equiv"}));
  check->add_option("--square", o.square);
  check->add_option("--functor", o.functor);
  check->add_option("--over", o.over, "local-equiv: the functor w : B -> C");
  check->add_option("--via", o.via, "local-equiv: the functor v : A -> C (default w.u)");
  check->add_flag("--colocal", o.colocal, "local-equiv: use coslices");
  check->add_option("--tie-break", o.tie_break, "adjoint choice in bc checks")
      ->check(CLI::IsMember({"least", "greatest"}));
  common(check);
  inputs(check);

  CLI::App* kan = app.add_subcommand("kan", "pointwise Kan extension of a presheaf");
  kan->add_option("--dir", o.dir)->check(CLI::IsMember({"right", "left"}));
  kan->add_option("--functor", o.functor);
  kan->add_option("--presheaf", o.presheaf);
  common(kan);
  inputs(kan);

  CLI::App* bc = app.add_subcommand("base-change", "base change morphism of a square at a presheaf");
  bc->add_option("--square", o.square);
  bc->add_option("--presheaf", o.presheaf);
  bc->add_option("--kind", o.kind, "coh (presheaf on A) or hom (presheaf on B')")
      ->check(CLI::IsMember({"coh", "hom"}));
  common(bc);
  inputs(bc);

  CLI::App* oracle = app.add_subcommand("oracle", "Guitart exactness through representables");
  oracle->add_option("--square", o.square);
  common(oracle);
  inputs(oracle);

  CLI::App* classify = app.add_subcommand("classify", "localizer of presheaves with values in a category");
  classify->add_option("--category", o.category);
  common(classify);
  inputs(classify);

  CLI::App* gen = app.add_subcommand("gen", "print a random workspace");
  gen->add_option("--objects", o.gen_objects, "objects per category");
  gen->add_option("--arrows", o.gen_arrows, "arrows per category, identities included");
  common(gen);

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? 0 : exit_code::invalid;
  }
  o.command = app.get_subcommands().front()->get_name();

  std::string current;  // file being parsed, for error messages
  try {
    const Limits limits = detail::limits_from(o);
    CheckOptions copt;
    copt.all_witnesses = o.all_witnesses;
    copt.threads = o.threads;
    copt.limits = limits;
    copt.tie_break = o.tie_break == "greatest" ? TieBreak::Greatest : TieBreak::Least;

    auto t0 = detail::Clock::now();
    if (o.command == "gen") {
      Workspace ws = generate_random(o.seed, Budget{o.gen_objects, o.gen_arrows});
      std::string text = serialize(ws);
      if (o.json) {
        Outcome oc;
        oc.command = "gen";
        oc.result = {{"seed", o.seed}, {"workspace", text}};
        detail::render(oc, true, 0.0, detail::ms_since(t0), out);
      } else {
        out << text;
      }
      return exit_code::holds;
    }

    Workspace ws;
    if (o.files.empty()) {
      std::stringstream s;
      s << in.rdbuf();
      parse_into(ws, s.str(), limits);
    }
    for (const auto& f : o.files) {
      current = f;
      parse_into(ws, detail::read_file(f), limits);
    }
    current.clear();
    const double parse_ms = detail::ms_since(t0);
    auto t1 = detail::Clock::now();

    Outcome oc;
    int code = exit_code::holds;
    if (o.command == "check") {
      oc = detail::run_check(o, ws, copt);
      code = detail::verdict_exit(oc.report);
    } else if (o.command == "kan") {
      oc = detail::run_kan(o, ws, limits);
    } else if (o.command == "base-change") {
      oc = detail::run_base_change(o, ws, limits);
      code = detail::verdict_exit(oc.report);
    } else if (o.command == "oracle") {
      oc.command = "oracle";
      oc.localizer = "w0";
      oc.target = detail::pick(ws, Workspace::Kind::Square, o.square, "square");
      oc.report = guitart_oracle(ws.square(oc.target), copt);
      code = detail::verdict_exit(oc.report);
    } else if (o.command == "classify") {
      oc.command = "classify";
      oc.target = detail::pick(ws, Workspace::Kind::Category, o.category, "category");
      std::string cls(to_string(classify_presheaf_localizer(ws.category(oc.target))));
      oc.result = cls;
      oc.lines.push_back(cls);
    }
    detail::render(oc, o.json, parse_ms, detail::ms_since(t1), out);
    return code;
  } catch (const Error& e) {
    err << "catsq: " << (current.empty() ? "" : current + ": ") << e.what() << "\n";
    bool guard = e.kind() == ErrorKind::SizeGuardExceeded;
    if (auto* pe = dynamic_cast<const ParseError*>(&e); pe && pe->inner() == ErrorKind::SizeGuardExceeded) guard = true;
    return guard ? exit_code::size_guard : exit_code::invalid;
  } catch (const std::exception& e) {
    err << "catsq: " << e.what() << "\n";
    return exit_code::invalid;
  }
}

}  // namespace catsq::cli
