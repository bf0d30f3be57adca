#pragma once

#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "hogsos/bisim.hpp"
#include "hogsos/builtin.hpp"
#include "hogsos/json_io.hpp"
#include "hogsos/lambda_bisim.hpp"

namespace hogsos::cli {

enum Exit : int { ok = 0, spec_invalid = 1, input_error = 2, distinguished = 3 };

inline constexpr const char* asset_dir_variable = "HOGSOS_ASSET_DIR";

// A loaded specification: an HO spec, or one of the native λ calculi.
struct LoadedSpec {
  std::string name;
  std::optional<HOSpec> spec;
  std::optional<Strategy> lambda;
};

class InputError : public Error {
 public:
  using Error::Error;
};

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot read '" + path.string() + "'");
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// Builtin name, then the path as given, then the asset directory.
inline std::optional<std::filesystem::path> locate_spec(const std::string& name) {
  namespace fs = std::filesystem;
  if (fs::is_regular_file(name)) return fs::path(name);
  if (const char* dir = std::getenv(asset_dir_variable)) {
    for (const fs::path& p : {fs::path(dir) / name, fs::path(dir) / (name + ".hos"), fs::path(dir) / fs::path(name).filename()})
      if (fs::is_regular_file(p)) return p;
  }
  return std::nullopt;
}

// Syntax and validation problems in the spec surface as SpecError.
inline LoadedSpec load(const std::string& name) {
  if (name == "lambda_cbn") return {name, std::nullopt, Strategy::cbn};
  if (name == "lambda_cbv") return {name, std::nullopt, Strategy::cbv};
  std::string src;
  if (auto builtin = builtin::spec_source(name)) {
    src = std::string(*builtin);
  } else {
    auto path = locate_spec(name);
    if (!path) throw InputError("no builtin spec or file named '" + name + "'");
    src = read_file(*path);
  }
  try {
    return {name, load_spec(src), std::nullopt};
  } catch (const ParseError& e) {
    throw SpecError({Diagnostic{"", "", e.what()}});
  }
}

struct Options {
  std::string format = "text";
  std::uint64_t seed = 0;
};

class Runner {
 public:
  Runner(std::ostream& out, std::ostream& err) : out_(out), err_(err) {}

  bool machine() const { return opts_.format == "machine"; }

  void emit(const Json& doc, const std::string& summary) {
    if (machine()) {
      out_ << doc.dump(2) << "\n";
      err_ << summary << "\n";
    } else {
      out_ << summary << "\n";
    }
  }

  // -------------------------------------------------------------------------
  int check_spec(const std::string& name) {
    if (name == "lambda_cbn" || name == "lambda_cbv") {
      const std::string strategy = name.substr(7);
      emit({{"valid", true}, {"native", "lambda"}, {"strategy", strategy}}, "native lambda calculus, " + strategy);
      return ok;
    }
    try {
      const HOSpec spec = *load(name).spec;
      const std::string mode(to_string(spec.mode()));
      emit({{"valid", true}, {"rules", spec.rules().size()}, {"mode", mode}, {"complete", true}},
           std::to_string(spec.rules().size()) + " rules, " + mode + ", complete");
      return ok;
    } catch (const SpecError& e) {
      Json diags = Json::array();
      std::string text = "invalid: " + std::to_string(e.diagnostics().size()) + " problem(s)";
      for (const auto& d : e.diagnostics()) {
        diags.push_back({{"op", d.op}, {"subset", d.subset}, {"reason", d.reason}});
        text += "\n  " + d.to_string();
      }
      emit({{"valid", false}, {"diagnostics", std::move(diags)}}, text);
      return spec_invalid;
    }
  }

  // -------------------------------------------------------------------------
  struct RunArgs {
    std::string spec, term;
    std::size_t steps = 100;
    std::vector<std::string> apply;
    bool jsonl = false;
  };

  int run(const RunArgs& a) {
    const LoadedSpec s = load(a.spec);
    if (s.lambda) {
      LambdaEngine engine(*s.lambda);
      std::vector<LambdaTerm> args;
      for (const auto& x : a.apply) args.push_back(parse_closed_lambda(x));
      const LambdaTerm start = parse_closed_lambda(a.term);
      auto tr = chained(start, args, a.steps, [&](const LambdaTerm& t, std::size_t n) { return trace(engine, t, n); },
                        [](const LambdaTerm& body, const LambdaTerm& e) { return beta(body, e); });
      return print_trace(tr, a.jsonl, [](const LambdaTerm& t) { return render_lambda(t); });
    }
    const HOSpec& spec = *s.spec;
    if (spec.mode() != Mode::det) throw InputError("run needs a deterministic spec");
    Engine engine(spec);
    std::vector<Term> args;
    for (const auto& x : a.apply) args.push_back(parse_term(x, spec.sig()));
    auto tr = chained(parse_term(a.term, spec.sig()), args, a.steps,
                      [&](const Term& t, std::size_t n) { return trace(engine, t, n); },
                      [](const Term& tmpl, const Term& e) { return replace_var(tmpl, hole_name, e); });
    return print_trace(tr, a.jsonl, [](const Term& t) { return render_pretty(t); });
  }

  // -------------------------------------------------------------------------
  struct BisimArgs {
    std::string spec, t1, t2;
    std::size_t depth = 10;
    std::size_t pool_size = 0;  // 0: 3 for HO specs, 4 for λ
    std::vector<std::string> extra;
    bool include_omega = false;
    std::size_t open_context = 4;
    std::size_t tuple_limit = 256;
    bool coalg = false;
    std::size_t rename_budget = 1;
    std::string replay;
  };

  int bisim(const BisimArgs& a) {
    const LoadedSpec s = load(a.spec);
    if (s.lambda) return bisim_lambda(a, *s.lambda);
    const HOSpec& spec = *s.spec;
    const Term p = parse_term(a.t1, spec.sig());
    const Term q = parse_term(a.t2, spec.sig());
    auto read = [&](const std::string& x) { return parse_term(x, spec.sig(), VarPolicy::open); };
    if (!a.replay.empty()) {
      const Json doc = read_verdict(a.replay);
      bool good;
      if (doc.contains("certificate"))
        good = replay_nd(spec, p, q, *nd_witness_from_json(doc.at("certificate"), read));
      else
        good = replay(spec, p, q, moves_from_json<Term>(doc.at("witness"), read));
      return replay_result(good);
    }
    CheckConfig cfg{a.depth, term_pool(spec, a)};
    const Verdict v = spec.mode() == Mode::det ? check(spec, p, q, cfg) : check_nd(spec, p, q, cfg);
    return print_verdict(v, [](const Term& t) { return render_pretty(t); });
  }

  // -------------------------------------------------------------------------
  struct CongruenceArgs {
    BisimArgs check;
    std::size_t contexts = 100;
    std::size_t ctx_size = 5;
  };

  int congruence(const CongruenceArgs& a) {
    const LoadedSpec s = load(a.check.spec);
    const ProbeConfig pc{a.contexts, a.ctx_size, opts_.seed};
    if (s.lambda) {
      auto [p, q] = parse_lambda_pair_aliased(a.check.t1, a.check.t2);
      const LambdaCheckConfig cfg{a.check.depth, lambda_pool(a.check)};
      auto r = lambda_congruence_probe(p, q, *s.lambda, pc, cfg, closing_pool(a.check),
                                       a.check.tuple_limit);
      return print_probe(r, [](const LambdaTerm& t) { return render_debruijn(t); });
    }
    const HOSpec& spec = *s.spec;
    const CheckConfig cfg{a.check.depth, term_pool(spec, a.check)};
    auto r = congruence_probe(spec, parse_term(a.check.t1, spec.sig()), parse_term(a.check.t2, spec.sig()), pc, cfg);
    return print_probe(r, [](const Term& t) { return render_pretty(t); });
  }

  // -------------------------------------------------------------------------
  int enumerate(const std::string& spec_name, std::size_t max_size, std::size_t ctx) {
    const LoadedSpec s = load(spec_name);
    std::vector<std::string> items;
    if (s.lambda) {
      for (const auto& t : enumerate_lambda(ctx, max_size)) items.push_back(render_debruijn(t));
    } else {
      for (const auto& t : enumerate_closed(s.spec->sig(), max_size)) items.push_back(render_pretty(t));
    }
    if (machine()) {
      out_ << Json{{"count", items.size()}, {"terms", items}}.dump(2) << "\n";
      err_ << items.size() << " terms\n";
    } else {
      for (const auto& i : items) out_ << i << "\n";
    }
    return ok;
  }

  Options& options() noexcept { return opts_; }

 private:
  template <class T, class TraceFn, class ApplyFn>
  static BasicTrace<T> chained(const T& start, const std::vector<T>& args, std::size_t steps, TraceFn&& run,
                               ApplyFn&& apply) {
    BasicTrace<T> all = run(start, steps);
    for (const auto& e : args) {
      if (all.end != TraceEnd::fun) break;
      const auto& last = all.events.back();
      auto more = run(apply(*last.successor, e), steps);
      all.events.insert(all.events.end(), more.events.begin(), more.events.end());
      all.end = more.end;
    }
    return all;
  }

  template <class T, class Show>
  int print_trace(const BasicTrace<T>& tr, bool jsonl, Show&& show) {
    if (jsonl) {
      out_ << trace_to_jsonl(tr, show);
      return ok;
    }
    std::string text;
    for (std::size_t i = 0; i < tr.events.size(); ++i) {
      const auto& e = tr.events[i];
      text += std::to_string(i) + "  " + std::string(to_string(e.kind)) + "  " + show(e.state);
      if (e.successor) text += "  ->  " + show(*e.successor);
      text += "\n";
    }
    text += "terminal: " + std::string(to_string(tr.end));
    emit(trace_to_json(tr, show), text);
    return ok;
  }

  template <class T, class Show>
  static std::string witness_text(const std::vector<BasicMove<T>>& w, Show&& show) {
    std::string s;
    for (const auto& m : w) {
      if (!s.empty()) s += ", ";
      s += to_string(m.kind);
      if (m.arg) s += "(" + show(*m.arg) + ")";
      if (m.kind == MoveKind::subst) {
        s += "(";
        for (std::size_t i = 0; i < m.tuple.size(); ++i) s += (i ? "; " : "") + show(m.tuple[i]);
        s += ")";
      }
      if (m.kind == MoveKind::rename) {
        s += "(";
        for (std::size_t i = 0; i < m.renaming.size(); ++i) s += (i ? " " : "") + std::to_string(m.renaming[i]);
        s += " -> " + std::to_string(m.target) + ")";
      }
    }
    return s.empty() ? "(none)" : s;
  }

  template <class T, class Show>
  int print_verdict(const BasicVerdict<T>& v, Show&& show) {
    std::string text;
    if (v.distinguished) {
      text = "distinguished (" + std::string(to_string(v.mismatch)) + " mismatch) at depth " + std::to_string(v.depth) +
             ", pool " + std::to_string(v.pool_size) + "\nwitness: " + witness_text(v.witness, show);
    } else {
      text = "no counterexample within depth " + std::to_string(v.depth) + ", pool " + std::to_string(v.pool_size);
      if (v.tuples_tried > 0) text += ", " + std::to_string(v.tuples_tried) + " closing tuples";
    }
    emit(verdict_to_json(v, show), text);
    return v.distinguished ? distinguished : ok;
  }

  template <class T, class Show>
  int print_probe(const BasicProbeReport<T>& r, Show&& show) {
    if (r.refused) {
      emit(probe_to_json(r, show), "refused: inputs are distinguished\nwitness: " + witness_text(r.refused->witness, show));
      return distinguished;
    }
    std::string text = std::to_string(r.anomalies.size()) + " anomalies in " + std::to_string(r.contexts_tried) +
                       " contexts (seed " + std::to_string(r.seed) + ")";
    for (const auto& a : r.anomalies) text += "\n  " + a.context + ": " + witness_text(a.verdict.witness, show);
    emit(probe_to_json(r, show), text);
    return r.anomalies.empty() ? ok : distinguished;
  }

  int replay_result(bool good) {
    emit({{"replay", good}}, good ? "witness replays" : "witness does not replay");
    return good ? ok : input_error;
  }

  Json read_verdict(const std::string& path) {
    Json doc;
    try {
      doc = Json::parse(read_file(path));
    } catch (const Json::parse_error& e) {
      throw InputError("replay file is not JSON: " + std::string(e.what()));
    }
    if (doc.value("verdict", "") != "distinguished") throw InputError("replay file holds no distinguishing witness");
    return doc;
  }

  static std::vector<Term> term_pool(const HOSpec& spec, const BisimArgs& a) {
    std::vector<Term> extra;
    for (const auto& x : a.extra) extra.push_back(parse_term(x, spec.sig()));
    return default_pool(spec.sig(), a.pool_size == 0 ? 3 : a.pool_size, extra);
  }

  static LambdaTerm parse_closed_lambda(const std::string& src) {
    if (auto t = lambda_alias(src)) return *t;
    std::vector<std::string> free;
    return parse_lambda(src, free, false);
  }

  static LambdaTerm parse_any_lambda(const std::string& src, std::vector<std::string>& free) {
    if (auto t = lambda_alias(src)) return *t;
    return parse_lambda(src, free);
  }

  static std::pair<LambdaTerm, LambdaTerm> parse_lambda_pair_aliased(const std::string& a, const std::string& b) {
    std::vector<std::string> free;
    auto p = parse_any_lambda(a, free);
    auto q = parse_any_lambda(b, free);
    return {weaken(p, free.size()), weaken(q, free.size())};
  }

  static std::vector<LambdaTerm> lambda_pool(const BisimArgs& a) {
    std::vector<LambdaTerm> extra;
    for (const auto& x : a.extra) extra.push_back(parse_closed_lambda(x));
    return default_lambda_pool(a.pool_size == 0 ? 4 : a.pool_size, a.include_omega, extra);
  }

  // closing terms for open pairs; Ω joins them when asked
  static std::vector<LambdaTerm> closing_pool(const BisimArgs& a) {
    auto pool = enumerate_lambda(0, a.open_context);
    if (a.include_omega) pool.push_back(omega());
    return pool;
  }

  int bisim_lambda(const BisimArgs& a, Strategy s) {
    auto [p, q] = parse_lambda_pair_aliased(a.t1, a.t2);
    if (!a.replay.empty()) {
      const Json doc = read_verdict(a.replay);
      auto read = [](const std::string& x) { return parse_lambda(x, LambdaSyntax::debruijn); };
      return replay_result(replay_lambda(s, p, q, moves_from_json<LambdaTerm>(doc.at("witness"), read)));
    }
    const LambdaCheckConfig cfg{a.depth, lambda_pool(a)};
    const auto closing = closing_pool(a);
    LambdaVerdict v;
    if (a.coalg)
      v = coalg_bisim(p, q, s, cfg, {closing, a.tuple_limit, a.rename_budget});
    else
      v = app_bisim_open(p, q, s, cfg, closing, a.tuple_limit);
    return print_verdict(v, [](const LambdaTerm& t) { return render_debruijn(t); });
  }

  std::ostream& out_;
  std::ostream& err_;
  Options opts_;
};

// Parses the command line and runs one command. Errors are reported on `err`
// and mapped to the exit-code contract.
inline int main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  Runner runner(out, err);
  CLI::App app{"Higher-order GSOS workbench: run, compare and probe operational semantics"};
  app.name("hogsos");
  app.require_subcommand(1);
  app.fallthrough();
  app.add_option("--format", runner.options().format, "Output format")
      ->check(CLI::IsMember({"text", "machine"}))
      ->capture_default_str();
  app.add_option("--seed", runner.options().seed, "Seed for sampled contexts")->capture_default_str();

  std::string spec_name;
  auto* check_cmd = app.add_subcommand("check-spec", "Validate a rule specification");
  check_cmd->add_option("spec", spec_name, "Builtin name or .hos file")->required();

  Runner::RunArgs run_args;
  auto* run_cmd = app.add_subcommand("run", "Trace a term");
  run_cmd->add_option("spec", run_args.spec, "Builtin name or .hos file")->required();
  run_cmd->add_option("term", run_args.term, "Closed term")->required();
  run_cmd->add_option("--steps", run_args.steps, "Maximum reductions per segment")->capture_default_str();
  run_cmd->add_option("--apply", run_args.apply, "Apply a final function to this argument and continue");
  run_cmd->add_flag("--jsonl", run_args.jsonl, "One JSON record per event");

  auto add_check_options = [](CLI::App* cmd, Runner::BisimArgs& b) {
    cmd->add_option("spec", b.spec, "Builtin name or .hos file")->required();
    cmd->add_option("t1", b.t1, "First term")->required();
    cmd->add_option("t2", b.t2, "Second term")->required();
    cmd->add_option("--depth", b.depth, "Maximum unrolling")->capture_default_str()->check(CLI::PositiveNumber);
    cmd->add_option("--pool-size", b.pool_size, "Size bound of the argument pool")->check(CLI::PositiveNumber);
    cmd->add_option("--extra", b.extra, "Additional pool term");
    cmd->add_flag("--include-omega", b.include_omega, "Add the diverging term to the lambda argument and closing pools");
    cmd->add_option("--open-context", b.open_context, "Size bound of closing terms for open lambda terms")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    cmd->add_option("--tuple-limit", b.tuple_limit, "Closing tuples tried per open pair")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
  };

  Runner::BisimArgs bisim_args;
  auto* bisim_cmd = app.add_subcommand("bisim", "Bounded bisimilarity check");
  add_check_options(bisim_cmd, bisim_args);
  bisim_cmd->add_flag("--coalg", bisim_args.coalg, "Coalgebraic check with substitution and renaming moves");
  bisim_cmd->add_option("--rename-budget", bisim_args.rename_budget, "Renaming moves per path")->capture_default_str();
  bisim_cmd->add_option("--replay", bisim_args.replay, "Replay a verdict document")->group("");

  Runner::CongruenceArgs cong_args;
  cong_args.check.depth = 5;
  auto* cong_cmd = app.add_subcommand("congruence", "Probe bisimilarity under sampled contexts");
  add_check_options(cong_cmd, cong_args.check);
  cong_cmd->add_option("--contexts", cong_args.contexts, "Contexts to sample")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  cong_cmd->add_option("--ctx-size", cong_args.ctx_size, "Maximum context size")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);

  std::size_t enum_size = 3, enum_ctx = 0;
  auto* enum_cmd = app.add_subcommand("enumerate", "List closed terms up to a size");
  enum_cmd->add_option("spec", spec_name, "Builtin name or .hos file")->required();
  enum_cmd->add_option("--max-size", enum_size, "Size bound")->capture_default_str();
  enum_cmd->add_option("--ctx", enum_ctx, "Context size (lambda only)")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? ok : input_error;
  }

  try {
    if (*check_cmd) return runner.check_spec(spec_name);
    if (*run_cmd) return runner.run(run_args);
    if (*bisim_cmd) return runner.bisim(bisim_args);
    if (*cong_cmd) return runner.congruence(cong_args);
    if (*enum_cmd) return runner.enumerate(spec_name, enum_size, enum_ctx);
  } catch (const SpecError& e) {
    err << "error: " << e.what() << "\n";
    return spec_invalid;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return input_error;
  } catch (const nlohmann::json::exception& e) {
    err << "error: " << e.what() << "\n";
    return input_error;
  }
  return input_error;
}

}  // namespace hogsos::cli
