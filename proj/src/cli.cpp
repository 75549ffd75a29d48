#include "ppud/cli.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "ppud/run_transform.hpp"
#include "ppud/state_space.hpp"
#include "ppud/text.hpp"

namespace ppud {

namespace {

using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitViolated = 1;
constexpr int kExitInconclusive = 2;
constexpr int kExitInput = 3;

struct CliError {
  int code;
  std::string message;
};

// file contents when the argument names a file, the argument itself otherwise
std::string load_arg(const std::string& arg) {
  std::error_code ec;
  if (std::filesystem::is_regular_file(arg, ec)) {
    std::ifstream in(arg);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }
  return arg;
}

template <typename T>
T parse_or_throw(ParseResult<T> res, const std::string& what) {
  if (res.ok()) return *std::move(res.value);
  std::string msg = "cannot parse " + what + ":";
  for (const Diagnostic& d : res.diagnostics) msg += "\n  " + d.str();
  throw CliError{kExitInput, msg};
}

Protocol load_protocol(const std::string& arg) {
  return parse_or_throw(parse_protocol(load_arg(arg)), "protocol");
}

struct Options {
  std::uint32_t max_data = 2;
  std::uint32_t max_agents = 2;
  std::size_t node_budget = kDefaultNodeBudget;
  bool include_empty = false;
  std::string format = "text";
  std::uint64_t seed = 0;  // reserved for randomized self-test corpora

  SearchBounds bounds(bool default_include_empty) const {
    SearchBounds b;
    b.max_data = max_data;
    b.max_agents_per_datum = max_agents;
    b.include_empty = include_empty || default_include_empty;
    b.node_budget = node_budget;
    return b;
  }
};

json bounds_json(const SearchBounds& b) {
  return json{{"max_data", b.max_data},
              {"max_agents_per_datum", b.max_agents_per_datum},
              {"include_empty", b.include_empty}};
}

json verdict_json(const Verdict& v, const Protocol& p) {
  json j;
  switch (v.kind) {
    case Verdict::Kind::Empty:
      j["verdict"] = "empty";
      break;
    case Verdict::Kind::NonEmpty:
      j["verdict"] = "nonempty";
      j["witness"] = serialize_config(*v.witness, p);
      break;
    case Verdict::Kind::Inconclusive:
      j["verdict"] = "inconclusive";
      j["reason"] = v.report;
      break;
  }
  j["bounds"] = bounds_json(v.bounds);
  return j;
}

void emit(const Options& opt, std::ostream& out, const json& j,
          const std::string& text_report) {
  if (opt.format == "json")
    out << j.dump(2) << "\n";
  else
    out << text_report;
}

std::string verdict_text(const Verdict& v, const Protocol& p, const std::string& empty_line,
                         const std::string& nonempty_line) {
  std::ostringstream os;
  switch (v.kind) {
    case Verdict::Kind::Empty:
      os << empty_line << " (up to " << v.bounds.max_data << " data, "
         << v.bounds.max_agents_per_datum << " agents per datum)\n";
      break;
    case Verdict::Kind::NonEmpty:
      os << nonempty_line << "\n" << serialize_config(*v.witness, p);
      break;
    case Verdict::Kind::Inconclusive:
      os << "inconclusive: " << v.report << "\n";
      break;
  }
  return os.str();
}

int verdict_exit(const Verdict& v) {
  switch (v.kind) {
    case Verdict::Kind::Empty:
      return kExitOk;
    case Verdict::Kind::NonEmpty:
      return kExitViolated;
    case Verdict::Kind::Inconclusive:
      return kExitInconclusive;
  }
  return kExitInconclusive;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"verifier for population protocols with unordered data"};
  app.require_subcommand(1);
  Options opt;
  app.add_option("--max-data", opt.max_data, "datum bound for emptiness searches");
  app.add_option("--max-agents", opt.max_agents, "per-datum agent bound for emptiness searches");
  app.add_option("--node-budget", opt.node_budget, "configuration budget for reach computations");
  app.add_flag("--include-empty-config", opt.include_empty,
               "treat the empty configuration as initial in searches");
  app.add_option("--format", opt.format, "report format: text or json")
      ->check(CLI::IsMember({"text", "json"}));
  app.add_option("--seed", opt.seed, "seed for randomized self-test corpus generation");

  std::string arg_protocol, arg_gre, arg_gre2, arg_config, arg_pred, arg_run, arg_cm;
  std::string arg_datum, arg_container, arg_out, arg_config_out, arg_from;
  std::uint32_t opt_n = 1, opt_m = 1, opt_uniq = 1, opt_reservoir = 1, opt_k = 0;
  std::size_t opt_at = 0;

  auto* c_validate = app.add_subcommand("validate", "check protocol invariants");
  c_validate->add_option("protocol", arg_protocol)->required();

  auto* c_member = app.add_subcommand("member", "test configuration membership in an expression");
  c_member->add_option("protocol", arg_protocol)->required();
  c_member->add_option("expr", arg_gre)->required();
  c_member->add_option("config", arg_config)->required();

  auto* c_empt = app.add_subcommand("emptiness", "bounded emptiness of an expression");
  c_empt->add_option("protocol", arg_protocol)->required();
  c_empt->add_option("expr", arg_gre)->required();

  auto* c_ws = app.add_subcommand("well-specified", "bounded well-specification check");
  c_ws->add_option("protocol", arg_protocol)->required();

  auto* c_corr = app.add_subcommand("correct", "does the protocol compute the predicate?");
  c_corr->add_option("protocol", arg_protocol)->required();
  c_corr->add_option("predicate", arg_pred)->required();

  auto* c_setreach = app.add_subcommand("set-reach", "can the first set reach the second?");
  c_setreach->add_option("protocol", arg_protocol)->required();
  c_setreach->add_option("from", arg_gre)->required();
  c_setreach->add_option("to", arg_gre2)->required();

  auto* c_home = app.add_subcommand("home-space", "is the expression a home space?");
  c_home->add_option("protocol", arg_protocol)->required();
  c_home->add_option("home", arg_gre)->required();
  c_home->add_option("--from", arg_from, "source expression (default: initial configurations)");

  auto* c_fair = app.add_subcommand("fair-outcomes", "fair-run outcomes of a configuration");
  c_fair->add_option("protocol", arg_protocol)->required();
  c_fair->add_option("config", arg_config)->required();
  std::string arg_dot;
  c_fair->add_option("--dot", arg_dot, "write the explored reachability graph as dot");

  auto* c_norm = app.add_subcommand("normalize-run", "bounded-observation normal form of a run");
  c_norm->add_option("protocol", arg_protocol)->required();
  c_norm->add_option("run", arg_run)->required();

  auto* c_acore = app.add_subcommand("agents-core", "shrink agent classes of a run");
  c_acore->add_option("protocol", arg_protocol)->required();
  c_acore->add_option("run", arg_run)->required();

  auto* c_dcore = app.add_subcommand("data-core", "shrink trace classes of a run");
  c_dcore->add_option("protocol", arg_protocol)->required();
  c_dcore->add_option("run", arg_run)->required();
  c_dcore->add_option("--k", opt_k, "per-datum agent bound (default: maximum in the run)");

  auto* c_trace = app.add_subcommand("trace", "trace of a datum in a run");
  c_trace->add_option("protocol", arg_protocol)->required();
  c_trace->add_option("run", arg_run)->required();
  c_trace->add_option("datum", arg_datum)->required();
  c_trace->add_option("--at", opt_at, "configuration index for a split trace (1-based)");

  auto* c_cont = app.add_subcommand("container", "container of a configuration");
  c_cont->add_option("protocol", arg_protocol)->required();
  c_cont->add_option("config", arg_config)->required();
  c_cont->add_option("--n", opt_n, "box threshold")->required();
  c_cont->add_option("--m", opt_m, "datum-count threshold")->required();

  auto* c_poc = app.add_subcommand("pred-of-container", "predicate form of a container");
  c_poc->add_option("protocol", arg_protocol)->required();
  c_poc->add_option("container", arg_container)->required();

  auto* c_bounds = app.add_subcommand("bounds", "exact margin and container bounds");
  c_bounds->add_option("protocol", arg_protocol)->required();
  c_bounds->add_option("expr", arg_gre)->required();
  c_bounds->add_option("--n", opt_n, "threshold n for f/g");
  c_bounds->add_option("--m", opt_m, "threshold M for f/g");

  auto* c_gen = app.add_subcommand("gen-2cm", "compile a 2-counter machine");
  c_gen->add_option("machine", arg_cm)->required();
  c_gen->add_option("-o,--out", arg_out, "write the protocol here instead of stdout");
  c_gen->add_option("--uniq-data", opt_uniq, "uniqueness data in the emitted configuration");
  c_gen->add_option("--reservoir", opt_reservoir, "reservoir agents per datum");
  c_gen->add_option("--config-out", arg_config_out, "also emit an initial configuration");

  for (CLI::App* sub : app.get_subcommands([](const CLI::App*) { return true; }))
    sub->fallthrough();

  std::vector<char*> argv;
  std::vector<std::string> storage = args;
  storage.insert(storage.begin(), "ppudv");
  for (std::string& s : storage) argv.push_back(s.data());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {  // --help
      out << app.help();
      return kExitOk;
    }
    err << "error: " << e.what() << "\n";
    return kExitInput;
  }

  try {
    if (c_validate->parsed()) {
      Protocol p = load_protocol(arg_protocol);
      auto diags = validate_protocol(p);
      json j{{"schema_version", 1},
             {"command", "validate"},
             {"valid", diags.empty()},
             {"immediate_observation", is_immediate_observation(p)},
             {"diagnostics", diags}};
      std::ostringstream os;
      if (diags.empty())
        os << "valid protocol (" << (is_immediate_observation(p) ? "" : "not ")
           << "immediate observation)\n";
      else
        for (const auto& d : diags) os << "invariant violation: " << d << "\n";
      emit(opt, out, j, os.str());
      return diags.empty() ? kExitOk : kExitViolated;
    }

    if (c_member->parsed()) {
      Protocol p = load_protocol(arg_protocol);
      Gre e = parse_or_throw(parse_gre(load_arg(arg_gre), p), "expression");
      CanonicalConfiguration c =
          parse_or_throw(parse_config(load_arg(arg_config), p), "configuration");
      const bool in = member(p, *e, c, opt.node_budget);
      json j{{"schema_version", 1}, {"command", "member"}, {"member", in}};
      emit(opt, out, j, std::string(in ? "true" : "false") + "\n");
      return kExitOk;
    }

    if (c_empt->parsed()) {
      Protocol p = load_protocol(arg_protocol);
      Gre e = parse_or_throw(parse_gre(load_arg(arg_gre), p), "expression");
      Verdict v = emptiness(p, *e, opt.bounds(/*default_include_empty=*/true));
      json j = verdict_json(v, p);
      j["schema_version"] = 1;
      j["command"] = "emptiness";
      emit(opt, out, j, verdict_text(v, p, "empty", "nonempty, witness:"));
      return verdict_exit(v);
    }

    if (c_ws->parsed()) {
      Protocol p = load_protocol(arg_protocol);
      Verdict v = emptiness(p, *build_wellspec_gre(p), opt.bounds(false));
      json j = verdict_json(v, p);
      j["schema_version"] = 1;
      j["command"] = "well-specified";
      emit(opt, out, j,
           verdict_text(v, p, "well-specified: no counterexample",
                        "not well-specified, initial counterexample:"));
      return verdict_exit(v);
    }

    if (c_corr->parsed()) {
      Protocol p = load_protocol(arg_protocol);
      IntervalPredicate phi = parse_or_throw(parse_predicate(load_arg(arg_pred), p), "predicate");
      CorrectnessVerdict cv = check_correctness(p, phi, opt.bounds(false));
      json j{{"schema_version", 1},
             {"command", "correct"},
             {"correct", cv.correct()},
             {"top_branch", verdict_json(cv.top_branch, p)},
             {"bot_branch", verdict_json(cv.bot_branch, p)}};
      std::ostringstream os;
      os << "top branch: "
         << verdict_text(cv.top_branch, p, "no counterexample", "counterexample:");
      os << "bot branch: "
         << verdict_text(cv.bot_branch, p, "no counterexample", "counterexample:");
      os << (cv.correct() ? "correct (up to bounds)\n" : "");
      emit(opt, out, j, os.str());
      if (cv.top_branch.nonempty() || cv.bot_branch.nonempty()) return kExitViolated;
      if (!cv.correct()) return kExitInconclusive;
      return kExitOk;
    }

    if (c_setreach->parsed()) {
      Protocol p = load_protocol(arg_protocol);
      Gre e1 = parse_or_throw(parse_gre(load_arg(arg_gre), p), "source expression");
      Gre e2 = parse_or_throw(parse_gre(load_arg(arg_gre2), p), "target expression");
      Verdict v = check_set_reachability(p, e1, e2, opt.bounds(true));
      json j = verdict_json(v, p);
      j["schema_version"] = 1;
      j["command"] = "set-reach";
      emit(opt, out, j,
           verdict_text(v, p, "unreachable: intersection empty", "reachable from witness:"));
      return verdict_exit(v);
    }

    if (c_home->parsed()) {
      Protocol p = load_protocol(arg_protocol);
      Gre home = parse_or_throw(parse_gre(load_arg(arg_gre), p), "home expression");
      Gre from = nullptr;
      if (!arg_from.empty())
        from = parse_or_throw(parse_gre(load_arg(arg_from), p), "source expression");
      Verdict v = check_home_space(p, home, opt.bounds(true), from);
      json j = verdict_json(v, p);
      j["schema_version"] = 1;
      j["command"] = "home-space";
      emit(opt, out, j,
           verdict_text(v, p, "home space confirmed", "not a home space, witness:"));
      return verdict_exit(v);
    }

    if (c_fair->parsed()) {
      Protocol p = load_protocol(arg_protocol);
      CanonicalConfiguration c =
          parse_or_throw(parse_config(load_arg(arg_config), p), "configuration");
      OutcomeSet o = fair_outcomes(p, c, opt.node_budget);
      if (!arg_dot.empty()) {
        std::ofstream dot(arg_dot);
        dot << "digraph reach {\n  node [shape=box, fontname=\"monospace\"];\n";
        auto nodes = reach_set(p, c, Direction::Forward, opt.node_budget);
        std::map<CanonicalConfiguration, std::size_t> index;
        for (std::size_t i = 0; i < nodes.size(); ++i) {
          index[nodes[i]] = i;
          std::string label = serialize_config(nodes[i], p);
          for (std::size_t pos = 0; (pos = label.find('\n', pos)) != std::string::npos;)
            label.replace(pos, 1, "\\l");
          dot << "  n" << i << " [label=\"" << label << "\"";
          if (is_consensus(p, nodes[i], OutputValue::Top)) dot << ", color=darkgreen";
          else if (is_consensus(p, nodes[i], OutputValue::Bot)) dot << ", color=firebrick";
          dot << "];\n";
        }
        for (std::size_t i = 0; i < nodes.size(); ++i)
          for (const auto& next : neighbours(p, nodes[i], Direction::Forward))
            dot << "  n" << i << " -> n" << index.at(next) << ";\n";
        dot << "}\n";
      }
      std::vector<std::string> names;
      if (o.stabilises_top) names.push_back("stabilises-top");
      if (o.stabilises_bot) names.push_back("stabilises-bot");
      if (o.never_stabilises) names.push_back("never-stabilises");
      json j{{"schema_version", 1}, {"command", "fair-outcomes"}, {"outcomes", names}};
      std::ostringstream os;
      for (const auto& n : names) os << n << "\n";
      emit(opt, out, j, os.str());
      return kExitOk;
    }

    if (c_norm->parsed() || c_acore->parsed() || c_dcore->parsed()) {
      Protocol p = load_protocol(arg_protocol);
      ConcreteRun r = parse_or_throw(parse_run(load_arg(arg_run), p), "run");
      RunCheckResult chk = check_run(p, r);
      if (!chk.ok)
        throw CliError{kExitInput, "invalid run at step " + std::to_string(chk.bad_step + 1) +
                                       ": " + chk.reason};
      ConcreteRun result;
      std::string command;
      if (c_norm->parsed()) {
        result = normalize_run(p, r);
        command = "normalize-run";
      } else if (c_acore->parsed()) {
        result = agents_core(p, r);
        command = "agents-core";
      } else {
        std::uint32_t k = opt_k;
        if (k == 0) {
          std::map<DatumId, std::uint32_t> per;
          for (const RunAgent& a : r.agents) k = std::max(k, ++per[a.datum]);
        }
        result = data_core(p, r, k);
        command = "data-core";
      }
      json j{{"schema_version", 1}, {"command", command}, {"run", serialize_run(result, p)}};
      emit(opt, out, j, serialize_run(result, p));
      return kExitOk;
    }

    if (c_trace->parsed()) {
      Protocol p = load_protocol(arg_protocol);
      ConcreteRun r = parse_or_throw(parse_run(load_arg(arg_run), p), "run");
      DatumId d = 0;
      bool found = false;
      for (const auto& [id, name] : r.datum_names)
        if (name == arg_datum) {
          d = id;
          found = true;
        }
      if (!found) throw CliError{kExitInput, "datum '" + arg_datum + "' is not in the run"};
      std::string body;
      if (opt_at > 0)
        body = serialize_split_trace(split_trace_of(p, r, d, opt_at), p);
      else
        body = serialize_trace(trace_of(p, r, d), p);
      json j{{"schema_version", 1}, {"command", "trace"}, {"trace", body}};
      emit(opt, out, j, body);
      return kExitOk;
    }

    if (c_cont->parsed()) {
      Protocol p = load_protocol(arg_protocol);
      CanonicalConfiguration c =
          parse_or_throw(parse_config(load_arg(arg_config), p), "configuration");
      Container cont = container_of(c, opt_n, opt_m);
      json j{{"schema_version", 1},
             {"command", "container"},
             {"container", serialize_container(cont, p)}};
      emit(opt, out, j, serialize_container(cont, p));
      return kExitOk;
    }

    if (c_poc->parsed()) {
      Protocol p = load_protocol(arg_protocol);
      Container cont = parse_or_throw(parse_container(load_arg(arg_container), p), "container");
      IntervalPredicate phi = container_to_predicate(cont, p.states.size());
      json j{{"schema_version", 1},
             {"command", "pred-of-container"},
             {"predicate", serialize_predicate(phi, p)}};
      emit(opt, out, j, serialize_predicate(phi, p) + "\n");
      return kExitOk;
    }

    if (c_bounds->parsed()) {
      Protocol p = load_protocol(arg_protocol);
      Gre e = parse_or_throw(parse_gre(load_arg(arg_gre), p), "expression");
      BoundReport r = bound_report(p, *e, opt_n, opt_m);
      json j{{"schema_version", 1},
             {"command", "bounds"},
             {"f", r.f_value.str()},
             {"g", r.g_value.str()},
             {"alpha", r.alpha.str()},
             {"beta", r.beta.str()},
             {"witness_agent_bound", r.witness_agent_bound.str()}};
      std::ostringstream os;
      os << "f(" << opt_n << ") = " << r.f_value << "\n";
      os << "g(" << opt_n << ", " << opt_m << ") = " << r.g_value << "\n";
      os << "alpha = " << r.alpha << "\n";
      os << "beta = " << r.beta << "\n";
      os << "witness agent bound = " << r.witness_agent_bound << "\n";
      emit(opt, out, j, os.str());
      return kExitOk;
    }

    if (c_gen->parsed()) {
      CounterMachine m = parse_or_throw(parse_cm(load_arg(arg_cm)), "counter machine");
      auto errs = validate_machine(m);
      if (!errs.empty()) throw CliError{kExitInput, "invalid machine: " + errs.front()};
      CompiledProtocol cp = compile_2cm(m);
      const std::string text = serialize_protocol(cp.protocol);
      if (!arg_out.empty()) {
        std::ofstream f(arg_out);
        f << text;
      }
      std::string config_text;
      if (!arg_config_out.empty()) {
        config_text = serialize_config(initial_config_2cm(cp, opt_uniq, opt_reservoir),
                                       cp.protocol);
        std::ofstream f(arg_config_out);
        f << config_text;
      }
      json j{{"schema_version", 1},
             {"command", "gen-2cm"},
             {"states", cp.protocol.states.size()},
             {"transitions", cp.protocol.transitions.size()}};
      std::ostringstream os;
      if (arg_out.empty()) os << text;
      os << "// " << cp.protocol.states.size() << " states, "
         << cp.protocol.transitions.size() << " transitions\n";
      emit(opt, out, j, os.str());
      return kExitOk;
    }
  } catch (const CliError& e) {
    err << "error: " << e.message << "\n";
    return e.code;
  } catch (const BudgetExceeded& e) {
    err << "inconclusive: " << e.what() << "\n";
    return kExitInconclusive;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitInput;
  }

  err << "error: no command\n";
  return kExitInput;
}

}  // namespace ppud
