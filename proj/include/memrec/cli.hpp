#pragma once

// Command-line front end: compile, run, check, trace, eval.
//
// Exit codes: 0 ok, 1 usage/other, 2 parse or arity error, 3 step limit,
// 4 oracle mismatch, 5 branch limit.

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "memrec/compiler.hpp"
#include "memrec/engine.hpp"
#include "memrec/psystem_json.hpp"
#include "memrec/recfun.hpp"
#include "memrec/trace_json.hpp"

namespace memrec::cli {

enum ExitCode : int {
  kOk = 0,
  kUsage = 1,
  kParseError = 2,
  kStepLimit = 3,
  kMismatch = 4,
  kBranchLimit = 5,
};

struct RunSpec {
  std::string expr;
  std::string args_text;
  std::uint64_t seed = 0;
  std::string mode = "random";
  std::uint64_t max_steps = kDefaultMaxSteps;
  std::size_t max_branches = 1000;
  std::string format = "json";
  std::string out;
};

// "3,5" -> {3, 5}; "" -> {}.
inline std::vector<Nat> parse_args(const std::string& text) {
  std::vector<Nat> out;
  if (text.find_first_not_of(" \t") == std::string::npos) return out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto b = item.find_first_not_of(" \t");
    const auto e = item.find_last_not_of(" \t");
    if (b == std::string::npos) throw Error("empty argument in '" + text + "'");
    item = item.substr(b, e - b + 1);
    if (!std::all_of(item.begin(), item.end(), [](char c) { return c >= '0' && c <= '9'; }))
      throw Error("argument '" + item + "' is not a natural number");
    try {
      out.push_back(std::stoull(item));
    } catch (const std::out_of_range&) {
      throw Error("argument '" + item + "' is too large");
    }
  }
  return out;
}

inline std::string args_to_string(const std::vector<Nat>& args) {
  std::string s;
  for (std::size_t i = 0; i < args.size(); ++i) s += (i ? "," : "") + std::to_string(args[i]);
  return s;
}

namespace detail {

struct Prepared {
  RecExpr expr;
  std::vector<Nat> args;
};

// Parses expression and arguments; reports diagnostics on err and returns
// nullopt on failure (exit code 2).
inline std::optional<Prepared> prepare(const RunSpec& spec, std::ostream& err) {
  try {
    RecExpr e = parse(spec.expr);
    std::vector<Nat> args = parse_args(spec.args_text);
    if (args.size() != e.arity()) throw ArityMismatch(e.arity(), args.size());
    return Prepared{std::move(e), std::move(args)};
  } catch (const SyntaxError& ex) {
    err << "error: " << ex.what() << '\n'
        << "  " << spec.expr << '\n'
        << "  " << std::string(ex.column() - 1, ' ') << "^\n";
  } catch (const Error& ex) {
    err << "error: " << ex.what() << '\n';
  }
  return std::nullopt;
}

// Writes to --out when given, otherwise to out.
class Sink {
 public:
  Sink(const std::string& path, std::ostream& fallback) : os_(&fallback) {
    if (!path.empty()) {
      file_ = std::make_unique<std::ofstream>(path);
      if (!*file_) throw Error("cannot open '" + path + "' for writing");
      os_ = file_.get();
    }
  }
  std::ostream& stream() { return *os_; }

 private:
  std::unique_ptr<std::ofstream> file_;
  std::ostream* os_;
};

inline Strategy strategy_of(const RunSpec& spec) {
  if (spec.mode == "exhaustive") return Exhaustive{spec.max_branches};
  return SeededRandom{spec.seed};
}

}  // namespace detail

inline int cmd_compile(const RunSpec& spec, const std::string& sidecar_path, std::ostream& out,
                       std::ostream& err) {
  auto p = detail::prepare(spec, err);
  if (!p) return kParseError;
  const CompiledUnit cu = compile(p->expr, p->args);
  detail::Sink sink(spec.out, out);
  sink.stream() << serialize(cu.system) << '\n';
  if (!sidecar_path.empty()) {
    std::ofstream side(sidecar_path);
    if (!side) throw Error("cannot open '" + sidecar_path + "' for writing");
    side << cu.sidecar().dump() << '\n';
  }
  return kOk;
}

inline int cmd_run(const RunSpec& spec, std::ostream& out, std::ostream& err) {
  auto p = detail::prepare(spec, err);
  if (!p) return kParseError;
  const CompiledUnit cu = compile(p->expr, p->args);
  const Engine engine(cu.system);
  const Outcome o = engine.run_outcome(detail::strategy_of(spec), spec.max_steps);
  detail::Sink sink(spec.out, out);
  auto& os = sink.stream();
  if (spec.format == "plain") {
    if (o.halted())
      os << o.output << '\n';
    else
      os << "step_limit\n";
  } else {
    ojson j;
    if (o.halted()) {
      j["value"] = o.output;
      j["steps"] = o.steps;
      j["seed"] = spec.seed;
    } else {
      j["outcome"] = "step_limit";
    }
    os << j.dump() << '\n';
  }
  return o.halted() ? kOk : kStepLimit;
}

inline int cmd_check(const RunSpec& spec, std::size_t seeds, std::uint64_t fuel, std::ostream& out,
                     std::ostream& err) {
  auto p = detail::prepare(spec, err);
  if (!p) return kParseError;
  const EvalResult oracle = eval(p->expr, p->args, fuel);
  const CompiledUnit cu = compile(p->expr, p->args);
  const Engine engine(cu.system);
  detail::Sink sink(spec.out, out);
  auto& os = sink.stream();

  std::size_t agreeing = 0;
  for (std::size_t i = 0; i < seeds; ++i) {
    const std::uint64_t seed = spec.seed + i;
    const Outcome o = engine.run_outcome(SeededRandom{seed}, spec.max_steps);
    const bool ok = oracle.has_value() ? (o.halted() && o.output == oracle.value) : !o.halted();
    if (!ok) {
      os << "mismatch: oracle "
         << (oracle.has_value() ? "value " + std::to_string(oracle.value) : std::string("diverged"))
         << ", engine " << (o.halted() ? "value " + std::to_string(o.output) : std::string("step_limit"))
         << '\n'
         << "reproduce: run -e \"" << spec.expr << "\" -a " << args_to_string(p->args)
         << " --seed " << seed << " --max-steps " << spec.max_steps << '\n';
      return kMismatch;
    }
    ++agreeing;
  }
  os << "agree: "
     << (oracle.has_value() ? "value " + std::to_string(oracle.value) : std::string("diverged")) << ", "
     << agreeing << '/' << seeds << '\n';
  return kOk;
}

inline int cmd_trace(const RunSpec& spec, std::ostream& out, std::ostream& err) {
  auto p = detail::prepare(spec, err);
  if (!p) return kParseError;
  const CompiledUnit cu = compile(p->expr, p->args);
  const Engine engine(cu.system);
  detail::Sink sink(spec.out, out);
  auto& os = sink.stream();
  if (spec.mode == "exhaustive") {
    std::vector<Trace> branches;
    try {
      branches = engine.explore(spec.max_branches, spec.max_steps);
    } catch (const BranchLimitExceeded& ex) {
      err << "error: " << ex.what() << '\n';
      return kBranchLimit;
    }
    bool all_halted = true;
    for (std::size_t b = 0; b < branches.size(); ++b) {
      write_trace(os, branches[b], b);
      all_halted = all_halted && branches[b].outcome.halted();
    }
    return all_halted ? kOk : kStepLimit;
  }
  const Outcome o = engine.run_observed(
      engine.initial_configuration(), SeededRandom{spec.seed}, spec.max_steps,
      [&](const Configuration& before, const RuleInstanceSet& applied) {
        os << step_record(before, applied).dump() << '\n';
      });
  os << outcome_record(o).dump() << '\n';
  return o.halted() ? kOk : kStepLimit;
}

// Reference evaluation only.
inline int cmd_eval(const RunSpec& spec, std::uint64_t fuel, std::ostream& out, std::ostream& err) {
  auto p = detail::prepare(spec, err);
  if (!p) return kParseError;
  const EvalResult r = eval(p->expr, p->args, fuel);
  detail::Sink sink(spec.out, out);
  if (r.has_value())
    sink.stream() << r.value << '\n';
  else
    sink.stream() << "diverged\n";
  return r.has_value() ? kOk : kStepLimit;
}

// argv-style entry point; args excludes the program name.
inline int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Compile and run μ-recursive functions as P systems"};
  app.require_subcommand(1);

  RunSpec spec;
  std::string sidecar;
  std::size_t seeds = 10;
  std::uint64_t fuel = 1'000'000;

  auto common = [&](CLI::App* sub) {
    sub->add_option("-e,--expr", spec.expr, "expression, e.g. \"P(U[1,1], C(S; U[3,3]))\"")->required();
    sub->add_option("-a,--args", spec.args_text, "comma-separated natural numbers");
    sub->add_option("--seed", spec.seed, "random seed");
    sub->add_option("--mode", spec.mode, "random or exhaustive")
        ->check(CLI::IsMember({"random", "exhaustive"}));
    sub->add_option("--max-steps", spec.max_steps, "step limit")->check(CLI::PositiveNumber);
    sub->add_option("--max-branches", spec.max_branches, "branch limit in exhaustive mode")
        ->check(CLI::PositiveNumber);
    sub->add_option("--format", spec.format, "json or plain")->check(CLI::IsMember({"json", "plain"}));
    sub->add_option("--out", spec.out, "write to file instead of standard output");
  };

  auto* compile_cmd = app.add_subcommand("compile", "emit the compiled system as psys-v1 JSON");
  common(compile_cmd);
  compile_cmd->add_option("--sidecar", sidecar, "write the argument->symbol map to this file");
  auto* run_cmd = app.add_subcommand("run", "compile and run, report the output");
  common(run_cmd);
  auto* check_cmd = app.add_subcommand("check", "compare seeded runs with the reference evaluator");
  common(check_cmd);
  check_cmd->add_option("--seeds", seeds, "number of seeds, starting at --seed");
  check_cmd->add_option("--fuel", fuel, "fuel for the reference evaluator");
  auto* trace_cmd = app.add_subcommand("trace", "emit the JSON-lines trace");
  common(trace_cmd);
  auto* eval_cmd = app.add_subcommand("eval", "reference evaluation only");
  common(eval_cmd);
  eval_cmd->add_option("--fuel", fuel, "fuel for the reference evaluator");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(std::move(reversed));
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*compile_cmd) return cmd_compile(spec, sidecar, out, err);
    if (*run_cmd) return cmd_run(spec, out, err);
    if (*check_cmd) return cmd_check(spec, seeds, fuel, out, err);
    if (*trace_cmd) return cmd_trace(spec, out, err);
    if (*eval_cmd) return cmd_eval(spec, fuel, out, err);
  } catch (const BranchLimitExceeded& ex) {
    err << "error: " << ex.what() << '\n';
    return kBranchLimit;
  } catch (const std::exception& ex) {
    err << "error: " << ex.what() << '\n';
    return kUsage;
  }
  return kUsage;
}

}  // namespace memrec::cli
