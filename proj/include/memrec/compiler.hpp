#pragma once

// Compiles a μ-recursive expression applied to concrete arguments into a
// graph-structured P system whose output compartment ends up holding as many
// objects as the function value.
//
// Layout conventions:
//  * A top-level basic function is the classic two-compartment system: the
//    skin holds a_k^{x_k}, compartment 2 is the output.
//  * Everything else is built from nested units. A unit has an input
//    compartment (receives argument objects plus one `go` token), an
//    elementary output compartment, and optionally a control compartment
//    holding a pilot token that is forwarded, gated on the unit's stage, once
//    the unit has gone quiet. Data always reaches a consumer no later than
//    the pilot, and every non-linear decision (one-shot rules, zero tests)
//    waits for `go`, so units may start streaming on partial input safely.
//  * Stages are paths ("u", "u/g1", "u/g1/f", ...) and symbols of a nested
//    unit are prefixed with its path below the root ("g1/f:a1").

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "memrec/error.hpp"
#include "memrec/multiset.hpp"
#include "memrec/psystem.hpp"
#include "memrec/recfun.hpp"

namespace memrec {

struct ReservedSymbols {
  static constexpr const char* hash = "#";
  static constexpr const char* at = "@";
  static constexpr const char* oplus = "⊕";
  static constexpr const char* otimes = "⊗";
  static constexpr const char* pilot = "p";
  static constexpr const char* pilot_prime = "p′";
  static constexpr const char* mark = "¶";
};

struct CompiledUnit {
  PSystem system;
  // 1-based argument index -> (symbol, copies placed in the skin)
  std::map<std::size_t, std::pair<Symbol, Count>> input_map;
  // sub-expression path ("$", "$.f", "$.g2", "$.g[3]") -> stage
  std::map<std::string, std::string> stage_of;
  Label output = 0;

  // {"1": "a1", ...}
  nlohmann::ordered_json sidecar() const {
    nlohmann::ordered_json j = nlohmann::ordered_json::object();
    for (const auto& [k, v] : input_map) j[std::to_string(k)] = v.first.name();
    return j;
  }
};

struct CompileOptions {
  // Fuel for each reference evaluation used to size pipelines.
  std::uint64_t sizing_fuel = 1'000'000;
  // Cap on minimalization probes explored when sizing a diverging search.
  std::size_t max_probes = 256;
};

namespace detail {

using Args = std::vector<Nat>;

struct DoneSignal {
  Label dest;
  Symbol symbol;
};

struct Ports {
  Label in = 0;
  Label out = 0;
  std::vector<Symbol> arg_symbols;  // argument k (0-based) as seen by `in`
  Symbol go{"go"};
  std::vector<Symbol> out_symbols;
};

class UnitBuilder {
 public:
  explicit UnitBuilder(CompileOptions opts) : opts_(opts) {}

  PSystem sys;
  std::map<std::string, std::string> stage_of;

  Label add(std::optional<Label> parent, const std::string& stage) {
    return sys.add_compartment(parent, stage);
  }

  void rule(Label at, EvolutionRule r) { sys.at(at).rules.push_back(std::move(r)); }

  // Product routed over a channel; records the g_m edge.
  Product to(Label from, Label dest, const Symbol& s) {
    sys.add_edge(from, dest);
    return Product{s, Target::to(dest)};
  }

  static Symbol sym(const std::string& ns, const std::string& local) {
    return Symbol(ns.empty() ? local : ns + ":" + local);
  }

  static std::string ns_of(const std::string& stage) {
    const auto slash = stage.find('/');
    return slash == std::string::npos ? std::string() : stage.substr(slash + 1);
  }

  // Builds e as a nested unit under `parent`.
  Ports unit(const RecExpr& e, const std::string& path, const std::string& stage,
             std::optional<Label> parent, const std::vector<Args>& calls,
             const std::optional<DoneSignal>& done) {
    stage_of[path] = stage;
    return std::visit(
        [&](const auto& x) -> Ports {
          using T = std::decay_t<decltype(x)>;
          if constexpr (std::is_same_v<T, RecExpr::Zero>)
            return zero_unit(x.n, stage, parent, done);
          else if constexpr (std::is_same_v<T, RecExpr::Succ>)
            return succ_unit(stage, parent, done);
          else if constexpr (std::is_same_v<T, RecExpr::Proj>)
            return proj_unit(x.n, x.i, stage, parent, done);
          else if constexpr (std::is_same_v<T, RecExpr::Comp>)
            return comp_unit(x, path, stage, parent, calls, done);
          else if constexpr (std::is_same_v<T, RecExpr::PrimRec>)
            return primrec_unit(e, x, path, stage, parent, calls, done);
          else
            return min_unit(x, path, stage, parent, calls, done);
        },
        e.node());
  }

 private:
  // Input compartment, argument symbols and (if a consumer waits) the
  // control compartment with its gated pilot rule.
  Ports open_unit(std::size_t n, const std::string& stage, std::optional<Label> parent,
                  const std::optional<DoneSignal>& done, std::optional<Symbol>& pilot) {
    const std::string ns = ns_of(stage);
    Ports p;
    p.in = add(parent, stage);
    p.go = sym(ns, "go");
    for (std::size_t k = 1; k <= n; ++k) p.arg_symbols.push_back(sym(ns, "a" + std::to_string(k)));
    if (done) {
      const Label ctl = add(p.in, stage);
      pilot = sym(ns, "t");
      rule(ctl, EvolutionRule::ordinary(Multiset::of({{pilot->name(), 1}}),
                                        {to(ctl, done->dest, done->symbol)})
                    .with_gate(stage));
      ctl_of_[p.in] = ctl;
    }
    return p;
  }

  // go -> (pilot into ctl) plus extra products; catharsis when nothing results.
  void go_rule(const Ports& p, Multiset lhs, std::vector<Product> extra,
               const std::optional<Symbol>& pilot) {
    if (pilot) extra.push_back(Product{*pilot, Target::in(ctl_of_.at(p.in))});
    if (extra.empty())
      rule(p.in, EvolutionRule::catharsis(std::move(lhs)));
    else
      rule(p.in, EvolutionRule::ordinary(std::move(lhs), std::move(extra)));
  }

  Ports zero_unit(std::size_t n, const std::string& stage, std::optional<Label> parent,
                  const std::optional<DoneSignal>& done) {
    std::optional<Symbol> pilot;
    Ports p = open_unit(n, stage, parent, done, pilot);
    p.out = add(p.in, stage);
    for (const auto& a : p.arg_symbols)
      rule(p.in, EvolutionRule::catharsis(Multiset::of({{a.name(), 1}})));
    go_rule(p, Multiset::of({{p.go.name(), 1}}), {}, pilot);
    return p;
  }

  Ports succ_unit(const std::string& stage, std::optional<Label> parent,
                  const std::optional<DoneSignal>& done) {
    std::optional<Symbol> pilot;
    Ports p = open_unit(1, stage, parent, done, pilot);
    p.out = add(p.in, stage);
    const Symbol& a = p.arg_symbols[0];
    // The hold object keeps the compartment non-empty until `go` arrives, so
    // the one-shot rule fires only after all input has been moved on.
    const Symbol hold = sym(ns_of(stage), "h");
    sys.at(p.in).initial.add(hold);
    rule(p.in, EvolutionRule::ordinary(Multiset::of({{a.name(), 1}}), {{a, Target::in(p.out)}}));
    go_rule(p, Multiset::of({{hold.name(), 1}, {p.go.name(), 1}}), {}, pilot);
    rule(p.in, EvolutionRule::one_shot({{a, Target::in(p.out)}}));
    p.out_symbols = {a};
    return p;
  }

  Ports proj_unit(std::size_t n, std::size_t j, const std::string& stage,
                  std::optional<Label> parent, const std::optional<DoneSignal>& done) {
    std::optional<Symbol> pilot;
    Ports p = open_unit(n, stage, parent, done, pilot);
    p.out = add(p.in, stage);
    for (std::size_t k = 1; k <= n; ++k) {
      const Symbol& a = p.arg_symbols[k - 1];
      if (k == j)
        rule(p.in, EvolutionRule::ordinary(Multiset::of({{a.name(), 1}}), {{a, Target::in(p.out)}}));
      else
        rule(p.in, EvolutionRule::catharsis(Multiset::of({{a.name(), 1}})));
    }
    go_rule(p, Multiset::of({{p.go.name(), 1}}), {}, pilot);
    p.out_symbols = {p.arg_symbols[j - 1]};
    return p;
  }

  // Data objects o in `from_out` travel to `dest` as `as`, gated on the
  // stage of the producing compartment.
  void forward(Label from_out, const std::vector<Symbol>& outs, Label dest, const Symbol& as) {
    const std::string gate = sys.at(from_out).stage;
    for (const auto& o : outs)
      rule(from_out, EvolutionRule::ordinary(Multiset::of({{o.name(), 1}}), {to(from_out, dest, as)})
                         .with_gate(gate));
  }

  std::vector<Nat> eval_all(const RecExpr& e, const std::vector<Args>& calls,
                            std::vector<Args>* kept = nullptr) const {
    std::vector<Nat> out;
    for (const auto& xs : calls) {
      const auto r = eval(e, xs, opts_.sizing_fuel);
      if (!r.has_value()) continue;
      out.push_back(r.value);
      if (kept) kept->push_back(xs);
    }
    return out;
  }

  Ports comp_unit(const RecExpr::Comp& c, const std::string& path, const std::string& stage,
                  std::optional<Label> parent, const std::vector<Args>& calls,
                  const std::optional<DoneSignal>& done) {
    const std::string ns = ns_of(stage);
    const std::size_t n = c.gs.front().arity();
    const std::size_t m = c.gs.size();
    std::optional<Symbol> pilot;
    Ports p = open_unit(n, stage, parent, done, pilot);
    const Label join = add(p.in, stage);

    std::vector<Ports> gs;
    for (std::size_t i = 0; i < m; ++i) {
      const std::string tag = "g" + std::to_string(i + 1);
      gs.push_back(unit(c.gs[i], path + "." + tag, stage + "/" + tag, p.in, calls,
                        DoneSignal{join, sym(ns, "j" + std::to_string(i + 1))}));
    }

    // f sees the tuples (g_1(xs), ..., g_m(xs)) for every call whose inner
    // values are all defined.
    std::vector<Args> fcalls;
    for (const auto& xs : calls) {
      Args inner;
      for (const auto& g : c.gs) {
        const auto r = eval(g, xs, opts_.sizing_fuel);
        if (!r.has_value()) break;
        inner.push_back(r.value);
      }
      if (inner.size() == m) fcalls.push_back(std::move(inner));
    }
    const Ports f = unit(*c.f, path + ".f", stage + "/f", p.in, fcalls, std::nullopt);

    for (std::size_t k = 0; k < n; ++k) {
      std::vector<Product> fan;
      for (const auto& g : gs) fan.push_back(to(p.in, g.in, g.arg_symbols[k]));
      rule(p.in, EvolutionRule::ordinary(Multiset::of({{p.arg_symbols[k].name(), 1}}), std::move(fan)));
    }
    std::vector<Product> starts;
    for (const auto& g : gs) starts.push_back(to(p.in, g.in, g.go));
    go_rule(p, Multiset::of({{p.go.name(), 1}}), std::move(starts), pilot);

    Multiset all_done;
    for (std::size_t i = 0; i < m; ++i) all_done.add(sym(ns, "j" + std::to_string(i + 1)));
    rule(join, EvolutionRule::ordinary(std::move(all_done), {to(join, f.in, f.go)}));

    for (std::size_t i = 0; i < m; ++i) forward(gs[i].out, gs[i].out_symbols, f.in, f.arg_symbols[i]);

    p.out = f.out;
    p.out_symbols = f.out_symbols;
    return p;
  }

  // Pipeline f, g_1 .. g_B sized by the largest recursion argument among
  // `calls`. Selector s_i decides whether stage i runs (a counter object c
  // is left) or hands the accumulator to the output. Selector s_{B+1} traps
  // if a counter is still left, so an undersized pipeline diverges instead
  // of answering.
  Ports primrec_unit(const RecExpr& self, const RecExpr::PrimRec& pr, const std::string& path,
                     const std::string& stage, std::optional<Label> parent,
                     const std::vector<Args>& calls, const std::optional<DoneSignal>& done) {
    const std::string ns = ns_of(stage);
    const std::size_t k = pr.f->arity();
    Nat bound = 0;
    for (const auto& xs : calls) bound = std::max(bound, xs[k]);

    std::optional<Symbol> pilot;
    Ports p = open_unit(k + 1, stage, parent, done, pilot);
    p.out = add(p.in, stage);
    const Symbol res = sym(ns, "r");

    auto ssym = [&](std::size_t i, const std::string& local) {
      return sym(ns, "s" + std::to_string(i) + "." + local);
    };

    std::vector<Label> sel;
    for (Nat i = 1; i <= bound + 1; ++i) sel.push_back(add(p.in, stage));

    std::vector<Args> fcalls;
    for (const auto& xs : calls) fcalls.emplace_back(xs.begin(), xs.begin() + static_cast<std::ptrdiff_t>(k));
    const Ports f = unit(*pr.f, path + ".f", stage + "/f", p.in, fcalls,
                         DoneSignal{sel[0], ssym(1, "go")});
    forward(f.out, f.out_symbols, sel[0], ssym(1, "h"));

    std::vector<Ports> gs;
    for (Nat i = 1; i <= bound; ++i) {
      // Stage i computes g(xs, i-1, h(xs, i-1)) for every call with y >= i.
      std::vector<Args> gcalls;
      for (const auto& xs : calls) {
        if (xs[k] < i) continue;
        Args prev(xs.begin(), xs.begin() + static_cast<std::ptrdiff_t>(k));
        prev.push_back(i - 1);
        const auto h = eval(self, prev, opts_.sizing_fuel);
        if (!h.has_value()) continue;
        prev.push_back(h.value);
        gcalls.push_back(std::move(prev));
      }
      const std::string tag = "g" + std::to_string(i);
      gs.push_back(unit(*pr.g, path + ".g[" + std::to_string(i) + "]", stage + "/" + tag, p.in,
                        gcalls, DoneSignal{sel[i], ssym(i + 1, "go")}));
      forward(gs.back().out, gs.back().out_symbols, sel[i], ssym(i + 1, "h"));
    }

    // Input fan-out: x_j to f and, as #_j, to every selector that can run a
    // stage; y as counter objects into the first selector.
    for (std::size_t j = 0; j < k; ++j) {
      std::vector<Product> fan{to(p.in, f.in, f.arg_symbols[j])};
      for (Nat i = 1; i <= bound; ++i)
        fan.push_back(to(p.in, sel[i - 1], ssym(i, std::string(ReservedSymbols::hash) + std::to_string(j + 1))));
      rule(p.in, EvolutionRule::ordinary(Multiset::of({{p.arg_symbols[j].name(), 1}}), std::move(fan)));
    }
    rule(p.in, EvolutionRule::ordinary(Multiset::of({{p.arg_symbols[k].name(), 1}}),
                                       {to(p.in, sel[0], ssym(1, "c"))}));
    go_rule(p, Multiset::of({{p.go.name(), 1}}), {to(p.in, f.in, f.go)}, pilot);

    for (Nat i = 1; i <= bound + 1; ++i) {
      const Label s = sel[i - 1];
      const Symbol go = ssym(i, "go"), c = ssym(i, "c"), h = ssym(i, "h");
      const Symbol act = ssym(i, "act"), skp = ssym(i, "skp");
      if (i <= bound) {
        const Ports& g = gs[i - 1];
        const Symbol at = ssym(i, ReservedSymbols::at);
        sys.at(s).initial.add(at, i - 1);
        rule(s, EvolutionRule::ordinary(Multiset::of({{go.name(), 1}, {c.name(), 1}}),
                                        {{act, Target::here()}})
                    .with_priority(2));
        for (std::size_t j = 0; j < k; ++j) {
          const Symbol hj = ssym(i, std::string(ReservedSymbols::hash) + std::to_string(j + 1));
          rule(s, EvolutionRule::ordinary(Multiset::of({{hj.name(), 1}}), {to(s, g.in, g.arg_symbols[j])})
                      .with_promoter(act));
        }
        rule(s, EvolutionRule::ordinary(Multiset::of({{at.name(), 1}}), {to(s, g.in, g.arg_symbols[k])})
                    .with_promoter(act));
        rule(s, EvolutionRule::ordinary(Multiset::of({{h.name(), 1}}), {to(s, g.in, g.arg_symbols[k + 1])})
                    .with_promoter(act));
        rule(s, EvolutionRule::ordinary(Multiset::of({{c.name(), 1}}), {to(s, sel[i], ssym(i + 1, "c"))})
                    .with_promoter(act));
        rule(s, EvolutionRule::ordinary(Multiset::of({{act.name(), 1}}), {to(s, g.in, g.go)}));
      } else {
        const Symbol trap = ssym(i, "trap");
        rule(s, EvolutionRule::ordinary(Multiset::of({{go.name(), 1}, {c.name(), 1}}),
                                        {{trap, Target::here()}})
                    .with_priority(2));
        rule(s, EvolutionRule::ordinary(Multiset::of({{trap.name(), 1}}), {{trap, Target::here()}}));
      }
      rule(s, EvolutionRule::ordinary(Multiset::of({{go.name(), 1}}), {{skp, Target::here()}})
                  .with_priority(1));
      rule(s, EvolutionRule::ordinary(Multiset::of({{h.name(), 1}}), {to(s, p.out, res)})
                  .with_promoter(skp));
      rule(s, EvolutionRule::catharsis(Multiset::of({{skp.name(), 1}})));
    }

    p.out_symbols = {res};
    return p;
  }

  // Four regions: the input compartment stores a_j^{x_j} b^y, the f-stage
  // computes f(xs, y), a controller turns a non-zero result into one ¶ for
  // the output, recycles the arguments with one more b and re-runs f; a zero
  // result leaves the controller inert and the system halts.
  Ports min_unit(const RecExpr::Min& mn, const std::string& path, const std::string& stage,
                 std::optional<Label> parent, const std::vector<Args>& calls,
                 const std::optional<DoneSignal>& done) {
    const std::string ns = ns_of(stage);
    const std::size_t k = mn.f->arity() - 1;
    std::optional<Symbol> pilot;
    Ports p = open_unit(k, stage, parent, done, pilot);
    const Label ctrl = add(p.in, stage);
    p.out = add(p.in, stage);

    const Symbol q = sym(ns, "q"), b = sym(ns, "b");
    const Symbol hash = sym(ns, ReservedSymbols::hash), otimes = sym(ns, ReservedSymbols::otimes);
    const Symbol pl = sym(ns, ReservedSymbols::pilot), plp = sym(ns, ReservedSymbols::pilot_prime);
    const Symbol mark = sym(ns, ReservedSymbols::mark);
    auto oplus = [&](std::size_t j) { return sym(ns, std::string(ReservedSymbols::oplus) + std::to_string(j + 1)); };

    // f is probed at y = 0, 1, ... up to the first zero.
    std::vector<Args> fcalls;
    for (const auto& xs : calls) {
      Args probe = xs;
      probe.push_back(0);
      for (std::size_t n = 0; n < opts_.max_probes; ++n) {
        probe.back() = n;
        fcalls.push_back(probe);
        const auto r = eval(*mn.f, probe, opts_.sizing_fuel);
        if (!r.has_value() || r.value == 0) break;
      }
    }
    const std::string fstage = stage + "/f";
    const Ports f = unit(*mn.f, path + ".f", fstage, p.in, fcalls, DoneSignal{ctrl, pl});
    forward(f.out, f.out_symbols, ctrl, hash);

    // Region 1.
    go_rule(p, Multiset::of({{p.go.name(), 1}}), {{q, Target::here()}}, pilot);
    for (std::size_t j = 0; j < k; ++j)
      rule(p.in, EvolutionRule::ordinary(Multiset::of({{p.arg_symbols[j].name(), 1}}),
                                         {to(p.in, f.in, f.arg_symbols[j]), to(p.in, ctrl, oplus(j))})
                     .with_promoter(q));
    rule(p.in, EvolutionRule::ordinary(Multiset::of({{b.name(), 1}}),
                                       {to(p.in, f.in, f.arg_symbols[k]), to(p.in, ctrl, otimes)})
                   .with_promoter(q));
    rule(p.in, EvolutionRule::ordinary(Multiset::of({{q.name(), 1}}), {to(p.in, f.in, f.go)}));

    // Region 3.
    rule(ctrl, EvolutionRule::ordinary(Multiset::of({{pl.name(), 1}, {hash.name(), 1}}),
                                       {to(ctrl, p.out, mark), to(ctrl, p.in, b), {plp, Target::here()}})
                   .with_priority(2));
    rule(ctrl, EvolutionRule::catharsis(Multiset::of({{hash.name(), 1}})).with_priority(1).with_promoter(plp));
    for (std::size_t j = 0; j < k; ++j)
      rule(ctrl, EvolutionRule::ordinary(Multiset::of({{oplus(j).name(), 1}}), {to(ctrl, p.in, p.arg_symbols[j])})
                     .with_priority(1)
                     .with_promoter(plp));
    rule(ctrl, EvolutionRule::ordinary(Multiset::of({{otimes.name(), 1}}), {to(ctrl, p.in, b)})
                   .with_priority(1)
                   .with_promoter(plp));
    rule(ctrl, EvolutionRule::ordinary(Multiset::of({{plp.name(), 1}}), {to(ctrl, p.in, q)}).with_reset(fstage));

    p.out_symbols = {mark};
    return p;
  }

  CompileOptions opts_;
  std::map<Label, Label> ctl_of_;
};

inline CompiledUnit finish(UnitBuilder& b, Label output) {
  CompiledUnit cu;
  b.sys.output = output;
  b.sys.close_alphabet();
  require_valid(b.sys);
  cu.system = std::move(b.sys);
  cu.stage_of = std::move(b.stage_of);
  cu.output = output;
  return cu;
}

inline void check_args(std::size_t n, const std::vector<Nat>& args) {
  if (args.size() != n) throw ArityMismatch(n, args.size());
}

inline Symbol arg_symbol(std::size_t k) { return Symbol("a" + std::to_string(k)); }

// Two nested compartments, skin holding a_k^{x_k}.
inline std::pair<UnitBuilder, CompiledUnit> basic_shell(const std::vector<Nat>& args,
                                                        const CompileOptions& opts) {
  UnitBuilder b(opts);
  CompiledUnit cu;
  const Label skin = b.add(std::nullopt, "u");
  b.add(skin, "u");
  for (std::size_t k = 1; k <= args.size(); ++k) {
    b.sys.at(skin).initial.add(arg_symbol(k), args[k - 1]);
    cu.input_map.emplace(k, std::make_pair(arg_symbol(k), args[k - 1]));
  }
  b.stage_of["$"] = "u";
  return {std::move(b), std::move(cu)};
}

inline CompiledUnit finish_basic(UnitBuilder& b, CompiledUnit cu) {
  auto input_map = std::move(cu.input_map);
  CompiledUnit out = finish(b, 2);
  out.input_map = std::move(input_map);
  return out;
}

// Composite at top level: the unit's input compartment is the skin and
// starts with the arguments and its go token.
inline CompiledUnit top_level_unit(const RecExpr& e, const std::vector<Nat>& args,
                                   const CompileOptions& opts) {
  check_args(e.arity(), args);
  UnitBuilder b(opts);
  const Ports p = b.unit(e, "$", "u", std::nullopt, {args}, std::nullopt);
  auto& skin = b.sys.at(p.in).initial;
  CompiledUnit cu;
  for (std::size_t k = 0; k < args.size(); ++k) {
    skin.add(p.arg_symbols[k], args[k]);
    cu.input_map.emplace(k + 1, std::make_pair(p.arg_symbols[k], args[k]));
  }
  skin.add(p.go);
  auto input_map = std::move(cu.input_map);
  CompiledUnit out = finish(b, p.out);
  out.input_map = std::move(input_map);
  return out;
}

}  // namespace detail

// z(x_1..x_n) = 0: skin rules a_k -> ε.
inline CompiledUnit encode_zero(std::size_t n, const std::vector<Nat>& args,
                                const CompileOptions& opts = {}) {
  detail::check_args(n, args);
  auto [b, cu] = detail::basic_shell(args, opts);
  for (std::size_t k = 1; k <= n; ++k)
    b.rule(1, EvolutionRule::catharsis(Multiset::of({{detail::arg_symbol(k).name(), 1}})));
  return detail::finish_basic(b, std::move(cu));
}

// S(x) = x + 1: a -> (a, in_2) and the one-shot ε -> (a, in_2) in the skin.
inline CompiledUnit encode_succ(Nat x, const CompileOptions& opts = {}) {
  auto [b, cu] = detail::basic_shell({x}, opts);
  const Symbol a = detail::arg_symbol(1);
  b.rule(1, EvolutionRule::ordinary(Multiset::of({{a.name(), 1}}), {{a, Target::in(2)}}));
  b.rule(1, EvolutionRule::one_shot({{a, Target::in(2)}}));
  return detail::finish_basic(b, std::move(cu));
}

// U^n_j: a_j -> (a_j, in_2), every other a_i -> ε.
inline CompiledUnit encode_proj(std::size_t n, std::size_t j, const std::vector<Nat>& args,
                                const CompileOptions& opts = {}) {
  if (j < 1 || j > n) throw ArityError("$", "index " + std::to_string(j), "1.." + std::to_string(n));
  detail::check_args(n, args);
  auto [b, cu] = detail::basic_shell(args, opts);
  for (std::size_t k = 1; k <= n; ++k) {
    const Symbol a = detail::arg_symbol(k);
    if (k == j)
      b.rule(1, EvolutionRule::ordinary(Multiset::of({{a.name(), 1}}), {{a, Target::in(2)}}));
    else
      b.rule(1, EvolutionRule::catharsis(Multiset::of({{a.name(), 1}})));
  }
  return detail::finish_basic(b, std::move(cu));
}

inline CompiledUnit encode_comp(const RecExpr& f, const std::vector<RecExpr>& gs,
                                const std::vector<Nat>& args, const CompileOptions& opts = {}) {
  return detail::top_level_unit(RecExpr::comp(f, gs), args, opts);
}

inline CompiledUnit encode_primrec(const RecExpr& f, const RecExpr& g, const std::vector<Nat>& args,
                                   const CompileOptions& opts = {}) {
  return detail::top_level_unit(RecExpr::primrec(f, g), args, opts);
}

inline CompiledUnit encode_min(const RecExpr& f, const std::vector<Nat>& args,
                               const CompileOptions& opts = {}) {
  return detail::top_level_unit(RecExpr::min(f), args, opts);
}

inline CompiledUnit compile(const RecExpr& e, const std::vector<Nat>& args,
                            const CompileOptions& opts = {}) {
  detail::check_args(e.arity(), args);
  if (const auto* z = e.as<RecExpr::Zero>()) return encode_zero(z->n, args, opts);
  if (e.as<RecExpr::Succ>()) return encode_succ(args[0], opts);
  if (const auto* u = e.as<RecExpr::Proj>()) return encode_proj(u->n, u->i, args, opts);
  return detail::top_level_unit(e, args, opts);
}

}  // namespace memrec
