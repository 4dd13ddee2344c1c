#pragma once

// Maximally parallel execution of a PSystem.
//
// Admissibility is decided once per step against the contents at the start of
// the step:
//   base(r)     lhs fits the contents (ordinary/catharsis), or the compartment
//               is empty and r has not fired since its last arming (one-shot);
//               and the promoter, if any, is present.
//   quiet(s)    no rule with base(r) lives in a compartment of stage s unless
//               that rule is itself gated on s.
//   admissible  base(r), quiet(gate) when gated, and no admissible rule of
//               strictly higher priority in the same compartment.
// A step applies a maximal multiset of admissible rule instances: nothing
// admissible still fits into what the chosen instances leave behind.

#include <algorithm>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <utility>
#include <variant>
#include <vector>

#include "memrec/error.hpp"
#include "memrec/multiset.hpp"
#include "memrec/psystem.hpp"

namespace memrec {

// (compartment label, rule index)
using RuleCoord = std::pair<Label, std::size_t>;

struct Configuration {
  std::vector<Multiset> contents;  // contents[l - 1] for label l
  std::set<RuleCoord> fired;       // consumed one-shot rules
  std::uint64_t step = 0;

  const Multiset& at(Label l) const { return contents.at(l - 1); }
  Multiset& at(Label l) { return contents.at(l - 1); }

  friend bool operator==(const Configuration&, const Configuration&) = default;
  friend auto operator<=>(const Configuration&, const Configuration&) = default;
};

// How many times each rule fires in one step.
struct RuleInstanceSet {
  std::map<RuleCoord, Count> counts;

  bool empty() const noexcept { return counts.empty(); }
  Count total() const {
    Count t = 0;
    for (const auto& [c, n] : counts) t = checked_add(t, n);
    return t;
  }

  friend bool operator==(const RuleInstanceSet&, const RuleInstanceSet&) = default;
  friend auto operator<=>(const RuleInstanceSet&, const RuleInstanceSet&) = default;
};

struct SeededRandom {
  std::uint64_t seed = 0;
};

struct Exhaustive {
  std::size_t max_branches = 1000;
};

using Strategy = std::variant<SeededRandom, Exhaustive>;

inline constexpr std::uint64_t kDefaultMaxSteps = 1'000'000;

struct Outcome {
  enum class Kind { Halted, StepLimitExceeded };
  Kind kind = Kind::Halted;
  Count output = 0;         // cardinality of the output compartment at halt
  std::uint64_t steps = 0;  // applied steps

  bool halted() const noexcept { return kind == Kind::Halted; }
  friend bool operator==(const Outcome&, const Outcome&) = default;
};

struct TraceStep {
  Configuration before;
  RuleInstanceSet applied;

  friend bool operator==(const TraceStep&, const TraceStep&) = default;
};

struct Trace {
  std::vector<TraceStep> steps;
  Configuration final;
  Outcome outcome;

  friend bool operator==(const Trace&, const Trace&) = default;
};

// splitmix64; small, portable and fully specified, so traces are identical
// across standard libraries.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() noexcept {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  // Uniform in [0, n), n >= 1.
  std::uint64_t below(std::uint64_t n) noexcept {
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % n;
    std::uint64_t x;
    do x = next();
    while (x >= limit);
    return x % n;
  }

 private:
  std::uint64_t state_;
};

// Per-step generator: depends only on (seed, step).
inline SplitMix64 step_rng(std::uint64_t seed, std::uint64_t step) {
  SplitMix64 mix(seed ^ (step * 0xD1B54A32D192ED03ULL));
  return SplitMix64(mix.next());
}

class Engine {
 public:
  // Throws InvalidSystem unless validate(sys) is empty. The engine keeps a
  // reference; sys must outlive it.
  explicit Engine(const PSystem& sys) : sys_(sys) {
    require_valid(sys);
    const std::size_t m = sys.size();
    rule_info_.resize(m);
    for (const auto& c : sys.compartments) {
      auto& info = rule_info_[c.label - 1];
      for (const auto& r : c.rules) {
        RuleInfo ri;
        if (r.gate) ri.gate = stage_index(*r.gate);
        if (r.reset) ri.reset = stage_index(*r.reset);
        info.push_back(ri);
      }
    }
  }

  const PSystem& system() const noexcept { return sys_; }

  Configuration initial_configuration() const {
    Configuration cfg;
    cfg.contents.reserve(sys_.size());
    for (const auto& c : sys_.compartments) cfg.contents.push_back(c.initial);
    return cfg;
  }

  // Admissible rule indices of every compartment, in label order.
  std::vector<std::vector<std::size_t>> admissible(const Configuration& cfg) const {
    check_shape(cfg);
    const std::size_t m = sys_.size();
    std::vector<std::vector<char>> base(m);
    for (std::size_t i = 0; i < m; ++i) {
      const auto& comp = sys_.compartments[i];
      base[i].resize(comp.rules.size());
      for (std::size_t r = 0; r < comp.rules.size(); ++r)
        base[i][r] = base_admissible(cfg, comp, r);
    }

    std::vector<signed char> quiet(stages_.size(), -1);
    auto is_quiet = [&](std::size_t s) {
      if (quiet[s] < 0) {
        bool q = true;
        for (Label l : stages_[s].members) {
          const auto& infos = rule_info_[l - 1];
          for (std::size_t r = 0; r < infos.size() && q; ++r)
            if (base[l - 1][r] && infos[r].gate != static_cast<int>(s)) q = false;
          if (!q) break;
        }
        quiet[s] = q ? 1 : 0;
      }
      return quiet[s] == 1;
    };

    std::vector<std::vector<std::size_t>> out(m);
    for (std::size_t i = 0; i < m; ++i) {
      const auto& comp = sys_.compartments[i];
      int best = std::numeric_limits<int>::min();
      std::vector<std::size_t> cand;
      for (std::size_t r = 0; r < comp.rules.size(); ++r) {
        if (!base[i][r]) continue;
        const int g = rule_info_[i][r].gate;
        if (g >= 0 && !is_quiet(static_cast<std::size_t>(g))) continue;
        cand.push_back(r);
        best = std::max(best, comp.rules[r].priority);
      }
      for (std::size_t r : cand)
        if (comp.rules[r].priority == best) out[i].push_back(r);
    }
    return out;
  }

  std::vector<std::size_t> admissible_rules(const Configuration& cfg, Label label) const {
    if (!sys_.has_label(label)) throw Error("unknown compartment " + std::to_string(label));
    return admissible(cfg)[label - 1];
  }

  bool is_halted(const Configuration& cfg) const {
    for (const auto& rs : admissible(cfg))
      if (!rs.empty()) return false;
    return true;
  }

  // Every maximal instance set, sorted canonically. Throws
  // BranchLimitExceeded when there are more than max_branches.
  std::vector<RuleInstanceSet> enumerate_maximal_sets(
      const Configuration& cfg,
      std::size_t max_branches = std::numeric_limits<std::size_t>::max()) const {
    const auto adm = admissible(cfg);
    std::vector<RuleInstanceSet> acc{RuleInstanceSet{}};
    for (std::size_t i = 0; i < adm.size(); ++i) {
      if (adm[i].empty()) continue;
      const Label label = static_cast<Label>(i + 1);
      auto local = enumerate_compartment(cfg.at(label), label, adm[i], max_branches);
      if (local.size() > 1 && acc.size() > max_branches / local.size())
        throw BranchLimitExceeded(max_branches);
      std::vector<RuleInstanceSet> next;
      next.reserve(acc.size() * local.size());
      for (const auto& a : acc)
        for (const auto& b : local) {
          RuleInstanceSet merged = a;
          merged.counts.insert(b.counts.begin(), b.counts.end());
          next.push_back(std::move(merged));
        }
      acc = std::move(next);
    }
    if (acc.size() > max_branches) throw BranchLimitExceeded(max_branches);
    std::sort(acc.begin(), acc.end());
    return acc;
  }

  // Seeded choice of one maximal set. Admissible (label, rule) pairs are
  // scanned in order; while more than one still fits the residual contents
  // one is drawn uniformly and fired once. A lone remaining pair is
  // saturated without a draw.
  RuleInstanceSet select_maximal(const Configuration& cfg, std::uint64_t seed) const {
    const auto adm = admissible(cfg);
    return select_from(cfg, adm, seed);
  }

  RuleInstanceSet select_maximal(const Configuration& cfg, const Strategy& strategy) const {
    if (const auto* r = std::get_if<SeededRandom>(&strategy))
      return select_maximal(cfg, r->seed);
    const auto& ex = std::get<Exhaustive>(strategy);
    return enumerate_maximal_sets(cfg, ex.max_branches).front();
  }

  // Checked application; throws IllegalInstanceSet if m is not an
  // admissible maximal set for cfg.
  Configuration apply_step(const Configuration& cfg, const RuleInstanceSet& m) const {
    check_instance_set(cfg, m);
    return apply_unchecked(cfg, m);
  }

  // Runs to halting or max_steps. The observer sees (before, applied) for
  // every step taken.
  template <class Observer>
  Outcome run_observed(Configuration cfg, const Strategy& strategy, std::uint64_t max_steps,
                       Observer&& observe, Configuration* final_cfg = nullptr) const {
    Outcome out;
    const std::uint64_t start = cfg.step;
    while (true) {
      const auto adm = admissible(cfg);
      const bool any = std::any_of(adm.begin(), adm.end(),
                                   [](const auto& v) { return !v.empty(); });
      if (!any) {
        out.kind = Outcome::Kind::Halted;
        out.output = cfg.at(sys_.output).cardinality();
        break;
      }
      if (cfg.step - start >= max_steps) {
        out.kind = Outcome::Kind::StepLimitExceeded;
        break;
      }
      RuleInstanceSet chosen;
      if (const auto* r = std::get_if<SeededRandom>(&strategy))
        chosen = select_from(cfg, adm, r->seed);
      else
        chosen = enumerate_maximal_sets(cfg, std::get<Exhaustive>(strategy).max_branches)
                     .front();
      Configuration next = apply_unchecked(cfg, chosen);
      observe(static_cast<const Configuration&>(cfg),
              static_cast<const RuleInstanceSet&>(chosen));
      cfg = std::move(next);
    }
    out.steps = cfg.step - start;
    if (final_cfg) *final_cfg = std::move(cfg);
    return out;
  }

  Outcome run_outcome(const Strategy& strategy, std::uint64_t max_steps = kDefaultMaxSteps) const {
    return run_observed(initial_configuration(), strategy, max_steps,
                        [](const Configuration&, const RuleInstanceSet&) {});
  }

  Trace run(const Strategy& strategy, std::uint64_t max_steps = kDefaultMaxSteps) const {
    Trace t;
    t.outcome = run_observed(
        initial_configuration(), strategy, max_steps,
        [&](const Configuration& before, const RuleInstanceSet& applied) {
          t.steps.push_back(TraceStep{before, applied});
        },
        &t.final);
    return t;
  }

  // Every maximal-parallel computation path from the initial configuration,
  // depth first in canonical order. Throws BranchLimitExceeded when more
  // than max_branches paths exist.
  std::vector<Trace> explore(std::size_t max_branches,
                             std::uint64_t max_steps = kDefaultMaxSteps) const {
    std::vector<Trace> branches;
    struct Frame {
      std::vector<TraceStep> path;
      Configuration cfg;
    };
    std::vector<Frame> stack;
    stack.push_back(Frame{{}, initial_configuration()});
    while (!stack.empty()) {
      Frame f = std::move(stack.back());
      stack.pop_back();
      auto sets = enumerate_maximal_sets(f.cfg, max_branches);
      const bool halted = sets.size() == 1 && sets.front().empty();
      if (halted || f.path.size() >= max_steps) {
        Trace t;
        t.outcome.kind = halted ? Outcome::Kind::Halted : Outcome::Kind::StepLimitExceeded;
        t.outcome.output = halted ? f.cfg.at(sys_.output).cardinality() : 0;
        t.outcome.steps = f.path.size();
        t.steps = std::move(f.path);
        t.final = std::move(f.cfg);
        branches.push_back(std::move(t));
        if (branches.size() > max_branches) throw BranchLimitExceeded(max_branches);
        continue;
      }
      // Every pending frame ends in at least one leaf.
      if (branches.size() + stack.size() + sets.size() > max_branches)
        throw BranchLimitExceeded(max_branches);
      for (auto it = sets.rbegin(); it != sets.rend(); ++it) {
        Frame child;
        child.path = f.path;
        child.path.push_back(TraceStep{f.cfg, *it});
        child.cfg = apply_unchecked(f.cfg, *it);
        stack.push_back(std::move(child));
      }
    }
    return branches;
  }

 private:
  struct RuleInfo {
    int gate = -1;
    int reset = -1;
  };
  struct StageInfo {
    std::string name;
    std::vector<Label> members;
  };

  int stage_index(const std::string& name) {
    for (std::size_t i = 0; i < stages_.size(); ++i)
      if (stages_[i].name == name) return static_cast<int>(i);
    StageInfo s{name, {}};
    for (const auto& c : sys_.compartments)
      if (stage_contains(name, c.stage)) s.members.push_back(c.label);
    stages_.push_back(std::move(s));
    return static_cast<int>(stages_.size() - 1);
  }

  void check_shape(const Configuration& cfg) const {
    if (cfg.contents.size() != sys_.size())
      throw Error("configuration does not match the system (" +
                  std::to_string(cfg.contents.size()) + " vs " +
                  std::to_string(sys_.size()) + " compartments)");
  }

  bool base_admissible(const Configuration& cfg, const Compartment& comp, std::size_t r) const {
    const auto& rule = comp.rules[r];
    const Multiset& here = cfg.contents[comp.label - 1];
    if (rule.kind == RuleKind::OneShotEmpty) {
      if (!here.empty() || cfg.fired.count({comp.label, r})) return false;
    } else if (!contains(here, rule.lhs)) {
      return false;
    }
    return !rule.promoter || here.count(*rule.promoter) > 0;
  }

  std::vector<RuleInstanceSet> enumerate_compartment(const Multiset& contents, Label label,
                                                     const std::vector<std::size_t>& rules,
                                                     std::size_t max_branches) const {
    const auto& comp = sys_.at(label);
    std::vector<RuleInstanceSet> out;
    std::vector<Count> chosen(rules.size(), 0);
    Multiset residual = contents;

    auto fits = [&](std::size_t k) {
      const auto& rule = comp.rules[rules[k]];
      if (rule.kind == RuleKind::OneShotEmpty) return chosen[k] == 0;
      return contains(residual, rule.lhs);
    };

    // Depth-first over count vectors; a leaf is kept iff nothing fits.
    auto rec = [&](auto&& self, std::size_t k) -> void {
      if (k == rules.size()) {
        for (std::size_t i = 0; i < rules.size(); ++i)
          if (fits(i)) return;
        RuleInstanceSet s;
        for (std::size_t i = 0; i < rules.size(); ++i)
          if (chosen[i]) s.counts[{label, rules[i]}] = chosen[i];
        out.push_back(std::move(s));
        if (out.size() > max_branches) throw BranchLimitExceeded(max_branches);
        return;
      }
      const auto& rule = comp.rules[rules[k]];
      const Count most =
          rule.kind == RuleKind::OneShotEmpty ? 1 : max_copies(residual, rule.lhs);
      for (Count n = 0; n <= most; ++n) {
        chosen[k] = n;
        remove_scaled(residual, rule.lhs, n);
        self(self, k + 1);
        add_scaled(residual, rule.lhs, n);
      }
      chosen[k] = 0;
    };
    rec(rec, 0);
    return out;
  }

  RuleInstanceSet select_from(const Configuration& cfg,
                              const std::vector<std::vector<std::size_t>>& adm,
                              std::uint64_t seed) const {
    struct Pair {
      Label label;
      std::size_t rule;
    };
    std::vector<Pair> live;
    std::unordered_map<Label, Multiset> residual;
    RuleInstanceSet chosen;
    for (std::size_t i = 0; i < adm.size(); ++i) {
      if (adm[i].empty()) continue;
      const Label l = static_cast<Label>(i + 1);
      residual.emplace(l, cfg.contents[i]);
      for (std::size_t r : adm[i]) live.push_back(Pair{l, r});
    }

    auto fits = [&](const Pair& p) {
      const auto& rule = sys_.at(p.label).rules[p.rule];
      if (rule.kind == RuleKind::OneShotEmpty)
        return chosen.counts.find({p.label, p.rule}) == chosen.counts.end();
      return contains(residual.at(p.label), rule.lhs);
    };

    SplitMix64 rng = step_rng(seed, cfg.step);
    while (!live.empty()) {
      std::size_t pick = 0;
      Count times = 1;
      if (live.size() > 1) {
        pick = static_cast<std::size_t>(rng.below(live.size()));
      } else {
        const auto& rule = sys_.at(live[0].label).rules[live[0].rule];
        times = rule.kind == RuleKind::OneShotEmpty
                    ? 1
                    : max_copies(residual.at(live[0].label), rule.lhs);
      }
      const Pair p = live[pick];
      const auto& rule = sys_.at(p.label).rules[p.rule];
      remove_scaled(residual.at(p.label), rule.lhs, times);
      auto& n = chosen.counts[{p.label, p.rule}];
      n = checked_add(n, times);
      // Only pairs of the same compartment can have stopped fitting.
      live.erase(std::remove_if(live.begin(), live.end(),
                                [&](const Pair& q) { return q.label == p.label && !fits(q); }),
                 live.end());
    }
    return chosen;
  }

  void check_instance_set(const Configuration& cfg, const RuleInstanceSet& m) const {
    const auto adm = admissible(cfg);
    std::vector<Multiset> residual = cfg.contents;
    for (const auto& [coord, n] : m.counts) {
      const auto& [label, r] = coord;
      if (!sys_.has_label(label) || r >= sys_.at(label).rules.size())
        throw IllegalInstanceSet("unknown rule (" + std::to_string(label) + ", " +
                                 std::to_string(r) + ")");
      const auto& a = adm[label - 1];
      if (n == 0 || std::find(a.begin(), a.end(), r) == a.end())
        throw IllegalInstanceSet("rule (" + std::to_string(label) + ", " +
                                 std::to_string(r) + ") is not admissible");
      const auto& rule = sys_.at(label).rules[r];
      if (rule.kind == RuleKind::OneShotEmpty && n > 1)
        throw IllegalInstanceSet("one-shot rule applied more than once");
      try {
        remove_scaled(residual[label - 1], rule.lhs, n);
      } catch (const NotSubMultiset&) {
        throw IllegalInstanceSet("instances exceed the contents of compartment " +
                                 std::to_string(label));
      }
    }
    for (std::size_t i = 0; i < adm.size(); ++i) {
      const Label label = static_cast<Label>(i + 1);
      for (std::size_t r : adm[i]) {
        const auto& rule = sys_.at(label).rules[r];
        const bool extendable = rule.kind == RuleKind::OneShotEmpty
                                    ? m.counts.count({label, r}) == 0
                                    : contains(residual[i], rule.lhs);
        if (extendable)
          throw IllegalInstanceSet("instance set is not maximal: rule (" +
                                   std::to_string(label) + ", " + std::to_string(r) +
                                   ") still fits");
      }
    }
  }

  Configuration apply_unchecked(const Configuration& cfg, const RuleInstanceSet& m) const {
    Configuration next = cfg;
    std::vector<int> resets;
    // Consume first, then place, so products never feed this step.
    for (const auto& [coord, n] : m.counts) {
      const auto& rule = sys_.at(coord.first).rules[coord.second];
      remove_scaled(next.at(coord.first), rule.lhs, n);
    }
    for (const auto& [coord, n] : m.counts) {
      const auto& [label, r] = coord;
      const auto& rule = sys_.at(label).rules[r];
      for (const auto& p : rule.rhs) {
        switch (p.target.kind()) {
          case Target::Kind::Here:
            next.at(label).add(p.symbol, n);
            break;
          case Target::Kind::Out:
            if (const auto parent = sys_.at(label).parent) next.at(*parent).add(p.symbol, n);
            break;  // the environment is a sink
          case Target::Kind::In:
          case Target::Kind::To:
            next.at(p.target.label()).add(p.symbol, n);
            break;
        }
      }
      if (rule.kind == RuleKind::OneShotEmpty) next.fired.insert(coord);
      const int reset = rule_info_[label - 1][r].reset;
      if (reset >= 0) resets.push_back(reset);
    }
    for (int s : resets) {
      for (Label l : stages_[static_cast<std::size_t>(s)].members) {
        next.at(l) = sys_.at(l).initial;
        auto lo = next.fired.lower_bound({l, 0});
        auto hi = next.fired.lower_bound({l + 1, 0});
        next.fired.erase(lo, hi);
      }
    }
    ++next.step;
    return next;
  }

  const PSystem& sys_;
  std::vector<std::vector<RuleInfo>> rule_info_;
  std::vector<StageInfo> stages_;
};

// Free-function forms.

inline Configuration initial_configuration(const PSystem& sys) {
  return Engine(sys).initial_configuration();
}

inline std::vector<std::size_t> admissible_rules(const Configuration& cfg, const PSystem& sys,
                                                 Label label) {
  return Engine(sys).admissible_rules(cfg, label);
}

inline std::vector<RuleInstanceSet> enumerate_maximal_sets(
    const Configuration& cfg, const PSystem& sys,
    std::size_t max_branches = std::numeric_limits<std::size_t>::max()) {
  return Engine(sys).enumerate_maximal_sets(cfg, max_branches);
}

inline RuleInstanceSet select_maximal(const Configuration& cfg, const PSystem& sys,
                                      const Strategy& strategy) {
  return Engine(sys).select_maximal(cfg, strategy);
}

inline Configuration apply_step(const Configuration& cfg, const PSystem& sys,
                                const RuleInstanceSet& m) {
  return Engine(sys).apply_step(cfg, m);
}

inline Trace run(const PSystem& sys, const Strategy& strategy,
                 std::uint64_t max_steps = kDefaultMaxSteps) {
  return Engine(sys).run(strategy, max_steps);
}

}  // namespace memrec
