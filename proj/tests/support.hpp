#pragma once

// Shared helpers for the test suites.

#include <algorithm>
#include <cstdint>
#include <map>
#include <set>
#include <random>
#include <string>
#include <vector>

#include "memrec/engine.hpp"
#include "memrec/psystem.hpp"

namespace memrec::test_support {

// Random well-formed system: at most 3 compartments, 5 rules per
// compartment and 6 initial objects in total over {a, b, c}.
inline PSystem random_system(std::uint64_t seed, bool extensions = false) {
  std::mt19937_64 rng(seed);
  auto pick = [&](std::uint64_t n) { return static_cast<std::uint64_t>(rng() % n); };
  const char* syms[] = {"a", "b", "c"};

  PSystem sys;
  const std::size_t m = 1 + pick(3);
  sys.add_compartment(std::nullopt);
  for (std::size_t l = 2; l <= m; ++l) {
    const Label parent = static_cast<Label>(1 + pick(l - 1));
    const Label l2 = sys.add_compartment(parent);
    if (extensions) sys.at(l2).stage = sys.at(parent).stage + "/" + std::to_string(l2);
  }
  for (Label i = 1; i <= m; ++i)
    for (Label j = i + 1; j <= m; ++j)
      if (pick(2)) sys.add_edge(i, j);

  std::size_t budget = 1 + pick(6);
  while (budget-- > 0) sys.at(static_cast<Label>(1 + pick(m))).initial.add(Symbol(syms[pick(3)]));

  for (auto& c : sys.compartments) {
    std::vector<Target> targets{Target::here(), Target::out()};
    for (const auto& d : sys.compartments)
      if (d.parent && *d.parent == c.label) targets.push_back(Target::in(d.label));
    for (Label j = 1; j <= m; ++j)
      if (j != c.label && sys.has_edge(c.label, j)) targets.push_back(Target::to(j));

    const std::size_t nrules = pick(6);
    for (std::size_t r = 0; r < nrules; ++r) {
      Multiset lhs;
      const std::size_t lsize = 1 + pick(2);
      for (std::size_t k = 0; k < lsize; ++k) lhs.add(Symbol(syms[pick(3)]));
      EvolutionRule rule;
      if (pick(6) == 0) {
        rule = EvolutionRule::catharsis(lhs);
      } else {
        std::vector<Product> rhs;
        const std::size_t rsize = 1 + pick(2);
        for (std::size_t k = 0; k < rsize; ++k)
          rhs.push_back({Symbol(syms[pick(3)]), targets[pick(targets.size())]});
        rule = EvolutionRule::ordinary(lhs, std::move(rhs));
      }
      if (extensions) {
        if (pick(8) == 0) rule = EvolutionRule::one_shot({{Symbol(syms[pick(3)]), targets[pick(targets.size())]}});
        if (pick(3) == 0) rule.priority = static_cast<int>(pick(3));
        if (pick(4) == 0) rule.promoter = Symbol(syms[pick(3)]);
        if (pick(4) == 0) rule.gate = sys.at(static_cast<Label>(1 + pick(m))).stage;
        if (pick(12) == 0) rule.reset = sys.at(static_cast<Label>(1 + pick(m))).stage;
      }
      c.rules.push_back(std::move(rule));
    }
  }
  sys.output = 1;
  for (Label l = 1; l <= m; ++l)
    if (sys.is_elementary(l)) sys.output = l;
  sys.close_alphabet();
  return sys;
}

inline Count total_objects(const Configuration& cfg) {
  Count t = 0;
  for (const auto& ms : cfg.contents) t += ms.cardinality();
  return t;
}


// Independent reference for rule admissibility.
class Reference {
 public:
  explicit Reference(const PSystem& sys) : sys_(sys) {}

  bool base(const Configuration& cfg, Label l, std::size_t r) const {
    const auto& rule = sys_.at(l).rules[r];
    const auto& here = cfg.at(l);
    if (rule.promoter && here.count(*rule.promoter) == 0) return false;
    if (rule.kind == RuleKind::OneShotEmpty) return here.empty() && !cfg.fired.count({l, r});
    return contains(here, rule.lhs);
  }

  bool quiescent(const Configuration& cfg, const std::string& stage) const {
    for (const auto& c : sys_.compartments) {
      if (!stage_contains(stage, c.stage)) continue;
      for (std::size_t r = 0; r < c.rules.size(); ++r)
        if (base(cfg, c.label, r) && c.rules[r].gate != stage) return false;
    }
    return true;
  }

  bool gated(const Configuration& cfg, Label l, std::size_t r) const {
    const auto& rule = sys_.at(l).rules[r];
    return base(cfg, l, r) && (!rule.gate || quiescent(cfg, *rule.gate));
  }

  std::vector<std::size_t> admissible(const Configuration& cfg, Label l) const {
    const auto& rules = sys_.at(l).rules;
    int top = 0;
    bool any = false;
    for (std::size_t r = 0; r < rules.size(); ++r)
      if (gated(cfg, l, r)) {
        top = any ? std::max(top, rules[r].priority) : rules[r].priority;
        any = true;
      }
    std::vector<std::size_t> out;
    for (std::size_t r = 0; r < rules.size(); ++r)
      if (gated(cfg, l, r) && rules[r].priority == top) out.push_back(r);
    return out;
  }

  // Expected successor configuration, computed without the engine.
  Configuration apply(const Configuration& cfg, const RuleInstanceSet& m) const {
    Configuration next = cfg;
    for (const auto& [coord, n] : m.counts) remove_scaled(next.at(coord.first), sys_.at(coord.first).rules[coord.second].lhs, n);
    std::vector<std::string> resets;
    for (const auto& [coord, n] : m.counts) {
      const auto& rule = sys_.at(coord.first).rules[coord.second];
      for (const auto& p : rule.rhs) {
        Label dest = coord.first;
        switch (p.target.kind()) {
          case Target::Kind::Here: break;
          case Target::Kind::Out:
            if (!sys_.at(coord.first).parent) continue;
            dest = *sys_.at(coord.first).parent;
            break;
          default: dest = p.target.label();
        }
        next.at(dest).add(p.symbol, n);
      }
      if (rule.kind == RuleKind::OneShotEmpty) next.fired.insert(coord);
      if (rule.reset) resets.push_back(*rule.reset);
    }
    for (const auto& s : resets)
      for (const auto& c : sys_.compartments)
        if (stage_contains(s, c.stage)) {
          next.at(c.label) = c.initial;
          for (std::size_t r = 0; r < c.rules.size(); ++r) next.fired.erase({c.label, r});
        }
    ++next.step;
    return next;
  }

 private:
  const PSystem& sys_;
};

// Per-invariant tallies over one or more runs.
struct InvariantReport {
  // name -> (steps where the invariant was exercised, violations)
  std::map<std::string, std::pair<std::size_t, std::size_t>> tally;
  std::vector<std::string> failures;

  void note(const std::string& name, bool exercised, bool ok, const std::string& detail = {}) {
    auto& t = tally[name];
    if (exercised) ++t.first;
    if (!ok) {
      ++t.second;
      if (failures.size() < 20) failures.push_back(name + ": " + detail);
    }
  }
  std::size_t violations() const {
    std::size_t v = 0;
    for (const auto& [k, t] : tally) v += t.second;
    return v;
  }
};

// Checks one engine step against the reference. Returns the set of
// invariant names that this step exercised.
inline std::set<std::string> check_step(const Engine& engine, const Configuration& cfg,
                                        const RuleInstanceSet& m, const Configuration& next,
                                        InvariantReport& rep) {
  const PSystem& sys = engine.system();
  const Reference ref(sys);
  std::set<std::string> used{"admissibility", "maximality", "conservation"};
  const std::string where = " at step " + std::to_string(cfg.step);

  const auto adm = engine.admissible(cfg);
  bool adm_ok = true;
  for (Label l = 1; l <= sys.size(); ++l) adm_ok = adm_ok && adm[l - 1] == ref.admissible(cfg, l);
  rep.note("admissibility", true, adm_ok, "engine disagrees with reference" + where);

  // Maximality.
  const auto sets = engine.enumerate_maximal_sets(cfg, 100000);
  const bool member = std::find(sets.begin(), sets.end(), m) != sets.end();
  Configuration residual = cfg;
  for (const auto& [c, n] : m.counts) remove_scaled(residual.at(c.first), sys.at(c.first).rules[c.second].lhs, n);
  bool inextensible = true;
  for (Label l = 1; l <= sys.size(); ++l)
    for (std::size_t r : ref.admissible(cfg, l)) {
      const auto& rule = sys.at(l).rules[r];
      const bool more = rule.kind == RuleKind::OneShotEmpty ? m.counts.count({l, r}) == 0
                                                           : contains(residual.at(l), rule.lhs);
      if (more) inextensible = false;
    }
  rep.note("maximality", true, member && inextensible, "applied set not maximal" + where);

  // Conservation, including the reset rule.
  const Configuration expect = ref.apply(cfg, m);
  rep.note("conservation", true, expect.contents == next.contents, "contents differ" + where);

  // One-shot at most once per arming.
  bool one_ok = true, one_used = false;
  for (const auto& [c, n] : m.counts)
    if (sys.at(c.first).rules[c.second].kind == RuleKind::OneShotEmpty) {
      one_used = true;
      one_ok = one_ok && n == 1 && !cfg.fired.count(c);
    }
  one_ok = one_ok && expect.fired == next.fired;
  rep.note("one_shot", one_used, one_ok, "one-shot fired twice or flags wrong" + where);
  if (one_used) used.insert("one_shot");

  // Strong priority blocking.
  bool pri_ok = true, pri_used = false;
  for (const auto& [c, n] : m.counts) {
    const auto& rules = sys.at(c.first).rules;
    for (std::size_t r = 0; r < rules.size(); ++r) {
      if (rules[r].priority != rules[c.second].priority) pri_used = true;
      if (rules[r].priority > rules[c.second].priority && ref.gated(cfg, c.first, r)) pri_ok = false;
    }
  }
  rep.note("priority", pri_used, pri_ok, "lower-priority rule beside admissible higher one" + where);
  if (pri_used) used.insert("priority");

  // Promoters are never consumed.
  bool pro_ok = true, pro_used = false;
  for (const auto& [c, n] : m.counts) {
    const auto& rule = sys.at(c.first).rules[c.second];
    if (!rule.promoter) continue;
    pro_used = true;
    pro_ok = pro_ok && cfg.at(c.first).count(*rule.promoter) > 0 &&
             expect.at(c.first).count(*rule.promoter) == next.at(c.first).count(*rule.promoter);
  }
  rep.note("promoter", pro_used, pro_ok, "promoter missing or consumed" + where);
  if (pro_used) used.insert("promoter");

  // Gated rules fire only on quiescent stages.
  bool gate_ok = true, gate_used = false;
  for (const auto& [c, n] : m.counts) {
    const auto& rule = sys.at(c.first).rules[c.second];
    if (!rule.gate) continue;
    gate_used = true;
    gate_ok = gate_ok && ref.quiescent(cfg, *rule.gate);
  }
  rep.note("gate", gate_used, gate_ok, "gated rule fired on a busy stage" + where);
  if (gate_used) used.insert("gate");
  return used;
}

// Runs sys under seed for up to max_steps, checking every step; stops early
// once the configuration grows past 30 objects to keep enumeration small.
// Returns the invariants exercised at least once.
inline std::set<std::string> check_run(const PSystem& sys, std::uint64_t seed, std::uint64_t max_steps,
                                       InvariantReport& rep) {
  const Engine engine(sys);
  std::set<std::string> used;
  Configuration cfg = engine.initial_configuration();
  for (std::uint64_t i = 0; i < max_steps && !engine.is_halted(cfg) && total_objects(cfg) <= 30; ++i) {
    const RuleInstanceSet m = engine.select_maximal(cfg, seed);
    const Configuration next = engine.apply_step(cfg, m);
    used.merge(check_step(engine, cfg, m, next, rep));
    cfg = next;
  }
  return used;
}

}  // namespace memrec::test_support
