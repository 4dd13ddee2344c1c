#pragma once

// JSON-lines trace records:
//   {"step":n,"applied":[[label,rule,count],...],"contents":{"label":{sym:count}}}
//   {"outcome":"halted","output":k} | {"outcome":"step_limit"}
// Exhaustive traces prefix every record with "branch":b.

#include <optional>
#include <ostream>
#include <string>

#include <json.hpp>

#include "memrec/engine.hpp"
#include "memrec/psystem_json.hpp"

namespace memrec {

inline ojson step_record(const Configuration& before, const RuleInstanceSet& applied,
                         std::optional<std::size_t> branch = std::nullopt) {
  ojson j;
  if (branch) j["branch"] = *branch;
  j["step"] = before.step;
  ojson app = ojson::array();
  for (const auto& [coord, n] : applied.counts) app.push_back(ojson::array({coord.first, coord.second, n}));
  j["applied"] = std::move(app);
  ojson contents = ojson::object();
  for (std::size_t i = 0; i < before.contents.size(); ++i)
    if (!before.contents[i].empty())
      contents[std::to_string(i + 1)] = multiset_to_json(before.contents[i]);
  j["contents"] = std::move(contents);
  return j;
}

inline ojson outcome_record(const Outcome& o, std::optional<std::size_t> branch = std::nullopt) {
  ojson j;
  if (branch) j["branch"] = *branch;
  if (o.halted()) {
    j["outcome"] = "halted";
    j["output"] = o.output;
  } else {
    j["outcome"] = "step_limit";
  }
  return j;
}

inline void write_trace(std::ostream& os, const Trace& t,
                        std::optional<std::size_t> branch = std::nullopt) {
  for (const auto& s : t.steps) os << step_record(s.before, s.applied, branch).dump() << '\n';
  os << outcome_record(t.outcome, branch).dump() << '\n';
}

}  // namespace memrec
