#pragma once

// psys-v1 JSON reader/writer.
//
//   {"alphabet": [...],
//    "compartments": [{"label", "parent"?, "stage"?, "initial": {...},
//                      "rules": [{"lhs", "rhs", "kind", "priority",
//                                 "promoter"?, "gate"?, "reset"?}]}],
//    "edges": [[i, j], ...],
//    "output": i0}
//
// rhs entries are ["sym", "here"|"out"|["in", j]|["to", j]]. "stage" is only
// written when it differs from the decimal label. Output of to_json is
// canonical, so write(read(write(s))) == write(s) byte for byte.

#include <string>

#include <json.hpp>

#include "memrec/error.hpp"
#include "memrec/multiset.hpp"
#include "memrec/psystem.hpp"

namespace memrec {

using ojson = nlohmann::ordered_json;

inline ojson multiset_to_json(const Multiset& m) {
  ojson j = ojson::object();
  for (const auto& [s, n] : m) j[s.name()] = n;
  return j;
}

inline Multiset multiset_from_json(const ojson& j) {
  if (!j.is_object()) throw FormatError("multiset must be a JSON object");
  Multiset m;
  for (const auto& [k, v] : j.items()) {
    if (!v.is_number_unsigned() || v.get<Count>() == 0)
      throw FormatError("multiset count for '" + k + "' must be a positive integer");
    m.add(Symbol(k), v.get<Count>());
  }
  return m;
}

inline ojson target_to_json(const Target& t) {
  switch (t.kind()) {
    case Target::Kind::Here: return "here";
    case Target::Kind::Out: return "out";
    case Target::Kind::In: return ojson::array({"in", t.label()});
    case Target::Kind::To: return ojson::array({"to", t.label()});
  }
  return nullptr;
}

inline Target target_from_json(const ojson& j) {
  if (j.is_string()) {
    if (j == "here") return Target::here();
    if (j == "out") return Target::out();
  } else if (j.is_array() && j.size() == 2 && j[0].is_string() &&
             j[1].is_number_unsigned()) {
    const auto l = j[1].get<Label>();
    if (j[0] == "in") return Target::in(l);
    if (j[0] == "to") return Target::to(l);
  }
  throw FormatError("bad target " + j.dump());
}

inline ojson rule_to_json(const EvolutionRule& r) {
  ojson j;
  j["lhs"] = multiset_to_json(r.lhs);
  ojson rhs = ojson::array();
  for (const auto& p : r.rhs) rhs.push_back(ojson::array({p.symbol.name(), target_to_json(p.target)}));
  j["rhs"] = std::move(rhs);
  j["kind"] = std::string(to_string(r.kind));
  j["priority"] = r.priority;
  if (r.promoter) j["promoter"] = r.promoter->name();
  if (r.gate) j["gate"] = *r.gate;
  if (r.reset) j["reset"] = *r.reset;
  return j;
}

inline RuleKind rule_kind_from_string(const std::string& s) {
  if (s == "ordinary") return RuleKind::Ordinary;
  if (s == "catharsis") return RuleKind::Catharsis;
  if (s == "one_shot_empty") return RuleKind::OneShotEmpty;
  throw FormatError("unknown rule kind '" + s + "'");
}

inline EvolutionRule rule_from_json(const ojson& j) {
  if (!j.is_object()) throw FormatError("rule must be an object");
  EvolutionRule r;
  r.lhs = multiset_from_json(j.at("lhs"));
  const auto& rhs = j.at("rhs");
  if (!rhs.is_array()) throw FormatError("rule rhs must be an array");
  for (const auto& p : rhs) {
    if (!p.is_array() || p.size() != 2 || !p[0].is_string())
      throw FormatError("bad rhs entry " + p.dump());
    r.rhs.push_back(Product{Symbol(p[0].get<std::string>()), target_from_json(p[1])});
  }
  r.kind = rule_kind_from_string(j.at("kind").get<std::string>());
  r.priority = j.value("priority", 0);
  if (j.contains("promoter")) r.promoter = Symbol(j["promoter"].get<std::string>());
  if (j.contains("gate")) r.gate = j["gate"].get<std::string>();
  if (j.contains("reset")) r.reset = j["reset"].get<std::string>();
  return r;
}

inline ojson to_json(const PSystem& sys) {
  ojson j;
  ojson alphabet = ojson::array();
  for (const auto& s : sys.alphabet) alphabet.push_back(s.name());
  j["alphabet"] = std::move(alphabet);

  ojson comps = ojson::array();
  for (const auto& c : sys.compartments) {
    ojson cj;
    cj["label"] = c.label;
    if (c.parent) cj["parent"] = *c.parent;
    if (c.stage != std::to_string(c.label)) cj["stage"] = c.stage;
    cj["initial"] = multiset_to_json(c.initial);
    ojson rules = ojson::array();
    for (const auto& r : c.rules) rules.push_back(rule_to_json(r));
    cj["rules"] = std::move(rules);
    comps.push_back(std::move(cj));
  }
  j["compartments"] = std::move(comps);

  ojson edges = ojson::array();
  for (const auto& [a, b] : sys.edges) edges.push_back(ojson::array({a, b}));
  j["edges"] = std::move(edges);
  j["output"] = sys.output;
  return j;
}

inline PSystem psystem_from_json(const ojson& j) {
  try {
    PSystem sys;
    for (const auto& s : j.at("alphabet")) sys.alphabet.insert(Symbol(s.get<std::string>()));
    for (const auto& cj : j.at("compartments")) {
      Compartment c;
      c.label = cj.at("label").get<Label>();
      if (cj.contains("parent")) c.parent = cj["parent"].get<Label>();
      c.stage = cj.contains("stage") ? cj["stage"].get<std::string>()
                                     : std::to_string(c.label);
      c.initial = multiset_from_json(cj.at("initial"));
      for (const auto& rj : cj.at("rules")) c.rules.push_back(rule_from_json(rj));
      sys.compartments.push_back(std::move(c));
    }
    for (const auto& e : j.at("edges")) {
      if (!e.is_array() || e.size() != 2) throw FormatError("bad edge " + e.dump());
      sys.add_edge(e[0].get<Label>(), e[1].get<Label>());
    }
    sys.output = j.at("output").get<Label>();
    return sys;
  } catch (const nlohmann::json::exception& ex) {
    throw FormatError(std::string("psys-v1: ") + ex.what());
  } catch (const InvalidSymbol& ex) {
    throw FormatError(std::string("psys-v1: ") + ex.what());
  }
}

inline std::string serialize(const PSystem& sys) { return to_json(sys).dump(); }

inline PSystem deserialize(const std::string& text) {
  ojson j;
  try {
    j = ojson::parse(text);
  } catch (const nlohmann::json::exception& ex) {
    throw FormatError(std::string("psys-v1: ") + ex.what());
  }
  return psystem_from_json(j);
}

}  // namespace memrec
