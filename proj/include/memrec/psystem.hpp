#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "memrec/error.hpp"
#include "memrec/multiset.hpp"

namespace memrec {

// Compartment labels run 1..m.
using Label = std::uint32_t;

// A stage is a '/'-separated path. Compartment c belongs to stage s when its
// own stage equals s or extends it ("s/..."), so stages nest.
inline bool stage_contains(std::string_view stage, std::string_view member) {
  if (member.size() < stage.size() || member.substr(0, stage.size()) != stage)
    return false;
  return member.size() == stage.size() || member[stage.size()] == '/';
}

// Routing command attached to a produced object.
class Target {
 public:
  enum class Kind { Here, Out, In, To };

  static Target here() { return Target(Kind::Here, 0); }
  static Target out() { return Target(Kind::Out, 0); }
  static Target in(Label j) { return Target(Kind::In, j); }
  static Target to(Label j) { return Target(Kind::To, j); }

  Kind kind() const noexcept { return kind_; }
  // Destination for In/To; 0 otherwise.
  Label label() const noexcept { return label_; }

  friend bool operator==(const Target&, const Target&) = default;
  friend auto operator<=>(const Target&, const Target&) = default;

  friend std::ostream& operator<<(std::ostream& os, const Target& t) {
    switch (t.kind_) {
      case Kind::Here: return os << "here";
      case Kind::Out: return os << "out";
      case Kind::In: return os << "in_" << t.label_;
      case Kind::To: return os << "to_" << t.label_;
    }
    return os;
  }

 private:
  Target(Kind k, Label l) : kind_(k), label_(l) {}
  Kind kind_;
  Label label_;
};

enum class RuleKind { Ordinary, Catharsis, OneShotEmpty };

inline std::string_view to_string(RuleKind k) {
  switch (k) {
    case RuleKind::Ordinary: return "ordinary";
    case RuleKind::Catharsis: return "catharsis";
    case RuleKind::OneShotEmpty: return "one_shot_empty";
  }
  return "?";
}

struct Product {
  Symbol symbol;
  Target target;

  friend bool operator==(const Product&, const Product&) = default;
};

// u -> v with optional annotations:
//  - priority: an admissible rule blocks strictly lower ones in its compartment
//  - promoter: must be present, never consumed
//  - gate: admissible only while the named stage is quiescent
//  - reset: after the step, the named stage returns to its initial contents
//    and its one-shot rules are re-armed
struct EvolutionRule {
  Multiset lhs;
  std::vector<Product> rhs;
  RuleKind kind = RuleKind::Ordinary;
  int priority = 0;
  std::optional<Symbol> promoter;
  std::optional<std::string> gate;
  std::optional<std::string> reset;

  std::size_t radius() const { return static_cast<std::size_t>(lhs.cardinality()); }

  static EvolutionRule ordinary(Multiset lhs, std::vector<Product> rhs) {
    EvolutionRule r;
    r.lhs = std::move(lhs);
    r.rhs = std::move(rhs);
    return r;
  }
  static EvolutionRule catharsis(Multiset lhs) {
    EvolutionRule r;
    r.lhs = std::move(lhs);
    r.kind = RuleKind::Catharsis;
    return r;
  }
  static EvolutionRule one_shot(std::vector<Product> rhs) {
    EvolutionRule r;
    r.rhs = std::move(rhs);
    r.kind = RuleKind::OneShotEmpty;
    return r;
  }

  EvolutionRule& with_priority(int p) & { priority = p; return *this; }
  EvolutionRule&& with_priority(int p) && { priority = p; return std::move(*this); }
  EvolutionRule&& with_promoter(Symbol s) && { promoter = std::move(s); return std::move(*this); }
  EvolutionRule&& with_gate(std::string s) && { gate = std::move(s); return std::move(*this); }
  EvolutionRule&& with_reset(std::string s) && { reset = std::move(s); return std::move(*this); }

  friend bool operator==(const EvolutionRule&, const EvolutionRule&) = default;
};

inline std::ostream& operator<<(std::ostream& os, const EvolutionRule& r);

struct Compartment {
  Label label = 0;
  std::optional<Label> parent;  // empty for the skin
  std::string stage;            // defaults to the decimal label
  Multiset initial;
  std::vector<EvolutionRule> rules;

  friend bool operator==(const Compartment&, const Compartment&) = default;
};

// Graph-structured P system: a nesting tree for here/out/in plus an
// undirected channel relation for to_j.
struct PSystem {
  std::set<Symbol> alphabet;
  std::vector<Compartment> compartments;  // compartments[i].label == i + 1
  std::set<std::pair<Label, Label>> edges;  // stored as (min, max)
  Label output = 0;

  std::size_t size() const noexcept { return compartments.size(); }

  bool has_label(Label l) const noexcept { return l >= 1 && l <= compartments.size(); }

  const Compartment& at(Label l) const { return compartments.at(l - 1); }
  Compartment& at(Label l) { return compartments.at(l - 1); }

  bool has_edge(Label i, Label j) const {
    return edges.count({std::min(i, j), std::max(i, j)}) > 0;
  }

  void add_edge(Label i, Label j) { edges.insert({std::min(i, j), std::max(i, j)}); }

  bool is_elementary(Label l) const {
    for (const auto& c : compartments)
      if (c.parent && *c.parent == l) return false;
    return true;
  }

  // Appends a compartment with the next free label and returns that label.
  Label add_compartment(std::optional<Label> parent, std::string stage = {}) {
    Compartment c;
    c.label = static_cast<Label>(compartments.size() + 1);
    c.parent = parent;
    c.stage = stage.empty() ? std::to_string(c.label) : std::move(stage);
    compartments.push_back(std::move(c));
    return compartments.back().label;
  }

  // Adds every symbol mentioned in contents and rules to the alphabet.
  void close_alphabet() {
    for (const auto& c : compartments) {
      for (const auto& [s, n] : c.initial) alphabet.insert(s);
      for (const auto& r : c.rules) {
        for (const auto& [s, n] : r.lhs) alphabet.insert(s);
        for (const auto& p : r.rhs) alphabet.insert(p.symbol);
        if (r.promoter) alphabet.insert(*r.promoter);
      }
    }
  }

  friend bool operator==(const PSystem&, const PSystem&) = default;
};

struct StructuralError {
  enum class Kind {
    EmptySystem,
    LabelMismatch,
    BadParent,
    NoSkin,
    MultipleSkins,
    ParentCycle,
    BadStage,
    BadEdge,
    OutputUnknown,
    OutputNotElementary,
    KindShape,
    UnknownSymbol,
    UnknownTargetLabel,
    InvalidInTarget,
    InvalidGraphTarget,
    UnknownStage,
  };

  Kind kind;
  Label compartment = 0;            // 0 when not tied to a compartment
  std::optional<std::size_t> rule;  // index into the compartment's rules
  std::string detail;

  friend bool operator==(const StructuralError& a, const StructuralError& b) {
    return a.kind == b.kind && a.compartment == b.compartment && a.rule == b.rule;
  }
};

inline std::string_view to_string(StructuralError::Kind k);
inline std::ostream& operator<<(std::ostream& os, const StructuralError& e);

// One error per violated well-formedness condition; empty iff valid.
inline std::vector<StructuralError> validate(const PSystem& sys);

inline void require_valid(const PSystem& sys) {
  auto errors = validate(sys);
  if (!errors.empty()) {
    std::string msg = "invalid system:";
    for (const auto& e : errors) {
      msg += "\n  ";
      msg += std::string(to_string(e.kind));
      if (e.compartment) msg += " at compartment " + std::to_string(e.compartment);
      if (e.rule) msg += ", rule " + std::to_string(*e.rule);
      if (!e.detail.empty()) msg += ": " + e.detail;
    }
    throw InvalidSystem(msg);
  }
}

// ---------------------------------------------------------------------------

inline std::ostream& operator<<(std::ostream& os, const EvolutionRule& r) {
  if (r.lhs.empty())
    os << "ε";
  else
    for (const auto& [s, n] : r.lhs)
      for (Count i = 0; i < n; ++i) os << s << ' ';
  os << "->";
  if (r.rhs.empty()) os << " ε";
  for (const auto& p : r.rhs) os << " (" << p.symbol << ',' << p.target << ')';
  if (r.priority != 0) os << " [prio " << r.priority << ']';
  if (r.promoter) os << " [promoter " << *r.promoter << ']';
  if (r.gate) os << " [gate " << *r.gate << ']';
  if (r.reset) os << " [reset " << *r.reset << ']';
  return os;
}

inline std::string_view to_string(StructuralError::Kind k) {
  using K = StructuralError::Kind;
  switch (k) {
    case K::EmptySystem: return "EmptySystem";
    case K::LabelMismatch: return "LabelMismatch";
    case K::BadParent: return "BadParent";
    case K::NoSkin: return "NoSkin";
    case K::MultipleSkins: return "MultipleSkins";
    case K::ParentCycle: return "ParentCycle";
    case K::BadStage: return "BadStage";
    case K::BadEdge: return "BadEdge";
    case K::OutputUnknown: return "OutputUnknown";
    case K::OutputNotElementary: return "OutputNotElementary";
    case K::KindShape: return "KindShape";
    case K::UnknownSymbol: return "UnknownSymbol";
    case K::UnknownTargetLabel: return "UnknownTargetLabel";
    case K::InvalidInTarget: return "InvalidInTarget";
    case K::InvalidGraphTarget: return "InvalidGraphTarget";
    case K::UnknownStage: return "UnknownStage";
  }
  return "?";
}

inline std::ostream& operator<<(std::ostream& os, const StructuralError& e) {
  os << to_string(e.kind);
  if (e.compartment) os << " at (" << e.compartment;
  if (e.compartment && e.rule) os << ", " << *e.rule;
  if (e.compartment) os << ')';
  if (!e.detail.empty()) os << ": " << e.detail;
  return os;
}

inline std::vector<StructuralError> validate(const PSystem& sys) {
  using K = StructuralError::Kind;
  std::vector<StructuralError> errors;
  auto err = [&](K k, Label c, std::optional<std::size_t> r, std::string d) {
    errors.push_back(StructuralError{k, c, r, std::move(d)});
  };

  const std::size_t m = sys.size();
  if (m == 0) {
    err(K::EmptySystem, 0, std::nullopt, "no compartments");
    return errors;
  }

  for (std::size_t i = 0; i < m; ++i)
    if (sys.compartments[i].label != i + 1)
      err(K::LabelMismatch, static_cast<Label>(i + 1), std::nullopt,
          "found label " + std::to_string(sys.compartments[i].label));

  // Nesting tree.
  std::size_t skins = 0;
  bool parents_ok = true;
  for (const auto& c : sys.compartments) {
    if (!c.parent) {
      ++skins;
    } else if (!sys.has_label(*c.parent) || *c.parent == c.label) {
      err(K::BadParent, c.label, std::nullopt,
          "parent " + std::to_string(*c.parent));
      parents_ok = false;
    }
  }
  if (skins == 0) err(K::NoSkin, 0, std::nullopt, "no root compartment");
  if (skins > 1)
    err(K::MultipleSkins, 0, std::nullopt, std::to_string(skins) + " roots");
  if (parents_ok) {
    for (const auto& c : sys.compartments) {
      std::optional<Label> p = c.parent;
      std::size_t hops = 0;
      while (p && hops <= m) {
        p = sys.at(*p).parent;
        ++hops;
      }
      if (p) {
        err(K::ParentCycle, c.label, std::nullopt, "nesting is not a tree");
        break;
      }
    }
  }

  std::set<std::string> stages;
  for (const auto& c : sys.compartments) {
    if (c.stage.empty() || c.stage.front() == '/' || c.stage.back() == '/')
      err(K::BadStage, c.label, std::nullopt, "stage '" + c.stage + "'");
    stages.insert(c.stage);
  }
  auto stage_exists = [&](const std::string& s) {
    for (const auto& st : stages)
      if (stage_contains(s, st)) return true;
    return false;
  };

  for (const auto& [i, j] : sys.edges)
    if (!sys.has_label(i) || !sys.has_label(j) || i == j || i > j)
      err(K::BadEdge, 0, std::nullopt,
          "edge (" + std::to_string(i) + "," + std::to_string(j) + ")");

  if (!sys.has_label(sys.output))
    err(K::OutputUnknown, 0, std::nullopt, "output " + std::to_string(sys.output));
  else if (!sys.is_elementary(sys.output))
    err(K::OutputNotElementary, sys.output, std::nullopt,
        "output compartment contains other compartments");

  auto known = [&](const Symbol& s) { return sys.alphabet.count(s) > 0; };

  for (const auto& c : sys.compartments) {
    for (const auto& [s, n] : c.initial)
      if (!known(s))
        err(K::UnknownSymbol, c.label, std::nullopt, "initial symbol " + s.name());

    for (std::size_t r = 0; r < c.rules.size(); ++r) {
      const auto& rule = c.rules[r];
      switch (rule.kind) {
        case RuleKind::Ordinary:
          if (rule.lhs.empty())
            err(K::KindShape, c.label, r, "ordinary rule with empty left side");
          break;
        case RuleKind::Catharsis:
          if (rule.lhs.empty() || !rule.rhs.empty())
            err(K::KindShape, c.label, r,
                "catharsis needs a non-empty left and empty right side");
          break;
        case RuleKind::OneShotEmpty:
          if (!rule.lhs.empty() || rule.rhs.empty())
            err(K::KindShape, c.label, r,
                "one-shot rule needs an empty left and non-empty right side");
          break;
      }
      for (const auto& [s, n] : rule.lhs)
        if (!known(s)) err(K::UnknownSymbol, c.label, r, "lhs symbol " + s.name());
      if (rule.promoter && !known(*rule.promoter))
        err(K::UnknownSymbol, c.label, r, "promoter " + rule.promoter->name());
      for (const auto& p : rule.rhs) {
        if (!known(p.symbol))
          err(K::UnknownSymbol, c.label, r, "rhs symbol " + p.symbol.name());
        const Label j = p.target.label();
        switch (p.target.kind()) {
          case Target::Kind::Here:
          case Target::Kind::Out:
            break;
          case Target::Kind::In:
            if (!sys.has_label(j))
              err(K::UnknownTargetLabel, c.label, r, "in_" + std::to_string(j));
            else if (sys.at(j).parent != c.label)
              err(K::InvalidInTarget, c.label, r,
                  std::to_string(j) + " is not immediately inside " +
                      std::to_string(c.label));
            break;
          case Target::Kind::To:
            if (!sys.has_label(j))
              err(K::UnknownTargetLabel, c.label, r, "to_" + std::to_string(j));
            else if (!sys.has_edge(c.label, j))
              err(K::InvalidGraphTarget, c.label, r,
                  "no channel between " + std::to_string(c.label) + " and " +
                      std::to_string(j));
            break;
        }
      }
      if (rule.gate && !stage_exists(*rule.gate))
        err(K::UnknownStage, c.label, r, "gate stage '" + *rule.gate + "'");
      if (rule.reset && !stage_exists(*rule.reset))
        err(K::UnknownStage, c.label, r, "reset stage '" + *rule.reset + "'");
    }
  }
  return errors;
}

}  // namespace memrec
