#pragma once

#include <algorithm>
#include <compare>
#include <cstdint>
#include <initializer_list>
#include <limits>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "memrec/error.hpp"

namespace memrec {

using Count = std::uint64_t;

// An object of the alphabet. Non-empty, no whitespace.
class Symbol {
 public:
  explicit Symbol(std::string name) : name_(std::move(name)) {
    if (!is_valid(name_)) throw InvalidSymbol("invalid symbol '" + name_ + "'");
  }
  explicit Symbol(std::string_view name) : Symbol(std::string(name)) {}
  explicit Symbol(const char* name) : Symbol(std::string(name)) {}

  static bool is_valid(std::string_view name) noexcept {
    if (name.empty()) return false;
    return std::none_of(name.begin(), name.end(), [](unsigned char c) {
      return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' ||
             c == '\f';
    });
  }

  const std::string& name() const noexcept { return name_; }

  friend bool operator==(const Symbol&, const Symbol&) = default;
  friend auto operator<=>(const Symbol&, const Symbol&) = default;

  friend std::ostream& operator<<(std::ostream& os, const Symbol& s) {
    return os << s.name_;
  }

 private:
  std::string name_;
};

inline Count checked_add(Count a, Count b) {
  if (a > std::numeric_limits<Count>::max() - b)
    throw CountOverflow("multiplicity overflow");
  return a + b;
}

inline Count checked_mul(Count a, Count b) {
  if (a != 0 && b > std::numeric_limits<Count>::max() / a)
    throw CountOverflow("multiplicity overflow");
  return a * b;
}

// Finite multiset over symbols, kept as a sorted symbol->count association
// with no zero entries. Equality and ordering are structural.
class Multiset {
 public:
  using Entry = std::pair<Symbol, Count>;

  Multiset() = default;

  static Multiset of(std::initializer_list<std::pair<std::string_view, Count>> xs) {
    Multiset m;
    for (const auto& [name, n] : xs) m.add(Symbol(name), n);
    return m;
  }

  Count count(const Symbol& s) const noexcept {
    auto it = find(s);
    return it != entries_.end() && it->first == s ? it->second : 0;
  }

  void add(const Symbol& s, Count n = 1) {
    if (n == 0) return;
    auto it = find(s);
    if (it != entries_.end() && it->first == s)
      it->second = checked_add(it->second, n);
    else
      entries_.insert(it, Entry{s, n});
  }

  // Removes n copies of s; throws NotSubMultiset if fewer are present.
  void remove(const Symbol& s, Count n = 1) {
    if (n == 0) return;
    auto it = find(s);
    if (it == entries_.end() || !(it->first == s) || it->second < n)
      throw NotSubMultiset("cannot remove " + std::to_string(n) + " x " +
                           s.name());
    it->second -= n;
    if (it->second == 0) entries_.erase(it);
  }

  Count cardinality() const {
    Count total = 0;
    for (const auto& e : entries_) total = checked_add(total, e.second);
    return total;
  }

  bool empty() const noexcept { return entries_.empty(); }
  std::size_t distinct() const noexcept { return entries_.size(); }
  void clear() noexcept { entries_.clear(); }

  std::span<const Entry> entries() const noexcept { return entries_; }
  auto begin() const noexcept { return entries_.begin(); }
  auto end() const noexcept { return entries_.end(); }

  friend bool operator==(const Multiset&, const Multiset&) = default;
  friend auto operator<=>(const Multiset&, const Multiset&) = default;

  std::string to_string() const {
    std::ostringstream os;
    os << *this;
    return os.str();
  }

  friend std::ostream& operator<<(std::ostream& os, const Multiset& m) {
    os << '{';
    bool first = true;
    for (const auto& [s, n] : m.entries_) {
      if (!first) os << ", ";
      first = false;
      os << s << ':' << n;
    }
    return os << '}';
  }

 private:
  std::vector<Entry>::iterator find(const Symbol& s) {
    return std::lower_bound(
        entries_.begin(), entries_.end(), s,
        [](const Entry& e, const Symbol& k) { return e.first < k; });
  }
  std::vector<Entry>::const_iterator find(const Symbol& s) const {
    return std::lower_bound(
        entries_.begin(), entries_.end(), s,
        [](const Entry& e, const Symbol& k) { return e.first < k; });
  }

  std::vector<Entry> entries_;
};

// Pointwise sum.
inline Multiset union_of(const Multiset& a, const Multiset& b) {
  Multiset out = a;
  for (const auto& [s, n] : b) out.add(s, n);
  return out;
}

// True iff every count in b is at most the count in a.
inline bool contains(const Multiset& a, const Multiset& b) noexcept {
  auto ia = a.begin();
  for (const auto& [s, n] : b) {
    while (ia != a.end() && ia->first < s) ++ia;
    if (ia == a.end() || !(ia->first == s) || ia->second < n) return false;
  }
  return true;
}

// Pointwise difference; requires contains(a, b).
inline Multiset subtract(const Multiset& a, const Multiset& b) {
  if (!contains(a, b))
    throw NotSubMultiset(b.to_string() + " is not contained in " + a.to_string());
  Multiset out = a;
  for (const auto& [s, n] : b) out.remove(s, n);
  return out;
}

// Number of disjoint copies of lhs that fit into contents. Unbounded
// (max Count) for an empty lhs.
inline Count max_copies(const Multiset& contents, const Multiset& lhs) noexcept {
  Count best = std::numeric_limits<Count>::max();
  for (const auto& [s, n] : lhs) best = std::min(best, contents.count(s) / n);
  return best;
}

// Adds k copies of b to a in place.
inline void add_scaled(Multiset& a, const Multiset& b, Count k) {
  if (k == 0) return;
  for (const auto& [s, n] : b) a.add(s, checked_mul(n, k));
}

inline void remove_scaled(Multiset& a, const Multiset& b, Count k) {
  if (k == 0) return;
  for (const auto& [s, n] : b) a.remove(s, checked_mul(n, k));
}

}  // namespace memrec
