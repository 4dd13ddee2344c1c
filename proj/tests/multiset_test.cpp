#include <random>

#include <gtest/gtest.h>

#include "memrec/multiset.hpp"

using namespace memrec;

namespace {

Multiset random_multiset(std::mt19937_64& rng) {
  static const char* syms[] = {"a", "b", "c", "d"};
  Multiset m;
  const auto n = rng() % 6;
  for (std::size_t i = 0; i < n; ++i) m.add(Symbol(syms[rng() % 4]), 1 + rng() % 3);
  return m;
}

}  // namespace

TEST(Symbol, RejectsEmptyAndWhitespace) {
  EXPECT_THROW(Symbol(""), InvalidSymbol);
  EXPECT_THROW(Symbol("a b"), InvalidSymbol);
  EXPECT_THROW(Symbol("a\t"), InvalidSymbol);
  EXPECT_EQ(Symbol("α1").name(), "α1");
}

TEST(Multiset, UnionExamples) {
  EXPECT_EQ(union_of(Multiset::of({{"a", 2}}), Multiset::of({{"a", 1}, {"b", 1}})),
            Multiset::of({{"a", 3}, {"b", 1}}));
  EXPECT_EQ(union_of(Multiset{}, Multiset::of({{"x", 5}})), Multiset::of({{"x", 5}}));
  EXPECT_EQ(union_of(Multiset::of({{"a", 1}}), Multiset{}), Multiset::of({{"a", 1}}));
}

TEST(Multiset, SubtractExamples) {
  EXPECT_EQ(subtract(Multiset::of({{"a", 3}, {"b", 1}}), Multiset::of({{"a", 1}})),
            Multiset::of({{"a", 2}, {"b", 1}}));
  EXPECT_TRUE(subtract(Multiset::of({{"a", 2}}), Multiset::of({{"a", 2}})).empty());
  EXPECT_THROW(subtract(Multiset::of({{"a", 1}}), Multiset::of({{"a", 2}})), NotSubMultiset);
}

TEST(Multiset, ContainsExamples) {
  EXPECT_TRUE(contains(Multiset::of({{"a", 2}, {"b", 1}}), Multiset::of({{"a", 1}, {"b", 1}})));
  EXPECT_FALSE(contains(Multiset::of({{"a", 2}}), Multiset::of({{"a", 3}})));
  EXPECT_TRUE(contains(Multiset{}, Multiset{}));
}

TEST(Multiset, NoZeroEntries) {
  Multiset m = Multiset::of({{"a", 2}});
  m.add(Symbol("b"), 0);
  m.remove(Symbol("a"), 2);
  EXPECT_TRUE(m.empty());
  EXPECT_EQ(m.distinct(), 0u);
}

TEST(Multiset, OverflowIsAnError) {
  Multiset m;
  m.add(Symbol("a"), ~Count{0});
  EXPECT_THROW(m.add(Symbol("a"), 1), CountOverflow);
}

TEST(Multiset, MaxCopies) {
  EXPECT_EQ(max_copies(Multiset::of({{"a", 7}, {"b", 2}}), Multiset::of({{"a", 3}})), 2u);
  EXPECT_EQ(max_copies(Multiset::of({{"a", 7}, {"b", 2}}), Multiset::of({{"a", 1}, {"b", 1}})), 2u);
  EXPECT_EQ(max_copies(Multiset::of({{"a", 7}}), Multiset::of({{"c", 1}})), 0u);
}

TEST(Multiset, CanonicalOrderAndPrinting) {
  Multiset m;
  m.add(Symbol("b"));
  m.add(Symbol("a"), 2);
  EXPECT_EQ(m, Multiset::of({{"a", 2}, {"b", 1}}));
  EXPECT_EQ(m.entries().front().first, Symbol("a"));
}

TEST(MultisetProperty, UnionLaws) {
  std::mt19937_64 rng(42);
  for (int i = 0; i < 500; ++i) {
    const Multiset a = random_multiset(rng), b = random_multiset(rng), c = random_multiset(rng);
    EXPECT_EQ(union_of(a, b), union_of(b, a));
    EXPECT_EQ(union_of(union_of(a, b), c), union_of(a, union_of(b, c)));
    EXPECT_EQ(union_of(a, Multiset{}), a);
    EXPECT_EQ(union_of(a, b).cardinality(), a.cardinality() + b.cardinality());
    EXPECT_EQ(subtract(union_of(a, b), b), a);
  }
}

TEST(MultisetProperty, MutualContainmentIsEquality) {
  std::mt19937_64 rng(7);
  for (int i = 0; i < 2000; ++i) {
    const Multiset a = random_multiset(rng), b = random_multiset(rng);
    EXPECT_EQ(contains(a, b) && contains(b, a), a == b);
    EXPECT_TRUE(contains(union_of(a, b), a));
  }
}
