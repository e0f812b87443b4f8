#include "definetti/multiset.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <map>
#include <set>

using namespace definetti;

namespace {

const Alphabet kBool({"t", "f"});

Multiset ms(std::vector<std::size_t> c) { return Multiset(std::move(c)); }

// Independent count: sorted k-ary words of length n.
std::size_t count_sorted_words(std::size_t k, std::size_t n) {
  std::size_t count = 0;
  for (std::size_t r = 0; r < tuple_count(k, n); ++r) {
    const auto w = tuple_at(r, k, n);
    if (std::is_sorted(w.begin(), w.end())) ++count;
  }
  return count;
}

}  // namespace

TEST(Alphabet, RejectsDuplicatesAndEmpty) {
  EXPECT_THROW(Alphabet({"a", "a"}), std::invalid_argument);
  EXPECT_THROW(Alphabet(std::vector<std::string>{}), std::invalid_argument);
  EXPECT_EQ(kBool.index_of("f"), 1u);
  EXPECT_THROW(kBool.index_of("x"), std::invalid_argument);
}

TEST(EnumerateMultisets, BoolPairs) {
  const auto out = enumerate_multisets(kBool, 2);
  ASSERT_EQ(out.size(), 3u);
  EXPECT_EQ(out[0], ms({2, 0}));
  EXPECT_EQ(out[1], ms({1, 1}));
  EXPECT_EQ(out[2], ms({0, 2}));
  EXPECT_EQ(out[1].to_string(kBool), "[t,f]");
}

TEST(EnumerateMultisets, SizeZeroIsTheEmptyMultiset) {
  for (std::size_t k = 1; k <= 4; ++k) {
    const auto out = enumerate_multisets(k, 0);
    ASSERT_EQ(out.size(), 1u);
    EXPECT_EQ(out[0].size(), 0u);
  }
}

TEST(EnumerateMultisets, CountMatchesBruteForce) {
  EXPECT_EQ(enumerate_multisets(Alphabet({"a", "b", "c"}), 2).size(), count_sorted_words(3, 2));
  EXPECT_EQ(count_sorted_words(3, 2), 6u);
  for (std::size_t k = 1; k <= 4; ++k)
    for (std::size_t n = 0; n <= 6; ++n) {
      EXPECT_EQ(enumerate_multisets(k, n).size(), count_sorted_words(k, n));
      EXPECT_EQ(multiset_count(k, n), count_sorted_words(k, n));
    }
}

TEST(EnumerateMultisets, StrictlySortedAndDuplicateFree) {
  for (std::size_t k = 1; k <= 4; ++k)
    for (std::size_t n = 0; n <= 6; ++n) {
      const auto out = enumerate_multisets(k, n);
      for (std::size_t i = 1; i < out.size(); ++i) {
        EXPECT_LT(out[i - 1], out[i]);
        EXPECT_GT(out[i - 1].counts(), out[i].counts());
      }
      for (const auto& mu : out) EXPECT_EQ(mu.size(), n);
    }
}

TEST(Multinomial, SmallValues) {
  EXPECT_EQ(multinomial(Multiset::empty(2)), 1);
  EXPECT_EQ(multinomial(ms({2, 1})), 3);
  EXPECT_EQ(multinomial(ms({1, 1})), 2);
  EXPECT_EQ(enumerations(ms({1, 1})).size(), 2u);
  EXPECT_EQ(multinomial(ms({3})), 1);
}

TEST(Multinomial, ExactBeyondSixtyFourBits) {
  const auto big = ms({20, 20, 20});  // 60!/(20!)^3 ~ 5.8e26
  EXPECT_EQ(multinomial(big), BigInt("577831214478475823831865900"));
  EXPECT_THROW(multinomial_u64(big), std::overflow_error);
  EXPECT_EQ(multinomial_u64(ms({2, 1})), 3u);
}

TEST(Multinomial, PartitionsTheTupleSpace) {
  for (std::size_t k = 1; k <= 4; ++k)
    for (std::size_t n = 0; n <= 6; ++n) {
      BigInt total = 0;
      for (const auto& mu : enumerate_multisets(k, n)) total += multinomial(mu);
      EXPECT_EQ(total, BigInt(tuple_count(k, n)));
    }
}

TEST(MultisetOf, FibersHaveMultinomialSize) {
  for (std::size_t k = 1; k <= 4; ++k)
    for (std::size_t n = 0; n <= 6; ++n) {
      std::map<std::vector<std::size_t>, std::size_t> fiber;
      for (std::size_t r = 0; r < tuple_count(k, n); ++r) ++fiber[multiset_of(tuple_at(r, k, n), k).counts()];
      const auto all = enumerate_multisets(k, n);
      ASSERT_EQ(fiber.size(), all.size());  // surjective
      for (const auto& mu : all) EXPECT_EQ(BigInt(fiber.at(mu.counts())), multinomial(mu));
    }
}

TEST(MultisetOf, Examples) {
  EXPECT_EQ(multiset_of({0, 1, 0}, 2), ms({2, 1}));
  EXPECT_EQ(multiset_of({}, 2), ms({0, 0}));
  EXPECT_EQ(multinomial(multiset_of({0, 0, 0}, 3)), 1);
  EXPECT_THROW(multiset_of({0, 2}, 2), std::out_of_range);
}

TEST(Difference, IncludedAndNot) {
  EXPECT_EQ(difference(ms({2, 1}), ms({1, 0})), ms({1, 1}));
  EXPECT_FALSE(difference(ms({1, 0}), ms({0, 1})).has_value());
  EXPECT_EQ(difference(ms({2, 1}), ms({2, 1})), ms({0, 0}));
}

TEST(Tuples, RankRoundTrip) {
  for (std::size_t r = 0; r < tuple_count(3, 4); ++r) EXPECT_EQ(tuple_rank(tuple_at(r, 3, 4), 3), r);
  EXPECT_EQ(tuple_at(1, 2, 2), (TupleIndex{0, 1}));
}

TEST(Permutations, ComposeAndCount) {
  EXPECT_EQ(all_permutations(4).size(), 24u);
  const Permutation s{1, 0, 2}, t{0, 2, 1};
  EXPECT_EQ(compose_permutations(s, t), (Permutation{1, 2, 0}));
  EXPECT_EQ(permutation_to_string({1, 0}), "(2 1)");
}
