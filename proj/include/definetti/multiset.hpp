#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "definetti/rational.hpp"

namespace definetti {

/// Finite ordered set of distinct symbol names. The order fixes every
/// canonical index used downstream.
class Alphabet {
 public:
  explicit Alphabet(std::vector<std::string> symbols);

  /// Symbols "s0", "s1", ...
  static Alphabet of_size(std::size_t k);

  std::size_t size() const { return symbols_.size(); }
  const std::vector<std::string>& symbols() const { return symbols_; }
  const std::string& symbol(std::size_t i) const { return symbols_.at(i); }
  std::size_t index_of(const std::string& name) const;

  /// The alphabet with one extra trailing symbol (the unit point of A & 1).
  Alphabet with_star(const std::string& star = "*") const;

  friend bool operator==(const Alphabet&, const Alphabet&) = default;

 private:
  std::vector<std::string> symbols_;
};

class Multiset {
 public:
  Multiset() = default;
  explicit Multiset(std::vector<std::size_t> counts);
  static Multiset empty(std::size_t k) { return Multiset(std::vector<std::size_t>(k, 0)); }
  static Multiset singleton(std::size_t k, std::size_t symbol);

  const std::vector<std::size_t>& counts() const { return counts_; }
  std::size_t count(std::size_t symbol) const { return counts_.at(symbol); }
  std::size_t size() const { return size_; }
  std::size_t alphabet_size() const { return counts_.size(); }

  Multiset plus(const Multiset& other) const;
  Multiset plus_symbol(std::size_t symbol) const;
  bool includes(const Multiset& other) const;

  /// Canonical order: descending lexicographic on count vectors.
  friend bool operator==(const Multiset& a, const Multiset& b) { return a.counts_ == b.counts_; }
  friend std::strong_ordering operator<=>(const Multiset& a, const Multiset& b) {
    return b.counts_ <=> a.counts_;
  }

  std::string to_string(const Alphabet& alphabet) const;

 private:
  std::vector<std::size_t> counts_;
  std::size_t size_ = 0;
};

/// A length-n word over alphabet positions.
using TupleIndex = std::vector<std::size_t>;

/// All multisets of size exactly n, strictly descending lexicographic.
std::vector<Multiset> enumerate_multisets(std::size_t k, std::size_t n);
std::vector<Multiset> enumerate_multisets(const Alphabet& alphabet, std::size_t n);

/// All multisets of size <= n, grouped by size (0 first), each group in
/// canonical order. These are the unpadded points of M_n(A & 1).
std::vector<Multiset> enumerate_multisets_upto(std::size_t k, std::size_t n);

/// Number of size-n multisets over k symbols, C(n+k-1, k-1).
BigInt multiset_count(std::size_t k, std::size_t n);

/// n! / prod_a mu(a)!, the number of tuples enumerating mu.
BigInt multinomial(const Multiset& mu);

/// Same value in 64 bits; throws std::overflow_error if it does not fit.
std::uint64_t multinomial_u64(const Multiset& mu);

BigInt factorial(std::size_t n);
BigInt binomial(std::size_t n, std::size_t k);

Multiset multiset_of(const TupleIndex& tuple, std::size_t k);

/// mu - nu when nu is included in mu, nothing otherwise.
std::optional<Multiset> difference(const Multiset& mu, const Multiset& nu);

/// Tuples over k symbols of length n, in lexicographic order with the first
/// coordinate most significant; tuple_rank is the position in that order.
std::size_t tuple_count(std::size_t k, std::size_t n);
std::size_t tuple_rank(const TupleIndex& tuple, std::size_t k);
TupleIndex tuple_at(std::size_t rank, std::size_t k, std::size_t n);

/// Every tuple whose multiset is mu, in lexicographic order.
std::vector<TupleIndex> enumerations(const Multiset& mu);

/// Position lookup for a fixed list of multisets.
class MultisetIndex {
 public:
  explicit MultisetIndex(std::vector<Multiset> multisets);

  std::size_t size() const { return multisets_.size(); }
  const Multiset& at(std::size_t i) const { return multisets_.at(i); }
  const std::vector<Multiset>& multisets() const { return multisets_; }
  std::optional<std::size_t> find(const Multiset& mu) const;
  std::size_t index_of(const Multiset& mu) const;

 private:
  std::vector<Multiset> multisets_;
  std::map<std::vector<std::size_t>, std::size_t> positions_;
};

/// Permutations of {0..n-1} in lexicographic order (identity first).
using Permutation = std::vector<std::size_t>;
std::vector<Permutation> all_permutations(std::size_t n);
Permutation compose_permutations(const Permutation& outer, const Permutation& inner);
std::string permutation_to_string(const Permutation& perm);

}  // namespace definetti
