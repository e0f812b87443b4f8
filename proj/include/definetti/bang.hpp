#pragma once

#include <cstddef>
#include <memory>
#include <vector>

#include "definetti/multiset.hpp"
#include "definetti/rational.hpp"

namespace definetti {

/// Depth-N truncation of an element of !X: one nonnegative coefficient per
/// multiset of size <= N, stored in enumerate_multisets_upto order.
class BangElement {
 public:
  BangElement(Alphabet alphabet, std::size_t depth);
  BangElement(Alphabet alphabet, std::size_t depth, std::vector<Rational> coeffs);

  const Alphabet& alphabet() const { return alphabet_; }
  std::size_t depth() const { return depth_; }
  const std::vector<Rational>& coeffs() const { return coeffs_; }
  const MultisetIndex& index() const { return *index_; }

  const Rational& operator[](const Multiset& mu) const;
  void set(const Multiset& mu, Rational value);

  /// Coefficients on multisets of size exactly n, canonical order.
  std::vector<Rational> level(std::size_t n) const;

  /// The same element cut down to a smaller depth.
  BangElement truncated(std::size_t depth) const;

  friend bool operator==(const BangElement& a, const BangElement& b) {
    return a.alphabet_ == b.alphabet_ && a.depth_ == b.depth_ && a.coeffs_ == b.coeffs_;
  }

 private:
  Alphabet alphabet_;
  std::size_t depth_;
  std::shared_ptr<const MultisetIndex> index_;
  std::vector<Rational> coeffs_;
};

/// Multiplies the coefficient at mu by p^{|mu|}: the element that refuses each
/// further draw with probability 1 - p.
BangElement damp(const BangElement& b, const Rational& p);

}  // namespace definetti
