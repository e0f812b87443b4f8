#include "definetti/bang.hpp"

#include <stdexcept>

namespace definetti {

BangElement::BangElement(Alphabet alphabet, std::size_t depth)
    : alphabet_(std::move(alphabet)),
      depth_(depth),
      index_(std::make_shared<const MultisetIndex>(enumerate_multisets_upto(alphabet_.size(), depth_))),
      coeffs_(index_->size(), Rational(0)) {}

BangElement::BangElement(Alphabet alphabet, std::size_t depth, std::vector<Rational> coeffs)
    : BangElement(std::move(alphabet), depth) {
  if (coeffs.size() != coeffs_.size()) {
    throw std::invalid_argument("bang element of depth " + std::to_string(depth_) + " needs " +
                                std::to_string(coeffs_.size()) + " coefficients, got " +
                                std::to_string(coeffs.size()));
  }
  for (const auto& c : coeffs)
    if (c < 0) throw std::invalid_argument("bang element coefficient is negative: " + to_string(c));
  coeffs_ = std::move(coeffs);
}

const Rational& BangElement::operator[](const Multiset& mu) const {
  const auto i = index_->find(mu);
  if (!i) throw std::out_of_range("multiset " + mu.to_string(alphabet_) + " is beyond depth " + std::to_string(depth_));
  return coeffs_[*i];
}

void BangElement::set(const Multiset& mu, Rational value) {
  if (value < 0) throw std::invalid_argument("bang element coefficient is negative: " + to_string(value));
  coeffs_[index_->index_of(mu)] = std::move(value);
}

std::vector<Rational> BangElement::level(std::size_t n) const {
  if (n > depth_) throw std::out_of_range("level beyond truncation depth");
  std::vector<Rational> out;
  for (std::size_t i = 0; i < coeffs_.size(); ++i)
    if (index_->at(i).size() == n) out.push_back(coeffs_[i]);
  return out;
}

BangElement BangElement::truncated(std::size_t depth) const {
  if (depth > depth_) {
    throw std::out_of_range("cannot restrict depth " + std::to_string(depth_) + " element to depth " +
                            std::to_string(depth));
  }
  BangElement out(alphabet_, depth);
  // Sizes are grouped in increasing order, so the prefix is the restriction.
  for (std::size_t i = 0; i < out.coeffs_.size(); ++i) out.coeffs_[i] = coeffs_[i];
  return out;
}

BangElement damp(const BangElement& b, const Rational& p) {
  if (p < 0 || p > 1) throw std::invalid_argument("damping factor must lie in [0,1]");
  BangElement out = b;
  for (const auto& mu : b.index().multisets()) {
    Rational f = 1;
    for (std::size_t i = 0; i < mu.size(); ++i) f *= p;
    out.set(mu, b[mu] * f);
  }
  return out;
}

}  // namespace definetti
