#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "definetti/matrix.hpp"
#include "definetti/multiset.hpp"
#include "definetti/rational.hpp"

namespace definetti {

/// Finite index set labelling the rows or columns of a kernel.
class IndexSet {
 public:
  enum class Kind { unit, symbols, tuples, multisets, multisets_upto, product };

  static IndexSet unit();
  static IndexSet symbols(const Alphabet& alphabet);
  static IndexSet tuples(const Alphabet& alphabet, std::size_t arity);
  static IndexSet multisets(const Alphabet& alphabet, std::size_t size);
  /// Multisets of size <= bound: the unpadded web of M_bound(A & 1).
  static IndexSet multisets_upto(const Alphabet& alphabet, std::size_t bound);
  static IndexSet product(const IndexSet& left, const IndexSet& right);

  Kind kind() const { return kind_; }
  const Alphabet& alphabet() const;
  std::size_t arity() const { return arity_; }
  const std::vector<IndexSet>& factors() const { return factors_; }
  std::size_t size() const;

  /// Flattens products of words over one alphabet into a single tuple space
  /// and drops unit factors, so X^n x X and X^(n+1) compare equal.
  IndexSet normalized() const;
  std::string describe() const;

  friend bool operator==(const IndexSet& a, const IndexSet& b);

 private:
  IndexSet(Kind kind, std::optional<Alphabet> alphabet, std::size_t arity, std::vector<IndexSet> factors)
      : kind_(kind), alphabet_(std::move(alphabet)), arity_(arity), factors_(std::move(factors)) {}

  Kind kind_;
  std::optional<Alphabet> alphabet_;
  std::size_t arity_ = 0;
  std::vector<IndexSet> factors_;
};

bool compatible(const IndexSet& a, const IndexSet& b);

enum class KernelKind { stochastic, substochastic };

/// Nonnegative rational matrix whose rows are (sub)probability distributions
/// over the target.
class FinKernel {
 public:
  FinKernel(IndexSet source, IndexSet target, QMatrix entries, KernelKind kind);

  const IndexSet& source() const { return source_; }
  const IndexSet& target() const { return target_; }
  const QMatrix& entries() const { return entries_; }
  KernelKind kind() const { return kind_; }
  const Rational& operator()(std::size_t s, std::size_t t) const { return entries_(s, t); }

  friend bool operator==(const FinKernel& a, const FinKernel& b) { return a.entries_ == b.entries_; }

 private:
  IndexSet source_;
  IndexSet target_;
  QMatrix entries_;
  KernelKind kind_;
};

FinKernel identity_kernel(const IndexSet& set);
FinKernel discard_kernel(const IndexSet& set);

/// "f then g" (Kleisli composition): the matrix product F * G.
FinKernel compose(const FinKernel& f, const FinKernel& g);
FinKernel tensor(const FinKernel& f, const FinKernel& g);

/// Deterministic kernel on X^n sending (a_1..a_n) to the word with a_i moved
/// to position perm(i).
FinKernel symmetry_kernel(const Permutation& perm, const Alphabet& alphabet, std::size_t n);

/// M_n X -> X^n: a multiset goes to the uniform law on its enumerations.
FinKernel eq_n_stoch(const Alphabet& alphabet, std::size_t n);
/// X^n -> M_n X: a word goes to its multiset.
FinKernel coeq_n_stoch(const Alphabet& alphabet, std::size_t n);

/// The urn step M_{n+1} X -> M_n X drawing one ball uniformly and deleting it.
FinKernel dd_definetti_stoch(const Alphabet& alphabet, std::size_t n);

/// Point of the sub-simplex over an alphabet.
struct ProbVector {
  std::vector<Rational> weights;

  explicit ProbVector(std::vector<Rational> w);
  std::size_t size() const { return weights.size(); }
  Rational total() const;
  bool is_proper() const { return total() == 1; }
  std::vector<double> to_doubles() const;
  friend bool operator==(const ProbVector&, const ProbVector&) = default;
};

struct Atom {
  ProbVector point;
  Rational weight;
  friend bool operator==(const Atom&, const Atom&) = default;
};

/// Finitely supported measure on the simplex; atoms are proper distributions.
class AtomicMeasure {
 public:
  AtomicMeasure(std::size_t alphabet_size, std::vector<Atom> atoms);
  static AtomicMeasure dirac(ProbVector point);

  std::size_t alphabet_size() const { return alphabet_size_; }
  const std::vector<Atom>& atoms() const { return atoms_; }
  Rational total_weight() const;
  bool is_probability() const { return total_weight() == 1; }

  /// Merges equal points and drops zero weights; sorted by point.
  AtomicMeasure canonical() const;

  /// integral of prod_a r(a)^{mu(a)} against the measure.
  Rational moment(const Multiset& mu) const;

 private:
  std::size_t alphabet_size_;
  std::vector<Atom> atoms_;
};

/// mass(mu) = multinomial(mu) * prod_a r(a)^{mu(a)} over enumerate_multisets(k, n).
std::vector<Rational> multkern(const ProbVector& r, std::size_t n);
FinKernel multkern_kernel(const ProbVector& r, const Alphabet& alphabet, std::size_t n);

struct EqualiserReport {
  Rational max_deviation;
  std::optional<Permutation> witness;  // first symmetry achieving the deviation
  bool holds() const { return max_deviation == 0; }
};

/// Checks f ; sigma = f for every permutation of the target's n coordinates.
EqualiserReport verify_equalises(const QMatrix& f, std::size_t alphabet_size, std::size_t n);
EqualiserReport verify_equalises(const FinKernel& f, std::size_t n);

/// Column permutation realising a symmetry on a tuple space (without building
/// the kernel): result[t] is the image of tuple t.
std::vector<std::size_t> symmetry_action(const Permutation& perm, std::size_t alphabet_size, std::size_t n);

// ---------------------------------------------------------------------------
// Monte Carlo

/// Seedable generator with a stable double conversion. Splitting is by
/// stream index: stream(seed, i) is independent of how trials are scheduled.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  static Rng stream(std::uint64_t seed, std::uint64_t index);

  /// Uniform in [0, 1) with 53 random bits.
  double uniform();
  /// Index drawn from nonnegative weights (need not be normalised).
  std::size_t categorical(const std::vector<double>& weights);

 private:
  std::mt19937_64 engine_;
};

std::uint64_t splitmix64(std::uint64_t x);

std::vector<std::size_t> simulate_exchangeable(const AtomicMeasure& mixing, std::size_t length, std::uint64_t seed);

/// Law of the empirical measure Z_n over many trials; keys are count vectors.
struct EmpiricalLaw {
  std::size_t prefix_length = 0;
  std::size_t trials = 0;
  std::map<std::vector<std::size_t>, std::size_t> histogram;

  /// E[Z_n(symbol)^order] under the empirical law.
  double moment(std::size_t symbol, std::size_t order) const;
};

EmpiricalLaw empirical_law(const AtomicMeasure& mixing, std::size_t n, std::size_t trials, std::uint64_t seed,
                           std::size_t workers = 1);

/// integral of r(symbol)^order d(mixing).
double mixing_moment(const AtomicMeasure& mixing, std::size_t symbol, std::size_t order);

/// Draws a ball uniformly from a non-empty urn and removes it.
Multiset urn_draw_and_delete(const Multiset& urn, Rng& rng);
Multiset sample_multkern(const ProbVector& r, std::size_t n, Rng& rng);

/// Draws from multkern(r, top) and then applies top - n urn steps; returns
/// counts per size-n multiset in canonical order.
std::vector<std::size_t> simulate_urn_marginal(const ProbVector& r, std::size_t top, std::size_t n,
                                               std::size_t trials, std::uint64_t seed);

struct ChiSquare {
  double statistic = 0;
  std::size_t degrees_of_freedom = 0;
  double p_value = 1;
};

/// Pearson goodness of fit; cells with zero expected mass must be empty.
ChiSquare chi_square_test(const std::vector<std::size_t>& observed, const std::vector<double>& expected_probability);

}  // namespace definetti
