#include "definetti/stoch.hpp"

#include <algorithm>
#include <boost/math/distributions/chi_squared.hpp>
#include <cmath>
#include <stdexcept>
#include <thread>

namespace definetti {

// ---------------------------------------------------------------------------
// Index sets

IndexSet IndexSet::unit() { return IndexSet(Kind::unit, std::nullopt, 0, {}); }
IndexSet IndexSet::symbols(const Alphabet& alphabet) { return IndexSet(Kind::symbols, alphabet, 1, {}); }
IndexSet IndexSet::tuples(const Alphabet& alphabet, std::size_t arity) {
  return IndexSet(Kind::tuples, alphabet, arity, {});
}
IndexSet IndexSet::multisets(const Alphabet& alphabet, std::size_t size) {
  return IndexSet(Kind::multisets, alphabet, size, {});
}
IndexSet IndexSet::multisets_upto(const Alphabet& alphabet, std::size_t bound) {
  return IndexSet(Kind::multisets_upto, alphabet, bound, {});
}
IndexSet IndexSet::product(const IndexSet& left, const IndexSet& right) {
  return IndexSet(Kind::product, std::nullopt, 0, {left, right});
}

const Alphabet& IndexSet::alphabet() const {
  if (!alphabet_) throw std::logic_error("index set '" + describe() + "' has no alphabet");
  return *alphabet_;
}

std::size_t IndexSet::size() const {
  switch (kind_) {
    case Kind::unit:
      return 1;
    case Kind::symbols:
      return alphabet_->size();
    case Kind::tuples:
      return tuple_count(alphabet_->size(), arity_);
    case Kind::multisets:
      return multiset_count(alphabet_->size(), arity_).convert_to<std::size_t>();
    case Kind::multisets_upto: {
      std::size_t total = 0;
      for (std::size_t m = 0; m <= arity_; ++m)
        total += multiset_count(alphabet_->size(), m).convert_to<std::size_t>();
      return total;
    }
    case Kind::product:
      return factors_[0].size() * factors_[1].size();
  }
  return 0;
}

namespace {

void collect_factors(const IndexSet& s, std::vector<IndexSet>& out) {
  if (s.kind() == IndexSet::Kind::product) {
    for (const auto& f : s.factors()) collect_factors(f, out);
  } else if (s.kind() == IndexSet::Kind::tuples && s.arity() == 0) {
    // X^0 is the unit
  } else if (s.kind() != IndexSet::Kind::unit) {
    out.push_back(s);
  }
}

bool is_word(const IndexSet& s) { return s.kind() == IndexSet::Kind::tuples || s.kind() == IndexSet::Kind::symbols; }

}  // namespace

IndexSet IndexSet::normalized() const {
  std::vector<IndexSet> parts;
  collect_factors(*this, parts);
  if (parts.empty()) return unit();
  const bool all_words = std::all_of(parts.begin(), parts.end(), [&](const IndexSet& p) {
    return is_word(p) && p.alphabet() == parts.front().alphabet();
  });
  if (all_words) {
    std::size_t arity = 0;
    for (const auto& p : parts) arity += p.arity();
    return tuples(parts.front().alphabet(), arity);
  }
  IndexSet result = parts.front();
  if (is_word(result)) result = tuples(result.alphabet(), result.arity());
  for (std::size_t i = 1; i < parts.size(); ++i) {
    IndexSet next = is_word(parts[i]) ? tuples(parts[i].alphabet(), parts[i].arity()) : parts[i];
    result = product(result, next);
  }
  return result;
}

std::string IndexSet::describe() const {
  auto name = [this] {
    std::string s = "{";
    for (std::size_t i = 0; i < alphabet_->size(); ++i) s += (i ? "," : "") + alphabet_->symbol(i);
    return s + "}";
  };
  switch (kind_) {
    case Kind::unit:
      return "1";
    case Kind::symbols:
      return name();
    case Kind::tuples:
      return name() + "^" + std::to_string(arity_);
    case Kind::multisets:
      return "M_" + std::to_string(arity_) + name();
    case Kind::multisets_upto:
      return "M_<=" + std::to_string(arity_) + name();
    case Kind::product:
      return "(" + factors_[0].describe() + " x " + factors_[1].describe() + ")";
  }
  return "?";
}

bool operator==(const IndexSet& a, const IndexSet& b) {
  return a.kind_ == b.kind_ && a.alphabet_ == b.alphabet_ && a.arity_ == b.arity_ && a.factors_ == b.factors_;
}

bool compatible(const IndexSet& a, const IndexSet& b) { return a.normalized() == b.normalized(); }

// ---------------------------------------------------------------------------
// Kernels

FinKernel::FinKernel(IndexSet source, IndexSet target, QMatrix entries, KernelKind kind)
    : source_(std::move(source)), target_(std::move(target)), entries_(std::move(entries)), kind_(kind) {
  if (entries_.rows() != source_.size() || entries_.cols() != target_.size()) {
    throw std::invalid_argument("kernel " + source_.describe() + " -> " + target_.describe() + " needs a " +
                                std::to_string(source_.size()) + "x" + std::to_string(target_.size()) +
                                " matrix, got " + std::to_string(entries_.rows()) + "x" +
                                std::to_string(entries_.cols()));
  }
  for (std::size_t s = 0; s < entries_.rows(); ++s) {
    Rational total = 0;
    for (const auto& x : entries_.row(s)) {
      if (x < 0) throw std::invalid_argument("kernel entry is negative in row " + std::to_string(s));
      total += x;
    }
    if (kind_ == KernelKind::stochastic && total != 1) {
      throw std::invalid_argument("stochastic kernel row " + std::to_string(s) + " sums to " + to_string(total));
    }
    if (kind_ == KernelKind::substochastic && total > 1) {
      throw std::invalid_argument("substochastic kernel row " + std::to_string(s) + " sums to " +
                                  to_string(total));
    }
  }
}

FinKernel identity_kernel(const IndexSet& set) {
  return FinKernel(set, set, QMatrix::identity(set.size()), KernelKind::stochastic);
}

FinKernel discard_kernel(const IndexSet& set) {
  return FinKernel(set, IndexSet::unit(), QMatrix(set.size(), 1, Rational(1)), KernelKind::stochastic);
}

namespace {

KernelKind combine(KernelKind a, KernelKind b) {
  return a == KernelKind::stochastic && b == KernelKind::stochastic ? KernelKind::stochastic
                                                                    : KernelKind::substochastic;
}

}  // namespace

FinKernel compose(const FinKernel& f, const FinKernel& g) {
  if (!compatible(f.target(), g.source())) {
    throw std::invalid_argument("cannot compose: " + f.target().describe() + " is not " + g.source().describe());
  }
  return FinKernel(f.source(), g.target(), f.entries() * g.entries(), combine(f.kind(), g.kind()));
}

FinKernel tensor(const FinKernel& f, const FinKernel& g) {
  return FinKernel(IndexSet::product(f.source(), g.source()), IndexSet::product(f.target(), g.target()),
                   kronecker(f.entries(), g.entries()), combine(f.kind(), g.kind()));
}

std::vector<std::size_t> symmetry_action(const Permutation& perm, std::size_t alphabet_size, std::size_t n) {
  if (perm.size() != n) throw std::invalid_argument("permutation has wrong length");
  std::vector<bool> seen(n, false);
  for (auto p : perm) {
    if (p >= n || seen[p]) throw std::invalid_argument("not a permutation: " + permutation_to_string(perm));
    seen[p] = true;
  }
  const std::size_t count = tuple_count(alphabet_size, n);
  std::vector<std::size_t> image(count);
  TupleIndex moved(n);
  for (std::size_t t = 0; t < count; ++t) {
    const TupleIndex word = tuple_at(t, alphabet_size, n);
    for (std::size_t i = 0; i < n; ++i) moved[perm[i]] = word[i];
    image[t] = tuple_rank(moved, alphabet_size);
  }
  return image;
}

FinKernel symmetry_kernel(const Permutation& perm, const Alphabet& alphabet, std::size_t n) {
  const auto image = symmetry_action(perm, alphabet.size(), n);
  QMatrix m(image.size(), image.size());
  for (std::size_t t = 0; t < image.size(); ++t) m(t, image[t]) = 1;
  const auto words = IndexSet::tuples(alphabet, n);
  return FinKernel(words, words, std::move(m), KernelKind::stochastic);
}

FinKernel eq_n_stoch(const Alphabet& alphabet, std::size_t n) {
  const auto ms = enumerate_multisets(alphabet, n);
  QMatrix m(ms.size(), tuple_count(alphabet.size(), n));
  for (std::size_t i = 0; i < ms.size(); ++i) {
    const Rational share(BigInt(1), multinomial(ms[i]));
    for (const auto& word : enumerations(ms[i])) m(i, tuple_rank(word, alphabet.size())) = share;
  }
  return FinKernel(IndexSet::multisets(alphabet, n), IndexSet::tuples(alphabet, n), std::move(m),
                   KernelKind::stochastic);
}

FinKernel coeq_n_stoch(const Alphabet& alphabet, std::size_t n) {
  const MultisetIndex index(enumerate_multisets(alphabet, n));
  const std::size_t count = tuple_count(alphabet.size(), n);
  QMatrix m(count, index.size());
  for (std::size_t t = 0; t < count; ++t) {
    m(t, index.index_of(multiset_of(tuple_at(t, alphabet.size(), n), alphabet.size()))) = 1;
  }
  return FinKernel(IndexSet::tuples(alphabet, n), IndexSet::multisets(alphabet, n), std::move(m),
                   KernelKind::stochastic);
}

FinKernel dd_definetti_stoch(const Alphabet& alphabet, std::size_t n) {
  const auto urns = enumerate_multisets(alphabet, n + 1);
  const MultisetIndex smaller(enumerate_multisets(alphabet, n));
  QMatrix m(urns.size(), smaller.size());
  for (std::size_t i = 0; i < urns.size(); ++i) {
    for (std::size_t x = 0; x < alphabet.size(); ++x) {
      if (urns[i].count(x) == 0) continue;
      const auto rest = difference(urns[i], Multiset::singleton(alphabet.size(), x));
      m(i, smaller.index_of(*rest)) = Rational(urns[i].count(x), n + 1);
    }
  }
  return FinKernel(IndexSet::multisets(alphabet, n + 1), IndexSet::multisets(alphabet, n), std::move(m),
                   KernelKind::stochastic);
}

// ---------------------------------------------------------------------------
// Measures

ProbVector::ProbVector(std::vector<Rational> w) : weights(std::move(w)) {
  if (weights.empty()) throw std::invalid_argument("probability vector is empty");
  for (const auto& x : weights)
    if (x < 0) throw std::invalid_argument("probability vector has a negative weight " + to_string(x));
  if (total() > 1) throw std::invalid_argument("probability vector has total mass " + to_string(total()) + " > 1");
}

Rational ProbVector::total() const {
  Rational t = 0;
  for (const auto& x : weights) t += x;
  return t;
}

std::vector<double> ProbVector::to_doubles() const {
  std::vector<double> out;
  for (const auto& x : weights) out.push_back(to_double(x));
  return out;
}

AtomicMeasure::AtomicMeasure(std::size_t alphabet_size, std::vector<Atom> atoms)
    : alphabet_size_(alphabet_size), atoms_(std::move(atoms)) {
  for (const auto& a : atoms_) {
    if (a.point.size() != alphabet_size_) throw std::invalid_argument("atom has the wrong dimension");
    if (!a.point.is_proper()) {
      throw std::invalid_argument("atom is off the simplex (mass " + to_string(a.point.total()) + ")");
    }
    if (a.weight < 0) throw std::invalid_argument("atom weight is negative");
  }
  if (total_weight() > 1) throw std::invalid_argument("measure has total weight " + to_string(total_weight()) + " > 1");
}

AtomicMeasure AtomicMeasure::dirac(ProbVector point) {
  const std::size_t k = point.size();
  return AtomicMeasure(k, {Atom{std::move(point), Rational(1)}});
}

Rational AtomicMeasure::total_weight() const {
  Rational t = 0;
  for (const auto& a : atoms_) t += a.weight;
  return t;
}

AtomicMeasure AtomicMeasure::canonical() const {
  std::map<std::vector<Rational>, Rational> merged;
  for (const auto& a : atoms_) merged[a.point.weights] += a.weight;
  std::vector<Atom> out;
  for (auto& [point, weight] : merged)
    if (weight != 0) out.push_back(Atom{ProbVector(point), weight});
  return AtomicMeasure(alphabet_size_, std::move(out));
}

namespace {

Rational power(const Rational& base, std::size_t e) {
  Rational r = 1;
  for (std::size_t i = 0; i < e; ++i) r *= base;
  return r;
}

Rational monomial(const ProbVector& r, const Multiset& mu) {
  Rational v = 1;
  for (std::size_t a = 0; a < mu.alphabet_size(); ++a) v *= power(r.weights[a], mu.count(a));
  return v;
}

}  // namespace

Rational AtomicMeasure::moment(const Multiset& mu) const {
  Rational total = 0;
  for (const auto& a : atoms_) total += a.weight * monomial(a.point, mu);
  return total;
}

std::vector<Rational> multkern(const ProbVector& r, std::size_t n) {
  if (!r.is_proper()) throw std::invalid_argument("multkern needs a proper distribution, got mass " + to_string(r.total()));
  std::vector<Rational> out;
  for (const auto& mu : enumerate_multisets(r.size(), n)) out.push_back(Rational(multinomial(mu)) * monomial(r, mu));
  return out;
}

FinKernel multkern_kernel(const ProbVector& r, const Alphabet& alphabet, std::size_t n) {
  const auto masses = multkern(r, n);
  return FinKernel(IndexSet::unit(), IndexSet::multisets(alphabet, n), QMatrix::row_vector(masses),
                   KernelKind::stochastic);
}

EqualiserReport verify_equalises(const QMatrix& f, std::size_t alphabet_size, std::size_t n) {
  if (f.cols() != tuple_count(alphabet_size, n)) throw std::invalid_argument("target is not a tuple space of that arity");
  EqualiserReport report{Rational(0), std::nullopt};
  for (const auto& perm : all_permutations(n)) {
    const auto image = symmetry_action(perm, alphabet_size, n);
    for (std::size_t s = 0; s < f.rows(); ++s) {
      for (std::size_t t = 0; t < image.size(); ++t) {
        const Rational d = abs(f(s, t) - f(s, image[t]));
        if (d > report.max_deviation) {
          report.max_deviation = d;
          report.witness = perm;
        }
      }
    }
  }
  return report;
}

EqualiserReport verify_equalises(const FinKernel& f, std::size_t n) {
  const auto target = f.target().normalized();
  if (n == 0 && target.kind() == IndexSet::Kind::unit) return verify_equalises(f.entries(), 1, 0);
  if (target.kind() != IndexSet::Kind::tuples || target.arity() != n) {
    throw std::invalid_argument("kernel target " + f.target().describe() + " is not a tuple space of arity " +
                                std::to_string(n));
  }
  return verify_equalises(f.entries(), target.alphabet().size(), n);
}

// ---------------------------------------------------------------------------
// Monte Carlo

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

Rng Rng::stream(std::uint64_t seed, std::uint64_t index) { return Rng(splitmix64(splitmix64(seed) ^ splitmix64(~index))); }

double Rng::uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

std::size_t Rng::categorical(const std::vector<double>& weights) {
  double total = 0;
  std::size_t last_positive = weights.size();
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (weights[i] > 0) last_positive = i;
    total += weights[i];
  }
  if (last_positive == weights.size()) throw std::invalid_argument("categorical draw from zero weights");
  const double u = uniform() * total;
  double acc = 0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    acc += weights[i];
    if (u < acc && weights[i] > 0) return i;
  }
  return last_positive;
}

namespace {

void require_probability(const AtomicMeasure& mixing) {
  if (!mixing.is_probability()) {
    throw std::invalid_argument("mixing measure has total weight " + to_string(mixing.total_weight()) +
                                ", expected 1");
  }
}

std::vector<double> atom_weights(const AtomicMeasure& mixing) {
  std::vector<double> w;
  for (const auto& a : mixing.atoms()) w.push_back(to_double(a.weight));
  return w;
}

std::vector<std::size_t> draw_sequence(const AtomicMeasure& mixing, const std::vector<double>& weights,
                                       std::size_t length, Rng& rng) {
  const auto& atom = mixing.atoms()[rng.categorical(weights)];
  const auto law = atom.point.to_doubles();
  std::vector<std::size_t> seq(length);
  for (auto& s : seq) s = rng.categorical(law);
  return seq;
}

}  // namespace

std::vector<std::size_t> simulate_exchangeable(const AtomicMeasure& mixing, std::size_t length, std::uint64_t seed) {
  require_probability(mixing);
  Rng rng = Rng::stream(seed, 0);
  return draw_sequence(mixing, atom_weights(mixing), length, rng);
}

EmpiricalLaw empirical_law(const AtomicMeasure& mixing, std::size_t n, std::size_t trials, std::uint64_t seed,
                           std::size_t workers) {
  require_probability(mixing);
  if (trials == 0) throw std::invalid_argument("empirical law needs at least one trial");
  if (n == 0) throw std::invalid_argument("empirical law needs a positive prefix length");
  const auto weights = atom_weights(mixing);
  const std::size_t k = mixing.alphabet_size();

  std::vector<std::vector<std::size_t>> counts(trials);
  auto run_range = [&](std::size_t begin, std::size_t end) {
    for (std::size_t t = begin; t < end; ++t) {
      Rng rng = Rng::stream(seed, t);
      std::vector<std::size_t> c(k, 0);
      for (auto s : draw_sequence(mixing, weights, n, rng)) ++c[s];
      counts[t] = std::move(c);
    }
  };
  workers = std::max<std::size_t>(1, std::min(workers, trials));
  if (workers == 1) {
    run_range(0, trials);
  } else {
    std::vector<std::thread> pool;
    const std::size_t chunk = (trials + workers - 1) / workers;
    for (std::size_t w = 0; w < workers; ++w) {
      const std::size_t begin = w * chunk;
      const std::size_t end = std::min(trials, begin + chunk);
      if (begin < end) pool.emplace_back(run_range, begin, end);
    }
    for (auto& th : pool) th.join();
  }

  EmpiricalLaw law;
  law.prefix_length = n;
  law.trials = trials;
  for (auto& c : counts) ++law.histogram[c];
  return law;
}

double EmpiricalLaw::moment(std::size_t symbol, std::size_t order) const {
  double total = 0;
  for (const auto& [c, count] : histogram) {
    const double z = static_cast<double>(c.at(symbol)) / static_cast<double>(prefix_length);
    total += std::pow(z, static_cast<double>(order)) * static_cast<double>(count);
  }
  return total / static_cast<double>(trials);
}

double mixing_moment(const AtomicMeasure& mixing, std::size_t symbol, std::size_t order) {
  double total = 0;
  for (const auto& a : mixing.atoms())
    total += to_double(a.weight) * std::pow(to_double(a.point.weights.at(symbol)), static_cast<double>(order));
  return total;
}

Multiset urn_draw_and_delete(const Multiset& urn, Rng& rng) {
  if (urn.size() == 0) throw std::invalid_argument("cannot draw from an empty urn");
  std::vector<double> w;
  for (auto c : urn.counts()) w.push_back(static_cast<double>(c));
  const std::size_t x = rng.categorical(w);
  auto counts = urn.counts();
  --counts[x];
  return Multiset(std::move(counts));
}

Multiset sample_multkern(const ProbVector& r, std::size_t n, Rng& rng) {
  const auto law = r.to_doubles();
  std::vector<std::size_t> counts(r.size(), 0);
  for (std::size_t i = 0; i < n; ++i) ++counts[rng.categorical(law)];
  return Multiset(std::move(counts));
}

std::vector<std::size_t> simulate_urn_marginal(const ProbVector& r, std::size_t top, std::size_t n,
                                               std::size_t trials, std::uint64_t seed) {
  if (n > top) throw std::invalid_argument("marginal level exceeds the starting urn size");
  const MultisetIndex index(enumerate_multisets(r.size(), n));
  std::vector<std::size_t> observed(index.size(), 0);
  for (std::size_t t = 0; t < trials; ++t) {
    Rng rng = Rng::stream(seed, t);
    Multiset urn = sample_multkern(r, top, rng);
    while (urn.size() > n) urn = urn_draw_and_delete(urn, rng);
    ++observed[index.index_of(urn)];
  }
  return observed;
}

ChiSquare chi_square_test(const std::vector<std::size_t>& observed, const std::vector<double>& expected_probability) {
  if (observed.size() != expected_probability.size()) throw std::invalid_argument("chi-square: length mismatch");
  double total = 0;
  for (auto o : observed) total += static_cast<double>(o);
  ChiSquare result;
  std::size_t cells = 0;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    const double e = expected_probability[i] * total;
    if (e == 0) {
      if (observed[i] != 0) return ChiSquare{std::numeric_limits<double>::infinity(), 0, 0.0};
      continue;
    }
    const double d = static_cast<double>(observed[i]) - e;
    result.statistic += d * d / e;
    ++cells;
  }
  if (cells <= 1) return result;
  result.degrees_of_freedom = cells - 1;
  const boost::math::chi_squared dist(static_cast<double>(result.degrees_of_freedom));
  result.p_value = boost::math::cdf(boost::math::complement(dist, result.statistic));
  return result;
}

}  // namespace definetti
