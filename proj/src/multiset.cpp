#include "definetti/multiset.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <set>
#include <stdexcept>

namespace definetti {

Alphabet::Alphabet(std::vector<std::string> symbols) : symbols_(std::move(symbols)) {
  if (symbols_.empty()) throw std::invalid_argument("alphabet must contain at least one symbol");
  std::set<std::string> seen;
  for (const auto& s : symbols_) {
    if (!seen.insert(s).second) throw std::invalid_argument("duplicate alphabet symbol '" + s + "'");
  }
}

Alphabet Alphabet::of_size(std::size_t k) {
  std::vector<std::string> names;
  for (std::size_t i = 0; i < k; ++i) names.push_back("s" + std::to_string(i));
  return Alphabet(std::move(names));
}

std::size_t Alphabet::index_of(const std::string& name) const {
  const auto it = std::find(symbols_.begin(), symbols_.end(), name);
  if (it == symbols_.end()) throw std::invalid_argument("unknown symbol '" + name + "'");
  return static_cast<std::size_t>(it - symbols_.begin());
}

Alphabet Alphabet::with_star(const std::string& star) const {
  auto extended = symbols_;
  extended.push_back(star);
  return Alphabet(std::move(extended));
}

Multiset::Multiset(std::vector<std::size_t> counts)
    : counts_(std::move(counts)), size_(std::accumulate(counts_.begin(), counts_.end(), std::size_t{0})) {}

Multiset Multiset::singleton(std::size_t k, std::size_t symbol) {
  if (symbol >= k) throw std::out_of_range("symbol outside alphabet");
  std::vector<std::size_t> c(k, 0);
  c[symbol] = 1;
  return Multiset(std::move(c));
}

Multiset Multiset::plus(const Multiset& other) const {
  if (other.alphabet_size() != alphabet_size()) throw std::invalid_argument("multiset alphabets differ");
  auto c = counts_;
  for (std::size_t i = 0; i < c.size(); ++i) c[i] += other.counts_[i];
  return Multiset(std::move(c));
}

Multiset Multiset::plus_symbol(std::size_t symbol) const {
  auto c = counts_;
  c.at(symbol) += 1;
  return Multiset(std::move(c));
}

bool Multiset::includes(const Multiset& other) const {
  if (other.alphabet_size() != alphabet_size()) return false;
  for (std::size_t i = 0; i < counts_.size(); ++i)
    if (other.counts_[i] > counts_[i]) return false;
  return true;
}

std::string Multiset::to_string(const Alphabet& alphabet) const {
  std::string out = "[";
  bool first = true;
  for (std::size_t a = 0; a < counts_.size(); ++a) {
    for (std::size_t j = 0; j < counts_[a]; ++j) {
      if (!first) out += ",";
      out += alphabet.symbol(a);
      first = false;
    }
  }
  return out + "]";
}

namespace {

void fill_descending(std::size_t k, std::size_t remaining, std::size_t pos, std::vector<std::size_t>& counts,
                     std::vector<Multiset>& out) {
  if (pos + 1 == k) {
    counts[pos] = remaining;
    out.emplace_back(counts);
    return;
  }
  for (std::size_t c = remaining + 1; c-- > 0;) {
    counts[pos] = c;
    fill_descending(k, remaining - c, pos + 1, counts, out);
  }
  counts[pos] = 0;
}

}  // namespace

std::vector<Multiset> enumerate_multisets(std::size_t k, std::size_t n) {
  if (k == 0) throw std::invalid_argument("alphabet must contain at least one symbol");
  std::vector<Multiset> out;
  std::vector<std::size_t> counts(k, 0);
  fill_descending(k, n, 0, counts, out);
  return out;
}

std::vector<Multiset> enumerate_multisets(const Alphabet& alphabet, std::size_t n) {
  return enumerate_multisets(alphabet.size(), n);
}

std::vector<Multiset> enumerate_multisets_upto(std::size_t k, std::size_t n) {
  std::vector<Multiset> out;
  for (std::size_t m = 0; m <= n; ++m) {
    auto level = enumerate_multisets(k, m);
    out.insert(out.end(), level.begin(), level.end());
  }
  return out;
}

BigInt factorial(std::size_t n) {
  BigInt f = 1;
  for (std::size_t i = 2; i <= n; ++i) f *= i;
  return f;
}

BigInt binomial(std::size_t n, std::size_t k) {
  if (k > n) return 0;
  return factorial(n) / (factorial(k) * factorial(n - k));
}

BigInt multiset_count(std::size_t k, std::size_t n) { return binomial(n + k - 1, k - 1); }

BigInt multinomial(const Multiset& mu) {
  BigInt denom = 1;
  for (auto c : mu.counts()) denom *= factorial(c);
  return factorial(mu.size()) / denom;
}

std::uint64_t multinomial_u64(const Multiset& mu) {
  const BigInt value = multinomial(mu);
  if (value > BigInt(std::numeric_limits<std::uint64_t>::max())) {
    throw std::overflow_error("multinomial of a size-" + std::to_string(mu.size()) +
                              " multiset does not fit in 64 bits");
  }
  return value.convert_to<std::uint64_t>();
}

Multiset multiset_of(const TupleIndex& tuple, std::size_t k) {
  std::vector<std::size_t> counts(k, 0);
  for (auto a : tuple) {
    if (a >= k) {
      throw std::out_of_range("tuple entry " + std::to_string(a) + " outside alphabet of size " +
                              std::to_string(k));
    }
    ++counts[a];
  }
  return Multiset(std::move(counts));
}

std::optional<Multiset> difference(const Multiset& mu, const Multiset& nu) {
  if (!mu.includes(nu)) return std::nullopt;
  auto c = mu.counts();
  for (std::size_t i = 0; i < c.size(); ++i) c[i] -= nu.counts()[i];
  return Multiset(std::move(c));
}

std::size_t tuple_count(std::size_t k, std::size_t n) {
  std::size_t total = 1;
  for (std::size_t i = 0; i < n; ++i) {
    if (total > std::numeric_limits<std::size_t>::max() / k) throw std::overflow_error("tuple space too large");
    total *= k;
  }
  return total;
}

std::size_t tuple_rank(const TupleIndex& tuple, std::size_t k) {
  std::size_t rank = 0;
  for (auto a : tuple) {
    if (a >= k) throw std::out_of_range("tuple entry outside alphabet");
    rank = rank * k + a;
  }
  return rank;
}

TupleIndex tuple_at(std::size_t rank, std::size_t k, std::size_t n) {
  TupleIndex t(n, 0);
  for (std::size_t i = n; i-- > 0;) {
    t[i] = rank % k;
    rank /= k;
  }
  return t;
}

std::vector<TupleIndex> enumerations(const Multiset& mu) {
  TupleIndex t;
  for (std::size_t a = 0; a < mu.alphabet_size(); ++a) t.insert(t.end(), mu.count(a), a);
  std::vector<TupleIndex> out;
  do {
    out.push_back(t);
  } while (std::next_permutation(t.begin(), t.end()));
  return out;
}

MultisetIndex::MultisetIndex(std::vector<Multiset> multisets) : multisets_(std::move(multisets)) {
  for (std::size_t i = 0; i < multisets_.size(); ++i) {
    if (!positions_.emplace(multisets_[i].counts(), i).second) {
      throw std::invalid_argument("duplicate multiset in index");
    }
  }
}

std::optional<std::size_t> MultisetIndex::find(const Multiset& mu) const {
  const auto it = positions_.find(mu.counts());
  if (it == positions_.end()) return std::nullopt;
  return it->second;
}

std::size_t MultisetIndex::index_of(const Multiset& mu) const {
  if (auto i = find(mu)) return *i;
  throw std::out_of_range("multiset not in index");
}

std::vector<Permutation> all_permutations(std::size_t n) {
  Permutation p(n);
  std::iota(p.begin(), p.end(), std::size_t{0});
  std::vector<Permutation> out;
  do {
    out.push_back(p);
  } while (std::next_permutation(p.begin(), p.end()));
  return out;
}

Permutation compose_permutations(const Permutation& outer, const Permutation& inner) {
  if (outer.size() != inner.size()) throw std::invalid_argument("permutation sizes differ");
  Permutation out(inner.size());
  for (std::size_t i = 0; i < inner.size(); ++i) out[i] = outer.at(inner[i]);
  return out;
}

std::string permutation_to_string(const Permutation& perm) {
  std::string out = "(";
  for (std::size_t i = 0; i < perm.size(); ++i) {
    if (i) out += " ";
    out += std::to_string(perm[i] + 1);
  }
  return out + ")";
}

}  // namespace definetti
