#include "definetti/pcoh.hpp"

#include <set>
#include <stdexcept>

#include "definetti/optim.hpp"

namespace definetti::pcoh {

Pcs::Pcs(IndexSet web_, std::vector<PcsVector> generators_, std::string name_)
    : web(std::move(web_)), generators(std::move(generators_)), name(std::move(name_)) {
  const std::size_t d = web.size();
  std::vector<bool> supported(d, false);
  for (const auto& g : generators) {
    if (g.size() != d) throw std::invalid_argument(name + ": generator has the wrong dimension");
    for (std::size_t a = 0; a < d; ++a) {
      if (g[a] < 0) throw std::invalid_argument(name + ": generator has a negative coefficient");
      if (g[a] > 0) supported[a] = true;
    }
  }
  for (std::size_t a = 0; a < d; ++a) {
    if (!supported[a]) {
      throw std::invalid_argument(name + ": web point " + std::to_string(a) + " is not reached by any generator");
    }
  }
}

PcsMatrix::PcsMatrix(IndexSet source_, IndexSet target_, QMatrix entries_)
    : source(std::move(source_)), target(std::move(target_)), entries(std::move(entries_)) {
  if (entries.rows() != source.size() || entries.cols() != target.size()) {
    throw std::invalid_argument("PCS matrix shape does not match its webs");
  }
  for (const auto& x : entries.data())
    if (x < 0) throw std::invalid_argument("PCS matrix has a negative entry");
}

Rational pairing(const PcsVector& x, const PcsVector& u) {
  if (x.size() != u.size()) throw std::invalid_argument("pairing of vectors over different webs");
  Rational s = 0;
  for (std::size_t a = 0; a < x.size(); ++a) s += x[a] * u[a];
  return s;
}

bool dual_membership(const std::vector<PcsVector>& generators, const PcsVector& u, Arithmetic mode) {
  for (const auto& g : generators) {
    const Rational p = pairing(g, u);
    if (mode == Arithmetic::exact ? p > 1 : to_double(p) > 1.0 + kFloatTolerance) return false;
  }
  return true;
}

namespace {

template <class T>
optim::LinearProgram<T> dual_program(const std::vector<PcsVector>& generators, const PcsVector& x) {
  auto convert = [](const Rational& r) {
    if constexpr (std::is_same_v<T, double>)
      return to_double(r);
    else
      return r;
  };
  optim::LinearProgram<T> lp;
  for (const auto& c : x) lp.objective.push_back(convert(c));
  lp.constraints = Matrix<T>(generators.size(), x.size());
  for (std::size_t i = 0; i < generators.size(); ++i) {
    if (generators[i].size() != x.size()) throw std::invalid_argument("generator and vector webs differ");
    for (std::size_t a = 0; a < x.size(); ++a) lp.constraints(i, a) = convert(generators[i][a]);
  }
  lp.bounds.assign(generators.size(), T(1));
  return lp;
}

}  // namespace

Membership biorthogonal_membership(const std::vector<PcsVector>& generators, const PcsVector& x, Arithmetic mode) {
  for (const auto& c : x)
    if (c < 0) return Membership{false, Rational(0), std::nullopt};
  Membership m;
  std::vector<Rational> u;
  if (mode == Arithmetic::exact) {
    const auto sol = optim::solve(dual_program<Rational>(generators, x));
    if (sol.status == optim::LpStatus::unbounded) {
      throw std::domain_error("dual LP unbounded: some web point is not supported by the generators");
    }
    m.optimum = sol.value;
    m.inside = sol.value <= 1;
    u = sol.primal;
  } else {
    const auto sol = optim::solve(dual_program<double>(generators, x));
    if (sol.status == optim::LpStatus::numerical) return biorthogonal_membership(generators, x, Arithmetic::exact);
    if (sol.status == optim::LpStatus::unbounded) {
      throw std::domain_error("dual LP unbounded: some web point is not supported by the generators");
    }
    m.optimum = Rational(sol.value);
    m.inside = sol.value <= 1.0 + kFloatTolerance;
    for (double v : sol.primal) u.push_back(Rational(v));
  }
  if (!m.inside) m.witness = std::move(u);
  return m;
}

Pcs unit_pcs() { return Pcs(IndexSet::unit(), {PcsVector{Rational(1)}}, "1"); }

Pcs ground_pcs(const Alphabet& alphabet) {
  std::vector<PcsVector> gens;
  for (std::size_t a = 0; a < alphabet.size(); ++a) {
    PcsVector e(alphabet.size(), Rational(0));
    e[a] = 1;
    gens.push_back(std::move(e));
  }
  return Pcs(IndexSet::symbols(alphabet), std::move(gens), "ground");
}

Pcs tensor_pcs(const Pcs& a, const Pcs& b) {
  std::vector<PcsVector> gens;
  for (const auto& g : a.generators)
    for (const auto& h : b.generators) {
      PcsVector v;
      for (const auto& x : g)
        for (const auto& y : h) v.push_back(x * y);
      gens.push_back(std::move(v));
    }
  return Pcs(IndexSet::product(a.web, b.web).normalized(), std::move(gens), "(" + a.name + " x " + b.name + ")");
}

namespace {

Alphabet web_alphabet(const Pcs& a) {
  const auto web = a.web.normalized();
  if (web.kind() != IndexSet::Kind::tuples || web.arity() != 1) {
    throw std::invalid_argument(a.name + ": this construction needs a web given by an alphabet");
  }
  return web.alphabet();
}

}  // namespace

Pcs with_unit(const Pcs& a) {
  const Alphabet alphabet = web_alphabet(a);
  std::vector<PcsVector> gens;
  for (const auto& g : a.generators) {
    PcsVector v = g;
    v.push_back(1);
    gens.push_back(std::move(v));
  }
  return Pcs(IndexSet::symbols(alphabet.with_star()), std::move(gens), "(" + a.name + " & 1)");
}

Pcs with_pcs(const Pcs& a, const Pcs& b) {
  auto symbols = web_alphabet(a).symbols();
  const auto right = web_alphabet(b).symbols();
  symbols.insert(symbols.end(), right.begin(), right.end());
  std::vector<PcsVector> gens;
  for (const auto& g : a.generators)
    for (const auto& h : b.generators) {
      PcsVector v = g;
      v.insert(v.end(), h.begin(), h.end());
      gens.push_back(std::move(v));
    }
  return Pcs(IndexSet::symbols(Alphabet(std::move(symbols))), std::move(gens), "(" + a.name + " & " + b.name + ")");
}

Pcs mn_pcs(const Pcs& a, std::size_t n) {
  const Alphabet alphabet = web_alphabet(a);
  const auto web = enumerate_multisets(alphabet, n);
  const auto perms = all_permutations(n);
  const Rational inv_fact(BigInt(1), factorial(n));
  std::vector<PcsVector> gens;
  std::set<PcsVector> seen;
  for (const auto& choice : enumerate_multisets(a.generators.size(), n)) {
    std::vector<const PcsVector*> picked;
    for (std::size_t g = 0; g < choice.alphabet_size(); ++g)
      for (std::size_t j = 0; j < choice.count(g); ++j) picked.push_back(&a.generators[g]);
    PcsVector y;
    for (const auto& mu : web) {
      const TupleIndex word = enumerations(mu).front();
      Rational sym = 0;
      for (const auto& p : perms) {
        Rational term = 1;
        for (std::size_t i = 0; i < n && term != 0; ++i) term *= (*picked[p[i]])[word[i]];
        sym += term;
      }
      y.push_back(sym * inv_fact);
    }
    if (seen.insert(y).second) gens.push_back(std::move(y));
  }
  return Pcs(IndexSet::multisets(alphabet, n), std::move(gens), "M_" + std::to_string(n) + a.name);
}

std::vector<std::size_t> padded_to_unpadded(std::size_t alphabet_size, std::size_t n) {
  const MultisetIndex unpadded(enumerate_multisets_upto(alphabet_size, n));
  std::vector<std::size_t> map;
  for (const auto& padded : enumerate_multisets(alphabet_size + 1, n)) {
    std::vector<std::size_t> counts(padded.counts().begin(), padded.counts().end() - 1);
    map.push_back(unpadded.index_of(Multiset(std::move(counts))));
  }
  return map;
}

Pcs approximant_pcs(const Alphabet& alphabet, std::size_t n) {
  const Pcs padded = mn_pcs(with_unit(ground_pcs(alphabet)), n);
  const auto map = padded_to_unpadded(alphabet.size(), n);
  std::vector<PcsVector> gens;
  for (const auto& g : padded.generators) {
    PcsVector v(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) v[map[i]] = g[i];
    gens.push_back(std::move(v));
  }
  return Pcs(IndexSet::multisets_upto(alphabet, n), std::move(gens), "M_" + std::to_string(n) + "(X & 1)");
}

Pcs bang_truncation_pcs(const Alphabet& alphabet, std::size_t depth, std::size_t resolution) {
  if (resolution == 0) throw std::invalid_argument("grid resolution must be positive");
  std::vector<PcsVector> gens;
  // Points c/resolution with sum c <= resolution: pad with a slack symbol.
  for (const auto& c : enumerate_multisets(alphabet.size() + 1, resolution)) {
    PcsVector x;
    for (std::size_t a = 0; a < alphabet.size(); ++a) x.push_back(Rational(c.count(a), resolution));
    gens.push_back(promotion(x, alphabet, depth).coeffs());
  }
  return Pcs(IndexSet::multisets_upto(alphabet, depth), std::move(gens), "!X<=" + std::to_string(depth));
}

PcsMatrix eq_n_pcoh(const Alphabet& alphabet, std::size_t n) {
  const auto ms = enumerate_multisets(alphabet, n);
  QMatrix m(ms.size(), tuple_count(alphabet.size(), n));
  for (std::size_t i = 0; i < ms.size(); ++i)
    for (const auto& word : enumerations(ms[i])) m(i, tuple_rank(word, alphabet.size())) = 1;
  return PcsMatrix(IndexSet::multisets(alphabet, n), IndexSet::tuples(alphabet, n), std::move(m));
}

PcsMatrix dd_bang(const Alphabet& alphabet, std::size_t n) {
  const auto source = enumerate_multisets_upto(alphabet.size(), n + 1);
  const MultisetIndex target(enumerate_multisets_upto(alphabet.size(), n));
  QMatrix m(source.size(), target.size());
  for (std::size_t i = 0; i < source.size(); ++i)
    if (auto j = target.find(source[i])) m(i, *j) = 1;
  return PcsMatrix(IndexSet::multisets_upto(alphabet, n + 1), IndexSet::multisets_upto(alphabet, n), std::move(m));
}

PcsMatrix dd_definetti_pcoh(const Alphabet& alphabet, std::size_t n) {
  const auto source = enumerate_multisets(alphabet, n + 1);
  const auto target = enumerate_multisets(alphabet, n);
  QMatrix m(source.size(), target.size());
  for (std::size_t i = 0; i < source.size(); ++i)
    for (std::size_t j = 0; j < target.size(); ++j)
      if (source[i].includes(target[j])) m(i, j) = 1;
  return PcsMatrix(IndexSet::multisets(alphabet, n + 1), IndexSet::multisets(alphabet, n), std::move(m));
}

PcsMatrix mn_alpha(const Alphabet& alphabet, std::size_t n) {
  const auto source = enumerate_multisets(alphabet, n);
  const auto target = enumerate_multisets_upto(alphabet.size(), n);
  QMatrix m(source.size(), target.size());
  for (std::size_t i = 0; i < source.size(); ++i)
    for (std::size_t j = 0; j < target.size(); ++j)
      if (auto rest = difference(source[i], target[j])) m(i, j) = Rational(multinomial(*rest));
  return PcsMatrix(IndexSet::multisets(alphabet, n), IndexSet::multisets_upto(alphabet, n), std::move(m));
}

BangElement promotion(const PcsVector& x, const Alphabet& alphabet, std::size_t depth) {
  if (x.size() != alphabet.size()) throw std::invalid_argument("promotion: vector and alphabet sizes differ");
  Rational total = 0;
  for (const auto& c : x) {
    if (c < 0) throw std::invalid_argument("promotion: negative coefficient");
    total += c;
  }
  if (total > 1) throw std::invalid_argument("promotion: vector of mass " + to_string(total) + " is outside the clique");
  BangElement b(alphabet, depth);
  for (const auto& mu : b.index().multisets()) {
    Rational v = 1;
    for (std::size_t a = 0; a < mu.alphabet_size(); ++a)
      for (std::size_t j = 0; j < mu.count(a); ++j) v *= x[a];
    b.set(mu, v);
  }
  return b;
}

PcsVector rho_inf_n(const BangElement& b, std::size_t n) { return b.truncated(n).coeffs(); }

PcsVector image(const PcsVector& x, const QMatrix& f) {
  if (x.size() != f.rows()) throw std::invalid_argument("vector does not match the matrix source web");
  PcsVector out(f.cols(), Rational(0));
  for (std::size_t a = 0; a < f.rows(); ++a) {
    if (x[a] == 0) continue;
    for (std::size_t b = 0; b < f.cols(); ++b)
      if (f(a, b) != 0) out[b] += x[a] * f(a, b);
  }
  return out;
}

MorphismCertificate certify_morphism(PcsMatrix& f, const Pcs& source, const Pcs& target, Arithmetic mode) {
  if (source.dimension() != f.entries.rows() || target.dimension() != f.entries.cols()) {
    throw std::invalid_argument("matrix does not match the given spaces");
  }
  MorphismCertificate cert;
  cert.worst_optimum = 0;
  for (std::size_t i = 0; i < source.generators.size(); ++i) {
    const auto verdict = biorthogonal_membership(target.generators, image(source.generators[i], f.entries), mode);
    if (verdict.optimum > cert.worst_optimum) cert.worst_optimum = verdict.optimum;
    if (!verdict.inside && cert.holds) {
      cert.holds = false;
      cert.failing_generator = i;
    }
  }
  f.morphism_checked = cert.holds;
  return cert;
}

EqualiserFactor factor_through_eq(const QMatrix& f, const Alphabet& alphabet, std::size_t n) {
  const auto eq = eq_n_pcoh(alphabet, n);
  const auto ms = enumerate_multisets(alphabet, n);
  QMatrix factor(f.rows(), ms.size());
  for (std::size_t j = 0; j < ms.size(); ++j) {
    const std::size_t col = tuple_rank(enumerations(ms[j]).front(), alphabet.size());
    for (std::size_t s = 0; s < f.rows(); ++s) factor(s, j) = f(s, col);
  }
  Rational deviation = max_abs_deviation(factor * eq.entries, f);
  return {std::move(factor), std::move(deviation)};
}

}  // namespace definetti::pcoh
