#include "definetti/chains.hpp"

#include <algorithm>
#include <future>

#include "definetti/pcoh.hpp"

namespace definetti::chains {

namespace {

const char* kSquareAnchor = "draw-and-delete chain can be built";
const char* kMorphismAnchor = "form a chain morphism between the corresponding draw-and-delete chains";

// Runs f(0..count-1) concurrently and returns the results in index order.
template <class F>
auto per_level(std::size_t count, F f) {
  using R = decltype(f(std::size_t{0}));
  std::vector<std::future<R>> futures;
  futures.reserve(count);
  for (std::size_t n = 0; n < count; ++n) futures.push_back(std::async(std::launch::async, f, n));
  std::vector<R> out;
  out.reserve(count);
  for (auto& fut : futures) out.push_back(fut.get());
  return out;
}

Alphabet without_star(const Alphabet& carrier) {
  auto symbols = carrier.symbols();
  symbols.pop_back();
  return Alphabet(std::move(symbols));
}

QMatrix with_y(const QMatrix& m, std::size_t y_dim) {
  return y_dim == 1 ? m : kronecker(m, QMatrix::identity(y_dim));
}

Rational random_entry(Rng& rng) { return Rational(static_cast<long>(rng.uniform() * 8), 1); }

// Random nonnegative matrix with rows summing to one.
QMatrix random_stochastic(std::size_t rows, std::size_t cols, Rng& rng) {
  QMatrix m(rows, cols);
  for (std::size_t i = 0; i < rows; ++i) {
    Rational total = 0;
    for (std::size_t j = 0; j < cols; ++j) {
      m(i, j) = random_entry(rng);
      total += m(i, j);
    }
    if (total == 0) {
      m(i, 0) = 1;
      total = 1;
    }
    for (std::size_t j = 0; j < cols; ++j) m(i, j) /= total;
  }
  return m;
}

std::vector<std::size_t> parametrized_action(const Permutation& sigma, std::size_t k, std::size_t n,
                                             std::size_t y_dim) {
  const auto action = symmetry_action(sigma, k, n);
  std::vector<std::size_t> out(action.size() * y_dim);
  for (std::size_t t = 0; t < action.size(); ++t)
    for (std::size_t y = 0; y < y_dim; ++y) out[t * y_dim + y] = action[t] * y_dim + y;
  return out;
}

QMatrix symmetrise(const QMatrix& f, std::size_t k, std::size_t n, std::size_t y_dim) {
  const auto perms = all_permutations(n);
  QMatrix out(f.rows(), f.cols());
  for (const auto& sigma : perms) {
    const auto action = parametrized_action(sigma, k, n, y_dim);
    for (std::size_t i = 0; i < f.rows(); ++i)
      for (std::size_t c = 0; c < f.cols(); ++c) out(i, action[c]) += f(i, c);
  }
  out *= Rational(BigInt(1), factorial(n));
  return out;
}

// Connecting map of the cone's level chain, parametrised by Y.
QMatrix cone_step(const Cone& cone, const DDChain& chain, std::size_t n) {
  return cone.kind == ConeKind::dd ? with_y(chain.dd.at(n), cone.y_dim)
                                   : with_y(delete_last(chain.object.weaken, n), cone.y_dim);
}

}  // namespace

std::string to_string(Backend backend) { return backend == Backend::stoch ? "stoch" : "pcoh"; }

QMatrix CopointedObject::eq(std::size_t n) const {
  return backend == Backend::stoch ? eq_n_stoch(carrier, n).entries() : pcoh::eq_n_pcoh(carrier, n).entries;
}

CopointedObject stoch_free(const Alphabet& alphabet) {
  return {Backend::stoch, alphabet, QMatrix(alphabet.size(), 1, Rational(1)), ClosedForm::definetti_stoch, "X"};
}

CopointedObject pcoh_definetti(const Alphabet& alphabet) {
  return {Backend::pcoh, alphabet, QMatrix(alphabet.size(), 1, Rational(1)), ClosedForm::definetti_pcoh,
          "X^PCoh"};
}

CopointedObject pcoh_free(const Alphabet& alphabet) {
  const auto carrier = alphabet.with_star();
  QMatrix w(carrier.size(), 1);
  w(alphabet.size(), 0) = 1;
  return {Backend::pcoh, carrier, std::move(w), ClosedForm::bang, "X^PCoh & 1"};
}

CopointedObject custom_copointed(Backend backend, const Alphabet& carrier, QMatrix weaken, std::string name) {
  if (weaken.rows() != carrier.size() || weaken.cols() != 1)
    throw std::invalid_argument("weakening must be a column over the carrier");
  for (std::size_t a = 0; a < carrier.size(); ++a)
    if (weaken(a, 0) < 0 || weaken(a, 0) > 1)
      throw std::invalid_argument("weakening entry out of [0,1] at " + carrier.symbol(a));
  return {backend, carrier, std::move(weaken), ClosedForm::none, std::move(name)};
}

SquareError::SquareError(std::size_t lvl, Rational dev)
    : std::runtime_error("draw-and-delete square fails at level " + std::to_string(lvl) + " (deviation " +
                         definetti::to_string(dev) + ")"),
      level(lvl),
      deviation(std::move(dev)) {}

QMatrix delete_last(const QMatrix& weaken, std::size_t n) {
  return kronecker(QMatrix::identity(tuple_count(weaken.rows(), n)), weaken);
}

QMatrix unpadding_matrix(std::size_t alphabet_size, std::size_t n) {
  const auto map = pcoh::padded_to_unpadded(alphabet_size, n);
  QMatrix p(map.size(), map.size());
  for (std::size_t i = 0; i < map.size(); ++i) p(i, map[i]) = 1;
  return p;
}

std::optional<QMatrix> closed_form_dd(const CopointedObject& object, std::size_t n) {
  switch (object.closed_form) {
    case ClosedForm::definetti_stoch:
      return dd_definetti_stoch(object.carrier, n).entries();
    case ClosedForm::definetti_pcoh:
      return pcoh::dd_definetti_pcoh(object.carrier, n).entries;
    case ClosedForm::bang: {
      const auto base = without_star(object.carrier);
      const std::size_t k = base.size();
      return unpadding_matrix(k, n + 1) * pcoh::dd_bang(base, n).entries * unpadding_matrix(k, n).transpose();
    }
    case ClosedForm::none:
      break;
  }
  return std::nullopt;
}

DDChain build_dd_chain(const CopointedObject& object, std::size_t depth) {
  DDChain chain{object, depth, {}, {}};
  chain.eq = per_level(depth + 1, [&](std::size_t n) { return object.eq(n); });
  chain.dd = per_level(depth, [&](std::size_t n) {
    const QMatrix h = chain.eq[n + 1] * delete_last(object.weaken, n);
    auto solved = solve_right_factor(h, chain.eq[n]);
    if (solved.deviation != 0) throw SquareError(n, solved.deviation);
    if (auto closed = closed_form_dd(object, n)) {
      const Rational dev = max_abs_deviation(*closed, solved.factor);
      if (dev != 0) throw SquareError(n, dev);
    }
    return solved.factor;
  });
  return chain;
}

Report verify_chain(const DDChain& chain) {
  auto results = per_level(chain.depth, [&](std::size_t n) {
    const QMatrix lhs = chain.dd[n] * chain.eq[n];
    const QMatrix rhs = chain.eq[n + 1] * delete_last(chain.object.weaken, n);
    auto r = exact_check("dd_square/" + to_string(chain.object.backend) + "/" + chain.object.name, kSquareAnchor, n,
                         max_abs_deviation(lhs, rhs));
    if (!r.passed) r.witness = "DD_" + std::to_string(n) + " ; eq_" + std::to_string(n);
    return r;
  });
  return results;
}

CopointError::CopointError(std::size_t index, Rational expected, Rational actual)
    : std::invalid_argument("alpha does not commute with the weakenings at source index " + std::to_string(index) +
                            ": expected " + definetti::to_string(expected) + ", got " + definetti::to_string(actual)),
      source_index(index) {}

ChainMorphism lift_copointed_morphism(const QMatrix& alpha, const DDChain& from, const DDChain& to) {
  if (from.object.backend != to.object.backend) throw std::invalid_argument("chains live in different backends");
  if (alpha.rows() != from.alphabet_size() || alpha.cols() != to.alphabet_size())
    throw std::invalid_argument("alpha has the wrong shape");
  const QMatrix pulled = alpha * to.object.weaken;
  for (std::size_t a = 0; a < alpha.rows(); ++a)
    if (pulled(a, 0) != from.object.weaken(a, 0)) throw CopointError(a, from.object.weaken(a, 0), pulled(a, 0));

  const std::size_t depth = std::min(from.depth, to.depth);
  ChainMorphism out;
  out.components = per_level(depth + 1, [&](std::size_t n) {
    const QMatrix h = from.eq[n] * kronecker_power(alpha, n);
    auto solved = solve_right_factor(h, to.eq[n]);
    if (solved.deviation != 0) throw SquareError(n, solved.deviation);
    return solved.factor;
  });
  return out;
}

Report verify_chain_morphism(const ChainMorphism& morphism, const QMatrix& alpha, const DDChain& from,
                             const DDChain& to) {
  const std::size_t depth = morphism.components.size() - 1;
  Report report = per_level(depth + 1, [&](std::size_t n) {
    const QMatrix lhs = morphism.components[n] * to.eq[n];
    const QMatrix rhs = from.eq[n] * kronecker_power(alpha, n);
    return exact_check("lift_defining_equation", kMorphismAnchor, n, max_abs_deviation(lhs, rhs));
  });
  auto squares = per_level(depth, [&](std::size_t n) {
    const QMatrix lhs = from.dd[n] * morphism.components[n];
    const QMatrix rhs = morphism.components[n + 1] * to.dd[n];
    auto r = exact_check("chain_morphism_square", kMorphismAnchor, n, max_abs_deviation(lhs, rhs));
    if (!r.passed) r.witness = "DD_" + std::to_string(n);
    return r;
  });
  report.insert(report.end(), squares.begin(), squares.end());
  return report;
}

QMatrix stoch_to_pcoh_coords(const Alphabet& alphabet, std::size_t n) {
  std::vector<Rational> d;
  for (const auto& mu : enumerate_multisets(alphabet, n)) d.emplace_back(multinomial(mu));
  return diagonal<Rational>(d);
}

Rational conjugation_deviation(const Alphabet& alphabet, std::size_t depth) {
  Rational worst = 0;
  for (std::size_t n = 0; n < depth; ++n) {
    QMatrix inv = stoch_to_pcoh_coords(alphabet, n);
    for (std::size_t i = 0; i < inv.rows(); ++i) inv(i, i) = 1 / inv(i, i);
    const QMatrix conj =
        stoch_to_pcoh_coords(alphabet, n + 1) * dd_definetti_stoch(alphabet, n).entries() * inv;
    worst = std::max(worst, max_abs_deviation(conj, pcoh::dd_definetti_pcoh(alphabet, n).entries));
  }
  return worst;
}

Rational cone_defect(const Cone& cone, const DDChain& chain) {
  Rational worst = 0;
  for (std::size_t n = 0; n + 1 < cone.legs.size(); ++n)
    worst = std::max(worst, max_abs_deviation(cone.legs[n + 1] * cone_step(cone, chain, n), cone.legs[n]));
  return worst;
}

SymmetryError::SymmetryError(std::size_t lvl, Permutation s)
    : std::invalid_argument("leg at level " + std::to_string(lvl) + " is not invariant under " +
                            permutation_to_string(s)),
      level(lvl),
      sigma(std::move(s)) {}

std::optional<Permutation> first_broken_symmetry(const QMatrix& f, std::size_t alphabet_size, std::size_t n,
                                                 std::size_t y_dim) {
  for (const auto& sigma : all_permutations(n)) {
    const auto action = parametrized_action(sigma, alphabet_size, n, y_dim);
    for (std::size_t i = 0; i < f.rows(); ++i)
      for (std::size_t c = 0; c < f.cols(); ++c)
        if (f(i, action[c]) != f(i, c)) return sigma;
  }
  return std::nullopt;
}

Cone dagger_factorize(const Cone& delete_cone, const DDChain& chain) {
  if (delete_cone.kind != ConeKind::del) throw std::invalid_argument("dagger_factorize expects a delete-cone");
  if (delete_cone.legs.size() > chain.depth + 1) throw std::invalid_argument("cone is deeper than the chain");
  const std::size_t k = chain.alphabet_size();
  for (std::size_t n = 0; n < delete_cone.legs.size(); ++n)
    if (auto sigma = first_broken_symmetry(delete_cone.legs[n], k, n, delete_cone.y_dim))
      throw SymmetryError(n, *sigma);
  Cone out{ConeKind::dd, delete_cone.y_dim, {}};
  out.legs = per_level(delete_cone.legs.size(), [&](std::size_t n) {
    auto solved = solve_right_factor(delete_cone.legs[n], with_y(chain.eq[n], delete_cone.y_dim));
    if (solved.deviation != 0) throw SquareError(n, solved.deviation);
    return solved.factor;
  });
  return out;
}

Cone omega_from_dd_cone(const Cone& dd_cone, const DDChain& chain) {
  if (dd_cone.kind != ConeKind::dd) throw std::invalid_argument("omega_from_dd_cone expects a DD-cone");
  Cone out{ConeKind::del, dd_cone.y_dim, {}};
  for (std::size_t n = 0; n < dd_cone.legs.size(); ++n)
    out.legs.push_back(dd_cone.legs[n] * with_y(chain.eq.at(n), dd_cone.y_dim));
  return out;
}

Cone random_dd_cone(const DDChain& chain, std::size_t apex_dim, std::size_t y_dim, Rng& rng) {
  Cone cone{ConeKind::dd, y_dim, std::vector<QMatrix>(chain.depth + 1)};
  cone.legs[chain.depth] = random_stochastic(apex_dim, chain.level_size(chain.depth) * y_dim, rng);
  for (std::size_t n = chain.depth; n-- > 0;) cone.legs[n] = cone.legs[n + 1] * cone_step(cone, chain, n);
  return cone;
}

Cone random_delete_cone(const DDChain& chain, std::size_t apex_dim, std::size_t y_dim, Rng& rng) {
  const std::size_t k = chain.alphabet_size();
  const std::size_t top = chain.depth;
  Cone cone{ConeKind::del, y_dim, std::vector<QMatrix>(top + 1)};
  cone.legs[top] = symmetrise(random_stochastic(apex_dim, tuple_count(k, top) * y_dim, rng), k, top, y_dim);
  for (std::size_t n = top; n-- > 0;) cone.legs[n] = cone.legs[n + 1] * cone_step(cone, chain, n);
  return cone;
}

Rational parametrized_factor_deviation(const QMatrix& f, const DDChain& chain, std::size_t n, std::size_t y_dim) {
  const QMatrix e = with_y(chain.eq.at(n), y_dim);
  const auto solved = solve_right_factor(f, e);
  return max_abs_deviation(solved.factor * e, f);
}

TensorReport verify_tensor_parametrized(const DDChain& chain, std::size_t y_dim, std::size_t samples,
                                        std::uint64_t seed) {
  const std::size_t k = chain.alphabet_size();
  auto per_sample = per_level(samples, [&](std::size_t s) {
    Rng rng = Rng::stream(seed, s);
    Rational factor_dev = 0, round_dev = 0;
    for (std::size_t n = 0; n <= chain.depth; ++n) {
      const QMatrix f = symmetrise(random_stochastic(2, tuple_count(k, n) * y_dim, rng), k, n, y_dim);
      factor_dev = std::max(factor_dev, parametrized_factor_deviation(f, chain, n, y_dim));
    }
    const Cone g = random_dd_cone(chain, 2, y_dim, rng);
    const Cone back = dagger_factorize(omega_from_dd_cone(g, chain), chain);
    const Cone f = random_delete_cone(chain, 2, y_dim, rng);
    const Cone there = omega_from_dd_cone(dagger_factorize(f, chain), chain);
    for (std::size_t n = 0; n <= chain.depth; ++n) {
      round_dev = std::max(round_dev, max_abs_deviation(back.legs[n], g.legs[n]));
      round_dev = std::max(round_dev, max_abs_deviation(there.legs[n], f.legs[n]));
    }
    return std::pair{factor_dev, round_dev};
  });
  TensorReport report;
  report.samples = samples;
  for (const auto& [fd, rd] : per_sample) {
    report.max_factor_deviation = std::max(report.max_factor_deviation, fd);
    report.max_roundtrip_deviation = std::max(report.max_roundtrip_deviation, rd);
  }
  return report;
}

Cone cone_from_bang(const BangElement& b, const DDChain& free_chain) {
  if (free_chain.object.closed_form != ClosedForm::bang) throw std::invalid_argument("expected the free pcoh chain");
  if (b.depth() < free_chain.depth) throw std::invalid_argument("element shallower than the chain");
  const std::size_t k = b.alphabet().size();
  Cone cone{ConeKind::dd, 1, {}};
  for (std::size_t n = 0; n <= free_chain.depth; ++n) {
    const auto unpadded = pcoh::rho_inf_n(b, n);
    const QMatrix row = QMatrix::row_vector(unpadded);
    cone.legs.push_back(row * unpadding_matrix(k, n).transpose());
  }
  return cone;
}

BangElement bang_from_cone(const Cone& cone, const DDChain& free_chain) {
  if (free_chain.object.closed_form != ClosedForm::bang) throw std::invalid_argument("expected the free pcoh chain");
  if (cone.kind != ConeKind::dd || cone.y_dim != 1 || cone.apex_dim() != 1)
    throw std::invalid_argument("expected a DD-cone from the unit");
  const auto base = without_star(free_chain.object.carrier);
  const std::size_t top = cone.legs.size() - 1;
  const QMatrix coeffs = cone.legs[top] * unpadding_matrix(base.size(), top);
  return BangElement(base, top, coeffs.row_copy(0));
}

Cone multkern_cone(const AtomicMeasure& mixing, const DDChain& stoch_chain) {
  if (stoch_chain.object.closed_form != ClosedForm::definetti_stoch)
    throw std::invalid_argument("expected the stoch De Finetti chain");
  Cone cone{ConeKind::dd, 1, {}};
  for (std::size_t n = 0; n <= stoch_chain.depth; ++n) {
    std::vector<Rational> law(stoch_chain.level_size(n), Rational(0));
    for (const auto& atom : mixing.atoms()) {
      const auto mass = multkern(atom.point, n);
      for (std::size_t i = 0; i < law.size(); ++i) law[i] += atom.weight * mass[i];
    }
    cone.legs.push_back(QMatrix::row_vector(law));
  }
  return cone;
}

}  // namespace definetti::chains
