#include "definetti/stoch.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace definetti;

namespace {

const Alphabet kBool({"t", "f"});
const Alphabet kABC({"a", "b", "c"});

Rational q(long p, long d = 1) { return Rational(p, d); }

QMatrix random_stochastic(std::size_t rows, std::size_t cols, std::mt19937& gen) {
  std::uniform_int_distribution<int> dist(0, 6);
  QMatrix m(rows, cols);
  for (std::size_t i = 0; i < rows; ++i) {
    Rational total = 0;
    for (std::size_t j = 0; j < cols; ++j) {
      m(i, j) = dist(gen);
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

FinKernel on_symbols(const Alphabet& a, QMatrix m) {
  return FinKernel(IndexSet::symbols(a), IndexSet::symbols(a), std::move(m), KernelKind::stochastic);
}

// (id^{x n} (x) discard) as a kernel X^{n+1} -> X^n.
FinKernel discard_last(const Alphabet& a, std::size_t n) {
  return tensor(identity_kernel(IndexSet::tuples(a, n)), discard_kernel(IndexSet::symbols(a)));
}

}  // namespace

TEST(FinKernel, RejectsBadRows) {
  const auto x = IndexSet::symbols(kBool);
  QMatrix m(2, 2);
  m(0, 0) = q(1, 2);
  m(1, 1) = 1;
  EXPECT_THROW(FinKernel(x, x, m, KernelKind::stochastic), std::invalid_argument);
  EXPECT_NO_THROW(FinKernel(x, x, m, KernelKind::substochastic));
  m(0, 1) = q(-1, 4);
  EXPECT_THROW(FinKernel(x, x, m, KernelKind::substochastic), std::invalid_argument);
}

TEST(Compose, IdentityAndAssociativity) {
  std::mt19937 gen(7);
  const auto f = on_symbols(kBool, random_stochastic(2, 2, gen));
  EXPECT_EQ(compose(identity_kernel(f.source()), f), f);
  EXPECT_EQ(compose(f, identity_kernel(f.target())), f);

  QMatrix d1(2, 2), d2(2, 2);
  d1(0, 0) = q(1, 3), d1(0, 1) = q(2, 3), d1(1, 0) = q(2, 3), d1(1, 1) = q(1, 3);
  d2(0, 0) = q(1, 4), d2(0, 1) = q(3, 4), d2(1, 0) = q(3, 4), d2(1, 1) = q(1, 4);
  const auto a = on_symbols(kBool, d1), b = on_symbols(kBool, d2);
  EXPECT_EQ(compose(compose(a, b), f), compose(a, compose(b, f)));
  const auto ab = compose(a, b);
  EXPECT_EQ(ab(0, 0), q(1, 3) * q(1, 4) + q(2, 3) * q(3, 4));
  EXPECT_EQ(ab.kind(), KernelKind::stochastic);
}

TEST(Compose, SubstochasticRowUnchangedByIdentity) {
  QMatrix row(1, 2);
  row(0, 0) = q(1, 2), row(0, 1) = q(3, 10);
  const FinKernel f(IndexSet::unit(), IndexSet::symbols(kBool), row, KernelKind::substochastic);
  const auto g = compose(f, identity_kernel(IndexSet::symbols(kBool)));
  EXPECT_EQ(g.entries(), row);
  EXPECT_EQ(g.kind(), KernelKind::substochastic);
}

TEST(Compose, MismatchedIndexSetsThrow) {
  EXPECT_THROW(compose(identity_kernel(IndexSet::symbols(kBool)), identity_kernel(IndexSet::symbols(kABC))),
               std::invalid_argument);
}

TEST(Tensor, IdentitiesAndProductMeasure) {
  const auto idx = identity_kernel(IndexSet::symbols(kBool));
  const auto idy = identity_kernel(IndexSet::symbols(kABC));
  EXPECT_EQ(tensor(idx, idy).entries(), QMatrix::identity(6));

  QMatrix r1(1, 2), r2(1, 2);
  r1(0, 0) = 1;
  r2(0, 0) = q(1, 2), r2(0, 1) = q(1, 2);
  const FinKernel f(IndexSet::unit(), IndexSet::symbols(kBool), r1, KernelKind::stochastic);
  const FinKernel g(IndexSet::unit(), IndexSet::symbols(kBool), r2, KernelKind::stochastic);
  const auto fg = tensor(f, g);
  ASSERT_EQ(fg.entries().cols(), 4u);
  EXPECT_EQ(fg.entries().row_copy(0), (std::vector<Rational>{q(1, 2), q(1, 2), 0, 0}));
}

TEST(Tensor, Bifunctorial) {
  std::mt19937 gen(11);
  for (int trial = 0; trial < 20; ++trial) {
    const auto f1 = on_symbols(kBool, random_stochastic(2, 2, gen));
    const auto f2 = on_symbols(kBool, random_stochastic(2, 2, gen));
    const auto g1 = on_symbols(kBool, random_stochastic(2, 2, gen));
    const auto g2 = on_symbols(kBool, random_stochastic(2, 2, gen));
    EXPECT_EQ(max_abs_deviation(tensor(compose(f1, f2), compose(g1, g2)).entries(),
                                compose(tensor(f1, g1), tensor(f2, g2)).entries()),
              0);
  }
}

TEST(Symmetry, IdentitySwapAndGroupLaw) {
  EXPECT_EQ(symmetry_kernel({0, 1, 2}, kBool, 3).entries(), QMatrix::identity(8));
  const auto swap = symmetry_kernel({1, 0}, kBool, 2);
  // (t,f) has rank 1, (f,t) has rank 2.
  EXPECT_EQ(swap(1, 2), 1);
  EXPECT_EQ(swap(1, 1), 0);

  std::mt19937 gen(3);
  auto perms = all_permutations(3);
  for (int trial = 0; trial < 10; ++trial) {
    std::uniform_int_distribution<std::size_t> pick(0, perms.size() - 1);
    const auto& s = perms[pick(gen)];
    const auto& t = perms[pick(gen)];
    // sigma o tau: apply tau first.
    EXPECT_EQ(symmetry_kernel(compose_permutations(s, t), kABC, 3),
              compose(symmetry_kernel(t, kABC, 3), symmetry_kernel(s, kABC, 3)));
  }
  EXPECT_THROW(symmetry_kernel({0, 0}, kBool, 2), std::invalid_argument);
}

TEST(Equaliser, SmallCases) {
  EXPECT_EQ(eq_n_stoch(kABC, 1).entries(), QMatrix::identity(3));
  EXPECT_EQ(coeq_n_stoch(kABC, 1).entries(), QMatrix::identity(3));
  const auto eq2 = eq_n_stoch(kBool, 2);
  // [t,f] is multiset 1; tuples (t,f)=1, (f,t)=2.
  EXPECT_EQ(eq2(1, 1), q(1, 2));
  EXPECT_EQ(eq2(1, 2), q(1, 2));
  EXPECT_EQ(eq2(1, 0), 0);
}

TEST(Equaliser, Laws) {
  for (std::size_t k = 1; k <= 3; ++k) {
    const auto a = Alphabet::of_size(k);
    for (std::size_t n = 0; n <= 4; ++n) {
      const auto eq = eq_n_stoch(a, n);
      const auto coeq = coeq_n_stoch(a, n);
      EXPECT_EQ(compose(eq, coeq).entries(), QMatrix::identity(eq.entries().rows()));
      QMatrix average(coeq.entries().rows(), coeq.entries().rows());
      const auto perms = all_permutations(n);
      for (const auto& p : perms) average += symmetry_kernel(p, a, n).entries();
      average *= Rational(BigInt(1), factorial(n));
      EXPECT_EQ(compose(coeq, eq).entries(), average);
      EXPECT_TRUE(verify_equalises(eq, n).holds());
      for (const auto& p : perms) EXPECT_EQ(compose(symmetry_kernel(p, a, n), coeq), coeq);
    }
  }
}

TEST(DrawAndDelete, UrnExample) {
  const Alphabet ab({"a", "b"});
  const auto dd = dd_definetti_stoch(ab, 2);
  // Size-3 urns: [a,a,a],[a,a,b],[a,b,b],[b,b,b]; size-2: [a,a],[a,b],[b,b].
  EXPECT_EQ(dd(1, 1), q(2, 3));
  EXPECT_EQ(dd(1, 0), q(1, 3));
  EXPECT_EQ(dd(1, 2), 0);
  // Oracle: eq_{n+1} ; discard last ; coeq_n.
  const auto oracle = compose(compose(eq_n_stoch(ab, 3), discard_last(ab, 2)), coeq_n_stoch(ab, 2));
  EXPECT_EQ(dd, oracle);
}

TEST(DrawAndDelete, SingletonsGoToEmptyUrn) {
  const auto dd = dd_definetti_stoch(kABC, 0);
  EXPECT_EQ(dd.entries(), QMatrix(3, 1, Rational(1)));
}

TEST(DrawAndDelete, DefiningSquareAndOracle) {
  for (std::size_t k = 1; k <= 3; ++k) {
    const auto a = Alphabet::of_size(k);
    for (std::size_t n = 0; n <= 3; ++n) {
      const auto dd = dd_definetti_stoch(a, n);
      EXPECT_EQ(compose(dd, eq_n_stoch(a, n)), compose(eq_n_stoch(a, n + 1), discard_last(a, n)));
      EXPECT_EQ(dd, compose(compose(eq_n_stoch(a, n + 1), discard_last(a, n)), coeq_n_stoch(a, n)));
    }
  }
}

TEST(Multkern, Examples) {
  const auto dirac = multkern(ProbVector({1, 0}), 3);
  EXPECT_EQ(dirac, (std::vector<Rational>{1, 0, 0, 0}));
  EXPECT_EQ(multkern(ProbVector({q(1, 2), q(1, 2)}), 2), (std::vector<Rational>{q(1, 4), q(1, 2), q(1, 4)}));
  EXPECT_THROW(multkern(ProbVector({q(1, 2), q(1, 4)}), 2), std::invalid_argument);
}

TEST(Multkern, ConeLaw) {
  const ProbVector r({q(1, 3), q(2, 3)});
  for (std::size_t n = 0; n <= 4; ++n) {
    const auto upper = multkern_kernel(r, kBool, n + 1);
    EXPECT_EQ(compose(upper, dd_definetti_stoch(kBool, n)), multkern_kernel(r, kBool, n));
  }
  const ProbVector s({q(1, 5), q(3, 10), q(1, 2)});
  for (std::size_t n = 0; n <= 3; ++n)
    EXPECT_EQ(compose(multkern_kernel(s, kABC, n + 1), dd_definetti_stoch(kABC, n)), multkern_kernel(s, kABC, n));
}

TEST(VerifyEqualises, Cases) {
  std::mt19937 gen(5);
  const FinKernel g(IndexSet::symbols(kBool), IndexSet::multisets(kBool, 2), random_stochastic(2, 3, gen),
                    KernelKind::stochastic);
  EXPECT_EQ(verify_equalises(compose(g, eq_n_stoch(kBool, 2)), 2).max_deviation, 0);

  QMatrix point(1, 4);
  point(0, 1) = 1;  // (t,f)
  const auto report = verify_equalises(FinKernel(IndexSet::unit(), IndexSet::tuples(kBool, 2), point,
                                                 KernelKind::stochastic),
                                       2);
  EXPECT_EQ(report.max_deviation, 1);
  ASSERT_TRUE(report.witness.has_value());
  EXPECT_EQ(*report.witness, (Permutation{1, 0}));

  const QMatrix uniform(1, 8, q(1, 8));
  EXPECT_TRUE(verify_equalises(uniform, 2, 3).holds());
}

TEST(AtomicMeasure, Validation) {
  EXPECT_THROW(AtomicMeasure(2, {Atom{ProbVector({q(1, 2), q(1, 4)}), 1}}), std::invalid_argument);
  EXPECT_THROW(AtomicMeasure(2, {Atom{ProbVector({1, 0}), q(3, 4)}, Atom{ProbVector({0, 1}), q(1, 2)}}),
               std::invalid_argument);
  const AtomicMeasure m(2, {Atom{ProbVector({1, 0}), q(1, 4)}, Atom{ProbVector({1, 0}), q(1, 4)}});
  EXPECT_EQ(m.canonical().atoms().size(), 1u);
  EXPECT_EQ(m.canonical().atoms()[0].weight, q(1, 2));
}

TEST(Simulation, DiracGivesConstantSequence) {
  const auto m = AtomicMeasure::dirac(ProbVector({1, 0}));
  for (auto s : simulate_exchangeable(m, 500, 42)) EXPECT_EQ(s, 0u);
}

TEST(Simulation, DeterministicGivenSeed) {
  const AtomicMeasure m(2, {Atom{ProbVector({q(1, 5), q(4, 5)}), q(1, 2)}, Atom{ProbVector({q(9, 10), q(1, 10)}), q(1, 2)}});
  EXPECT_EQ(simulate_exchangeable(m, 1000, 9), simulate_exchangeable(m, 1000, 9));
  EXPECT_NE(simulate_exchangeable(m, 1000, 9), simulate_exchangeable(m, 1000, 10));
  EXPECT_THROW(simulate_exchangeable(AtomicMeasure(2, {Atom{ProbVector({1, 0}), q(1, 2)}}), 10, 1),
               std::invalid_argument);
}

TEST(Simulation, TrajectoryFrequencySitsAtAnAtom) {
  const AtomicMeasure m(2, {Atom{ProbVector({q(1, 5), q(4, 5)}), q(1, 2)}, Atom{ProbVector({q(9, 10), q(1, 10)}), q(1, 2)}});
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto seq = simulate_exchangeable(m, 10000, seed);
    double t = 0;
    for (auto s : seq) t += s == 0;
    t /= 10000.0;
    EXPECT_TRUE(std::abs(t - 0.2) < 0.02 || std::abs(t - 0.9) < 0.02) << "frequency " << t;
  }
}

TEST(EmpiricalLaw, DiracMeanAndVariance) {
  const auto fair = AtomicMeasure::dirac(ProbVector({q(1, 2), q(1, 2)}));
  const auto law = empirical_law(fair, 1000, 1000, 17);
  EXPECT_NEAR(law.moment(0, 1), 0.5, 0.01);

  const auto biased = AtomicMeasure::dirac(ProbVector({q(3, 10), q(7, 10)}));
  const auto law2 = empirical_law(biased, 100, 20000, 3);
  const double mean = law2.moment(0, 1);
  const double variance = law2.moment(0, 2) - mean * mean;
  EXPECT_NEAR(variance, 0.3 * 0.7 / 100, 0.1 * 0.3 * 0.7 / 100);
}

TEST(EmpiricalLaw, TwoAtomsGiveTwoModes) {
  const AtomicMeasure m(2, {Atom{ProbVector({q(1, 5), q(4, 5)}), q(1, 2)}, Atom{ProbVector({q(9, 10), q(1, 10)}), q(1, 2)}});
  const auto law = empirical_law(m, 1000, 2000, 5);
  std::size_t near_low = 0, near_high = 0, elsewhere = 0;
  for (const auto& [counts, n] : law.histogram) {
    const double z = counts[0] / 1000.0;
    if (std::abs(z - 0.2) < 0.05)
      near_low += n;
    else if (std::abs(z - 0.9) < 0.05)
      near_high += n;
    else
      elsewhere += n;
  }
  EXPECT_EQ(elsewhere, 0u);
  EXPECT_NEAR(near_low / 2000.0, 0.5, 0.05);
  EXPECT_NEAR(near_high / 2000.0, 0.5, 0.05);
}

TEST(EmpiricalLaw, WorkerCountDoesNotChangeResult) {
  const AtomicMeasure m(2, {Atom{ProbVector({q(1, 5), q(4, 5)}), q(1, 3)}, Atom{ProbVector({q(9, 10), q(1, 10)}), q(2, 3)}});
  const auto one = empirical_law(m, 50, 500, 99, 1);
  const auto four = empirical_law(m, 50, 500, 99, 4);
  EXPECT_EQ(one.histogram, four.histogram);
}

TEST(UrnChain, MarginalsMatchMultkern) {
  const ProbVector r({q(1, 3), q(2, 3)});
  const ProbVector s({q(1, 2), q(1, 4), q(1, 4)});
  for (std::size_t top = 1; top <= 6; ++top) {
    for (std::size_t n = 0; n <= std::min<std::size_t>(3, top); ++n) {
      for (const auto* point : {&r, &s}) {
        const auto observed = simulate_urn_marginal(*point, top, n, 10000, 1000 * top + n);
        std::vector<double> expected;
        for (const auto& m : multkern(*point, n)) expected.push_back(to_double(m));
        const auto chi = chi_square_test(observed, expected);
        EXPECT_GT(chi.p_value, 0.01) << "top " << top << " n " << n << " stat " << chi.statistic;
      }
    }
  }
}

TEST(ChiSquare, DetectsWrongLaw) {
  const ProbVector r({q(1, 3), q(2, 3)});
  const auto observed = simulate_urn_marginal(r, 4, 2, 10000, 1);
  const auto chi = chi_square_test(observed, {0.25, 0.5, 0.25});
  EXPECT_LT(chi.p_value, 1e-6);
}
