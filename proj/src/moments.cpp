#include "definetti/moments.hpp"

#include <algorithm>
#include <cmath>

#include "definetti/optim.hpp"
#include "definetti/pcoh.hpp"

namespace definetti::moments {

namespace {

const char* kIotaAnchor = "a $\\mathbf{ICones}$ monomorphism";

Rational power_product(const ProbVector& r, const Multiset& mu) {
  Rational out = 1;
  for (std::size_t a = 0; a < mu.alphabet_size(); ++a)
    for (std::size_t i = 0; i < mu.count(a); ++i) out *= r.weights[a];
  return out;
}

void grid_rec(std::size_t k, std::size_t left, std::size_t g, std::vector<std::size_t>& counts,
              std::vector<ProbVector>& out) {
  if (counts.size() + 1 == k) {
    counts.push_back(left);
    std::vector<Rational> w;
    for (auto c : counts) w.emplace_back(static_cast<long>(c), static_cast<long>(g));
    out.emplace_back(std::move(w));
    counts.pop_back();
    return;
  }
  for (std::size_t c = left + 1; c-- > 0;) {
    counts.push_back(c);
    grid_rec(k, left - c, g, counts, out);
    counts.pop_back();
  }
}

Rational recompute_residual(const AtomicMeasure& m, const BangElement& b) {
  const auto fitted = iota(m, b.alphabet(), b.depth());
  Rational worst = 0;
  for (std::size_t i = 0; i < b.coeffs().size(); ++i) worst = std::max(worst, Rational(abs(fitted.coeffs()[i] - b.coeffs()[i])));
  return worst;
}

}  // namespace

BangElement iota(const AtomicMeasure& mixing, const Alphabet& alphabet, std::size_t depth) {
  if (mixing.alphabet_size() != alphabet.size()) throw std::invalid_argument("iota: alphabet size mismatch");
  BangElement out(alphabet, depth);
  for (const auto& mu : out.index().multisets()) {
    Rational c = 0;
    for (const auto& atom : mixing.atoms()) c += atom.weight * power_product(atom.point, mu);
    out.set(mu, c);
  }
  return out;
}

TotalityReport check_total(const BangElement& b, const Rational& tol) {
  const std::size_t k = b.alphabet().size();
  TotalityReport report;
  report.witness = Multiset::empty(k);
  report.normalisation = abs(b[Multiset::empty(k)] - 1);
  report.defect = report.normalisation;
  for (const auto& mu : b.index().multisets()) {
    if (mu.size() >= b.depth()) continue;
    Rational below = 0;
    for (std::size_t x = 0; x < k; ++x) below += b[mu.plus_symbol(x)];
    Rational d = abs(b[mu] - below);
    if (d > report.defect) {
      report.defect = d;
      report.witness = mu;
    }
    report.defects.push_back(std::move(d));
  }
  report.total = report.defect <= tol;
  return report;
}

NotTotal::NotTotal(const Alphabet& alphabet, Multiset w, Rational d)
    : std::invalid_argument("element is not total: defect " + to_string(d) + " at " + w.to_string(alphabet)),
      witness(std::move(w)),
      defect(std::move(d)) {}

chains::Cone extract_definetti_cone(const BangElement& b, const Rational& tol) {
  const auto report = check_total(b, tol);
  if (!report.total) throw NotTotal(b.alphabet(), report.witness, report.defect);
  chains::Cone cone{chains::ConeKind::dd, 1, {}};
  for (std::size_t n = 0; n <= b.depth(); ++n) cone.legs.push_back(QMatrix::row_vector(b.level(n)));
  return cone;
}

MomentTable bool_moment_table(const BangElement& b) {
  if (b.alphabet().size() != 2) throw std::invalid_argument("moment table needs a two-letter alphabet");
  const auto report = check_total(b);
  if (!report.total) throw NotTotal(b.alphabet(), report.witness, report.defect);
  MomentTable table{b.alphabet(), {}};
  for (std::size_t a = 0; a <= b.depth(); ++a) table.values.push_back(b[Multiset({a, 0})]);
  return table;
}

NotCompletelyMonotone::NotCompletelyMonotone(std::size_t a, std::size_t b, Rational v)
    : std::invalid_argument("moment table is not completely monotone: c_{" + std::to_string(a) + "," +
                            std::to_string(b) + "} = " + to_string(v)),
      first_count(a),
      second_count(b),
      value(std::move(v)) {}

BangElement table_to_bang(const MomentTable& table) {
  if (table.alphabet.size() != 2) throw std::invalid_argument("moment table needs a two-letter alphabet");
  if (table.values.empty()) throw std::invalid_argument("empty moment table");
  BangElement out(table.alphabet, table.values.size() - 1);
  for (const auto& mu : out.index().multisets()) {
    const std::size_t a = mu.count(0), b = mu.count(1);
    Rational c = 0;
    for (std::size_t i = 0; i <= b; ++i) {
      const Rational term = Rational(binomial(b, i)) * table.values[a + i];
      c += i % 2 == 0 ? term : -term;
    }
    if (c < 0) throw NotCompletelyMonotone(a, b, c);
    out.set(mu, c);
  }
  return out;
}

std::vector<ProbVector> simplex_grid(std::size_t alphabet_size, std::size_t resolution) {
  if (alphabet_size == 0) throw std::invalid_argument("empty alphabet");
  std::vector<ProbVector> out;
  std::vector<std::size_t> counts;
  grid_rec(alphabet_size, resolution, resolution, counts, out);
  return out;
}

Recovery recover_measure(const BangElement& b, std::size_t resolution, const Rational& tol, Mode mode,
                         const Rational& totality_tol) {
  if (resolution < 2) throw std::invalid_argument("grid resolution must be at least 2");
  const auto total = check_total(b, totality_tol);
  if (!total.total) throw NotTotal(b.alphabet(), total.witness, total.defect);

  const std::size_t k = b.alphabet().size();
  const auto grid = simplex_grid(k, resolution);
  const auto& ms = b.index().multisets();
  QMatrix a(ms.size(), grid.size());
  for (std::size_t j = 0; j < grid.size(); ++j)
    for (std::size_t i = 0; i < ms.size(); ++i) a(i, j) = power_product(grid[j], ms[i]);

  std::vector<Rational> weights(grid.size(), Rational(0));
  bool solved = false;
  if (mode == Mode::floating) {
    Matrix<double> af(a.rows(), a.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
      for (std::size_t j = 0; j < a.cols(); ++j) af(i, j) = to_double(a(i, j));
    std::vector<double> target;
    for (const auto& c : b.coeffs()) target.push_back(to_double(c));
    const auto fit = optim::feasibility_minmax(af, target);
    if (fit.lp.status == optim::LpStatus::optimal) {
      for (std::size_t j = 0; j < grid.size(); ++j) weights[j] = Rational(std::max(fit.weights[j], 0.0));
      solved = true;
    } else if (fit.lp.status != optim::LpStatus::numerical) {
      throw std::runtime_error("recovery LP: " + to_string(fit.lp.status));
    }
  }
  // Exact mode, or a float solve that could not certify itself.
  if (!solved) {
    const auto fit = optim::feasibility_minmax(a, b.coeffs());
    if (fit.lp.status != optim::LpStatus::optimal) throw std::runtime_error("recovery LP: " + to_string(fit.lp.status));
    weights = fit.weights;
  }

  std::vector<Atom> atoms;
  Rational kept = 0;
  for (std::size_t j = 0; j < grid.size(); ++j)
    if (weights[j] > 0 && weights[j] >= tol) {
      atoms.push_back({grid[j], weights[j]});
      kept += weights[j];
    }
  if (atoms.empty()) {
    const auto best = std::max_element(weights.begin(), weights.end()) - weights.begin();
    atoms.push_back({grid[static_cast<std::size_t>(best)], Rational(1)});
    kept = 1;
  }
  for (auto& atom : atoms) atom.weight /= kept;

  AtomicMeasure measure(k, std::move(atoms));
  Rational residual = recompute_residual(measure, b);
  Recovery out{std::move(measure), residual, resolution, residual <= tol, ""};
  if (!out.within_tolerance)
    out.diagnostic = "residual " + std::to_string(to_double(residual)) + " exceeds tolerance at grid resolution " +
                     std::to_string(resolution) + "; increase resolution";
  return out;
}

Report verify_iota_cone(const AtomicMeasure& mixing, const Alphabet& alphabet, std::size_t depth) {
  if (!mixing.is_probability()) throw std::invalid_argument("verify_iota_cone needs a probability mixing");
  const auto b = iota(mixing, alphabet, depth);
  Report report;
  for (std::size_t n = 0; n <= depth; ++n) {
    const auto ms = enumerate_multisets(alphabet, n);
    std::vector<Rational> leg(ms.size(), Rational(0));
    for (const auto& atom : mixing.atoms()) {
      const auto mass = multkern(atom.point, n);
      for (std::size_t i = 0; i < ms.size(); ++i) leg[i] += atom.weight * mass[i] / Rational(multinomial(ms[i]));
    }
    const QMatrix rhs = QMatrix::row_vector(leg) * pcoh::mn_alpha(alphabet, n).entries;
    const QMatrix lhs = QMatrix::row_vector(pcoh::rho_inf_n(b, n));
    report.push_back(exact_check("iota_cone", kIotaAnchor, n, max_abs_deviation(lhs, rhs)));
  }
  return report;
}

}  // namespace definetti::moments
