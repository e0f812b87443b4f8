#pragma once

// Dense two-phase tableau simplex with Bland's rule, usable over exact
// rationals or doubles. Problems are stated as
//   maximise c.x  subject to  A x (<=, >=, =) b,  x >= 0.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <vector>

#include "definetti/matrix.hpp"
#include "definetti/rational.hpp"

namespace definetti::optim {

enum class RowSense { less_equal, greater_equal, equal };
enum class LpStatus { optimal, unbounded, infeasible, numerical };

// Float solves whose certificate misses these are reported as numerical.
inline constexpr double kFloatViolation = 1e-9;
inline constexpr double kFloatGap = 1e-8;

inline constexpr std::size_t kMaxVariables = 5000;
inline constexpr std::size_t kMaxConstraints = 2000;

std::string to_string(LpStatus status);

template <class T>
struct LinearProgram {
  std::vector<T> objective;
  Matrix<T> constraints;  // one row per constraint
  std::vector<T> bounds;
  std::vector<RowSense> senses;  // empty means all less_equal

  std::size_t num_variables() const { return objective.size(); }
  std::size_t num_constraints() const { return bounds.size(); }
};

template <class T>
struct LpSolution {
  LpStatus status = LpStatus::infeasible;
  T value{0};
  std::vector<T> primal;
  std::vector<T> dual;  // one multiplier per constraint, in the original row signs
  T dual_bound{0};      // b . dual
  T max_violation{0};   // worst primal constraint violation
  T dual_infeasibility{0};
  std::size_t pivots = 0;

  T duality_gap() const { return dual_bound - value; }
};

template <class T>
struct Tolerances {
  T pivot{0};
  T optimality{0};
};

inline Tolerances<double> default_tolerances(double) { return {1e-12, 1e-11}; }
inline Tolerances<Rational> default_tolerances(const Rational&) { return {Rational(0), Rational(0)}; }

namespace detail {

template <class T>
T abs_value(const T& x) {
  return x < 0 ? T(-x) : x;
}

template <class T>
class Tableau {
 public:
  Tableau(const LinearProgram<T>& lp, Tolerances<T> tol, bool verbose)
      : tol_(tol), verbose_(verbose), m_(lp.num_constraints()), n_(lp.num_variables()) {
    row_sign_.assign(m_, T(1));
    std::vector<RowSense> senses = lp.senses.empty() ? std::vector<RowSense>(m_, RowSense::less_equal) : lp.senses;

    // Column layout: originals, then one slack/surplus per inequality, then
    // one artificial per >= or = row.
    std::size_t slack_count = 0, artificial_count = 0;
    for (std::size_t i = 0; i < m_; ++i) {
      if (lp.bounds[i] < 0) {
        row_sign_[i] = T(-1);
        if (senses[i] == RowSense::less_equal)
          senses[i] = RowSense::greater_equal;
        else if (senses[i] == RowSense::greater_equal)
          senses[i] = RowSense::less_equal;
      }
      if (senses[i] != RowSense::equal) ++slack_count;
      if (senses[i] != RowSense::less_equal) ++artificial_count;
    }
    first_artificial_ = n_ + slack_count;
    cols_ = first_artificial_ + artificial_count;
    table_ = Matrix<T>(m_, cols_ + 1);
    basis_.assign(m_, 0);
    unit_column_.assign(m_, 0);

    std::size_t next_slack = n_, next_artificial = first_artificial_;
    for (std::size_t i = 0; i < m_; ++i) {
      for (std::size_t j = 0; j < n_; ++j) table_(i, j) = row_sign_[i] * lp.constraints(i, j);
      table_(i, cols_) = row_sign_[i] * lp.bounds[i];
      switch (senses[i]) {
        case RowSense::less_equal:
          table_(i, next_slack) = T(1);
          unit_column_[i] = next_slack++;
          break;
        case RowSense::greater_equal:
          table_(i, next_slack++) = T(-1);
          table_(i, next_artificial) = T(1);
          unit_column_[i] = next_artificial++;
          break;
        case RowSense::equal:
          table_(i, next_artificial) = T(1);
          unit_column_[i] = next_artificial++;
          break;
      }
      basis_[i] = unit_column_[i];
    }
    original_ = table_;
  }

  LpSolution<T> solve(const LinearProgram<T>& lp) {
    LpSolution<T> sol;
    if (first_artificial_ < cols_) {
      std::vector<T> phase_one(cols_, T(0));
      for (std::size_t j = first_artificial_; j < cols_; ++j) phase_one[j] = T(-1);
      load_objective(phase_one);
      run(/*allow_artificial=*/true);
      if (objective_row_[cols_] < -feasibility_slack()) {
        sol.status = LpStatus::infeasible;
        sol.pivots = pivots_;
        return sol;
      }
      drive_out_artificials();
    }

    std::vector<T> costs(cols_, T(0));
    for (std::size_t j = 0; j < n_; ++j) costs[j] = lp.objective[j];
    load_objective(costs);
    if (!run(/*allow_artificial=*/false)) {
      sol.status = LpStatus::unbounded;
      sol.pivots = pivots_;
      return sol;
    }

    refactor();
    sol.status = LpStatus::optimal;
    sol.pivots = pivots_;
    sol.primal.assign(n_, T(0));
    for (std::size_t i = 0; i < m_; ++i)
      if (basis_[i] < n_) sol.primal[basis_[i]] = table_(i, cols_);
    sol.dual.assign(m_, T(0));
    for (std::size_t i = 0; i < m_; ++i) sol.dual[i] = row_sign_[i] * objective_row_[unit_column_[i]];
    certify(lp, sol);
    if constexpr (std::is_floating_point_v<T>) {
      if (sol.max_violation > kFloatViolation || std::abs(sol.duality_gap()) > kFloatGap ||
          sol.dual_infeasibility > kFloatGap)
        sol.status = LpStatus::numerical;
    }
    return sol;
  }

 private:
  T feasibility_slack() const { return tol_.optimality * T(static_cast<double>(m_ + 1)); }

  // objective_row_[j] = c_B B^{-1} A_j - c_j; last entry is the objective value.
  void load_objective(const std::vector<T>& costs) {
    costs_ = costs;
    objective_row_.assign(cols_ + 1, T(0));
    for (std::size_t j = 0; j < cols_; ++j) objective_row_[j] = -costs[j];
    for (std::size_t i = 0; i < m_; ++i) {
      const T& cb = costs[basis_[i]];
      if (cb == 0) continue;
      for (std::size_t j = 0; j <= cols_; ++j) objective_row_[j] += cb * table_(i, j);
    }
  }

  bool run(bool allow_artificial) {
    const std::size_t limit = allow_artificial ? cols_ : first_artificial_;
    // Dantzig pricing while the objective moves; Bland's rule after
    // kStallPivots degenerate pivots in a row, until it moves again.
    std::size_t stalled = 0;
    T last = objective_row_[cols_];
    for (;;) {
      const bool bland = stalled >= kStallPivots;
      std::size_t entering = limit;
      for (std::size_t j = 0; j < limit; ++j) {
        if (objective_row_[j] >= -tol_.optimality) continue;
        if (bland) {
          entering = j;
          break;
        }
        if (entering == limit || objective_row_[j] < objective_row_[entering]) entering = j;
      }
      if (entering == limit) return true;

      std::size_t leaving = m_;
      T best_ratio{0};
      for (std::size_t i = 0; i < m_; ++i) {
        if (table_(i, entering) <= tol_.pivot) continue;
        const T rhs = table_(i, cols_) < 0 ? T(0) : table_(i, cols_);
        const T ratio = rhs / table_(i, entering);
        // Ties within the optimality tolerance go to the lowest basic index.
        if (leaving == m_ || ratio < best_ratio - tol_.optimality ||
            (abs_value(T(ratio - best_ratio)) <= tol_.optimality && basis_[i] < basis_[leaving])) {
          leaving = i;
          best_ratio = ratio;
        }
      }
      if (leaving == m_) return false;
      pivot(leaving, entering);
      if (pivots_ % kRefactorPeriod == 0) refactor();
      if (objective_row_[cols_] > last + tol_.optimality) {
        stalled = 0;
        last = objective_row_[cols_];
      } else {
        ++stalled;
      }
      if (pivots_ > kPivotLimit) throw std::runtime_error("simplex: pivot limit exceeded");
    }
  }

  // Floating point only: rebuild B^{-1} [A | b] from the original rows so
  // rounding does not accumulate across pivots.
  void refactor() {
    if constexpr (std::is_floating_point_v<T>) {
      using L = long double;
      const std::size_t w = cols_ + 1;
      std::vector<L> b(m_ * m_), x(m_ * w);
      for (std::size_t i = 0; i < m_; ++i) {
        for (std::size_t r = 0; r < m_; ++r) b[i * m_ + r] = original_(i, basis_[r]);
        for (std::size_t j = 0; j < w; ++j) x[i * w + j] = original_(i, j);
      }
      for (std::size_t c = 0; c < m_; ++c) {
        std::size_t p = c;
        for (std::size_t i = c + 1; i < m_; ++i)
          if (std::abs(b[i * m_ + c]) > std::abs(b[p * m_ + c])) p = i;
        if (std::abs(b[p * m_ + c]) < 1e-300L) return;
        if (p != c) {
          for (std::size_t j = 0; j < m_; ++j) std::swap(b[p * m_ + j], b[c * m_ + j]);
          for (std::size_t j = 0; j < w; ++j) std::swap(x[p * w + j], x[c * w + j]);
        }
        const L inv = 1.0L / b[c * m_ + c];
        for (std::size_t j = 0; j < m_; ++j) b[c * m_ + j] *= inv;
        for (std::size_t j = 0; j < w; ++j) x[c * w + j] *= inv;
        for (std::size_t i = 0; i < m_; ++i) {
          if (i == c) continue;
          const L f = b[i * m_ + c];
          if (f == 0) continue;
          for (std::size_t j = 0; j < m_; ++j) b[i * m_ + j] -= f * b[c * m_ + j];
          for (std::size_t j = 0; j < w; ++j) x[i * w + j] -= f * x[c * w + j];
        }
      }
      for (std::size_t i = 0; i < m_; ++i) {
        for (std::size_t j = 0; j < w; ++j) {
          const T v = static_cast<T>(x[i * w + j]);
          table_(i, j) = std::abs(v) < tol_.pivot ? T(0) : v;
        }
        for (std::size_t r = 0; r < m_; ++r) table_(i, basis_[r]) = i == r ? T(1) : T(0);
      }
      load_objective(std::vector<T>(costs_));
    }
  }

  void drive_out_artificials() {
    for (std::size_t i = 0; i < m_; ++i) {
      if (basis_[i] < first_artificial_) continue;
      for (std::size_t j = 0; j < first_artificial_; ++j) {
        if (abs_value(table_(i, j)) > tol_.pivot) {
          pivot(i, j);
          break;
        }
      }
      // Otherwise the row is redundant; its artificial stays basic at zero.
    }
  }

  void pivot(std::size_t row, std::size_t col) {
    ++pivots_;
    if (verbose_)
      std::fprintf(stderr, "simplex pivot %zu: row %zu col %zu objective %.17g rhs %.3g\n", pivots_, row, col,
                   static_cast<double>(objective_row_[cols_]), static_cast<double>(table_(row, cols_)));
    const T inv = T(1) / table_(row, col);
    for (std::size_t j = 0; j <= cols_; ++j) table_(row, j) *= inv;
    table_(row, col) = T(1);
    for (std::size_t i = 0; i < m_; ++i) {
      if (i == row) continue;
      const T f = table_(i, col);
      if (f == 0) continue;
      for (std::size_t j = 0; j <= cols_; ++j) {
        if (table_(row, j) == 0) continue;
        table_(i, j) -= f * table_(row, j);
        if (abs_value(table_(i, j)) < tol_.pivot) table_(i, j) = T(0);
      }
      table_(i, col) = T(0);
    }
    const T f = objective_row_[col];
    if (f != 0) {
      for (std::size_t j = 0; j <= cols_; ++j) {
        if (table_(row, j) == 0) continue;
        objective_row_[j] -= f * table_(row, j);
        if (abs_value(objective_row_[j]) < tol_.pivot) objective_row_[j] = T(0);
      }
      objective_row_[col] = T(0);
    }
    basis_[row] = col;
  }

  void certify(const LinearProgram<T>& lp, LpSolution<T>& sol) const {
    const std::vector<RowSense> senses =
        lp.senses.empty() ? std::vector<RowSense>(m_, RowSense::less_equal) : lp.senses;
    sol.value = T(0);
    for (std::size_t j = 0; j < n_; ++j) sol.value += lp.objective[j] * sol.primal[j];

    sol.max_violation = T(0);
    for (std::size_t j = 0; j < n_; ++j)
      if (-sol.primal[j] > sol.max_violation) sol.max_violation = -sol.primal[j];
    for (std::size_t i = 0; i < m_; ++i) {
      T lhs(0);
      for (std::size_t j = 0; j < n_; ++j) lhs += lp.constraints(i, j) * sol.primal[j];
      const T excess = lhs - lp.bounds[i];
      T violation(0);
      if (senses[i] == RowSense::less_equal) violation = excess;
      if (senses[i] == RowSense::greater_equal) violation = -excess;
      if (senses[i] == RowSense::equal) violation = abs_value(excess);
      if (violation > sol.max_violation) sol.max_violation = violation;
    }

    // Dual of max c.x: min b.y with A^T y >= c and sign constraints on y.
    sol.dual_bound = T(0);
    sol.dual_infeasibility = T(0);
    for (std::size_t i = 0; i < m_; ++i) {
      sol.dual_bound += lp.bounds[i] * sol.dual[i];
      T sign_violation(0);
      if (senses[i] == RowSense::less_equal && sol.dual[i] < 0) sign_violation = -sol.dual[i];
      if (senses[i] == RowSense::greater_equal && sol.dual[i] > 0) sign_violation = sol.dual[i];
      if (sign_violation > sol.dual_infeasibility) sol.dual_infeasibility = sign_violation;
    }
    for (std::size_t j = 0; j < n_; ++j) {
      T reduced = -lp.objective[j];
      for (std::size_t i = 0; i < m_; ++i) reduced += lp.constraints(i, j) * sol.dual[i];
      if (-reduced > sol.dual_infeasibility) sol.dual_infeasibility = -reduced;
    }
  }

  static constexpr std::size_t kPivotLimit = 1'000'000;
  static constexpr std::size_t kRefactorPeriod = 50;
  static constexpr std::size_t kStallPivots = 50;

  Tolerances<T> tol_;
  bool verbose_;
  std::size_t m_, n_, cols_ = 0, first_artificial_ = 0, pivots_ = 0;
  Matrix<T> table_;
  Matrix<T> original_;
  std::vector<T> costs_;
  std::vector<T> objective_row_;
  std::vector<T> row_sign_;
  std::vector<std::size_t> basis_;
  std::vector<std::size_t> unit_column_;
};

}  // namespace detail

template <class T>
void validate(const LinearProgram<T>& lp) {
  const std::size_t m = lp.num_constraints();
  const std::size_t n = lp.num_variables();
  if (lp.constraints.rows() != m || (m > 0 && lp.constraints.cols() != n)) {
    throw std::invalid_argument("linear program: constraint matrix is " + std::to_string(lp.constraints.rows()) +
                                "x" + std::to_string(lp.constraints.cols()) + ", expected " + std::to_string(m) +
                                "x" + std::to_string(n));
  }
  if (!lp.senses.empty() && lp.senses.size() != m) {
    throw std::invalid_argument("linear program: senses do not match constraint count");
  }
  if (n > kMaxVariables || m > kMaxConstraints) {
    throw std::length_error("linear program exceeds desk-scale limits (" + std::to_string(n) + " variables, " +
                            std::to_string(m) + " constraints)");
  }
}

/// Running record of every solve in the process: the worst |duality gap| and
/// primal violation of optimal solves per arithmetic, and float solves that
/// failed their certificate.
struct SolveAudit {
  std::size_t exact_solves = 0;
  std::size_t float_solves = 0;
  std::size_t float_failures = 0;
  Rational worst_exact_gap;
  Rational worst_exact_violation;
  double worst_float_gap = 0;
  double worst_float_violation = 0;
};

SolveAudit solve_audit();
void reset_solve_audit();
void record_solve(const LpSolution<Rational>& sol);
void record_solve(const LpSolution<double>& sol);

/// Solves the LP. Exact over Rational; over double the tolerances bound the
/// pivot and optimality tests.
template <class T>
LpSolution<T> solve(const LinearProgram<T>& lp, Tolerances<T> tol = default_tolerances(T{}), bool verbose = false) {
  validate(lp);
  detail::Tableau<T> tableau(lp, tol, verbose);
  auto sol = tableau.solve(lp);
  record_solve(sol);
  return sol;
}

template <class T>
struct MinMaxFit {
  LpSolution<T> lp;                  // final restricted solve
  std::vector<std::size_t> columns;  // columns of A present in that solve
  std::vector<T> weights;            // one per column of A
  T residual{0};
  std::size_t rounds = 0;
};

namespace detail {

template <class T>
LinearProgram<T> minmax_program(const Matrix<T>& a, const std::vector<T>& target,
                                const std::vector<std::size_t>& columns) {
  const std::size_t rows = a.rows();
  const std::size_t atoms = columns.size();
  LinearProgram<T> lp;
  lp.objective.assign(atoms + 1, T(0));
  lp.objective[atoms] = T(-1);
  lp.constraints = Matrix<T>(2 * rows + 1, atoms + 1);
  lp.bounds.assign(2 * rows + 1, T(0));
  lp.senses.assign(2 * rows + 1, RowSense::less_equal);
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < atoms; ++j) {
      lp.constraints(2 * i, j) = a(i, columns[j]);
      lp.constraints(2 * i + 1, j) = -a(i, columns[j]);
    }
    lp.constraints(2 * i, atoms) = T(-1);
    lp.constraints(2 * i + 1, atoms) = T(-1);
    lp.bounds[2 * i] = target[i];
    lp.bounds[2 * i + 1] = -target[i];
  }
  for (std::size_t j = 0; j < atoms; ++j) lp.constraints(2 * rows, j) = T(1);
  lp.bounds[2 * rows] = T(1);
  lp.senses[2 * rows] = RowSense::equal;
  return lp;
}

inline constexpr std::size_t kDirectColumns = 96;
inline constexpr std::size_t kColumnsPerRound = 16;

}  // namespace detail

/// min t s.t. |A w - target| <= t componentwise, w >= 0, sum w = 1.
/// Columns of A are the candidate atoms. Wide problems are solved by column
/// generation: a restricted problem is re-solved with the columns of most
/// negative reduced cost until none remain, which is the optimum over all of A.
template <class T>
MinMaxFit<T> feasibility_minmax(const Matrix<T>& a, const std::vector<T>& target,
                                Tolerances<T> tol = default_tolerances(T{})) {
  if (a.rows() != target.size()) throw std::invalid_argument("feasibility_minmax: target length mismatch");
  const std::size_t rows = a.rows();
  const std::size_t atoms = a.cols();
  std::vector<bool> present(atoms, false);
  MinMaxFit<T> fit;
  if (atoms <= detail::kDirectColumns) {
    for (std::size_t j = 0; j < atoms; ++j) fit.columns.push_back(j);
  } else {
    const std::size_t stride = (atoms + detail::kDirectColumns / 2 - 1) / (detail::kDirectColumns / 2);
    for (std::size_t j = 0; j < atoms; j += stride) fit.columns.push_back(j);
    if (fit.columns.back() != atoms - 1) fit.columns.push_back(atoms - 1);
  }
  for (auto j : fit.columns) present[j] = true;

  for (;;) {
    ++fit.rounds;
    fit.lp = solve(detail::minmax_program(a, target, fit.columns), tol);
    if (fit.lp.status != LpStatus::optimal) return fit;
    const auto& y = fit.lp.dual;
    std::vector<std::pair<T, std::size_t>> entering;
    for (std::size_t j = 0; j < atoms; ++j) {
      if (present[j]) continue;
      T reduced = y[2 * rows];
      for (std::size_t i = 0; i < rows; ++i) reduced += (y[2 * i] - y[2 * i + 1]) * a(i, j);
      if (reduced < -tol.optimality) entering.emplace_back(reduced, j);
    }
    if (entering.empty()) break;
    const std::size_t take = std::min(entering.size(), detail::kColumnsPerRound);
    std::partial_sort(entering.begin(), entering.begin() + static_cast<std::ptrdiff_t>(take), entering.end(),
                      [](const auto& l, const auto& r) { return l.first < r.first || (l.first == r.first && l.second < r.second); });
    for (std::size_t e = 0; e < take; ++e) {
      fit.columns.push_back(entering[e].second);
      present[entering[e].second] = true;
    }
  }
  fit.weights.assign(atoms, T(0));
  for (std::size_t j = 0; j < fit.columns.size(); ++j) fit.weights[fit.columns[j]] = fit.lp.primal[j];
  fit.residual = fit.lp.primal[fit.columns.size()];
  return fit;
}

}  // namespace definetti::optim
