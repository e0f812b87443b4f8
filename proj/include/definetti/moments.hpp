#pragma once

// Mixing measures as elements of !X: the embedding iota, the totality
// recurrence, and the inverse problem of recovering a measure from a total
// element by a grid linear program.

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "definetti/bang.hpp"
#include "definetti/chains.hpp"
#include "definetti/report.hpp"
#include "definetti/stoch.hpp"

namespace definetti::moments {

/// coeffs(mu) = sum_j w_j prod_a r_j(a)^mu(a), for |mu| <= depth.
BangElement iota(const AtomicMeasure& mixing, const Alphabet& alphabet, std::size_t depth);

struct TotalityReport {
  bool total = true;
  Multiset witness;        // worst-violating multiset
  Rational defect;         // its defect
  Rational normalisation;  // |coeffs([]) - 1|
  std::vector<Rational> defects;  // |u_mu - sum_x u_{mu+[x]}| for |mu| < depth, upto order
};

/// Checks coeffs([]) = 1 and u_mu = sum_x u_{mu+[x]} within tol.
TotalityReport check_total(const BangElement& b, const Rational& tol = 0);

class NotTotal : public std::invalid_argument {
 public:
  NotTotal(const Alphabet& alphabet, Multiset witness, Rational defect);
  Multiset witness;
  Rational defect;
};

/// Legs leg_n = coefficients on size-n multisets, a DD-cone from the unit on
/// the delta-coordinate De Finetti chain. Throws NotTotal.
chains::Cone extract_definetti_cone(const BangElement& b, const Rational& tol = 0);

struct MomentTable {
  Alphabet alphabet;
  std::vector<Rational> values;  // m_a = coeffs([t^a]), a = 0..N
};

/// Reads m_a off a total element over a two-letter alphabet.
MomentTable bool_moment_table(const BangElement& b);

class NotCompletelyMonotone : public std::invalid_argument {
 public:
  NotCompletelyMonotone(std::size_t a, std::size_t b, Rational value);
  std::size_t first_count;
  std::size_t second_count;
  Rational value;
};

/// c_{a,b} = sum_i (-1)^i C(b,i) m_{a+i}; throws NotCompletelyMonotone on the
/// first negative coefficient in canonical order.
BangElement table_to_bang(const MomentTable& table);

enum class Mode { exact, floating };

struct Recovery {
  AtomicMeasure measure;
  Rational residual;  // max_mu |iota(measure)(mu) - coeffs(mu)|, recomputed exactly
  std::size_t grid_resolution = 0;
  bool within_tolerance = false;
  std::string diagnostic;
};

/// Points c/g of the simplex with sum c = g, in descending lexicographic order.
std::vector<ProbVector> simplex_grid(std::size_t alphabet_size, std::size_t resolution);

/// Minimises the max moment residual over mixtures of grid atoms, prunes
/// weights below tol and renormalises. Throws NotTotal if b fails
/// check_total(b, totality_tol).
Recovery recover_measure(const BangElement& b, std::size_t resolution, const Rational& tol, Mode mode = Mode::floating,
                         const Rational& totality_tol = Rational(1, 1000000000));

/// rho_{infty,n}(iota(mixing)) = leg_n ; mn_alpha(n) for n <= depth, with
/// leg_n the De Finetti leg in delta coordinates.
Report verify_iota_cone(const AtomicMeasure& mixing, const Alphabet& alphabet, std::size_t depth);

}  // namespace definetti::moments
