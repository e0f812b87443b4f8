#pragma once

// Probabilistic coherence spaces over finite webs. A space is presented by a
// finite list of generators; its clique is their biorthogonal closure for the
// pairing <x,u> = sum_a x_a u_a, decided by linear programming.

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "definetti/bang.hpp"
#include "definetti/matrix.hpp"
#include "definetti/multiset.hpp"
#include "definetti/stoch.hpp"

namespace definetti::pcoh {

using PcsVector = std::vector<Rational>;

enum class Arithmetic { exact, floating };

inline constexpr double kFloatTolerance = 1e-9;

struct Pcs {
  IndexSet web;
  std::vector<PcsVector> generators;
  std::string name;

  /// Checks nonnegativity and that every web point is reached by a generator.
  Pcs(IndexSet web, std::vector<PcsVector> generators, std::string name);

  std::size_t dimension() const { return web.size(); }
};

struct PcsMatrix {
  IndexSet source;
  IndexSet target;
  QMatrix entries;
  bool morphism_checked = false;

  PcsMatrix(IndexSet source, IndexSet target, QMatrix entries);
};

Rational pairing(const PcsVector& x, const PcsVector& u);

/// u in A^perp: <g,u> <= 1 for every generator.
bool dual_membership(const std::vector<PcsVector>& generators, const PcsVector& u,
                     Arithmetic mode = Arithmetic::exact);

struct Membership {
  bool inside = false;
  Rational optimum;                 // sup of <x,u> over the dual
  std::optional<PcsVector> witness;  // optimal dual point when outside
};

/// Decides x in A^perp-perp by maximising <x,u> over u in A^perp.
/// Throws std::domain_error when some coordinate is unsupported (unbounded LP).
Membership biorthogonal_membership(const std::vector<PcsVector>& generators, const PcsVector& x,
                                   Arithmetic mode = Arithmetic::exact);

Pcs unit_pcs();
/// X^PCoh: subdistributions over the alphabet, generated by unit vectors.
Pcs ground_pcs(const Alphabet& alphabet);
Pcs tensor_pcs(const Pcs& a, const Pcs& b);
/// A & 1 over the alphabet extended by a trailing star symbol.
Pcs with_unit(const Pcs& a);
/// A & B for spaces whose webs are alphabets; symbols must be distinct.
Pcs with_pcs(const Pcs& a, const Pcs& b);

/// M_n A, web = size-n multisets over A's alphabet, generated by the
/// symmetrised tensors of n generators read through eq_n.
Pcs mn_pcs(const Pcs& a, std::size_t n);

/// M_n(X^PCoh & 1) with its web relabelled by unpadded multisets of size <= n.
Pcs approximant_pcs(const Alphabet& alphabet, std::size_t n);

/// Truncation of !X at depth N generated by the promotions of the grid
/// points {c/resolution : sum c <= resolution}.
Pcs bang_truncation_pcs(const Alphabet& alphabet, std::size_t depth, std::size_t resolution);

/// M_n A -> A^(x)n with (eq_n)_{mu,(a_1..a_n)} = delta_{mu,[a_1..a_n]}.
PcsMatrix eq_n_pcoh(const Alphabet& alphabet, std::size_t n);

/// Restriction M_{n+1}(X & 1) -> M_n(X & 1) in unpadded coordinates.
PcsMatrix dd_bang(const Alphabet& alphabet, std::size_t n);

/// M_{n+1} X -> M_n X with entry 1 exactly when nu is included in mu.
PcsMatrix dd_definetti_pcoh(const Alphabet& alphabet, std::size_t n);

/// M_n X -> M_n(X & 1): entry multinomial(mu - nu) when nu is included in mu.
PcsMatrix mn_alpha(const Alphabet& alphabet, std::size_t n);

/// Index map from padded multisets over alphabet+star (size n) to the
/// unpadded multisets of size <= n.
std::vector<std::size_t> padded_to_unpadded(std::size_t alphabet_size, std::size_t n);

/// x^! truncated at depth N; x must be a subdistribution.
BangElement promotion(const PcsVector& x, const Alphabet& alphabet, std::size_t depth);

/// rho_{infty,n}: coefficients of b on multisets of size <= n.
PcsVector rho_inf_n(const BangElement& b, std::size_t n);

/// The matrix acting on a row vector (x.f)_b = sum_a x_a f_{a,b}.
PcsVector image(const PcsVector& x, const QMatrix& f);

struct MorphismCertificate {
  bool holds = true;
  std::optional<std::size_t> failing_generator;
  Rational worst_optimum;
};

/// Checks that f maps every source generator into the target clique; on
/// success returns the matrix with morphism_checked set.
MorphismCertificate certify_morphism(PcsMatrix& f, const Pcs& source, const Pcs& target,
                                     Arithmetic mode = Arithmetic::exact);

/// Symmetric f into the tuple web factors through eq_n: the factor reads one
/// enumeration per multiset. deviation = max |factor ; eq_n - f|.
struct EqualiserFactor {
  QMatrix factor;
  Rational deviation;
};
EqualiserFactor factor_through_eq(const QMatrix& f, const Alphabet& alphabet, std::size_t n);

}  // namespace definetti::pcoh
