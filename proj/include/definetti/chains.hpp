#pragma once

// Draw-and-delete chains over a copointed object (A, w: A -> 1), for either
// the kernel backend or the coherence-space backend. All morphisms are dense
// rational matrices, rows indexing the source.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "definetti/bang.hpp"
#include "definetti/matrix.hpp"
#include "definetti/multiset.hpp"
#include "definetti/report.hpp"
#include "definetti/stoch.hpp"

namespace definetti::chains {

enum class Backend { stoch, pcoh };

std::string to_string(Backend backend);

enum class ClosedForm { none, definetti_stoch, definetti_pcoh, bang };

struct CopointedObject {
  Backend backend;
  Alphabet carrier;
  QMatrix weaken;  // carrier x 1
  ClosedForm closed_form = ClosedForm::none;
  std::string name;

  /// Equaliser M_n A -> A^(x)n of the symmetries in this backend's presentation.
  QMatrix eq(std::size_t n) const;
};

/// (X, X -> 1) in kernels.
CopointedObject stoch_free(const Alphabet& alphabet);
/// X^PCoh with the weakening summing all coordinates.
CopointedObject pcoh_definetti(const Alphabet& alphabet);
/// X^PCoh & 1 with the second projection; the star is the last symbol.
CopointedObject pcoh_free(const Alphabet& alphabet);
/// Any other weakening; throws std::invalid_argument if it is not a valid
/// backend morphism (row sums <= 1 in stoch, entries <= 1 in pcoh).
CopointedObject custom_copointed(Backend backend, const Alphabet& carrier, QMatrix weaken, std::string name);

class SquareError : public std::runtime_error {
 public:
  SquareError(std::size_t level, Rational deviation);
  std::size_t level;
  Rational deviation;
};

struct DDChain {
  CopointedObject object;
  std::size_t depth = 0;
  std::vector<QMatrix> eq;  // eq[n] : M_n -> A^n, n = 0..depth
  std::vector<QMatrix> dd;  // dd[n] : M_{n+1} -> M_n, n = 0..depth-1

  std::size_t level_size(std::size_t n) const { return eq.at(n).rows(); }
  std::size_t alphabet_size() const { return object.carrier.size(); }
};

/// (id^n (x) w): A^(n+1) -> A^n, deleting the last coordinate through w.
QMatrix delete_last(const QMatrix& weaken, std::size_t n);

/// Solves DD_n from  DD_n ; eq_n = eq_{n+1} ; (id (x) w)  at each level and
/// compares with the backend closed form when there is one. Throws
/// SquareError if a square has no solution or disagrees with the closed form.
DDChain build_dd_chain(const CopointedObject& object, std::size_t depth);

/// The closed-form DD_n of a known copointed object, in its level coordinates.
std::optional<QMatrix> closed_form_dd(const CopointedObject& object, std::size_t n);

/// Re-checks every defining square from the stored matrices.
Report verify_chain(const DDChain& chain);

struct ChainMorphism {
  std::vector<QMatrix> components;  // M_n A1 -> M_n A2, n = 0..depth
};

class CopointError : public std::invalid_argument {
 public:
  CopointError(std::size_t source_index, Rational expected, Rational actual);
  std::size_t source_index;
};

/// Lifts alpha: A1 -> A2 with alpha ; w2 = w1 to the chain morphism M_n alpha.
ChainMorphism lift_copointed_morphism(const QMatrix& alpha, const DDChain& from, const DDChain& to);

/// Squares DD1_n ; c_n = c_{n+1} ; DD2_n and the defining equations of c_n.
Report verify_chain_morphism(const ChainMorphism& morphism, const QMatrix& alpha, const DDChain& from,
                             const DDChain& to);

/// diag(multinomial(mu)) over size-n multisets: kernel coordinates to delta
/// coordinates.
QMatrix stoch_to_pcoh_coords(const Alphabet& alphabet, std::size_t n);

/// Max deviation of D_{n+1} K_n D_n^{-1} from the delta-coordinate De Finetti
/// chain, over n < depth.
Rational conjugation_deviation(const Alphabet& alphabet, std::size_t depth);

enum class ConeKind { dd, del };

/// Legs apex -> level_n (x) Y for n = 0..depth; Y has dimension y_dim (1 for
/// an unparametrised cone). DD-cones land in multisets, delete-cones in words.
struct Cone {
  ConeKind kind = ConeKind::dd;
  std::size_t y_dim = 1;
  std::vector<QMatrix> legs;

  std::size_t apex_dim() const { return legs.at(0).rows(); }
};

/// Max deviation of the cone compatibility over all levels.
Rational cone_defect(const Cone& cone, const DDChain& chain);

class SymmetryError : public std::invalid_argument {
 public:
  SymmetryError(std::size_t level, Permutation sigma);
  std::size_t level;
  Permutation sigma;
};

/// First symmetry sigma with f ; (sigma (x) id_Y) != f, if any.
std::optional<Permutation> first_broken_symmetry(const QMatrix& f, std::size_t alphabet_size, std::size_t n,
                                                 std::size_t y_dim = 1);

/// Factors each symmetric leg f_n of a delete-cone as f_n = g_n ; (eq_n (x) id_Y).
/// Throws SymmetryError naming the level and sigma of a non-symmetric leg.
Cone dagger_factorize(const Cone& delete_cone, const DDChain& chain);

/// legs g_n ; (eq_n (x) id_Y).
Cone omega_from_dd_cone(const Cone& dd_cone, const DDChain& chain);

/// Random DD-cone: a random nonnegative top leg pushed down the chain.
Cone random_dd_cone(const DDChain& chain, std::size_t apex_dim, std::size_t y_dim, Rng& rng);
/// Random delete-cone with symmetric legs: a symmetrised top leg pushed down.
Cone random_delete_cone(const DDChain& chain, std::size_t apex_dim, std::size_t y_dim, Rng& rng);

/// Deviation of f from (its solved factor) ; (eq_n (x) id_Y).
Rational parametrized_factor_deviation(const QMatrix& f, const DDChain& chain, std::size_t n, std::size_t y_dim);

struct TensorReport {
  Rational max_factor_deviation;
  Rational max_roundtrip_deviation;
  std::size_t samples = 0;
  bool holds() const { return max_factor_deviation == 0 && max_roundtrip_deviation == 0; }
};

/// Samples symmetric f into A^n (x) Y at every level, checks the factorisation
/// through eq_n (x) id_Y, and checks both cone round trips parametrised by Y.
TensorReport verify_tensor_parametrized(const DDChain& chain, std::size_t y_dim, std::size_t samples,
                                        std::uint64_t seed);

// Coherent families at truncation N.

/// DD-cone from the unit on the free pcoh chain whose legs are the
/// restrictions of b (padded coordinates).
Cone cone_from_bang(const BangElement& b, const DDChain& free_chain);
/// The element of depth N read off the top leg of a unit cone on the free
/// pcoh chain.
BangElement bang_from_cone(const Cone& cone, const DDChain& free_chain);

/// Urn laws Sum_j w_j multkern(r_j, n) as a DD-cone from the unit on the
/// stoch De Finetti chain.
Cone multkern_cone(const AtomicMeasure& mixing, const DDChain& stoch_chain);

/// Permutation matrix from padded multisets of size n over alphabet+star to
/// unpadded multisets of size <= n.
QMatrix unpadding_matrix(std::size_t alphabet_size, std::size_t n);

}  // namespace definetti::chains
