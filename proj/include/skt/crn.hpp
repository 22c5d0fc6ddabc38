#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace skt {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// One mass-action reaction y -> y' with rate constant k.
struct Reaction {
  Vector source;  // y_r
  Vector target;  // y'_r
  double rate = 0.0;

  bool operator==(const Reaction& other) const {
    return source == other.source && target == other.target && rate == other.rate;
  }
};

struct ReactionNetwork {
  std::vector<std::string> species;
  std::vector<Reaction> reactions;

  std::size_t num_species() const { return species.size(); }
  std::size_t num_reactions() const { return reactions.size(); }

  /// Throws std::invalid_argument if a reaction has the wrong width,
  /// a nonpositive rate, a negative coefficient or y == y'.
  void validate() const;

  /// n x R matrix whose columns are y'_r - y_r.
  Matrix stoichiometric_matrix() const;

  /// True when every stoichiometric coefficient is an integer.
  bool has_integer_coefficients() const;

  bool operator==(const ReactionNetwork& other) const {
    return species == other.species && reactions == other.reactions;
  }
};

/// u^y = prod_j u_j^{y_j} with the convention 0^0 = 1.
double monomial(const Vector& u, const Vector& y);

/// Mass-action production rates f_i(u) = sum_r k_r (y'_{r,i} - y_{r,i}) u^{y_r}.
Vector mass_action_rates(const ReactionNetwork& network, const Vector& u);

// --------------------------------------------------------------------------
// Conservation laws

struct ConservationBasis {
  /// m x n; rows span the orthogonal complement of span{y'_r - y_r}.
  Matrix Q;
  /// True when Q was obtained by exact rational elimination.
  bool exact = false;

  std::size_t m() const { return static_cast<std::size_t>(Q.rows()); }
};

ConservationBasis conservation_basis(const ReactionNetwork& network);

/// Dimension s of the stoichiometric subspace.
std::size_t stoichiometric_rank(const ReactionNetwork& network);

// --------------------------------------------------------------------------
// Complex graph

struct ComplexDecomposition {
  std::vector<Vector> complexes;               // first-appearance order
  std::vector<std::size_t> reaction_source;    // complex index of y_r
  std::vector<std::size_t> reaction_target;    // complex index of y'_r
  std::vector<std::vector<std::size_t>> adjacency;  // undirected, sorted, no duplicates
  std::vector<std::size_t> linkage_class;      // per complex
  std::size_t c = 0;
  std::size_t ell = 0;
  std::size_t s = 0;
  bool weakly_reversible = false;

  std::size_t index_of(const Vector& y) const;  // throws std::out_of_range
};

ComplexDecomposition complex_decomposition(const ReactionNetwork& network);

/// delta = c - ell - s.
int deficiency(const ReactionNetwork& network);

// --------------------------------------------------------------------------
// Complex-balanced equilibria

/// Per-complex outflow minus inflow, ordered as in complex_decomposition().
Vector complex_balance_residual(const ReactionNetwork& network, const Vector& u);

/// Largest total outflow over all complexes at u.
double max_complex_outflow(const ReactionNetwork& network, const Vector& u);

/// Acceptance test max|residual| <= tol (1 + max outflow).
bool is_complex_balanced(const ReactionNetwork& network, const Vector& u,
                         double tol = 1e-10);

struct EquilibriumResult {
  Vector u;          // strictly positive
  double residual = 0.0;  // max |complex residual|
  Vector mass;       // Q u
  int iterations = 0;
  /// Deficiency zero and weakly reversible: complex balanced for all rates.
  bool deficiency_zero_certificate = false;
};

inline constexpr int kEquilibriumStarts = 16;

/// Multi-start Levenberg-Marquardt search for a positive complex-balanced
/// point in log coordinates. Throws NoComplexBalance when every start fails.
EquilibriumResult find_complex_balanced_equilibrium(const ReactionNetwork& network,
                                                    std::uint64_t seed);

/// The unique complex-balanced equilibrium u* o exp(Q^T c) with Q u = M.
/// Throws MassNotReachable when M is not in the image of the positive orthant.
EquilibriumResult project_equilibrium_to_mass(const ReactionNetwork& network,
                                              const Vector& u_star, const Matrix& Q,
                                              const Vector& M);

/// Convenience: find u* and project it to M (skips projection when m = 0).
EquilibriumResult equilibrium_for_mass(const ReactionNetwork& network, const Matrix& Q,
                                       const Vector& M, std::uint64_t seed);

// --------------------------------------------------------------------------
// Boundary equilibria

struct BoundaryFace {
  std::vector<std::size_t> zero_species;  // Z, sorted
  /// A point of the closed face satisfies complex balance.
  bool balanced = false;
  /// Balance is only reached at the origin (every monomial vanishes there).
  bool only_at_origin = false;
  /// A balanced point with u_i > 0 off Z and Q u = M exists.
  bool mass_feasible = false;
  double residual = 0.0;
  Vector point;  // witness (empty when only_at_origin)
};

/// Enumerates every nonempty proper subset of species forced to zero and
/// returns the faces on which complex balance can hold. Requires n <= 16.
std::vector<BoundaryFace> scan_boundary_equilibria(const ReactionNetwork& network,
                                                   const Matrix& Q, const Vector& M,
                                                   std::uint64_t seed = 0);

/// The faces of a scan that admit a mass-feasible boundary equilibrium.
std::vector<BoundaryFace> mass_feasible_faces(const std::vector<BoundaryFace>& faces);

}  // namespace skt
