#pragma once

#include <optional>

#include "skt/crn.hpp"

namespace skt {

/// Coefficients of the SKT diffusion matrix
///   A_ij(u) = delta_ij (a0_i + sum_k a_ik u_k) + a_ij u_i.
struct DiffusionParams {
  Vector a0;  // a_{i0}
  Matrix a;   // a_{ij}

  std::size_t size() const { return static_cast<std::size_t>(a0.size()); }

  /// Shape and sign checks (a0 >= 0, a >= 0); throws std::invalid_argument.
  void validate() const;
};

Matrix diffusion_matrix(const DiffusionParams& params, const Vector& u);

/// alpha = min_i ( a_ii - 1/4 sum_j (sqrt(a_ij) - sqrt(a_ji))^2 ).
double weak_cross_alpha(const DiffusionParams& params);

/// a symmetric up to 1e-14 * max a.
bool is_detailed_balanced(const DiffusionParams& params);

enum class StructuralCondition { WeakCross, DetailedBalance };

/// Which entropy structure applies. Detailed balance wins when both hold.
std::optional<StructuralCondition> structural_condition(const DiffusionParams& params);

/// Throws DiffusionConditionError unless a0_i > 0, a_ii > 0 and one of the
/// two structural conditions holds.
StructuralCondition require_entropy_structure(const DiffusionParams& params);

/// sum_i (1/u_i) (sum_j A_ij(u) g_j) . g_i for a gradient surrogate g (n x d).
double dissipation_form(const DiffusionParams& params, const Vector& u, const Matrix& g);

/// Right-hand side of the coercivity estimate for the applicable condition:
///   weak cross:      4 sum a0_i |grad sqrt u_i|^2 + alpha sum |g_i|^2
///   detailed bal.:   4 sum a0_i |grad sqrt u_i|^2 + 2 sum a_ii |g_i|^2
///                    + 2 sum_{i!=j} a_ij |grad sqrt(u_i u_j)|^2
/// Throws DiffusionConditionError when neither condition holds.
double dissipation_lower_bound(const DiffusionParams& params, const Vector& u, const Matrix& g);

}  // namespace skt
