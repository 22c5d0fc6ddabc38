#include "skt/crossdiff.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "skt/errors.hpp"

namespace skt {

void DiffusionParams::validate() const {
  if (a.rows() != a0.size() || a.cols() != a0.size()) {
    throw std::invalid_argument("diffusion params: a must be n x n with n = len(a0)");
  }
  if ((a0.array() < 0).any() || (a.array() < 0).any() || !a0.allFinite() || !a.allFinite()) {
    throw std::invalid_argument("diffusion params: coefficients must be nonnegative");
  }
}

namespace {

void require_state(const DiffusionParams& params, const Vector& u, bool strict) {
  if (u.size() != params.a0.size()) throw std::invalid_argument("state has wrong dimension");
  if (strict ? !(u.array() > 0).all() : (u.array() < 0).any()) {
    throw std::invalid_argument(strict ? "density must be strictly positive" : "negative density");
  }
}

}  // namespace

Matrix diffusion_matrix(const DiffusionParams& params, const Vector& u) {
  require_state(params, u, false);
  Matrix A = params.a.array().colwise() * u.array();  // a_ij u_i
  A.diagonal() += params.a0 + params.a * u;
  return A;
}

double weak_cross_alpha(const DiffusionParams& params) {
  const auto n = params.a.rows();
  const Matrix root = params.a.cwiseSqrt();
  double alpha = INFINITY;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double skew = (root.row(i) - root.col(i).transpose()).squaredNorm();
    alpha = std::min(alpha, params.a(i, i) - 0.25 * skew);
  }
  return alpha;
}

bool is_detailed_balanced(const DiffusionParams& params) {
  if (params.a.size() == 0) return true;
  const double asym = (params.a - params.a.transpose()).cwiseAbs().maxCoeff();
  return asym <= 1e-14 * params.a.maxCoeff();
}

std::optional<StructuralCondition> structural_condition(const DiffusionParams& params) {
  if (is_detailed_balanced(params)) return StructuralCondition::DetailedBalance;
  if (weak_cross_alpha(params) > 0.0) return StructuralCondition::WeakCross;
  return std::nullopt;
}

StructuralCondition require_entropy_structure(const DiffusionParams& params) {
  params.validate();
  for (Eigen::Index i = 0; i < params.a0.size(); ++i) {
    if (!(params.a0(i) > 0.0)) {
      throw DiffusionConditionError("a0_" + std::to_string(i + 1) + " must be positive");
    }
    if (!(params.a(i, i) > 0.0)) {
      throw DiffusionConditionError("a_" + std::to_string(i + 1) + std::to_string(i + 1) +
                                    " must be positive");
    }
  }
  const auto cond = structural_condition(params);
  if (!cond) {
    throw DiffusionConditionError("neither the weak cross-diffusion condition (alpha = " +
                                  std::to_string(weak_cross_alpha(params)) +
                                  ") nor detailed balance holds");
  }
  return *cond;
}

double dissipation_form(const DiffusionParams& params, const Vector& u, const Matrix& g) {
  require_state(params, u, true);
  if (g.rows() != u.size()) throw std::invalid_argument("gradient has wrong number of rows");
  const Matrix A = diffusion_matrix(params, u);
  const Matrix flux = A * g;  // row i: sum_j A_ij g_j
  double total = 0.0;
  for (Eigen::Index i = 0; i < u.size(); ++i) total += flux.row(i).dot(g.row(i)) / u(i);
  return total;
}

double dissipation_lower_bound(const DiffusionParams& params, const Vector& u, const Matrix& g) {
  require_state(params, u, true);
  if (g.rows() != u.size()) throw std::invalid_argument("gradient has wrong number of rows");
  const auto cond = structural_condition(params);
  if (!cond) throw DiffusionConditionError("neither structural condition holds");

  const auto n = u.size();
  double bound = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    // 4 |grad sqrt u_i|^2 with grad sqrt u_i = g_i / (2 sqrt u_i)
    const auto grad_sqrt = g.row(i) / (2.0 * std::sqrt(u(i)));
    bound += 4.0 * params.a0(i) * grad_sqrt.squaredNorm();
  }
  if (*cond == StructuralCondition::WeakCross) {
    return bound + weak_cross_alpha(params) * g.squaredNorm();
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    bound += 2.0 * params.a(i, i) * g.row(i).squaredNorm();
    for (Eigen::Index j = 0; j < n; ++j) {
      if (j == i) continue;
      const auto grad_sqrt_prod =
          0.5 * (std::sqrt(u(j) / u(i)) * g.row(i) + std::sqrt(u(i) / u(j)) * g.row(j));
      bound += 2.0 * params.a(i, j) * grad_sqrt_prod.squaredNorm();
    }
  }
  return bound;
}

}  // namespace skt
