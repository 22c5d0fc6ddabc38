#include "skt/entropy.hpp"

#include <cmath>
#include <stdexcept>

namespace skt {

namespace {

/// (1+d) log(1+d) - d, i.e. t log t - t + 1 at t = 1 + d; relative
/// accuracy kept for small |d| through the Taylor series.
double phi_shifted(double d) {
  if (d == -1.0) return 1.0;
  if (std::abs(d) < 1e-3) {
    // sum_{k>=2} (-1)^k d^k / (k (k-1))
    double term = d * d;
    double sum = 0.0;
    for (int k = 2; k <= 8; ++k) {
      sum += term / (k * (k - 1));
      term *= -d;
    }
    return sum;
  }
  return (1.0 + d) * std::log1p(d) - d;
}

/// x log(x/y) - x + y for x >= 0, y > 0.
double entropy_density(double x, double y) { return y * phi_shifted((x - y) / y); }

void require_reference(const Vector& u_inf) {
  if (!(u_inf.array() > 0).all() || !u_inf.allFinite()) {
    throw std::invalid_argument("equilibrium reference must be strictly positive");
  }
}

}  // namespace

double psi(double x, double y) {
  if (!(y > 0.0)) throw std::invalid_argument("psi: second argument must be positive");
  if (x < 0.0) throw std::invalid_argument("psi: first argument must be nonnegative");
  return entropy_density(x, y);
}

double relative_entropy_point(const Vector& u, const Vector& u_inf) {
  require_reference(u_inf);
  if (u.size() != u_inf.size()) throw std::invalid_argument("state has wrong dimension");
  if ((u.array() < 0).any()) throw std::invalid_argument("relative entropy of a negative state");
  double e = 0.0;
  for (Eigen::Index i = 0; i < u.size(); ++i) e += entropy_density(u(i), u_inf(i));
  return e;
}

double relative_entropy_field(const Field& field, const Vector& u_inf, const Mesh& mesh) {
  double e = 0.0;
  for (std::size_t k = 0; k < field.cells(); ++k) e += relative_entropy_point(field.cell(k), u_inf);
  return mesh.h() * e;
}

double reaction_dissipation(const ReactionNetwork& network, const Vector& u, const Vector& u_inf) {
  double d = 0.0;
  for (const auto& rx : network.reactions) {
    const double ref = monomial(u_inf, rx.source);
    const double x = monomial(u, rx.source) / ref;
    const double y = monomial(u, rx.target) / monomial(u_inf, rx.target);
    if (y == 0.0) {
      if (x > 0.0) return INFINITY;
      continue;
    }
    d += rx.rate * ref * psi(x, y);
  }
  return d;
}

EntropyProduction entropy_production_field(const ReactionNetwork& network,
                                           const DiffusionParams& params, const Field& field,
                                           const Vector& u_inf, const Mesh& mesh) {
  require_reference(u_inf);
  if (!(field.values().array() > 0).all()) {
    throw std::invalid_argument("entropy production needs a strictly positive field");
  }
  const double h = mesh.h();
  EntropyProduction out;
  for (std::size_t i = 0; i < field.species(); ++i) {
    const double a0 = params.a0(static_cast<Eigen::Index>(i));
    if (a0 == 0.0) continue;
    double fisher = 0.0;
    for (std::size_t k = 0; k + 1 < field.cells(); ++k) {
      const double left = field(k, i);
      const double right = field(k + 1, i);
      const double harmonic = 2.0 * left * right / (left + right);
      const double jump = right - left;
      fisher += jump * jump / (h * harmonic);
    }
    out.diffusion += a0 * fisher;
  }
  for (std::size_t k = 0; k < field.cells(); ++k) {
    out.reaction += h * reaction_dissipation(network, field.cell(k), u_inf);
  }
  return out;
}

DissipationIdentity reaction_dissipation_identity(const ReactionNetwork& network, const Vector& u,
                                                  const Vector& u_inf) {
  require_reference(u_inf);
  if (!(u.array() > 0).all()) throw std::invalid_argument("identity needs a strictly positive state");
  if (!is_complex_balanced(network, u_inf, 1e-10)) {
    throw std::invalid_argument("reference state is not complex balanced");
  }
  const Vector f = mass_action_rates(network, u);
  DissipationIdentity out;
  out.lhs = f.dot((u.array().log() - u_inf.array().log()).matrix());
  out.rhs = -reaction_dissipation(network, u, u_inf);
  return out;
}

double l1_distance(const Field& field, const Vector& u_inf, const Mesh& mesh) {
  const Matrix diff = field.values().rowwise() - u_inf.transpose();
  return mesh.h() * diff.cwiseAbs().sum();
}

EntropyReport entropy_report(const ReactionNetwork& network, const DiffusionParams& params,
                             const Field& field, const Vector& u_inf, const Mesh& mesh) {
  EntropyReport r;
  r.E = relative_entropy_field(field, u_inf, mesh);
  const auto prod = entropy_production_field(network, params, field, u_inf, mesh);
  r.D_diffusion = prod.diffusion;
  r.D_reaction = prod.reaction;
  r.L1 = l1_distance(field, u_inf, mesh);
  return r;
}

double ckp_mass(const Field& field, const Vector& u_inf, const Mesh& mesh) {
  return mesh.length * (field.mean().sum() + 2.0 * u_inf.sum());
}

bool ckp_check(double E, double L1, double mass) {
  if (E <= 0.0) return L1 == 0.0;
  return L1 * L1 <= kCkpFactor * mass * E * (1.0 + 1e-9);
}

}  // namespace skt
