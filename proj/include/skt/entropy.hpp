#pragma once

#include "skt/crn.hpp"
#include "skt/crossdiff.hpp"
#include "skt/field.hpp"

namespace skt {

struct EntropyReport {
  double E = 0.0;            // relative entropy
  double D_diffusion = 0.0;  // sum_i a0_i int |grad u_i|^2 / u_i
  double D_reaction = 0.0;   // sum_r k_r u_inf^{y_r} int Psi(...)
  double L1 = 0.0;           // sum_i ||u_i - u_inf,i||_L1
};

/// Psi(x, y) = x log(x/y) - x + y, with 0 log 0 = 0.
double psi(double x, double y);

/// E(u|u_inf) = sum_i u_i log(u_i/u_inf,i) - u_i + u_inf,i.
double relative_entropy_point(const Vector& u, const Vector& u_inf);

/// Midpoint quadrature h sum_k E(u_k|u_inf).
double relative_entropy_field(const Field& field, const Vector& u_inf, const Mesh& mesh);

struct EntropyProduction {
  double diffusion = 0.0;
  double reaction = 0.0;
};

/// Fisher part from two-point face differences with the harmonic mean of the
/// two cell densities in the denominator; reaction part by cell quadrature.
EntropyProduction entropy_production_field(const ReactionNetwork& network,
                                           const DiffusionParams& params, const Field& field,
                                           const Vector& u_inf, const Mesh& mesh);

struct DissipationIdentity {
  double lhs = 0.0;  // sum_i f_i(u) (log u_i - log u_inf,i)
  double rhs = 0.0;  // -sum_r k_r u_inf^{y_r} Psi(u^{y_r}/u_inf^{y_r}, u^{y'_r}/u_inf^{y'_r})
};

/// Both sides of the reaction dissipation identity. Throws
/// std::invalid_argument unless u_inf is complex balanced.
DissipationIdentity reaction_dissipation_identity(const ReactionNetwork& network, const Vector& u,
                                                  const Vector& u_inf);

/// Pointwise reaction dissipation sum_r k_r u_inf^{y_r} Psi(...) (>= 0).
double reaction_dissipation(const ReactionNetwork& network, const Vector& u, const Vector& u_inf);

double l1_distance(const Field& field, const Vector& u_inf, const Mesh& mesh);

EntropyReport entropy_report(const ReactionNetwork& network, const DiffusionParams& params,
                             const Field& field, const Vector& u_inf, const Mesh& mesh);

/// Constant in L1^2 <= kCkpFactor * mass * E, where mass = sum_i int (u_i + 2 u_inf,i).
/// Follows from Psi(x,y) >= 3 (x-y)^2 / (2 (x + 2y)) and Cauchy-Schwarz; at
/// equal species masses it reduces to the classical 2 * sum_i int u_inf,i.
inline constexpr double kCkpFactor = 2.0 / 3.0;

/// sum_i int (u_i + 2 u_inf,i) dx.
double ckp_mass(const Field& field, const Vector& u_inf, const Mesh& mesh);

/// L1^2 <= kCkpFactor * mass * E. Returns false for L1 > 0 with E = 0,
/// which no field can produce.
bool ckp_check(double E, double L1, double mass);

}  // namespace skt
