#pragma once

#include <optional>
#include <span>

#include "skt/fvsolver.hpp"

namespace skt {

/// Entropy values at or below this are treated as numerically zero.
inline constexpr double kEntropyFloor = 1e-13;

/// Least-squares fit log E(t) = log C - lambda t over the tail window.
struct RateEstimate {
  double lambda = 0.0;
  double C = 0.0;
  double r2 = 0.0;
  double t_begin = 0.0;
  double t_end = 0.0;
  std::size_t samples = 0;
};

/// Fits over the latter half of the samples with E > kEntropyFloor. Throws
/// InsufficientDecayData with fewer than 10 such samples.
RateEstimate estimate_decay_rate(std::span<const double> t, std::span<const double> E);
RateEstimate estimate_decay_rate(const Trajectory& trajectory);

struct EntropyAudit {
  double max_increment = 0.0;  // max_k (E_{k+1} - E_k)^+
  /// max_k [E_k + int_0^{t_k} D - E_0] with trapezoidal quadrature of D;
  /// nonpositive when the weak entropy inequality holds.
  double eep_defect = 0.0;
};

EntropyAudit entropy_audit(std::span<const double> t, std::span<const double> E,
                           std::span<const double> D);
EntropyAudit entropy_audit(const Trajectory& trajectory);

/// max_k |mass_k - M|_inf / (1 + |M|_inf); nullopt when there are no
/// conservation laws.
std::optional<double> conservation_audit(const Trajectory& trajectory, const Vector& M);
std::optional<double> conservation_audit(std::span<const Vector> masses, const Vector& M);

/// min_k D_k / E_k over samples with E_k > kEntropyFloor; nullopt if none.
std::optional<double> dissipation_ratio(std::span<const double> E, std::span<const double> D);
std::optional<double> dissipation_ratio(const Trajectory& trajectory);

/// lambda_est <= 1.1 * ratio.
bool gronwall_consistent(double lambda_est, double ratio);

struct Summary {
  std::optional<RateEstimate> rate;
  EntropyAudit audit;
  std::optional<double> mass_drift;
  std::optional<double> ratio;
  bool ckp_pass = true;
};

Summary summarize(const Trajectory& trajectory);

}  // namespace skt
