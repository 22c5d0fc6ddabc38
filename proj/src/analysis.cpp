#include "skt/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "skt/errors.hpp"

namespace skt {

namespace {

struct Series {
  std::vector<double> t, E, D;
  std::vector<Vector> mass;
};

Series series_of(const Trajectory& traj) {
  Series s;
  for (const auto& sample : traj.samples) {
    s.t.push_back(sample.t);
    s.E.push_back(sample.report.E);
    s.D.push_back(sample.report.D_diffusion + sample.report.D_reaction);
    s.mass.push_back(sample.mass);
  }
  return s;
}

}  // namespace

RateEstimate estimate_decay_rate(std::span<const double> t, std::span<const double> E) {
  if (t.size() != E.size()) throw std::invalid_argument("time and entropy series differ in length");
  std::vector<std::size_t> usable;
  for (std::size_t k = 0; k < E.size(); ++k) {
    if (E[k] > kEntropyFloor && std::isfinite(E[k])) usable.push_back(k);
  }
  if (usable.size() < 10) {
    throw InsufficientDecayData(std::to_string(usable.size()) + " samples above the entropy floor, need 10");
  }
  const std::span<const std::size_t> window(usable.begin() + static_cast<std::ptrdiff_t>(usable.size() / 2),
                                            usable.end());
  const double count = static_cast<double>(window.size());
  double mean_t = 0.0, mean_y = 0.0;
  for (auto k : window) {
    mean_t += t[k];
    mean_y += std::log(E[k]);
  }
  mean_t /= count;
  mean_y /= count;
  double stt = 0.0, sty = 0.0, syy = 0.0;
  for (auto k : window) {
    const double dt = t[k] - mean_t;
    const double dy = std::log(E[k]) - mean_y;
    stt += dt * dt;
    sty += dt * dy;
    syy += dy * dy;
  }
  RateEstimate r;
  const double slope = stt > 0.0 ? sty / stt : 0.0;
  const double intercept = mean_y - slope * mean_t;
  r.lambda = -slope;
  r.C = std::exp(intercept);
  double ss_res = 0.0;
  for (auto k : window) {
    const double e = std::log(E[k]) - (intercept + slope * t[k]);
    ss_res += e * e;
  }
  r.r2 = syy > 0.0 ? std::clamp(1.0 - ss_res / syy, 0.0, 1.0) : 1.0;
  r.t_begin = t[window.front()];
  r.t_end = t[window.back()];
  r.samples = window.size();
  return r;
}

RateEstimate estimate_decay_rate(const Trajectory& trajectory) {
  const auto s = series_of(trajectory);
  return estimate_decay_rate(s.t, s.E);
}

EntropyAudit entropy_audit(std::span<const double> t, std::span<const double> E,
                           std::span<const double> D) {
  if (E.size() < 2) throw std::invalid_argument("entropy audit needs at least two samples");
  if (t.size() != E.size() || D.size() != E.size()) {
    throw std::invalid_argument("series differ in length");
  }
  EntropyAudit a;
  double integral = 0.0;
  a.eep_defect = -INFINITY;
  for (std::size_t k = 0; k < E.size(); ++k) {
    if (k > 0) {
      a.max_increment = std::max(a.max_increment, E[k] - E[k - 1]);
      integral += 0.5 * (t[k] - t[k - 1]) * (D[k] + D[k - 1]);
    }
    a.eep_defect = std::max(a.eep_defect, E[k] + integral - E[0]);
  }
  return a;
}

EntropyAudit entropy_audit(const Trajectory& trajectory) {
  const auto s = series_of(trajectory);
  return entropy_audit(s.t, s.E, s.D);
}

std::optional<double> conservation_audit(std::span<const Vector> masses, const Vector& M) {
  if (M.size() == 0) return std::nullopt;
  const double scale = 1.0 + M.cwiseAbs().maxCoeff();
  double drift = 0.0;
  for (const auto& m : masses) drift = std::max(drift, (m - M).cwiseAbs().maxCoeff() / scale);
  return drift;
}

std::optional<double> conservation_audit(const Trajectory& trajectory, const Vector& M) {
  const auto s = series_of(trajectory);
  return conservation_audit(s.mass, M);
}

std::optional<double> dissipation_ratio(std::span<const double> E, std::span<const double> D) {
  std::optional<double> best;
  for (std::size_t k = 0; k < E.size(); ++k) {
    if (!(E[k] > kEntropyFloor)) continue;
    const double r = D[k] / E[k];
    if (!best || r < *best) best = r;
  }
  return best;
}

std::optional<double> dissipation_ratio(const Trajectory& trajectory) {
  const auto s = series_of(trajectory);
  return dissipation_ratio(s.E, s.D);
}

bool gronwall_consistent(double lambda_est, double ratio) { return lambda_est <= ratio * 1.1; }

Summary summarize(const Trajectory& trajectory) {
  Summary s;
  try {
    s.rate = estimate_decay_rate(trajectory);
  } catch (const InsufficientDecayData&) {
    s.rate.reset();
  }
  if (trajectory.samples.size() >= 2) s.audit = entropy_audit(trajectory);
  s.mass_drift = conservation_audit(trajectory, trajectory.M);
  s.ratio = dissipation_ratio(trajectory);
  for (const auto& sample : trajectory.samples) {
    if (!ckp_check(sample.report.E, sample.report.L1, sample.ckp_mass)) s.ckp_pass = false;
  }
  return s;
}

}  // namespace skt
