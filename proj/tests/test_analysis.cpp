#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "skt/analysis.hpp"
#include "skt/errors.hpp"
#include "skt/report.hpp"
#include "support.hpp"

using namespace skt;

namespace {

std::vector<double> grid(double t0, double step, int count) {
  std::vector<double> t;
  for (int k = 0; k < count; ++k) t.push_back(t0 + step * k);
  return t;
}

std::vector<double> map(const std::vector<double>& x, double (*f)(double)) {
  std::vector<double> y;
  for (double v : x) y.push_back(f(v));
  return y;
}

}  // namespace

TEST_CASE("decay rate of an exact exponential") {
  const auto t = grid(0.0, 0.1, 51);
  const auto E = map(t, [](double s) { return std::exp(-2.0 * s); });
  const auto r = estimate_decay_rate(t, E);
  CHECK(r.lambda == doctest::Approx(2.0).epsilon(1e-10));
  CHECK(r.C == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(std::abs(r.r2 - 1.0) <= 1e-12);
  CHECK(r.samples == 26);
  CHECK(r.t_begin == doctest::Approx(2.5));
  CHECK(r.t_end == doctest::Approx(5.0));
}

TEST_CASE("decay rate of a constant series is zero") {
  const auto t = grid(0.0, 1.0, 20);
  const std::vector<double> E(20, 0.3);
  const auto r = estimate_decay_rate(t, E);
  CHECK(r.lambda == 0.0);
  CHECK(r.r2 >= 0.0);
  CHECK(r.r2 <= 1.0);
}

TEST_CASE("samples at the entropy floor are excluded") {
  const auto t = grid(0.0, 0.5, 40);
  std::vector<double> E = map(t, [](double s) { return 3.0 * std::exp(-1.5 * s); });
  for (std::size_t k = 20; k < E.size(); ++k) E[k] = 1e-14;
  const auto r = estimate_decay_rate(t, E);
  CHECK(r.lambda == doctest::Approx(1.5).epsilon(1e-10));
  CHECK(r.C == doctest::Approx(3.0).epsilon(1e-10));
  CHECK(r.t_end == doctest::Approx(9.5));
}

TEST_CASE("too few usable samples") {
  const auto t = grid(0.0, 1.0, 12);
  std::vector<double> E(12, 1e-15);
  for (int k = 0; k < 9; ++k) E[static_cast<std::size_t>(k)] = 1.0;
  CHECK_THROWS_AS(estimate_decay_rate(t, E), InsufficientDecayData);
}

TEST_CASE("property: exponentials with random rates are recovered") {
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> rate(0.01, 10.0), amp(-5, 5);
  for (int trial = 0; trial < 500; ++trial) {
    const double lambda = rate(rng), C = std::pow(10.0, amp(rng));
    const auto t = grid(0.0, 1.0 / lambda, 30);
    std::vector<double> E;
    for (double s : t) E.push_back(C * std::exp(-lambda * s));
    const auto r = estimate_decay_rate(t, E);
    CHECK(test::rel_err(r.lambda, lambda) <= 1e-10);
    CHECK(std::abs(r.C - C) <= 1e-9 * C);
  }
}

TEST_CASE("noisy data has R^2 inside [0, 1]") {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> noise(0.1, 10.0);
  const auto t = grid(0.0, 1.0, 30);
  std::vector<double> E;
  for (std::size_t k = 0; k < t.size(); ++k) E.push_back(noise(rng));
  const auto r = estimate_decay_rate(t, E);
  CHECK(r.r2 >= 0.0);
  CHECK(r.r2 <= 1.0);
}

TEST_CASE("entropy audit") {
  const auto t = grid(0.0, 1.0, 5);
  const std::vector<double> monotone{4, 3, 2, 1, 0.5}, uptick{4, 3, 3.5, 1, 0.5}, zeroD(5, 0.0);
  CHECK(entropy_audit(t, monotone, zeroD).max_increment == 0.0);
  CHECK(entropy_audit(t, uptick, zeroD).max_increment == 0.5);
  // D = 1: E_k + k - 4 peaks at the last sample (0.5); a unit-slope decline is tight
  const std::vector<double> ones(5, 1.0);
  CHECK(entropy_audit(t, monotone, ones).eep_defect == doctest::Approx(0.5));
  const std::vector<double> linear{4, 3, 2, 1, 0};
  CHECK(entropy_audit(t, linear, ones).eep_defect == 0.0);
  CHECK_THROWS_AS(entropy_audit(grid(0, 1, 1), std::vector<double>{1}, std::vector<double>{0}),
                  std::invalid_argument);
}

TEST_CASE("property: entropy audit is zero on nonincreasing series and scale-equivariant") {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> step(0.0, 1.0), scale(0.01, 100.0);
  const auto t = grid(0.0, 0.1, 40);
  const std::vector<double> D(40, 0.0);
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<double> E{10.0};
    for (int k = 1; k < 40; ++k) E.push_back(E.back() - step(rng) * 0.2);
    CHECK(entropy_audit(t, E, D).max_increment == 0.0);
    E[20] += 0.7;
    const double base = entropy_audit(t, E, D).max_increment;
    const double s = scale(rng);
    std::vector<double> scaled;
    for (double v : E) scaled.push_back(s * v);
    CHECK(entropy_audit(t, scaled, D).max_increment == doctest::Approx(s * base).epsilon(1e-12));
  }
}

TEST_CASE("conservation audit") {
  Vector M(2);
  M << 2, 2;
  const std::vector<Vector> constant(5, M);
  CHECK(*conservation_audit(constant, M) == 0.0);
  std::vector<Vector> drift = constant;
  drift[3](1) += 3e-3;  // relative to 1 + |M| = 3
  CHECK(*conservation_audit(drift, M) == doctest::Approx(1e-3).epsilon(1e-12));
  CHECK_FALSE(conservation_audit(constant, Vector()).has_value());
}

TEST_CASE("dissipation ratio") {
  const std::vector<double> E{1, 0.5, 0.25}, D{3, 1.5, 0.75};
  CHECK(*dissipation_ratio(E, D) == 3.0);
  const std::vector<double> floor(3, 1e-14);
  CHECK_FALSE(dissipation_ratio(floor, D).has_value());
  CHECK(gronwall_consistent(3.2, 3.0));
  CHECK_FALSE(gronwall_consistent(3.4, 3.0));
}

TEST_CASE("property: dissipation ratio ignores the time axis") {
  std::mt19937_64 rng(14);
  std::uniform_real_distribution<double> val(0.1, 2.0);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> E, D;
    for (int k = 0; k < 20; ++k) {
      E.push_back(val(rng));
      D.push_back(val(rng));
    }
    Trajectory a, b;
    for (std::size_t k = 0; k < E.size(); ++k) {
      TrajectorySample s;
      s.report.E = E[k];
      s.report.D_diffusion = 0.25 * D[k];
      s.report.D_reaction = 0.75 * D[k];
      s.t = 0.1 * static_cast<double>(k);
      a.samples.push_back(s);
      s.t = 7.0 + 3.0 * static_cast<double>(k);
      b.samples.push_back(s);
    }
    CHECK(*dissipation_ratio(a) == *dissipation_ratio(b));
    CHECK(*dissipation_ratio(a) == *dissipation_ratio(E, D));
  }
}

TEST_CASE("summary of a simulated S1 <-> S2 run") {
  SimulationSetup setup;
  setup.network = test::isomer(1, 2);
  setup.config = parse_config(test::read_text(test::data_path("isomer_step.cfg")));
  const auto traj = simulate(setup);
  const auto s = summarize(traj);
  REQUIRE(s.rate.has_value());
  CHECK(s.rate->lambda > 0.0);
  CHECK(s.rate->r2 >= 0.99);
  CHECK(s.audit.max_increment <= 1e-10 * (1 + traj.samples.front().report.E));
  REQUIRE(s.mass_drift.has_value());
  CHECK(*s.mass_drift <= 1e-8);
  REQUIRE(s.ratio.has_value());
  CHECK(*s.ratio > 0.0);
  CHECK(s.ckp_pass);

  const auto j = summary_report(s);
  for (const char* key : {"lambda_est", "C_est", "r2", "fit_window", "entropy_audit", "eep_defect", "mass_drift",
                          "dissipation_ratio", "ckp_pass"}) {
    CHECK(j.contains(key));
  }
}
