#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "skt/entropy.hpp"
#include "support.hpp"

using namespace skt;

namespace {

Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

DiffusionParams diffusion(Eigen::Index n, double a0) {
  return DiffusionParams{Vector::Constant(n, a0), Matrix::Zero(n, n)};
}

/// sum_r k_r u_inf^{y_r} Psi(u^{y_r}/u_inf^{y_r}, u^{y'_r}/u_inf^{y'_r}) written out with std::log.
double reaction_oracle(const ReactionNetwork& net, const Vector& u, const Vector& u_inf) {
  double total = 0.0;
  for (const auto& rx : net.reactions) {
    double mu = 1.0, mu_inf = 1.0, nu = 1.0, nu_inf = 1.0;
    for (Eigen::Index j = 0; j < u.size(); ++j) {
      mu *= std::pow(u(j), rx.source(j));
      mu_inf *= std::pow(u_inf(j), rx.source(j));
      nu *= std::pow(u(j), rx.target(j));
      nu_inf *= std::pow(u_inf(j), rx.target(j));
    }
    const double x = mu / mu_inf, y = nu / nu_inf;
    total += rx.rate * mu_inf * (x * std::log(x / y) - x + y);
  }
  return total;
}

struct Reference {
  ReactionNetwork network;
  Vector u_inf;
};

std::vector<Reference> references() {
  const auto tri = test::triangle();
  return {{test::isomer(1, 2), vec({2, 1})},
          {test::association(), vec({1, 1, 1})},
          {tri, find_complex_balanced_equilibrium(tri, 0).u}};
}

}  // namespace

TEST_CASE("psi examples") {
  CHECK(psi(3.0, 3.0) == 0.0);
  CHECK(psi(std::exp(1.0), 1.0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(psi(0.0, 2.5) == 2.5);
  CHECK_THROWS_AS(psi(1.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(psi(-1.0, 1.0), std::invalid_argument);
}

TEST_CASE("psi keeps relative accuracy near the diagonal") {
  // Psi(y(1+d), y) = y((1+d)log(1+d) - d) = y(d^2/2 - d^3/6 + ...)
  for (double d : {1e-4, -1e-5, 1e-8, 3e-12}) {
    const double expected = 2.0 * (d * d / 2 - d * d * d / 6 + d * d * d * d / 12);
    CHECK(psi(2.0 * (1 + d), 2.0) == doctest::Approx(expected).epsilon(1e-8));
  }
}

TEST_CASE("property: psi is nonnegative and convex in x") {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> pos(0.0, 10.0), lam(0.0, 1.0);
  for (int trial = 0; trial < 10000; ++trial) {
    const double x1 = pos(rng), x2 = pos(rng), y = pos(rng) + 1e-3, l = lam(rng);
    CHECK(psi(x1, y) >= 0.0);
    const double mid = psi(l * x1 + (1 - l) * x2, y);
    CHECK(mid <= l * psi(x1, y) + (1 - l) * psi(x2, y) + 1e-12);
  }
}

TEST_CASE("relative entropy of a point") {
  const Vector u_inf = vec({1.0, 2.0});
  CHECK(relative_entropy_point(u_inf, u_inf) == 0.0);
  CHECK(relative_entropy_point(vec({std::exp(1.0)}), vec({1.0})) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(relative_entropy_point(vec({0, 0}), u_inf) == 3.0);
  CHECK(relative_entropy_point(u_inf + vec({1e-12, 0}), u_inf) > 0.0);
  CHECK_THROWS_AS(relative_entropy_point(vec({1, 1}), vec({1, 0})), std::invalid_argument);
}

TEST_CASE("property: pointwise entropy equals the weighted Psi sum") {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 1000; ++trial) {
    const Vector u = test::uniform_vector(rng, 3, 0, 5);
    const Vector u_inf = test::uniform_vector(rng, 3, 0.1, 5);
    double expected = 0.0;
    for (Eigen::Index i = 0; i < 3; ++i) expected += u_inf(i) * psi(u(i) / u_inf(i), 1.0);
    CHECK(test::rel_err(relative_entropy_point(u, u_inf), expected) <= 1e-12);
  }
}

TEST_CASE("relative entropy of fields") {
  const Mesh mesh(1.0, 8);
  const Vector one = vec({1.0});
  CHECK(relative_entropy_field(Field::constant(8, one), one, mesh) == 0.0);
  CHECK(relative_entropy_field(Field::constant(8, vec({std::exp(1.0)})), one, mesh) ==
        doctest::Approx(1.0).epsilon(1e-14));
  Field half(8, 1);
  for (std::size_t k = 0; k < 8; ++k) half(k, 0) = k < 4 ? 1.0 : 2.0;
  CHECK(relative_entropy_field(half, one, mesh) == doctest::Approx(0.5 * (2 * std::log(2.0) - 1)).epsilon(1e-14));
  CHECK(l1_distance(half, one, mesh) == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("L1 distance examples") {
  const Mesh mesh(1.0, 5);
  const Vector u_inf = vec({1.0, 2.0, 3.0});
  CHECK(l1_distance(Field::constant(5, u_inf), u_inf, mesh) == 0.0);
  CHECK(l1_distance(Field::constant(5, u_inf + vec({1, 0, 0})), u_inf, mesh) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("entropy production examples") {
  const auto net = test::isomer(1, 2);
  const Vector u_inf = vec({2, 1});
  const Mesh mesh(2.0, 6);
  const auto params = diffusion(2, 0.3);
  const auto at_eq = entropy_production_field(net, params, Field::constant(6, u_inf), u_inf, mesh);
  CHECK(at_eq.diffusion == 0.0);
  CHECK(at_eq.reaction == 0.0);

  const Vector u = vec({1, 3});
  const auto off = entropy_production_field(net, params, Field::constant(6, u), u_inf, mesh);
  CHECK(off.diffusion == 0.0);
  CHECK(test::rel_err(off.reaction, 2.0 * reaction_oracle(net, u, u_inf)) <= 1e-13);
}

TEST_CASE("single species without reactions: only the Fisher part") {
  ReactionNetwork net;
  net.species = {"A"};
  const Mesh mesh(1.0, 4);
  Field linear(4, 1);
  for (std::size_t k = 0; k < 4; ++k) linear(k, 0) = 1.0 + static_cast<double>(k);
  const auto prod = entropy_production_field(net, diffusion(1, 0.5), linear, vec({2.5}), mesh);
  CHECK(prod.reaction == 0.0);
  CHECK(prod.diffusion > 0.0);
  // faces (1,2), (2,3), (3,4): jump 1, harmonic means 4/3, 12/5, 24/7, h = 1/4
  const double fisher = (1.0 / (4.0 / 3.0) + 1.0 / (12.0 / 5.0) + 1.0 / (24.0 / 7.0)) / 0.25;
  CHECK(prod.diffusion == doctest::Approx(0.5 * fisher).epsilon(1e-14));
}

TEST_CASE("reaction dissipation identity: S1 <-> S2 by hand") {
  const auto id = reaction_dissipation_identity(test::isomer(1, 2), vec({1, 1}), vec({2, 1}));
  CHECK(id.lhs == doctest::Approx(-std::log(2.0)).epsilon(1e-15));
  CHECK(id.rhs == doctest::Approx(-std::log(2.0)).epsilon(1e-15));
  const auto zero = reaction_dissipation_identity(test::isomer(1, 2), vec({2, 1}), vec({2, 1}));
  CHECK(zero.lhs == 0.0);
  CHECK(zero.rhs == 0.0);
}

TEST_CASE("identity refuses a reference that is not complex balanced") {
  CHECK_THROWS_AS(reaction_dissipation_identity(test::isomer(1, 2), vec({1, 1}), vec({1, 1})),
                  std::invalid_argument);
}

TEST_CASE("property: identity sweep over random positive states") {
  std::mt19937_64 rng(31);
  for (const auto& [net, u_inf] : references()) {
    for (int trial = 0; trial < 1000; ++trial) {
      const Vector u = test::log_uniform_vector(rng, u_inf.size(), -2, 2);
      const auto id = reaction_dissipation_identity(net, u, u_inf);
      CHECK(std::abs(id.lhs - id.rhs) <= 1e-10 * (1.0 + std::abs(id.rhs)));
      CHECK(id.lhs <= 0.0);
      CHECK(test::rel_err(-id.rhs, reaction_oracle(net, u, u_inf)) <= 1e-10);
    }
  }
}

TEST_CASE("property: summed reaction production equals the cellwise identity") {
  std::mt19937_64 rng(32);
  for (const auto& [net, u_inf] : references()) {
    const auto n = u_inf.size();
    const Mesh mesh(1.5, 7);
    Field field(7, static_cast<std::size_t>(n));
    for (std::size_t k = 0; k < 7; ++k) {
      field.values().row(static_cast<Eigen::Index>(k)) = test::log_uniform_vector(rng, n, -1, 1).transpose();
    }
    double expected = 0.0;
    for (std::size_t k = 0; k < 7; ++k) {
      expected -= mesh.h() * reaction_dissipation_identity(net, field.cell(k), u_inf).lhs;
    }
    const auto prod = entropy_production_field(net, diffusion(n, 1.0), field, u_inf, mesh);
    CHECK(std::abs(prod.reaction - expected) <= 1e-10 * (1.0 + expected));
  }
}

TEST_CASE("CKP constant: brute-force calibration on two-cell fields") {
  // sup of L1^2 / (mass E) over random two-cell fields, mass = sum_i int (u_i + 2 u_inf,i)
  std::mt19937_64 rng(2718);
  const Mesh mesh(1.0, 2);
  double worst = 0.0;
  for (int trial = 0; trial < 200000; ++trial) {
    const Eigen::Index n = 1 + trial % 3;
    const Vector u_inf = test::log_uniform_vector(rng, n, -2, 2);
    Field field(2, static_cast<std::size_t>(n));
    const double spread = std::pow(10.0, -6.0 + 7.0 * (trial % 100) / 100.0);
    for (std::size_t k = 0; k < 2; ++k) {
      const Vector factor = test::uniform_vector(rng, n, -spread, spread);
      field.values().row(static_cast<Eigen::Index>(k)) =
          (u_inf.array() * (1.0 + factor.array()).max(0.0)).transpose();
    }
    const double E = relative_entropy_field(field, u_inf, mesh);
    if (!(E > 1e-200)) continue;
    const double L1 = l1_distance(field, u_inf, mesh);
    const double mass = ckp_mass(field, u_inf, mesh);
    worst = std::max(worst, L1 * L1 / (mass * E));
    CHECK(ckp_check(E, L1, mass));
  }
  // the constant is approached near equilibrium
  CHECK(worst <= kCkpFactor * (1 + 1e-9));
  CHECK(worst >= 0.99 * kCkpFactor);
}

TEST_CASE("CKP check edge cases") {
  CHECK(ckp_check(0.0, 0.0, 3.0));
  CHECK_FALSE(ckp_check(0.0, 1e-3, 3.0));
  CHECK_FALSE(ckp_check(1e-6, 1.0, 3.0));
}
