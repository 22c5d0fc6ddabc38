#include "skt/crn.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>

#include "levenberg.hpp"
#include "nullspace.hpp"
#include "skt/errors.hpp"

namespace skt {

void ReactionNetwork::validate() const {
  const auto n = static_cast<Eigen::Index>(num_species());
  if (n < 1) throw std::invalid_argument("network has no species");
  for (std::size_t r = 0; r < reactions.size(); ++r) {
    const auto& rx = reactions[r];
    const std::string tag = "reaction " + std::to_string(r + 1);
    if (rx.source.size() != n || rx.target.size() != n) {
      throw std::invalid_argument(tag + ": complex width does not match species count");
    }
    if (!(rx.rate > 0.0) || !std::isfinite(rx.rate)) {
      throw std::invalid_argument(tag + ": rate constant must be positive and finite");
    }
    if ((rx.source.array() < 0).any() || (rx.target.array() < 0).any() ||
        !rx.source.allFinite() || !rx.target.allFinite()) {
      throw std::invalid_argument(tag + ": negative stoichiometric coefficient");
    }
    if (rx.source == rx.target) throw std::invalid_argument(tag + ": source equals target");
  }
}

Matrix ReactionNetwork::stoichiometric_matrix() const {
  Matrix W(num_species(), num_reactions());
  for (std::size_t r = 0; r < reactions.size(); ++r) {
    W.col(static_cast<Eigen::Index>(r)) = reactions[r].target - reactions[r].source;
  }
  return W;
}

bool ReactionNetwork::has_integer_coefficients() const {
  auto integral = [](const Vector& y) {
    return (y.array() == y.array().round()).all();
  };
  return std::all_of(reactions.begin(), reactions.end(), [&](const Reaction& rx) {
    return integral(rx.source) && integral(rx.target);
  });
}

double monomial(const Vector& u, const Vector& y) {
  double p = 1.0;
  for (Eigen::Index j = 0; j < y.size(); ++j) {
    const double e = y(j);
    if (e == 0.0) continue;
    if (e == 1.0) {
      p *= u(j);
    } else if (e == 2.0) {
      p *= u(j) * u(j);
    } else {
      p *= std::pow(u(j), e);
    }
  }
  return p;
}

Vector mass_action_rates(const ReactionNetwork& network, const Vector& u) {
  if (u.size() != static_cast<Eigen::Index>(network.num_species())) {
    throw std::invalid_argument("state has wrong dimension");
  }
  if ((u.array() < 0).any()) throw std::invalid_argument("mass_action_rates: negative density");
  Vector f = Vector::Zero(u.size());
  for (const auto& rx : network.reactions) {
    const double flux = rx.rate * monomial(u, rx.source);
    if (flux != 0.0) f += flux * (rx.target - rx.source);
  }
  return f;
}

// --------------------------------------------------------------------------

ConservationBasis conservation_basis(const ReactionNetwork& network) {
  const Matrix Wt = network.stoichiometric_matrix().transpose();
  ConservationBasis basis;
  if (network.has_integer_coefficients()) {
    basis.Q = detail::exact_nullspace_rows(Wt);
    basis.exact = true;
  } else {
    basis.Q = detail::svd_nullspace_rows(Wt, 1e-10);
  }
  return basis;
}

std::size_t stoichiometric_rank(const ReactionNetwork& network) {
  const Matrix W = network.stoichiometric_matrix();
  return network.has_integer_coefficients() ? detail::exact_rank(W) : detail::svd_rank(W, 1e-10);
}

// --------------------------------------------------------------------------

std::size_t ComplexDecomposition::index_of(const Vector& y) const {
  for (std::size_t i = 0; i < complexes.size(); ++i) {
    if (complexes[i] == y) return i;
  }
  throw std::out_of_range("complex not present in network");
}

ComplexDecomposition complex_decomposition(const ReactionNetwork& network) {
  ComplexDecomposition d;
  auto intern = [&d](const Vector& y) {
    for (std::size_t i = 0; i < d.complexes.size(); ++i) {
      if (d.complexes[i] == y) return i;
    }
    d.complexes.push_back(y);
    return d.complexes.size() - 1;
  };
  for (const auto& rx : network.reactions) {
    d.reaction_source.push_back(intern(rx.source));
    d.reaction_target.push_back(intern(rx.target));
  }
  d.c = d.complexes.size();

  d.adjacency.assign(d.c, {});
  std::vector<std::vector<bool>> reach(d.c, std::vector<bool>(d.c, false));
  for (std::size_t r = 0; r < network.num_reactions(); ++r) {
    const auto a = d.reaction_source[r];
    const auto b = d.reaction_target[r];
    d.adjacency[a].push_back(b);
    d.adjacency[b].push_back(a);
    reach[a][b] = true;
  }
  for (auto& adj : d.adjacency) {
    std::sort(adj.begin(), adj.end());
    adj.erase(std::unique(adj.begin(), adj.end()), adj.end());
  }

  constexpr auto unset = std::numeric_limits<std::size_t>::max();
  d.linkage_class.assign(d.c, unset);
  for (std::size_t start = 0; start < d.c; ++start) {
    if (d.linkage_class[start] != unset) continue;
    std::vector<std::size_t> stack{start};
    d.linkage_class[start] = d.ell;
    while (!stack.empty()) {
      const auto v = stack.back();
      stack.pop_back();
      for (auto w : d.adjacency[v]) {
        if (d.linkage_class[w] == unset) {
          d.linkage_class[w] = d.ell;
          stack.push_back(w);
        }
      }
    }
    ++d.ell;
  }

  // transitive closure of the directed reaction graph
  for (std::size_t k = 0; k < d.c; ++k) {
    for (std::size_t i = 0; i < d.c; ++i) {
      if (!reach[i][k]) continue;
      for (std::size_t j = 0; j < d.c; ++j) {
        if (reach[k][j]) reach[i][j] = true;
      }
    }
  }
  d.weakly_reversible = true;
  for (std::size_t r = 0; r < network.num_reactions(); ++r) {
    if (!reach[d.reaction_target[r]][d.reaction_source[r]]) {
      d.weakly_reversible = false;
      break;
    }
  }

  d.s = stoichiometric_rank(network);
  return d;
}

int deficiency(const ReactionNetwork& network) {
  const auto d = complex_decomposition(network);
  return static_cast<int>(d.c) - static_cast<int>(d.ell) - static_cast<int>(d.s);
}

// --------------------------------------------------------------------------

namespace {

struct Flows {
  Vector out;
  Vector in;
};

Flows complex_flows(const ReactionNetwork& network, const ComplexDecomposition& d, const Vector& u) {
  Flows fl{Vector::Zero(d.c), Vector::Zero(d.c)};
  for (std::size_t r = 0; r < network.num_reactions(); ++r) {
    const auto& rx = network.reactions[r];
    const double flux = rx.rate * monomial(u, rx.source);
    fl.out(d.reaction_source[r]) += flux;
    fl.in(d.reaction_target[r]) += flux;
  }
  return fl;
}

void require_positive(const Vector& u, const char* where) {
  if (!(u.array() > 0).all() || !u.allFinite()) {
    throw std::invalid_argument(std::string(where) + ": state must be strictly positive");
  }
}

/// Complex-balance residuals restricted to a face of the orthant, in log
/// coordinates of the free species. Each row is (out - in) / (out + in) for a
/// complex touched by a reaction whose source monomial is alive on the face.
/// Optionally appends the scaled mass mismatch (Q u - M) / (1 + |M|).
class FaceProblem {
public:
  FaceProblem(const ReactionNetwork& network, const ComplexDecomposition& d,
              std::vector<std::size_t> free_species)
      : network_(network), d_(d), free_(std::move(free_species)) {
    const auto n = network.num_species();
    std::vector<bool> is_free(n, false);
    for (auto j : free_) is_free[j] = true;
    auto alive = [&](const Vector& y) {
      for (std::size_t j = 0; j < n; ++j) {
        if (!is_free[j] && y(static_cast<Eigen::Index>(j)) > 0) return false;
      }
      return true;
    };
    std::vector<bool> touched(d.c, false);
    for (std::size_t r = 0; r < network.num_reactions(); ++r) {
      if (!alive(network.reactions[r].source)) continue;
      alive_.push_back(r);
      touched[d.reaction_source[r]] = true;
      touched[d.reaction_target[r]] = true;
    }
    row_of_complex_.assign(d.c, -1);
    for (std::size_t c = 0; c < d.c; ++c) {
      if (touched[c]) {
        row_of_complex_[c] = static_cast<int>(complex_rows_.size());
        complex_rows_.push_back(c);
      }
    }
  }

  void set_mass_constraint(const Matrix& Q, const Vector& M) {
    Qf_.resize(Q.rows(), static_cast<Eigen::Index>(free_.size()));
    for (std::size_t j = 0; j < free_.size(); ++j) {
      Qf_.col(static_cast<Eigen::Index>(j)) = Q.col(static_cast<Eigen::Index>(free_[j]));
    }
    M_ = M;
    mass_scale_ = 1.0 + (M.size() ? M.cwiseAbs().maxCoeff() : 0.0);
    with_mass_ = true;
  }

  std::size_t num_complex_rows() const { return complex_rows_.size(); }
  bool has_alive_reactions() const { return !alive_.empty(); }
  std::size_t dim() const { return free_.size(); }

  /// True if some alive reaction starts at the zero complex, i.e. some
  /// residual stays nonzero as every free density goes to zero.
  bool inflow_at_origin() const {
    return std::any_of(alive_.begin(), alive_.end(), [&](std::size_t r) {
      return (network_.reactions[r].source.array() == 0).all();
    });
  }

  Vector embed(const Vector& w) const {
    Vector u = Vector::Zero(static_cast<Eigen::Index>(network_.num_species()));
    for (std::size_t j = 0; j < free_.size(); ++j) {
      u(static_cast<Eigen::Index>(free_[j])) = std::exp(w(static_cast<Eigen::Index>(j)));
    }
    return u;
  }

  void operator()(const Vector& w, Vector& res, Matrix& J) const {
    const auto k = static_cast<Eigen::Index>(free_.size());
    const auto rows_c = static_cast<Eigen::Index>(complex_rows_.size());
    const Eigen::Index rows = rows_c + (with_mass_ ? Qf_.rows() : 0);
    res.setZero(rows);
    J.setZero(rows, k);

    Vector out = Vector::Zero(rows_c), in = Vector::Zero(rows_c);
    Matrix dout = Matrix::Zero(rows_c, k), din = Matrix::Zero(rows_c, k);
    Vector y_free(k);
    for (auto r : alive_) {
      const auto& rx = network_.reactions[r];
      for (Eigen::Index j = 0; j < k; ++j) y_free(j) = rx.source(static_cast<Eigen::Index>(free_[j]));
      const double flux = rx.rate * std::exp(y_free.dot(w));
      const auto a = row_of_complex_[d_.reaction_source[r]];
      const auto b = row_of_complex_[d_.reaction_target[r]];
      out(a) += flux;
      dout.row(a) += flux * y_free.transpose();
      in(b) += flux;
      din.row(b) += flux * y_free.transpose();
    }
    for (Eigen::Index c = 0; c < rows_c; ++c) {
      const double s = out(c) + in(c);
      if (!(s > 0)) {
        res(c) = 0.0;
        continue;
      }
      res(c) = (out(c) - in(c)) / s;
      J.row(c) = 2.0 * (in(c) * dout.row(c) - out(c) * din.row(c)) / (s * s);
    }
    if (with_mass_) {
      Vector u(k);
      for (Eigen::Index j = 0; j < k; ++j) u(j) = std::exp(w(j));
      res.tail(Qf_.rows()) = (Qf_ * u - M_) / mass_scale_;
      J.bottomRows(Qf_.rows()) = Qf_ * u.asDiagonal() / mass_scale_;
    }
  }

  double max_complex_row(const Vector& res) const {
    const auto rows_c = static_cast<Eigen::Index>(complex_rows_.size());
    return rows_c ? res.head(rows_c).cwiseAbs().maxCoeff() : 0.0;
  }

  double max_mass_row(const Vector& res) const {
    if (!with_mass_ || Qf_.rows() == 0) return 0.0;
    return res.tail(Qf_.rows()).cwiseAbs().maxCoeff();
  }

private:
  const ReactionNetwork& network_;
  const ComplexDecomposition& d_;
  std::vector<std::size_t> free_;
  std::vector<std::size_t> alive_;
  std::vector<std::size_t> complex_rows_;
  std::vector<int> row_of_complex_;
  Matrix Qf_;
  Vector M_;
  double mass_scale_ = 1.0;
  bool with_mass_ = false;
};

constexpr double kNormalizedTol = 1e-10;
constexpr double kMassTol = 1e-8;
constexpr double kLogBound = 50.0;

struct StartResult {
  detail::LmResult lm;
  double complex_res = INFINITY;
  double mass_res = INFINITY;
};

template <typename Accept>
StartResult multi_start(const FaceProblem& problem, std::uint64_t seed, int starts, Accept&& accept) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> draw(-2.0, 2.0);
  const auto k = static_cast<Eigen::Index>(problem.dim());
  StartResult best;
  bool have = false;
  detail::LmOptions opt;
  opt.bound = kLogBound + 10.0;
  for (int s = 0; s < starts; ++s) {
    Vector w0(k);
    for (Eigen::Index j = 0; j < k; ++j) w0(j) = draw(rng);
    StartResult cand;
    cand.lm = detail::levenberg_marquardt(problem, w0, opt);
    Vector res;
    Matrix J;
    problem(cand.lm.x, res, J);
    cand.complex_res = problem.max_complex_row(res);
    cand.mass_res = problem.max_mass_row(res);
    if (!cand.lm.x.allFinite() || cand.lm.x.cwiseAbs().maxCoeff() > kLogBound) continue;
    if (!accept(cand)) continue;
    const double score = cand.complex_res + cand.mass_res;
    if (!have || score < best.complex_res + best.mass_res) {
      best = std::move(cand);
      have = true;
    }
  }
  return best;
}

std::vector<std::size_t> all_species(std::size_t n) {
  std::vector<std::size_t> v(n);
  std::iota(v.begin(), v.end(), 0);
  return v;
}

}  // namespace

Vector complex_balance_residual(const ReactionNetwork& network, const Vector& u) {
  require_positive(u, "complex_balance_residual");
  const auto d = complex_decomposition(network);
  const auto fl = complex_flows(network, d, u);
  return fl.out - fl.in;
}

double max_complex_outflow(const ReactionNetwork& network, const Vector& u) {
  const auto d = complex_decomposition(network);
  const auto fl = complex_flows(network, d, u);
  return fl.out.size() ? fl.out.maxCoeff() : 0.0;
}

bool is_complex_balanced(const ReactionNetwork& network, const Vector& u, double tol) {
  const auto d = complex_decomposition(network);
  const auto fl = complex_flows(network, d, u);
  if (fl.out.size() == 0) return true;
  const double res = (fl.out - fl.in).cwiseAbs().maxCoeff();
  return res <= tol * (1.0 + fl.out.maxCoeff());
}

EquilibriumResult find_complex_balanced_equilibrium(const ReactionNetwork& network,
                                                    std::uint64_t seed) {
  network.validate();
  if (network.num_reactions() == 0) {
    throw std::invalid_argument("find_complex_balanced_equilibrium: network has no reactions");
  }
  const auto d = complex_decomposition(network);
  const FaceProblem problem(network, d, all_species(network.num_species()));

  const auto best = multi_start(problem, seed, kEquilibriumStarts, [&](const StartResult& s) {
    if (s.complex_res > 1e-8) return false;
    return is_complex_balanced(network, problem.embed(s.lm.x), 1e-10);
  });
  if (best.lm.x.size() == 0) {
    throw NoComplexBalance("no positive complex-balanced equilibrium found from " +
                           std::to_string(kEquilibriumStarts) + " starts");
  }

  EquilibriumResult out;
  out.u = problem.embed(best.lm.x);
  const auto fl = complex_flows(network, d, out.u);
  out.residual = (fl.out - fl.in).cwiseAbs().maxCoeff();
  out.mass = conservation_basis(network).Q * out.u;
  out.iterations = best.lm.iterations;
  out.deficiency_zero_certificate =
      d.weakly_reversible && static_cast<int>(d.c) - static_cast<int>(d.ell) - static_cast<int>(d.s) == 0;
  return out;
}

EquilibriumResult project_equilibrium_to_mass(const ReactionNetwork& network, const Vector& u_star,
                                              const Matrix& Q, const Vector& M) {
  require_positive(u_star, "project_equilibrium_to_mass");
  const auto n = static_cast<Eigen::Index>(network.num_species());
  if (u_star.size() != n || Q.cols() != n || M.size() != Q.rows()) {
    throw std::invalid_argument("project_equilibrium_to_mass: dimension mismatch");
  }
  EquilibriumResult out;
  out.u = u_star;
  if (Q.rows() == 0) {
    out.mass = Vector(0);
    out.residual = complex_balance_residual(network, u_star).cwiseAbs().maxCoeff();
    return out;
  }
  if (!M.allFinite()) throw MassNotReachable("mass vector is not finite");
  for (Eigen::Index k = 0; k < Q.rows(); ++k) {
    if ((Q.row(k).array() >= 0).all() && M(k) <= 0) {
      throw MassNotReachable("mass component " + std::to_string(k + 1) +
                             " is nonpositive but its conservation law is nonnegative");
    }
  }

  const double scale = 1.0 + M.cwiseAbs().maxCoeff();
  auto state = [&](const Vector& c) { return Vector(u_star.array() * (Q.transpose() * c).array().exp()); };
  auto potential = [&](const Vector& c) { return state(c).sum() - M.dot(c); };

  Vector c = Vector::Zero(Q.rows());
  double phi = potential(c);
  int it = 0;
  for (; it < 200; ++it) {
    const Vector u = state(c);
    const Vector grad = Q * u - M;
    if (grad.cwiseAbs().maxCoeff() <= 1e-14 * scale) break;
    const Matrix H = Q * u.asDiagonal() * Q.transpose();
    const Vector dir = H.ldlt().solve(-grad);
    if (!dir.allFinite()) break;
    double t = 1.0;
    bool moved = false;
    for (int ls = 0; ls < 60; ++ls, t *= 0.5) {
      const Vector trial = c + t * dir;
      const double phi_trial = potential(trial);
      if (std::isfinite(phi_trial) && phi_trial <= phi + 1e-4 * t * grad.dot(dir)) {
        c = trial;
        phi = phi_trial;
        moved = true;
        break;
      }
    }
    if (!moved) break;
    if ((Q.transpose() * c).cwiseAbs().maxCoeff() > 600.0) break;
  }

  out.u = state(c);
  if (!out.u.allFinite() || !(out.u.array() > 0).all()) {
    throw MassNotReachable("mass projection diverged");
  }
  out.mass = Q * out.u;
  if ((out.mass - M).cwiseAbs().maxCoeff() > 1e-10 * scale) {
    throw MassNotReachable("mass vector is not reachable from the positive orthant");
  }
  out.iterations = it;
  out.residual = complex_balance_residual(network, out.u).cwiseAbs().maxCoeff();
  return out;
}

EquilibriumResult equilibrium_for_mass(const ReactionNetwork& network, const Matrix& Q,
                                       const Vector& M, std::uint64_t seed) {
  const auto star = find_complex_balanced_equilibrium(network, seed);
  if (Q.rows() == 0) return star;
  auto out = project_equilibrium_to_mass(network, star.u, Q, M);
  out.iterations += star.iterations;
  out.deficiency_zero_certificate = star.deficiency_zero_certificate;
  return out;
}

// --------------------------------------------------------------------------

std::vector<BoundaryFace> scan_boundary_equilibria(const ReactionNetwork& network, const Matrix& Q,
                                                   const Vector& M, std::uint64_t seed) {
  network.validate();
  const std::size_t n = network.num_species();
  if (n > 16) throw std::invalid_argument("scan_boundary_equilibria: more than 16 species");
  if (Q.cols() != static_cast<Eigen::Index>(n) || M.size() != Q.rows()) {
    throw std::invalid_argument("scan_boundary_equilibria: dimension mismatch");
  }
  const auto d = complex_decomposition(network);
  constexpr int kFaceStarts = 8;

  std::vector<BoundaryFace> faces;
  const std::uint32_t full = (1u << n) - 1u;
  for (std::uint32_t zmask = 1; zmask < full; ++zmask) {
    BoundaryFace face;
    std::vector<std::size_t> free;
    for (std::size_t j = 0; j < n; ++j) {
      if (zmask & (1u << j)) {
        face.zero_species.push_back(j);
      } else {
        free.push_back(j);
      }
    }
    const std::uint64_t face_seed = seed * 0x9E3779B97F4A7C15ull + zmask;

    FaceProblem joint(network, d, free);
    joint.set_mass_constraint(Q, M);
    const auto feasible = multi_start(joint, face_seed, kFaceStarts, [](const StartResult& s) {
      return s.complex_res <= kNormalizedTol && s.mass_res <= kMassTol;
    });
    if (feasible.lm.x.size() != 0) {
      face.balanced = true;
      face.mass_feasible = true;
      face.point = joint.embed(feasible.lm.x);
      face.residual = feasible.complex_res;
      faces.push_back(std::move(face));
      continue;
    }

    const FaceProblem balance(network, d, free);
    if (balance.num_complex_rows() == 0) {
      // every monomial that could flow vanishes: balanced on the whole face
      face.balanced = true;
      face.point = balance.embed(Vector::Zero(static_cast<Eigen::Index>(free.size())));
      faces.push_back(std::move(face));
      continue;
    }
    const auto interior = multi_start(balance, face_seed ^ 0x5bd1e995u, kFaceStarts,
                                      [](const StartResult& s) { return s.complex_res <= kNormalizedTol; });
    if (interior.lm.x.size() != 0) {
      face.balanced = true;
      face.point = balance.embed(interior.lm.x);
      face.residual = interior.complex_res;
      faces.push_back(std::move(face));
      continue;
    }
    if (!balance.inflow_at_origin()) {
      face.balanced = true;
      face.only_at_origin = true;
      faces.push_back(std::move(face));
    }
  }
  return faces;
}

std::vector<BoundaryFace> mass_feasible_faces(const std::vector<BoundaryFace>& faces) {
  std::vector<BoundaryFace> out;
  std::copy_if(faces.begin(), faces.end(), std::back_inserter(out),
               [](const BoundaryFace& f) { return f.mass_feasible; });
  return out;
}

}  // namespace skt
