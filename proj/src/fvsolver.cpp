#include "skt/fvsolver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>

#include "skt/errors.hpp"

namespace skt {

DiffusionParams diffusion_params(const RunConfig& config) {
  DiffusionParams p{config.a0, config.a};
  p.validate();
  return p;
}

Field init_field(const RunConfig& config, const ReactionNetwork& network, const Mesh& mesh) {
  const std::size_t n = network.num_species();
  Field field(mesh.cells, n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto it = std::find_if(config.initial.begin(), config.initial.end(),
                                 [&](const auto& p) { return p.first == network.species[i]; });
    if (it == config.initial.end()) {
      throw std::invalid_argument("no initial profile for species " + network.species[i]);
    }
    for (std::size_t k = 0; k < mesh.cells; ++k) {
      const double v = it->second(mesh.center(k));
      if (!(v >= 0.0) || !std::isfinite(v)) {
        throw std::invalid_argument("initial profile of " + network.species[i] +
                                    " is negative at cell " + std::to_string(k));
      }
      field(k, i) = v;
    }
  }
  const double overall = field.values().mean();
  if (!(overall > 0.0)) throw std::invalid_argument("initial data is identically zero");
  const Vector means = field.mean();
  for (std::size_t i = 0; i < n; ++i) {
    const double m = means(static_cast<Eigen::Index>(i));
    const double floor = 1e-12 * (m > 0.0 ? m : overall);
    for (std::size_t k = 0; k < mesh.cells; ++k) field(k, i) = std::max(field(k, i), floor);
  }
  return field;
}

namespace {

/// F_i = (a0_i + (a u)_i) d_i + u_i (a d)_i  for face state u and jump d.
void face_flux(const DiffusionParams& p, const double* u, const double* d, double* F, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    double au = 0.0, ad = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      const double aik = p.a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k));
      au += aik * u[k];
      ad += aik * d[k];
    }
    F[i] = (p.a0(static_cast<Eigen::Index>(i)) + au) * d[i] + u[i] * ad;
  }
}

/// Backward Euler in log variables on a 1D mesh, with a block-tridiagonal
/// finite-difference Jacobian (3-colouring of the cells).
class ImplicitEuler {
public:
  ImplicitEuler(const ReactionNetwork& network, const DiffusionParams& params, const Mesh& mesh,
                const NewtonOptions& opt)
      : params_(params), mesh_(mesh), opt_(opt), N_(mesh.cells), n_(network.num_species()) {
    for (const auto& rx : network.reactions) {
      reactions_.push_back({rx.source, rx.target - rx.source, rx.rate});
    }
    lower_.assign(N_, Matrix::Zero(n_, n_));
    diag_.assign(N_, Matrix::Zero(n_, n_));
    upper_.assign(N_, Matrix::Zero(n_, n_));
    lu_.resize(N_);
  }

  Field step(const Field& field, double dt, StepStats* stats) {
    StepStats local;
    local.substeps = 0;
    Matrix u = field.values();
    advance(u, dt, 0, local);
    if (stats) *stats = local;
    return Field(std::move(u));
  }

  /// G(u_new) = u_new - u_old - dt/h (F_{k+1/2} - F_{k-1/2}) - dt f(u_new).
  void residual(const Matrix& u_new, const Matrix& u_old, double dt, Matrix& G) const {
    G = u_new - u_old;
    Vector ucell(n_);
    for (std::size_t k = 0; k < N_; ++k) {
      ucell = u_new.row(static_cast<Eigen::Index>(k)).transpose();
      for (const auto& rx : reactions_) {
        const double flux = dt * rx.rate * monomial(ucell, rx.source);
        if (flux != 0.0) G.row(static_cast<Eigen::Index>(k)) -= flux * rx.delta.transpose();
      }
    }
    const double c = dt / mesh_.h();
    const double inv_h = 1.0 / mesh_.h();
    std::vector<double> avg(n_), jump(n_), F(n_);
    for (std::size_t k = 0; k + 1 < N_; ++k) {
      const auto a = static_cast<Eigen::Index>(k), b = a + 1;
      for (std::size_t i = 0; i < n_; ++i) {
        const auto ii = static_cast<Eigen::Index>(i);
        avg[i] = 0.5 * (u_new(a, ii) + u_new(b, ii));
        jump[i] = (u_new(b, ii) - u_new(a, ii)) * inv_h;
      }
      face_flux(params_, avg.data(), jump.data(), F.data(), n_);
      for (std::size_t i = 0; i < n_; ++i) {
        const auto ii = static_cast<Eigen::Index>(i);
        G(a, ii) -= c * F[i];
        G(b, ii) += c * F[i];
      }
    }
  }

private:
  struct CompiledReaction {
    Vector source;
    Vector delta;
    double rate;
  };

  void advance(Matrix& u, double dt, int depth, StepStats& stats) {
    Matrix u_new;
    int iters = 0;
    double res = 0.0;
    if (solve(u, dt, u_new, iters, res)) {
      u = std::move(u_new);
      stats.newton_iterations += iters;
      stats.substeps += 1;
      stats.residual = res;
      return;
    }
    stats.newton_iterations += iters;
    if (depth >= opt_.max_halvings) {
      throw StepFailed("Newton failed to converge after " + std::to_string(depth) +
                           " halvings (dt = " + std::to_string(dt) + ", residual " +
                           std::to_string(res) + ")",
                       0.0);
    }
    advance(u, 0.5 * dt, depth + 1, stats);
    advance(u, 0.5 * dt, depth + 1, stats);
  }

  bool solve(const Matrix& u_old, double dt, Matrix& u_out, int& iters, double& res) {
    Matrix w = u_old.array().log().matrix();
    Matrix u = u_old;
    Matrix G;
    residual(u, u_old, dt, G);
    res = G.cwiseAbs().maxCoeff();
    iters = 0;
    // At least one update: a small initial residual would otherwise freeze
    // slow dynamics and let the per-step residual accumulate in the masses.
    while (iters == 0 || !(res <= opt_.tol)) {
      if (iters >= opt_.max_iter || !std::isfinite(res)) return false;
      ++iters;
      jacobian(w, u_old, dt, G);
      Matrix delta = solve_linear(-G);
      if (!delta.allFinite()) return false;

      const double norm0 = G.norm();
      double theta = 1.0;
      bool accepted = false;
      Matrix w_trial, u_trial, G_trial;
      for (int ls = 0; ls <= 10; ++ls, theta *= 0.5) {
        w_trial = w + theta * delta;
        if (w_trial.cwiseAbs().maxCoeff() > 700.0) continue;
        u_trial = w_trial.array().exp().matrix();
        residual(u_trial, u_old, dt, G_trial);
        const double norm = G_trial.norm();
        if (std::isfinite(norm) && norm <= (1.0 - 1e-4 * theta) * norm0) {
          accepted = true;
          break;
        }
      }
      if (!accepted) {
        if (res <= opt_.tol) break;
        return false;
      }
      w.swap(w_trial);
      u.swap(u_trial);
      G.swap(G_trial);
      res = G.cwiseAbs().maxCoeff();
    }
    // Chord step with the last factorization: pushes the residual well below
    // tol so it does not accumulate in the conserved quantities over many steps.
    if (iters > 0) {
      const Matrix w_trial = w + solve_linear(-G);
      if (w_trial.allFinite() && w_trial.cwiseAbs().maxCoeff() <= 700.0) {
        Matrix u_trial = w_trial.array().exp().matrix();
        Matrix G_trial;
        residual(u_trial, u_old, dt, G_trial);
        if (G_trial.norm() < G.norm()) {
          u.swap(u_trial);
          res = G_trial.cwiseAbs().maxCoeff();
        }
      }
    }
    u_out = std::move(u);
    return true;
  }

  void jacobian(const Matrix& w, const Matrix& u_old, double dt, const Matrix& G) {
    Matrix w_pert, u_pert, G_pert;
    for (std::size_t color = 0; color < 3; ++color) {
      for (std::size_t j = 0; j < n_; ++j) {
        const auto jj = static_cast<Eigen::Index>(j);
        w_pert = w;
        for (std::size_t k = color; k < N_; k += 3) {
          const auto kk = static_cast<Eigen::Index>(k);
          w_pert(kk, jj) += 1e-7 * (1.0 + std::abs(w(kk, jj)));
        }
        u_pert = w_pert.array().exp().matrix();
        residual(u_pert, u_old, dt, G_pert);
        for (std::size_t k = color; k < N_; k += 3) {
          const auto kk = static_cast<Eigen::Index>(k);
          const double eps = w_pert(kk, jj) - w(kk, jj);
          diag_[k].col(jj) = (G_pert.row(kk) - G.row(kk)).transpose() / eps;
          if (k > 0) upper_[k - 1].col(jj) = (G_pert.row(kk - 1) - G.row(kk - 1)).transpose() / eps;
          if (k + 1 < N_) lower_[k + 1].col(jj) = (G_pert.row(kk + 1) - G.row(kk + 1)).transpose() / eps;
        }
      }
    }
  }

  /// Block Thomas elimination on the (lower_, diag_, upper_) system.
  Matrix solve_linear(const Matrix& rhs) {
    std::vector<Vector> r(N_);
    lu_[0].compute(diag_[0]);
    r[0] = rhs.row(0).transpose();
    for (std::size_t k = 1; k < N_; ++k) {
      const Matrix m = lower_[k] * lu_[k - 1].inverse();
      lu_[k].compute(diag_[k] - m * upper_[k - 1]);
      r[k] = rhs.row(static_cast<Eigen::Index>(k)).transpose() - m * r[k - 1];
    }
    Matrix x(N_, n_);
    Vector next = lu_[N_ - 1].solve(r[N_ - 1]);
    x.row(static_cast<Eigen::Index>(N_ - 1)) = next.transpose();
    for (std::size_t k = N_ - 1; k-- > 0;) {
      next = lu_[k].solve(r[k] - upper_[k] * next);
      x.row(static_cast<Eigen::Index>(k)) = next.transpose();
    }
    return x;
  }

  const DiffusionParams& params_;
  const Mesh& mesh_;
  NewtonOptions opt_;
  std::size_t N_;
  std::size_t n_;
  std::vector<CompiledReaction> reactions_;
  std::vector<Matrix> lower_, diag_, upper_;
  std::vector<Eigen::PartialPivLU<Matrix>> lu_;
};

}  // namespace

Matrix assemble_fluxes(const DiffusionParams& params, const Field& field, const Mesh& mesh) {
  const std::size_t N = field.cells(), n = field.species();
  Matrix F(static_cast<Eigen::Index>(N - 1), static_cast<Eigen::Index>(n));
  std::vector<double> avg(n), jump(n), flux(n);
  for (std::size_t k = 0; k + 1 < N; ++k) {
    for (std::size_t i = 0; i < n; ++i) {
      avg[i] = 0.5 * (field(k, i) + field(k + 1, i));
      jump[i] = (field(k + 1, i) - field(k, i)) / mesh.h();
    }
    face_flux(params, avg.data(), jump.data(), flux.data(), n);
    for (std::size_t i = 0; i < n; ++i) F(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(i)) = flux[i];
  }
  return F;
}

Field step_implicit_euler(const ReactionNetwork& network, const DiffusionParams& params,
                          const Mesh& mesh, const Field& field, double dt,
                          const NewtonOptions& options, StepStats* stats) {
  if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");
  if (!(field.values().array() > 0).all()) throw std::invalid_argument("field must be strictly positive");
  if (field.cells() != mesh.cells || field.species() != network.num_species()) {
    throw std::invalid_argument("field shape does not match mesh and network");
  }
  ImplicitEuler solver(network, params, mesh, options);
  return solver.step(field, dt, stats);
}

Trajectory simulate(const SimulationSetup& setup, std::vector<std::string>* warnings) {
  const auto& network = setup.network;
  const auto& config = setup.config;
  network.validate();
  validate_config(config, network);

  Trajectory traj;
  traj.species = network.species;
  traj.Q = conservation_basis(network).Q;

  const auto star = find_complex_balanced_equilibrium(network, config.seed);
  const DiffusionParams params = diffusion_params(config);
  require_entropy_structure(params);

  const Mesh mesh(config.length, config.cells);
  Field field = init_field(config, network, mesh);
  traj.M = traj.Q * field.mean();
  traj.u_star = star.u;
  traj.u_inf = traj.Q.rows() ? project_equilibrium_to_mass(network, star.u, traj.Q, traj.M).u : star.u;

  if (network.num_species() <= 16) {
    traj.boundary_faces = mass_feasible_faces(scan_boundary_equilibria(network, traj.Q, traj.M, config.seed));
    if (!traj.boundary_faces.empty() && warnings) {
      warnings->push_back(std::to_string(traj.boundary_faces.size()) +
                          " boundary face(s) admit equilibria for this mass; exponential decay is not guaranteed");
    }
  } else if (warnings) {
    warnings->push_back("boundary scan skipped: more than 16 species");
  }

  auto record = [&](double t, int iters, double dt) {
    TrajectorySample s;
    s.t = t;
    s.report = entropy_report(network, params, field, traj.u_inf, mesh);
    s.mass = traj.Q * field.mean();
    s.ckp_mass = ckp_mass(field, traj.u_inf, mesh);
    s.newton_iterations = iters;
    s.dt = dt;
    if (!std::isfinite(s.report.E)) throw StepFailed("entropy became non-finite", t);
    traj.samples.push_back(std::move(s));
  };
  record(0.0, 0, 0.0);

  const NewtonOptions opt{config.newton_tol, config.newton_max_iter, 10};
  ImplicitEuler solver(network, params, mesh, opt);
  const auto steps = static_cast<std::size_t>(std::ceil(config.end_time / config.dt - 1e-9));
  double t = 0.0;
  int iters_since = 0;
  for (std::size_t s = 1; s <= steps; ++s) {
    const double t_next = std::min(config.end_time, static_cast<double>(s) * config.dt);
    const double dt = t_next - t;
    StepStats stats;
    try {
      field = solver.step(field, dt, &stats);
    } catch (const StepFailed& e) {
      throw StepFailed(std::string(e.what()) + " at t = " + std::to_string(t), t);
    }
    t = t_next;
    iters_since += stats.newton_iterations;
    if (s % config.output_stride == 0 || s == steps) {
      record(t, iters_since, dt);
      iters_since = 0;
    }
  }
  traj.final_field = field;
  return traj;
}

void write_trajectory_csv(std::ostream& os, const Trajectory& trajectory) {
  os << "t,E,D_diff,D_reac,L1";
  for (Eigen::Index k = 0; k < trajectory.Q.rows(); ++k) os << ",mass_" << (k + 1);
  os << ",newton_iters\n";
  char buf[64];
  auto num = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    os << buf;
  };
  for (const auto& s : trajectory.samples) {
    num(s.t);
    for (double v : {s.report.E, s.report.D_diffusion, s.report.D_reaction, s.report.L1}) {
      os << ',';
      num(v);
    }
    for (Eigen::Index k = 0; k < s.mass.size(); ++k) {
      os << ',';
      num(s.mass(k));
    }
    os << ',' << s.newton_iterations << '\n';
  }
}

}  // namespace skt
