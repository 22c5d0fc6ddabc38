#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "skt/crn.hpp"
#include "skt/crossdiff.hpp"
#include "skt/entropy.hpp"
#include "skt/field.hpp"
#include "skt/netparse.hpp"

namespace skt {

/// Initial field from the config profiles evaluated at cell centers, floored
/// at 1e-12 times the species mean (or the overall mean for an empty species).
/// Throws std::invalid_argument if a profile is negative on the mesh.
Field init_field(const RunConfig& config, const ReactionNetwork& network, const Mesh& mesh);

/// Face fluxes F_{k+1/2,i} = sum_j A_ij(u_face) (u_{k+1,j} - u_{k,j}) / h with
/// u_face the arithmetic mean of the two cells. Row k of the result is face
/// k+1/2, so there are N-1 rows; the two boundary faces carry zero flux and are
/// not stored.
Matrix assemble_fluxes(const DiffusionParams& params, const Field& field, const Mesh& mesh);

struct NewtonOptions {
  double tol = 1e-10;
  int max_iter = 50;
  int max_halvings = 10;
};

struct StepStats {
  int newton_iterations = 0;
  int substeps = 1;
  double residual = 0.0;  // final scaled residual (inf-norm) of the last substep
};

/// One backward Euler step of  u_t - div(A(u) grad u) = f(u)  with no-flux
/// boundaries, solved for w = log u by damped Newton. Halves dt (recursively,
/// up to max_halvings levels) on failure. Throws StepFailed.
Field step_implicit_euler(const ReactionNetwork& network, const DiffusionParams& params,
                          const Mesh& mesh, const Field& field, double dt,
                          const NewtonOptions& options = {}, StepStats* stats = nullptr);

struct TrajectorySample {
  double t = 0.0;
  EntropyReport report;
  Vector mass;              // Q u_bar
  double ckp_mass = 0.0;    // sum_i int (u_i + 2 u_inf,i)
  int newton_iterations = 0;  // since the previous sample
  double dt = 0.0;          // step size that produced this sample (0 at t = 0)
};

struct Trajectory {
  std::vector<std::string> species;
  Matrix Q;
  Vector M;        // Q u_bar at t = 0
  Vector u_star;   // equilibrium before projection
  Vector u_inf;
  std::vector<TrajectorySample> samples;
  std::vector<BoundaryFace> boundary_faces;  // mass-feasible faces for M
  Field final_field;
};

struct SimulationSetup {
  ReactionNetwork network;
  RunConfig config;
};

/// Runs the gates (complex balance, entropy structure, boundary scan), computes
/// u_inf for the initial mass and integrates to end_time, sampling every
/// output_stride steps. Boundary equilibria only warn (see warnings).
Trajectory simulate(const SimulationSetup& setup, std::vector<std::string>* warnings = nullptr);

DiffusionParams diffusion_params(const RunConfig& config);

/// Header `t,E,D_diff,D_reac,L1,mass_1..mass_m,newton_iters`, 17 significant digits.
void write_trajectory_csv(std::ostream& os, const Trajectory& trajectory);

}  // namespace skt
