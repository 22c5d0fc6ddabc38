#include "skt/report.hpp"

#include "skt/errors.hpp"

namespace skt {

namespace {

nlohmann::ordered_json to_json(const Vector& v) {
  nlohmann::ordered_json out = nlohmann::ordered_json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

nlohmann::ordered_json to_json(const Matrix& A) {
  nlohmann::ordered_json out = nlohmann::ordered_json::array();
  for (Eigen::Index r = 0; r < A.rows(); ++r) out.push_back(to_json(Vector(A.row(r).transpose())));
  return out;
}

nlohmann::ordered_json faces_json(const std::vector<BoundaryFace>& faces,
                          const std::vector<std::string>& species) {
  nlohmann::ordered_json out = nlohmann::ordered_json::array();
  for (const auto& f : faces) {
    nlohmann::ordered_json names = nlohmann::ordered_json::array();
    for (auto i : f.zero_species) names.push_back(species[i]);
    out.push_back({{"zero_species", names},
                   {"only_at_origin", f.only_at_origin},
                   {"mass_feasible", f.mass_feasible},
                   {"residual", f.residual},
                   {"point", to_json(f.point)}});
  }
  return out;
}

template <class T>
nlohmann::ordered_json optional_json(const std::optional<T>& v) {
  return v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json(nullptr);
}

}  // namespace

nlohmann::ordered_json network_report(const ReactionNetwork& network, const std::optional<Vector>& mass,
                              std::uint64_t seed) {
  network.validate();
  const auto basis = conservation_basis(network);
  const auto cd = complex_decomposition(network);
  const auto star = find_complex_balanced_equilibrium(network, seed);
  const Vector M = mass ? *mass : Vector(basis.Q * Vector::Ones(static_cast<Eigen::Index>(network.num_species())));
  if (M.size() != basis.Q.rows()) {
    throw MassNotReachable("mass has " + std::to_string(M.size()) + " entries, expected " +
                           std::to_string(basis.Q.rows()));
  }
  const auto inf = basis.Q.rows() ? project_equilibrium_to_mass(network, star.u, basis.Q, M) : star;

  nlohmann::ordered_json j;
  j["species"] = network.species;
  j["m"] = basis.m();
  j["Q"] = to_json(basis.Q);
  j["Q_exact"] = basis.exact;
  j["c"] = cd.c;
  j["ell"] = cd.ell;
  j["s"] = cd.s;
  j["deficiency"] = static_cast<long long>(cd.c) - static_cast<long long>(cd.ell) - static_cast<long long>(cd.s);
  j["weakly_reversible"] = cd.weakly_reversible;
  j["deficiency_zero_certificate"] = star.deficiency_zero_certificate;
  j["u_star"] = to_json(star.u);
  j["mass"] = to_json(M);
  j["u_infinity"] = to_json(inf.u);
  j["residual"] = inf.residual;
  if (network.num_species() <= 16) {
    j["boundary_faces"] = faces_json(scan_boundary_equilibria(network, basis.Q, M, seed), network.species);
  } else {
    j["boundary_faces"] = nullptr;
  }
  return j;
}

nlohmann::ordered_json equilibrium_report(const ReactionNetwork& network, const Vector& mass,
                                  std::uint64_t seed) {
  network.validate();
  const auto basis = conservation_basis(network);
  if (mass.size() != basis.Q.rows()) {
    throw MassNotReachable("mass has " + std::to_string(mass.size()) + " entries, expected " +
                           std::to_string(basis.Q.rows()));
  }
  const auto eq = equilibrium_for_mass(network, basis.Q, mass, seed);
  return {{"species", network.species},
          {"mass", to_json(mass)},
          {"u_infinity", to_json(eq.u)},
          {"residual", eq.residual}};
}

nlohmann::ordered_json check_report(const SimulationSetup& setup) {
  const auto& network = setup.network;
  network.validate();
  validate_config(setup.config, network);
  const auto star = find_complex_balanced_equilibrium(network, setup.config.seed);
  const DiffusionParams params = diffusion_params(setup.config);
  const auto condition = require_entropy_structure(params);
  const Mesh mesh(setup.config.length, setup.config.cells);
  const Field field = init_field(setup.config, network, mesh);
  const Matrix Q = conservation_basis(network).Q;
  const Vector M = Q * field.mean();

  nlohmann::ordered_json j;
  j["complex_balanced"] = true;
  j["u_star"] = to_json(star.u);
  j["alpha"] = weak_cross_alpha(params);
  j["detailed_balance"] = is_detailed_balanced(params);
  j["condition"] = condition == StructuralCondition::DetailedBalance ? "detailed_balance" : "weak_cross";
  j["mass"] = to_json(M);
  if (network.num_species() <= 16) {
    j["boundary_faces"] =
        faces_json(mass_feasible_faces(scan_boundary_equilibria(network, Q, M, setup.config.seed)),
                   network.species);
  } else {
    j["boundary_faces"] = nullptr;
  }
  return j;
}

nlohmann::ordered_json summary_report(const Summary& s) {
  nlohmann::ordered_json j;
  if (s.rate) {
    j["lambda_est"] = s.rate->lambda;
    j["C_est"] = s.rate->C;
    j["r2"] = s.rate->r2;
    j["fit_window"] = {s.rate->t_begin, s.rate->t_end};
  } else {
    j["lambda_est"] = nullptr;
    j["C_est"] = nullptr;
    j["r2"] = nullptr;
    j["fit_window"] = nullptr;
  }
  j["entropy_audit"] = s.audit.max_increment;
  j["eep_defect"] = s.audit.eep_defect;
  j["mass_drift"] = optional_json(s.mass_drift);
  j["dissipation_ratio"] = optional_json(s.ratio);
  j["gronwall_consistent"] =
      (s.rate && s.ratio) ? nlohmann::ordered_json(gronwall_consistent(s.rate->lambda, *s.ratio)) : nlohmann::ordered_json(nullptr);
  j["ckp_pass"] = s.ckp_pass;
  return j;
}

}  // namespace skt
