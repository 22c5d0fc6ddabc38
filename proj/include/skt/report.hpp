#pragma once

#include <cstdint>
#include <optional>

#include "json.hpp"
#include "skt/analysis.hpp"

namespace skt {

/// Structural report of a network: conservation laws, complex graph,
/// equilibria and boundary faces. Without `mass` the equilibrium is projected
/// to M = Q 1. Throws NoComplexBalance / MassNotReachable.
nlohmann::ordered_json network_report(const ReactionNetwork& network, const std::optional<Vector>& mass,
                              std::uint64_t seed);

/// {"u_infinity": [...], "mass": [...], "residual": r}
nlohmann::ordered_json equilibrium_report(const ReactionNetwork& network, const Vector& mass,
                                  std::uint64_t seed);

/// Structural gates of a run: complex balance, diffusion condition and the
/// boundary scan for the initial mass. Throws on the first failing gate.
nlohmann::ordered_json check_report(const SimulationSetup& setup);

nlohmann::ordered_json summary_report(const Summary& summary);

}  // namespace skt
