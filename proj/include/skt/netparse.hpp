#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "skt/crn.hpp"

namespace skt {

struct ParseWarning {
  int line = 0;
  std::string message;
};

/// Parses the `.crn` reaction DSL:
///
///     # comment
///     A + 2 B -> C @ 0.5
///     S1 <-> S2 @ 1.0, 2.0
///     0 -> A @ 1            (0 is the empty complex)
///
/// Species are indexed in order of first appearance. Coefficients in (0,1)
/// are accepted but reported through `warnings`. Throws ParseError.
ReactionNetwork parse_network(std::string_view text, std::vector<ParseWarning>* warnings = nullptr);

/// Canonical text: one `->` reaction per line in network order, shortest
/// round-trip numbers, unit coefficients omitted.
std::string format_network(const ReactionNetwork& network);

/// Shortest decimal that parses back to the same double.
std::string format_number(double value);

// --------------------------------------------------------------------------
// Run configuration

enum class ProfileKind { Constant, Step, Gaussian };

/// Initial density of one species:
///   constant c | step x0 vl vr | gaussian amp center width baseline
struct InitialProfile {
  ProfileKind kind = ProfileKind::Constant;
  std::array<double, 4> params{};

  double operator()(double x) const;
  std::string to_string() const;
};

struct RunConfig {
  std::string network_path;

  double length = 0.0;
  std::size_t cells = 0;

  double dt = 0.0;
  double end_time = 0.0;
  std::size_t output_stride = 1;

  Vector a0;
  Matrix a;

  /// Species name -> profile, in file order.
  std::vector<std::pair<std::string, InitialProfile>> initial;

  double newton_tol = 1e-10;
  int newton_max_iter = 50;
  std::uint64_t seed = 0;
};

/// Parses the `.cfg` format: an optional top-level `network = <path>`, then
/// sections `[domain]` (length, cells), `[time]` (dt, end, stride),
/// `[diffusion]` (a0 = v1, v2, ...; a = row; row; ...), `[initial]`
/// (<species> = <profile>) and optional `[solver]` (newton_tol,
/// newton_max_iter, seed). Throws ParseError.
RunConfig parse_config(std::string_view text);

/// Checks the config against a network: dimensions of a0 and a, one profile
/// per species, and profile nonnegativity on the cell centers.
void validate_config(const RunConfig& config, const ReactionNetwork& network);

}  // namespace skt
