#pragma once

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

#include "skt/netparse.hpp"

namespace skt::test {

inline std::filesystem::path data_path(const std::string& rel) {
  return std::filesystem::path(SKT_TEST_DATA) / rel;
}

inline std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline ReactionNetwork isomer(double k1 = 1.0, double k2 = 2.0) {
  return parse_network("S1 <-> S2 @ " + format_number(k1) + ", " + format_number(k2) + "\n");
}

inline ReactionNetwork association() { return parse_network("A + B <-> C @ 1, 1\n"); }

inline ReactionNetwork triangle() { return parse_network("A -> B @ 1\nB -> C @ 1\nC -> A @ 1\n"); }

/// Uniform vector in [lo, hi]^n.
inline Vector uniform_vector(std::mt19937_64& rng, Eigen::Index n, double lo, double hi) {
  std::uniform_real_distribution<double> dist(lo, hi);
  Vector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = dist(rng);
  return v;
}

/// Log-uniform positive vector with entries in [10^lo, 10^hi].
inline Vector log_uniform_vector(std::mt19937_64& rng, Eigen::Index n, double lo, double hi) {
  Vector v = uniform_vector(rng, n, lo, hi);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = std::pow(10.0, v(i));
  return v;
}

inline double rel_err(double a, double b) { return std::abs(a - b) / (1.0 + std::abs(b)); }

}  // namespace skt::test
