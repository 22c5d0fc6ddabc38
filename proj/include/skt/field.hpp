#pragma once

#include <cstddef>
#include <stdexcept>

#include "skt/crn.hpp"

namespace skt {

/// Uniform 1D mesh of (0, L) with N cells.
struct Mesh {
  double length = 1.0;
  std::size_t cells = 2;

  Mesh() = default;
  Mesh(double L, std::size_t N) : length(L), cells(N) {
    if (!(L > 0.0)) throw std::invalid_argument("mesh length must be positive");
    if (N < 2) throw std::invalid_argument("mesh needs at least two cells");
  }

  double h() const { return length / static_cast<double>(cells); }
  double center(std::size_t k) const { return (static_cast<double>(k) + 0.5) * h(); }
};

/// Cell-averaged densities, one row per cell and one column per species.
class Field {
public:
  Field() = default;
  Field(std::size_t cells, std::size_t species)
      : values_(Matrix::Zero(static_cast<Eigen::Index>(cells), static_cast<Eigen::Index>(species))) {}
  explicit Field(Matrix values) : values_(std::move(values)) {}

  static Field constant(std::size_t cells, const Vector& u) {
    return Field(u.transpose().replicate(static_cast<Eigen::Index>(cells), 1));
  }

  std::size_t cells() const { return static_cast<std::size_t>(values_.rows()); }
  std::size_t species() const { return static_cast<std::size_t>(values_.cols()); }

  double& operator()(std::size_t k, std::size_t i) {
    return values_(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(i));
  }
  double operator()(std::size_t k, std::size_t i) const {
    return values_(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(i));
  }

  /// State vector of cell k.
  Vector cell(std::size_t k) const { return values_.row(static_cast<Eigen::Index>(k)).transpose(); }

  /// Spatial mean of every species: (1/|Omega|) int u_i.
  Vector mean() const { return values_.colwise().mean().transpose(); }

  const Matrix& values() const { return values_; }
  Matrix& values() { return values_; }

private:
  Matrix values_;
};

}  // namespace skt
