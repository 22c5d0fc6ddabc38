#include "nullspace.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace skt::detail {

namespace {

using boost::multiprecision::cpp_int;
using boost::multiprecision::cpp_rational;

using RationalMatrix = std::vector<std::vector<cpp_rational>>;

RationalMatrix to_rational(const Matrix& A) {
  RationalMatrix out(A.rows(), std::vector<cpp_rational>(A.cols()));
  for (Eigen::Index i = 0; i < A.rows(); ++i) {
    for (Eigen::Index j = 0; j < A.cols(); ++j) {
      const double v = A(i, j);
      if (v != std::round(v) || std::abs(v) > 9.0e15) {
        throw std::invalid_argument("exact elimination requires integer entries");
      }
      out[i][j] = cpp_rational(static_cast<long long>(v));
    }
  }
  return out;
}

/// In-place Gauss-Jordan; returns pivot columns in row order.
std::vector<std::size_t> rref(RationalMatrix& M, std::size_t cols) {
  std::vector<std::size_t> pivots;
  std::size_t row = 0;
  for (std::size_t col = 0; col < cols && row < M.size(); ++col) {
    std::size_t sel = row;
    while (sel < M.size() && M[sel][col] == 0) ++sel;
    if (sel == M.size()) continue;
    std::swap(M[row], M[sel]);
    const cpp_rational inv = 1 / M[row][col];
    for (auto& v : M[row]) v *= inv;
    for (std::size_t r = 0; r < M.size(); ++r) {
      if (r == row || M[r][col] == 0) continue;
      const cpp_rational factor = M[r][col];
      for (std::size_t c = 0; c < cols; ++c) M[r][c] -= factor * M[row][c];
    }
    pivots.push_back(col);
    ++row;
  }
  return pivots;
}

/// Kernel basis of M (in RREF already), one vector per free column.
RationalMatrix kernel_from_rref(const RationalMatrix& M, const std::vector<std::size_t>& pivots,
                                std::size_t cols) {
  std::vector<bool> is_pivot(cols, false);
  for (auto p : pivots) is_pivot[p] = true;
  RationalMatrix basis;
  for (std::size_t free = 0; free < cols; ++free) {
    if (is_pivot[free]) continue;
    std::vector<cpp_rational> v(cols, cpp_rational(0));
    v[free] = 1;
    for (std::size_t r = 0; r < pivots.size(); ++r) v[pivots[r]] = -M[r][free];
    basis.push_back(std::move(v));
  }
  return basis;
}

}  // namespace

Matrix exact_nullspace_rows(const Matrix& A) {
  const auto cols = static_cast<std::size_t>(A.cols());
  RationalMatrix M = to_rational(A);
  const auto pivots = rref(M, cols);
  RationalMatrix basis = kernel_from_rref(M, pivots, cols);
  if (basis.empty()) return Matrix(0, A.cols());

  // canonical form: RREF of the kernel basis, then primitive integer rows
  rref(basis, cols);
  Matrix out(basis.size(), cols);
  for (std::size_t r = 0; r < basis.size(); ++r) {
    cpp_int den = 1;
    for (const auto& v : basis[r]) den = boost::multiprecision::lcm(den, boost::multiprecision::denominator(v));
    std::vector<cpp_int> ints(cols);
    cpp_int g = 0;
    for (std::size_t c = 0; c < cols; ++c) {
      ints[c] = boost::multiprecision::numerator(cpp_rational(basis[r][c] * den));
      g = boost::multiprecision::gcd(g, boost::multiprecision::abs(ints[c]));
    }
    for (std::size_t c = 0; c < cols; ++c) {
      out(r, c) = static_cast<double>(g == 0 ? ints[c] : ints[c] / g);
    }
  }
  return out;
}

std::size_t exact_rank(const Matrix& A) {
  RationalMatrix M = to_rational(A);
  return rref(M, static_cast<std::size_t>(A.cols())).size();
}

namespace {

Eigen::JacobiSVD<Matrix> full_svd(const Matrix& A) {
  return Eigen::JacobiSVD<Matrix>(A, Eigen::ComputeFullU | Eigen::ComputeFullV);
}

std::size_t rank_from(const Vector& sigma, double rel_tol) {
  if (sigma.size() == 0) return 0;
  const double cutoff = rel_tol * sigma.maxCoeff();
  std::size_t r = 0;
  for (Eigen::Index i = 0; i < sigma.size(); ++i) {
    if (sigma(i) > cutoff && sigma(i) > 0.0) ++r;
  }
  return r;
}

void float_rref(Matrix& B) {
  const double eps = 1e-12;
  Eigen::Index row = 0;
  for (Eigen::Index col = 0; col < B.cols() && row < B.rows(); ++col) {
    Eigen::Index best = row;
    for (Eigen::Index r = row + 1; r < B.rows(); ++r) {
      if (std::abs(B(r, col)) > std::abs(B(best, col))) best = r;
    }
    if (std::abs(B(best, col)) <= eps) continue;
    B.row(row).swap(B.row(best));
    B.row(row) /= B(row, col);
    for (Eigen::Index r = 0; r < B.rows(); ++r) {
      if (r != row) B.row(r) -= B(r, col) * B.row(row);
    }
    ++row;
  }
  B = B.unaryExpr([eps](double v) { return std::abs(v) <= eps ? 0.0 : v; });
}

}  // namespace

Matrix svd_nullspace_rows(const Matrix& A, double rel_tol) {
  const Eigen::Index n = A.cols();
  if (A.rows() == 0 || n == 0) return Matrix::Identity(n, n);
  const auto svd = full_svd(A);
  const auto r = static_cast<Eigen::Index>(rank_from(svd.singularValues(), rel_tol));
  Matrix basis = svd.matrixV().rightCols(n - r).transpose();
  float_rref(basis);
  return basis;
}

std::size_t svd_rank(const Matrix& A, double rel_tol) {
  if (A.rows() == 0 || A.cols() == 0) return 0;
  return rank_from(full_svd(A).singularValues(), rel_tol);
}

}  // namespace skt::detail
