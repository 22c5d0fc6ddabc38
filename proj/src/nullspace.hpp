#pragma once

#include <cstddef>

#include "skt/crn.hpp"

namespace skt::detail {

/// Rows spanning {x : A x = 0}, computed by exact rational Gauss-Jordan
/// elimination. Entries of A must be integers. The result is the reduced row
/// echelon form of the kernel basis with each row scaled to a primitive
/// integer vector.
Matrix exact_nullspace_rows(const Matrix& A);

/// Rank of an integer matrix, exact.
std::size_t exact_rank(const Matrix& A);

/// Rows spanning the numerical kernel of A: right singular vectors whose
/// singular value is at most rel_tol * sigma_max. Returned in reduced row
/// echelon form.
Matrix svd_nullspace_rows(const Matrix& A, double rel_tol = 1e-10);

std::size_t svd_rank(const Matrix& A, double rel_tol = 1e-10);

}  // namespace skt::detail
