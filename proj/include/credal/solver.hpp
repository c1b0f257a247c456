#pragma once

#include <string>

#include "credal/matrix.hpp"

namespace credal {

struct SolveResult {
  Matrix solution;
  /// Set when a near-zero pivot forced a ridge-regularised re-solve.
  bool regularized = false;
};

/// Solves lhs * X = rhs by LU factorisation with partial pivoting.
///
/// If any pivot is below 1e-12 * max|lhs|, ridge * trace(lhs) / c is added to
/// the diagonal and the system re-solved. An identically zero lhs throws
/// FitDegenerate.
SolveResult solve_centers(const Matrix& lhs, const Matrix& rhs, double ridge = 1e-9);

}  // namespace credal
