#include "credal/solver.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <utility>
#include <vector>

#include "credal/errors.hpp"

namespace credal {

namespace {

// In-place LU with row pivoting; returns the smallest pivot magnitude seen.
double lu_solve(Matrix a, Matrix& b) {
  const std::size_t n = a.rows(), m = b.cols();
  double min_pivot = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t piv = k;
    for (std::size_t i = k + 1; i < n; ++i)
      if (std::abs(a(i, k)) > std::abs(a(piv, k))) piv = i;
    if (piv != k) {
      for (std::size_t j = 0; j < n; ++j) std::swap(a(k, j), a(piv, j));
      for (std::size_t j = 0; j < m; ++j) std::swap(b(k, j), b(piv, j));
    }
    const double pivot = a(k, k);
    min_pivot = std::min(min_pivot, std::abs(pivot));
    if (pivot == 0.0) return 0.0;
    for (std::size_t i = k + 1; i < n; ++i) {
      const double factor = a(i, k) / pivot;
      if (factor == 0.0) continue;
      for (std::size_t j = k; j < n; ++j) a(i, j) -= factor * a(k, j);
      for (std::size_t j = 0; j < m; ++j) b(i, j) -= factor * b(k, j);
    }
  }
  for (std::size_t kk = n; kk-- > 0;) {
    for (std::size_t j = 0; j < m; ++j) {
      double acc = b(kk, j);
      for (std::size_t i = kk + 1; i < n; ++i) acc -= a(kk, i) * b(i, j);
      b(kk, j) = acc / a(kk, kk);
    }
  }
  return min_pivot;
}

}  // namespace

SolveResult solve_centers(const Matrix& lhs, const Matrix& rhs, double ridge) {
  const std::size_t c = lhs.rows();
  if (lhs.cols() != c || rhs.rows() != c)
    throw InvalidArgument("solve_centers: lhs must be square with as many rows as rhs");
  for (double v : lhs.data())
    if (!std::isfinite(v)) throw InvalidArgument("solve_centers: non-finite lhs entry");
  const double scale = max_abs(lhs);
  if (scale == 0.0) throw FitDegenerate("solve_centers: centre system is identically zero");

  SolveResult out{rhs, false};
  const double min_pivot = lu_solve(lhs, out.solution);
  if (min_pivot >= 1e-12 * scale) return out;

  double trace = 0.0;
  for (std::size_t k = 0; k < c; ++k) trace += lhs(k, k);
  double shift = ridge * trace / static_cast<double>(c);
  if (!(shift > 0.0)) shift = ridge * scale;
  Matrix shifted = lhs;
  for (std::size_t k = 0; k < c; ++k) shifted(k, k) += shift;
  out.solution = rhs;
  out.regularized = true;
  if (lu_solve(std::move(shifted), out.solution) == 0.0)
    throw FitDegenerate("solve_centers: centre system singular after regularisation");
  return out;
}

}  // namespace credal
