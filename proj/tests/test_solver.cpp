#include <doctest.h>

#include "credal/errors.hpp"
#include "credal/solver.hpp"
#include "oracles.hpp"

using namespace credal;

TEST_CASE("identity and diagonal systems") {
  const Matrix rhs{{1.5, -2}, {3, 4}, {0, 7}};
  CHECK(solve_centers(Matrix::identity(3), rhs).solution == rhs);

  const SolveResult r = solve_centers(Matrix{{2, 0}, {0, 2}}, Matrix{{2, 4}, {6, 8}});
  CHECK(r.solution == Matrix{{1, 2}, {3, 4}});
  CHECK_FALSE(r.regularized);
}

TEST_CASE("random well-conditioned systems have tiny residuals") {
  Rng rng(2);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t c = 3, p = 2;
    Matrix a = oracle::random_matrix(rng, c, c);
    for (std::size_t k = 0; k < c; ++k) a(k, k) += 4.0;
    const Matrix b = oracle::random_matrix(rng, c, p);
    const Matrix v = solve_centers(a, b).solution;
    double residual = 0.0;
    for (std::size_t i = 0; i < c; ++i)
      for (std::size_t q = 0; q < p; ++q) {
        double acc = -b(i, q);
        for (std::size_t k = 0; k < c; ++k) acc += a(i, k) * v(k, q);
        residual = std::max(residual, std::abs(acc));
      }
    CHECK(residual <= 1e-10);
  }
}

TEST_CASE("pivoting handles a zero leading entry") {
  const Matrix v = solve_centers(Matrix{{0, 1}, {1, 0}}, Matrix{{3}, {5}}).solution;
  CHECK(v(0, 0) == 5.0);
  CHECK(v(1, 0) == 3.0);
}

TEST_CASE("near-singular systems are ridge regularised") {
  // Rank-one H, as produced when every object sits on the pair set.
  const SolveResult r = solve_centers(Matrix{{1, 1}, {1, 1}}, Matrix{{2}, {2}}, 1e-9);
  CHECK(r.regularized);
  CHECK(std::isfinite(r.solution(0, 0)));
  CHECK(r.solution(0, 0) + r.solution(1, 0) == doctest::Approx(2.0).epsilon(1e-6));
}

TEST_CASE("degenerate and malformed systems") {
  CHECK_THROWS_AS(solve_centers(Matrix(2, 2), Matrix(2, 1)), FitDegenerate);
  CHECK_THROWS_AS(solve_centers(Matrix(2, 3), Matrix(2, 1)), InvalidArgument);
  CHECK_THROWS_AS(solve_centers(Matrix::identity(2), Matrix(3, 1)), InvalidArgument);
}
