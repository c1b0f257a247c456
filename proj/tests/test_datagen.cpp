#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "credal/datagen.hpp"
#include "credal/errors.hpp"

using namespace credal;

namespace {

Matrix scaled_identity(std::size_t p, double s) {
  Matrix m = Matrix::identity(p);
  for (std::size_t i = 0; i < p; ++i) m(i, i) = s;
  return m;
}

}  // namespace

TEST_CASE("T1-1 has 60 labelled points in 3 dimensions") {
  const Dataset d = generate(builtin_scenario("T1-1"));
  CHECK(d.size() == 60);
  CHECK(d.dims() == 3);
  REQUIRE(d.labels);
  for (int k = 1; k <= 3; ++k) CHECK(std::count(d.labels->begin(), d.labels->end(), k) == 20);
}

TEST_CASE("zero covariance reproduces the means") {
  ScenarioSpec spec{"flat", {{{1.5, -2.0}, Matrix(2, 2), 3}, {{0.0, 7.0}, Matrix(2, 2), 2}}, 0.0, 4};
  const Dataset d = generate(spec);
  for (std::size_t i = 0; i < 5; ++i) {
    const auto& mu = spec.clusters[i < 3 ? 0 : 1].mean;
    CHECK(d.features(i, 0) == mu[0]);
    CHECK(d.features(i, 1) == mu[1]);
  }
}

TEST_CASE("large samples match mean and covariance") {
  ScenarioSpec spec{"big", {{{0.0, 5.0, 0.0}, scaled_identity(3, 3.0), 10000}}, 1.0, 11};
  const Dataset d = generate(spec);
  std::vector<double> mean(3, 0.0);
  for (std::size_t i = 0; i < d.size(); ++i)
    for (std::size_t q = 0; q < 3; ++q) mean[q] += d.features(i, q) / 10000.0;
  CHECK(std::abs(mean[0]) < 0.1);
  CHECK(std::abs(mean[1] - 5.0) < 0.1);
  CHECK(std::abs(mean[2]) < 0.1);

  Matrix cov(3, 3);
  for (std::size_t i = 0; i < d.size(); ++i)
    for (std::size_t a = 0; a < 3; ++a)
      for (std::size_t b = 0; b < 3; ++b)
        cov(a, b) += (d.features(i, a) - mean[a]) * (d.features(i, b) - mean[b]) / 9999.0;
  double err = 0.0, ref = 0.0;
  for (std::size_t a = 0; a < 3; ++a)
    for (std::size_t b = 0; b < 3; ++b) {
      const double want = a == b ? 4.0 : 0.0;  // 3 + noise 1^2
      err += (cov(a, b) - want) * (cov(a, b) - want);
      ref += want * want;
    }
  CHECK(std::sqrt(err / ref) < 0.1);
}

TEST_CASE("generation is deterministic per seed") {
  const ScenarioSpec spec = builtin_scenario("S1-1");
  CHECK(generate(spec).features == generate(spec).features);
  ScenarioSpec other = spec;
  other.seed = 1;
  CHECK_FALSE(generate(other).features == generate(spec).features);
}

TEST_CASE("covariance must be positive semi-definite") {
  Matrix bad{{1.0, 2.0}, {2.0, 1.0}};
  ScenarioSpec spec{"bad", {{{0.0, 0.0}, bad, 5}}, 0.0, 0};
  CHECK_THROWS_AS(generate(spec), InvalidArgument);
  Matrix asym{{1.0, 0.5}, {0.0, 1.0}};
  spec.clusters[0].covariance = asym;
  CHECK_THROWS_AS(generate(spec), InvalidArgument);
}

TEST_CASE("cholesky of a singular matrix") {
  const Matrix a{{4.0, 2.0}, {2.0, 1.0}};
  const Matrix l = cholesky_psd(a);
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 2; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < 2; ++k) s += l(i, k) * l(j, k);
      CHECK(s == doctest::Approx(a(i, j)));
    }
}

TEST_CASE("built-in scenarios") {
  CHECK(builtin_scenarios().size() == 10);

  const ScenarioSpec s12 = builtin_scenario("S1-2");
  CHECK(s12.clusters.size() == 4);
  for (const auto& g : s12.clusters) {
    CHECK(g.size == 200);
    CHECK(g.covariance == scaled_identity(3, 3.0));
  }

  const ScenarioSpec t21 = builtin_scenario("T2-1");
  REQUIRE(t21.clusters.size() == 2);
  CHECK(t21.clusters[0].mean == std::vector<double>{0.0, 0.2});
  CHECK(t21.clusters[1].mean == std::vector<double>{1.0, 0.2});
  CHECK(t21.clusters[0].size == 10);
  CHECK(t21.clusters[0].covariance == Matrix::identity(2));

  const ScenarioSpec t13 = builtin_scenario("T1-3"), s11 = builtin_scenario("S1-1");
  CHECK(t13.noise_sigma == 5.0);
  REQUIRE(t13.clusters.size() == s11.clusters.size());
  for (std::size_t g = 0; g < s11.clusters.size(); ++g) {
    CHECK(t13.clusters[g].mean == s11.clusters[g].mean);
    CHECK(t13.clusters[g].size == 200);
  }
  CHECK(builtin_scenario("T1-4").noise_sigma == 3.0);

  CHECK_THROWS_AS(builtin_scenario("T9-9"), InvalidArgument);
}
