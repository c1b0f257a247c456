#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <set>

#include "credal/datagen.hpp"
#include "credal/engine.hpp"
#include "credal/errors.hpp"
#include "credal/metrics.hpp"
#include "oracles.hpp"

using namespace credal;

namespace {

Dataset blobs(std::vector<std::vector<double>> means, double variance, std::size_t size,
              std::uint64_t seed) {
  ScenarioSpec spec{"blobs", {}, 0.0, seed};
  for (auto& mu : means) {
    Matrix cov(mu.size(), mu.size());
    for (std::size_t i = 0; i < mu.size(); ++i) cov(i, i) = variance;
    spec.clusters.push_back({mu, cov, size});
  }
  return generate(spec);
}

double hard_accuracy(const ClusterModel& m, const Dataset& d) {
  const HardAssignment h = harden(m.partition, m.structure);
  const std::vector<int> pred(h.labels.begin(), h.labels.end());
  return accuracy(pred, *d.labels).ac;
}

void check_descent(const ClusterModel& m) {
  for (std::size_t t = 1; t < m.objective_trace.size(); ++t)
    CHECK(m.objective_trace[t] <= m.objective_trace[t - 1] + 1e-9);
}

}  // namespace

TEST_CASE("init_centers samples distinct rows deterministically") {
  Dataset d{Matrix{{1, 0}, {2, 0}, {3, 0}, {4, 0}}, std::nullopt, "four"};
  const Matrix all = init_centers(d, 4, 7);
  std::set<double> firsts;
  for (std::size_t k = 0; k < 4; ++k) firsts.insert(all(k, 0));
  CHECK(firsts == std::set<double>{1, 2, 3, 4});
  CHECK(init_centers(d, 4, 7) == all);
  CHECK(init_centers(d, 1, 3).rows() == 1);
  CHECK_THROWS_AS(init_centers(d, 5, 0), InvalidArgument);
  CHECK_THROWS_AS(init_centers(d, 0, 0), InvalidArgument);
}

TEST_CASE("fit configuration is validated") {
  const Dataset d = blobs({{0, 0}}, 1.0, 5, 1);
  auto bad = [&](auto mutate) {
    FitConfig cfg;
    mutate(cfg);
    CHECK_THROWS_AS(ecm_fit(d, 1, cfg), InvalidArgument);
  };
  bad([](FitConfig& c) { c.beta = 1.0; });
  bad([](FitConfig& c) { c.gamma = 0.5; });
  bad([](FitConfig& c) { c.delta = 0.0; });
  bad([](FitConfig& c) { c.lambda = -1.0; });
  bad([](FitConfig& c) { c.epsilon = 0.0; });
  bad([](FitConfig& c) { c.max_iter = 0; });
  bad([](FitConfig& c) { c.alpha = -0.5; });
  CHECK_THROWS_AS(ecm_fit(d, 6, FitConfig{}), InvalidArgument);
}

TEST_CASE("ECM separates well-separated Gaussians") {
  const Dataset d = blobs({{0, 0}, {12, 0}}, 1.0, 200, 42);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    FitConfig cfg;
    cfg.seed = seed;
    const ClusterModel m = ecm_fit(d, 2, cfg);
    CHECK(hard_accuracy(m, d) >= 0.95);
    CHECK(m.converged);
    check_descent(m);
    check_normalized(m.partition);
    CHECK(max_abs_diff(m.barycenters, compute_barycenters(m.centers, m.structure)) <= 1e-12);
  }
}

TEST_CASE("a single cluster converges to the mass-weighted mean") {
  const Dataset d = blobs({{2, -1, 0.5}}, 1.0, 50, 3);
  FitConfig cfg;
  cfg.epsilon = 1e-12;
  cfg.max_iter = 500;
  const ClusterModel m = ecm_fit(d, 1, cfg);
  double wsum = 0.0;
  std::vector<double> mean(3, 0.0);
  for (std::size_t i = 0; i < d.size(); ++i) {
    const double w = std::pow(m.partition.masses(i, 0), cfg.beta);
    wsum += w;
    for (std::size_t q = 0; q < 3; ++q) mean[q] += w * d.features(i, q);
  }
  for (std::size_t q = 0; q < 3; ++q) CHECK(m.centers(0, q) == doctest::Approx(mean[q] / wsum).epsilon(1e-6));
}

TEST_CASE("infinite epsilon stops after one iteration") {
  const Dataset d = blobs({{0, 0}, {5, 5}}, 1.0, 20, 1);
  FitConfig cfg;
  cfg.epsilon = std::numeric_limits<double>::infinity();
  const ClusterModel m = ecm_fit(d, 2, cfg);
  CHECK(m.iterations == 1);
  CHECK(m.objective_trace.size() == 1);
  CHECK(m.converged);

  cfg.epsilon = 1e-300;
  cfg.max_iter = 3;
  const ClusterModel capped = ecm_fit(d, 2, cfg);
  CHECK(capped.iterations == 3);
  CHECK_FALSE(capped.converged);
}

TEST_CASE("TECM with lambda 0 reproduces ECM iterate for iterate") {
  const Dataset target = blobs({{0, 0, 0}, {0, 0, 5}, {0, 5, 0}}, 4.0, 20, 5);
  const Dataset source = blobs({{0, 0, 0}, {0, 0, 5}, {0, 5, 0}}, 3.0, 100, 6);
  const SourceKnowledge k = extract_source_knowledge(source, 3, FitConfig{});
  for (std::uint64_t seed : {0u, 1u, 2u}) {
    FitConfig cfg;
    cfg.seed = seed;
    std::vector<Matrix> ecm_v, tecm_v;
    std::vector<Matrix> ecm_m, tecm_m;
    const ClusterModel e = ecm_fit(target, 3, cfg, [&](const IterationState& s) {
      ecm_v.push_back(s.centers);
      ecm_m.push_back(s.partition.masses);
    });
    const ClusterModel t = tecm_fit(target, 3, k, cfg, [&](const IterationState& s) {
      tecm_v.push_back(s.centers);
      tecm_m.push_back(s.partition.masses);
      CHECK(s.association != nullptr);
    });
    REQUIRE(e.objective_trace.size() == t.objective_trace.size());
    for (std::size_t it = 0; it < ecm_v.size(); ++it) {
      CHECK(max_abs_diff(ecm_v[it], tecm_v[it]) <= 1e-10);
      CHECK(max_abs_diff(ecm_m[it], tecm_m[it]) <= 1e-10);
      CHECK(std::abs(e.objective_trace[it] - t.objective_trace[it]) <= 1e-10);
    }
  }
}

TEST_CASE("source knowledge from two tight clusters") {
  const Dataset source = blobs({{0, 0}, {10, 0}}, 0.05, 100, 9);
  const SourceKnowledge k = extract_source_knowledge(source, 2, FitConfig{});
  REQUIRE(k.barycenters.rows() == 3);
  std::vector<double> xs = {k.barycenters(0, 0), k.barycenters(1, 0)};
  std::sort(xs.begin(), xs.end());
  CHECK(std::abs(xs[0] - 0.0) <= 0.5);
  CHECK(std::abs(xs[1] - 10.0) <= 0.5);
  CHECK(std::abs(k.barycenters(0, 1)) <= 0.5);
  CHECK(std::abs(k.barycenters(2, 0) - 5.0) <= 0.5);
  CHECK(std::abs(k.barycenters(2, 1)) <= 0.5);

  const SourceKnowledge one = extract_source_knowledge(source, 1, FitConfig{});
  CHECK(one.barycenters.rows() == 1);

  FitConfig capped;
  capped.max_cardinality = 1;
  const SourceKnowledge singletons = extract_source_knowledge(source, 2, capped);
  CHECK(singletons.barycenters.rows() == 2);
  CHECK(singletons.structure.size() == 2);
}

TEST_CASE("TECM descends monotonically and handles different cluster counts") {
  const Dataset target = blobs({{0, 0, 0}, {0, 0, 5}, {0, 5, 0}}, 4.0, 20, 11);
  const Dataset source = blobs({{0, 0, 0}, {0, 0, 5}, {0, 5, 0}, {5, 0, 0}}, 3.0, 100, 12);
  const SourceKnowledge k = extract_source_knowledge(source, 4, FitConfig{});
  CHECK(k.barycenters.rows() == 15);
  for (double lambda : {0.5, 5.0, 100.0}) {
    FitConfig cfg;
    cfg.lambda = lambda;
    const ClusterModel m = tecm_fit(target, 3, k, cfg);
    check_descent(m);
    check_normalized(m.partition);
    REQUIRE(m.association);
    CHECK(m.association->r.rows() == 15);
    CHECK(m.association->r.cols() == 7);
    for (std::size_t r = 0; r < 15; ++r) {
      const auto row = m.association->r.row(r);
      CHECK(std::abs(std::accumulate(row.begin(), row.end(), 0.0) - 1.0) <= 1e-12);
    }
  }
  const Dataset flat = blobs({{0, 0}}, 1.0, 10, 1);
  CHECK_THROWS_AS(tecm_fit(flat, 1, k, FitConfig{}), InvalidArgument);
}

TEST_CASE("converged fits are fixed points") {
  const Dataset target = blobs({{0, 0}, {6, 0}, {3, 5}}, 1.0, 30, 13);
  const Dataset source = blobs({{0, 0}, {6, 0}, {3, 5}}, 1.0, 100, 14);
  const SourceKnowledge k = extract_source_knowledge(source, 3, FitConfig{});
  FitConfig cfg;
  cfg.epsilon = 1e-10;
  cfg.max_iter = 1000;
  cfg.lambda = 2.0;
  const ClusterModel m = tecm_fit(target, 3, k, cfg);
  REQUIRE(m.converged);
  CHECK(extra_round_shift(target, m, &k).max() <= 1e-6);
}

TEST_CASE("a point midway between two centres lands on the pair") {
  const Dataset d = blobs({{0, 0}, {8, 0}}, 1.0, 50, 15);
  const ClusterModel m = ecm_fit(d, 2, FitConfig{});
  Matrix probe(1, 2);
  for (std::size_t q = 0; q < 2; ++q) probe(0, q) = (m.centers(0, q) + m.centers(1, q)) / 2.0;
  const CredalPartition p =
      update_masses(squared_distances(probe, compute_barycenters(m.centers, m.structure)),
                    m.structure, m.config);
  CHECK(p.masses(0, 2) == 1.0);
}

TEST_CASE("translation equivariance") {
  const Dataset d = blobs({{0, 0}, {5, 1}, {2, 6}}, 1.5, 25, 16);
  const SourceKnowledge k = extract_source_knowledge(blobs({{0, 0}, {5, 1}, {2, 6}}, 1.0, 80, 17), 3,
                                                     FitConfig{});
  const std::vector<double> shift = {3.25, -7.5};
  Dataset moved = d;
  SourceKnowledge kmoved = k;
  for (std::size_t i = 0; i < moved.size(); ++i)
    for (std::size_t q = 0; q < 2; ++q) moved.features(i, q) += shift[q];
  for (std::size_t j = 0; j < kmoved.barycenters.rows(); ++j)
    for (std::size_t q = 0; q < 2; ++q) kmoved.barycenters(j, q) += shift[q];

  FitConfig cfg;
  cfg.lambda = 1.0;
  cfg.seed = 4;
  const ClusterModel a = tecm_fit(d, 3, k, cfg);
  const ClusterModel b = tecm_fit(moved, 3, kmoved, cfg);
  REQUIRE(a.iterations == b.iterations);
  for (std::size_t j = 0; j < a.centers.rows(); ++j)
    for (std::size_t q = 0; q < 2; ++q) CHECK(b.centers(j, q) - shift[q] == doctest::Approx(a.centers(j, q)).epsilon(1e-9));
  CHECK(max_abs_diff(a.partition.masses, b.partition.masses) <= 1e-8);
  CHECK(max_abs_diff(a.association->r, b.association->r) <= 1e-8);
}

TEST_CASE("silhouette") {
  const Matrix x{{0, 0}, {0, 1}, {10, 0}, {10, 1}};
  // a = 1, b = mean(10, sqrt(101)) for every point.
  const double b = (10.0 + std::sqrt(101.0)) / 2.0;
  CHECK(silhouette(x, {0, 0, 1, 1}, {true, true, true, true}) == doctest::Approx((b - 1.0) / b));
  CHECK(silhouette(x, {0, 0, 0, 0}, {true, true, true, true}) == -1.0);
  CHECK(silhouette(x, {0, 0, 1, 1}, {true, true, false, false}) == -1.0);
}

TEST_CASE("grid search contracts") {
  const Dataset target = blobs({{0, 0}, {4, 0}}, 2.0, 15, 18);
  const SourceKnowledge k = extract_source_knowledge(blobs({{0, 0}, {4, 0}}, 1.0, 100, 19), 2, FitConfig{});
  GridSearchOptions opts;
  opts.grid = {0.0};
  opts.scorer = Scorer::accuracy;
  opts.seeds = {0, 1, 2};
  GridSearchResult r = grid_search_lambda(target, 2, k, FitConfig{}, opts);
  CHECK(r.best_lambda == 0.0);
  REQUIRE(r.cells.size() == 1);
  CHECK(r.cells[0].scores.size() == 3);

  opts.grid = {0.0, 1.0, 10.0, 100.0};
  r = grid_search_lambda(target, 2, k, FitConfig{}, opts);
  double best = -1.0, best_lambda = 0.0;
  for (const auto& c : r.cells)
    if (c.mean > best) {
      best = c.mean;
      best_lambda = c.lambda;
    }
  CHECK(r.best_lambda == best_lambda);

  // Identical scores everywhere: the smallest lambda wins.
  opts.grid = {5.0, 5.0 + 1e-13, 1.0};
  r = grid_search_lambda(target, 2, k, FitConfig{}, opts);
  if (r.cells[0].mean == r.cells[2].mean && r.cells[0].mean >= r.cells[1].mean) CHECK(r.best_lambda == 1.0);

  // Deterministic regardless of scheduling.
  const GridSearchResult again = grid_search_lambda(target, 2, k, FitConfig{}, opts);
  for (std::size_t g = 0; g < r.cells.size(); ++g) CHECK(r.cells[g].scores == again.cells[g].scores);

  opts.scorer = Scorer::silhouette;
  r = grid_search_lambda(target, 2, k, FitConfig{}, opts);
  for (const auto& c : r.cells) CHECK(c.mean <= 1.0);

  Dataset unlabeled = target;
  unlabeled.labels.reset();
  opts.scorer = Scorer::accuracy;
  CHECK_THROWS_AS(grid_search_lambda(unlabeled, 2, k, FitConfig{}, opts), InvalidArgument);
  opts.grid.clear();
  CHECK_THROWS_AS(grid_search_lambda(target, 2, k, FitConfig{}, opts), InvalidArgument);
  CHECK(default_lambda_grid().size() == 11);
}
