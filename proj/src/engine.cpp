#include "credal/engine.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <numeric>
#include <string>

#include "credal/errors.hpp"
#include "credal/metrics.hpp"
#include "credal/rng.hpp"
#include "credal/solver.hpp"

namespace credal {

void validate(const Dataset& data) {
  if (data.size() < 1 || data.dims() < 1)
    throw InvalidArgument("dataset '" + data.name + "' is empty");
  for (double v : data.features.data())
    if (!std::isfinite(v)) throw InvalidArgument("dataset '" + data.name + "' has non-finite features");
  if (data.labels && data.labels->size() != data.size())
    throw InvalidArgument("dataset '" + data.name + "': label count does not match rows");
}

void validate(const FitConfig& config) {
  if (!(config.alpha >= 0.0)) throw InvalidArgument("alpha must be >= 0");
  if (!(config.beta > 1.0)) throw InvalidArgument("beta must be > 1");
  if (!(config.delta > 0.0)) throw InvalidArgument("delta must be > 0");
  if (!(config.gamma > 1.0)) throw InvalidArgument("gamma must be > 1");
  if (!(config.lambda >= 0.0) || std::isinf(config.lambda))
    throw InvalidArgument("lambda must be finite and >= 0");
  if (!(config.epsilon > 0.0)) throw InvalidArgument("epsilon must be > 0");
  if (config.max_iter < 1) throw InvalidArgument("max_iter must be >= 1");
  if (!(config.ridge >= 0.0)) throw InvalidArgument("ridge must be >= 0");
}

Matrix init_centers(const Dataset& data, std::size_t c, std::uint64_t seed) {
  const std::size_t n = data.size();
  if (c < 1 || c > n)
    throw InvalidArgument("init_centers: need 1 <= c <= n, got c=" + std::to_string(c) +
                          " n=" + std::to_string(n));
  Rng rng(seed);
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  Matrix centers(c, data.dims());
  for (std::size_t k = 0; k < c; ++k) {
    const std::size_t pick = k + static_cast<std::size_t>(rng.below(n - k));
    std::swap(idx[k], idx[pick]);
    auto src = data.features.row(idx[k]);
    std::copy(src.begin(), src.end(), centers.row(k).begin());
  }
  return centers;
}

namespace {

ClusterModel fit(const Dataset& data, std::size_t c, const SourceKnowledge* source,
                 const FitConfig& config, const FitObserver& observer) {
  validate(data);
  validate(config);
  if (c < 1 || c > data.size())
    throw InvalidArgument("fit: cluster count " + std::to_string(c) + " outside 1.." +
                          std::to_string(data.size()));
  if (source && source->barycenters.cols() != data.dims())
    throw InvalidArgument("tecm_fit: source knowledge has " +
                          std::to_string(source->barycenters.cols()) + " features, target " +
                          std::to_string(data.dims()));
  if (source && source->barycenters.rows() != source->structure.size())
    throw InvalidArgument("tecm_fit: source barycenters do not match the source structure");

  ClusterModel model;
  model.config = config;
  model.structure = enumerate_focal_sets(c, effective_cap(config, c));
  model.centers = init_centers(data, c, config.seed);
  const Matrix& x = data.features;

  double previous = std::numeric_limits<double>::infinity();
  for (int t = 1; t <= config.max_iter; ++t) {
    const Matrix bary = compute_barycenters(model.centers, model.structure);
    model.partition = update_masses(squared_distances(x, bary), model.structure, config);

    std::optional<TransferTerm> transfer;
    if (source) {
      model.association = update_association(source->barycenters, bary, model.structure, config);
      transfer.emplace(TransferTerm{source->barycenters, *model.association});
    }

    const CenterSystem sys = assemble_system(x, model.partition, transfer, model.structure, config);
    SolveResult solved = solve_centers(sys.lhs, sys.rhs, config.ridge);
    if (solved.regularized) ++model.regularized_solves;
    model.centers = std::move(solved.solution);

    const double j = objective(x, model.partition, model.centers, transfer, model.structure, config);
    model.objective_trace.push_back(j);
    model.iterations = t;
    if (observer)
      observer({t, model.partition, model.association ? &*model.association : nullptr,
                model.centers, j});
    // J(0) is +inf, so only an infinite threshold stops the first round.
    if (std::abs(j - previous) < config.epsilon || std::isinf(config.epsilon)) {
      model.converged = true;
      break;
    }
    previous = j;
  }
  model.barycenters = compute_barycenters(model.centers, model.structure);
  return model;
}

}  // namespace

ClusterModel ecm_fit(const Dataset& data, std::size_t c, const FitConfig& config,
                     const FitObserver& observer) {
  return fit(data, c, nullptr, config, observer);
}

ClusterModel tecm_fit(const Dataset& data, std::size_t c, const SourceKnowledge& source,
                      const FitConfig& config, const FitObserver& observer) {
  return fit(data, c, &source, config, observer);
}

SourceKnowledge extract_source_knowledge(const Dataset& source, std::size_t c_source,
                                         const FitConfig& config) {
  FitConfig plain = config;
  plain.lambda = 0.0;
  ClusterModel model = ecm_fit(source, c_source, plain);
  return {std::move(model.barycenters), std::move(model.structure)};
}

double RoundShift::max() const noexcept { return std::max({masses, association, centers}); }

RoundShift extra_round_shift(const Dataset& data, const ClusterModel& model,
                             const SourceKnowledge* source) {
  const FitConfig& config = model.config;
  const Matrix bary = compute_barycenters(model.centers, model.structure);
  const CredalPartition m = update_masses(squared_distances(data.features, bary), model.structure, config);

  RoundShift shift;
  shift.masses = max_abs_diff(m.masses, model.partition.masses);
  for (std::size_t i = 0; i < m.empty_mass.size(); ++i)
    shift.masses = std::max(shift.masses, std::abs(m.empty_mass[i] - model.partition.empty_mass[i]));

  std::optional<AssociationMatrix> r;
  std::optional<TransferTerm> transfer;
  if (source) {
    r = update_association(source->barycenters, bary, model.structure, config);
    if (model.association) shift.association = max_abs_diff(r->r, model.association->r);
    transfer.emplace(TransferTerm{source->barycenters, *r});
  }
  const CenterSystem sys = assemble_system(data.features, m, transfer, model.structure, config);
  shift.centers = max_abs_diff(solve_centers(sys.lhs, sys.rhs, config.ridge).solution, model.centers);
  return shift;
}

double silhouette(const Matrix& points, const std::vector<std::size_t>& labels,
                  const std::vector<bool>& keep) {
  const std::size_t n = points.rows();
  std::vector<std::size_t> members;
  std::size_t clusters = 0;
  for (std::size_t i = 0; i < n; ++i)
    if (keep[i]) {
      members.push_back(i);
      clusters = std::max(clusters, labels[i] + 1);
    }
  std::vector<std::size_t> sizes(clusters, 0);
  for (std::size_t i : members) ++sizes[labels[i]];
  const auto present = std::count_if(sizes.begin(), sizes.end(), [](std::size_t s) { return s > 0; });
  if (present < 2) return -1.0;

  const Matrix d = squared_distances(points, points);
  double total = 0.0;
  std::vector<double> sums(clusters);
  for (std::size_t i : members) {
    if (sizes[labels[i]] == 1) continue;  // singleton clusters score 0
    std::fill(sums.begin(), sums.end(), 0.0);
    for (std::size_t k : members)
      if (k != i) sums[labels[k]] += std::sqrt(d(i, k));
    const double a = sums[labels[i]] / static_cast<double>(sizes[labels[i]] - 1);
    double b = std::numeric_limits<double>::infinity();
    for (std::size_t l = 0; l < clusters; ++l)
      if (l != labels[i] && sizes[l] > 0) b = std::min(b, sums[l] / static_cast<double>(sizes[l]));
    const double denom = std::max(a, b);
    if (denom > 0.0) total += (b - a) / denom;
  }
  return total / static_cast<double>(members.size());
}

std::vector<double> default_lambda_grid() {
  return {0.0, 0.1, 0.5, 1.0, 5.0, 10.0, 50.0, 100.0, 300.0, 500.0, 1000.0};
}

GridSearchResult grid_search_lambda(const Dataset& data, std::size_t c,
                                    const SourceKnowledge& source, const FitConfig& config,
                                    const GridSearchOptions& options) {
  if (options.grid.empty()) throw InvalidArgument("grid_search_lambda: empty lambda grid");
  if (options.scorer == Scorer::accuracy && !data.labels)
    throw InvalidArgument("grid_search_lambda: the accuracy scorer needs labelled data");
  std::vector<std::uint64_t> seeds = options.seeds;
  if (seeds.empty())
    for (std::uint64_t k = 0; k < 10; ++k) seeds.push_back(config.seed + k);

  const std::size_t cells = options.grid.size() * seeds.size();
  std::vector<double> scores(cells, 0.0);
  std::vector<std::exception_ptr> errors(cells);
  const auto nc = static_cast<std::ptrdiff_t>(cells);
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t cc = 0; cc < nc; ++cc) {
    const auto cell = static_cast<std::size_t>(cc);
    try {
      FitConfig cfg = config;
      cfg.lambda = options.grid[cell / seeds.size()];
      cfg.seed = seeds[cell % seeds.size()];
      const ClusterModel model = tecm_fit(data, c, source, cfg);
      const HardAssignment hard = harden(model.partition, model.structure, options.outlier_threshold);
      if (options.scorer == Scorer::accuracy) {
        std::vector<int> pred(hard.labels.begin(), hard.labels.end());
        scores[cell] = accuracy(pred, *data.labels).ac;
      } else {
        std::vector<bool> keep(hard.outlier_flags.size());
        for (std::size_t i = 0; i < keep.size(); ++i) keep[i] = !hard.outlier_flags[i];
        scores[cell] = silhouette(data.features, hard.labels, keep);
      }
    } catch (...) {
      errors[cell] = std::current_exception();
    }
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);

  GridSearchResult result{options.grid.front(), {}};
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t g = 0; g < options.grid.size(); ++g) {
    GridCell cell{options.grid[g], 0.0, 0.0, {}};
    cell.scores.assign(scores.begin() + static_cast<std::ptrdiff_t>(g * seeds.size()),
                       scores.begin() + static_cast<std::ptrdiff_t>((g + 1) * seeds.size()));
    const double count = static_cast<double>(cell.scores.size());
    cell.mean = std::accumulate(cell.scores.begin(), cell.scores.end(), 0.0) / count;
    double var = 0.0;
    for (double s : cell.scores) var += (s - cell.mean) * (s - cell.mean);
    cell.stddev = count > 1 ? std::sqrt(var / (count - 1.0)) : 0.0;
    if (cell.mean > best || (cell.mean == best && cell.lambda < result.best_lambda)) {
      best = cell.mean;
      result.best_lambda = cell.lambda;
    }
    result.cells.push_back(std::move(cell));
  }
  return result;
}

}  // namespace credal
