#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "credal/belief.hpp"
#include "credal/config.hpp"
#include "credal/dataset.hpp"
#include "credal/kernels.hpp"
#include "credal/matrix.hpp"

namespace credal {

/// Barycenters learned on a source domain, the only thing TECM needs from it.
struct SourceKnowledge {
  Matrix barycenters;         // f_s x p
  FocalStructure structure;   // over the source frame
};

struct ClusterModel {
  Matrix centers;             // c x p
  Matrix barycenters;         // f x p, derived from centers
  FocalStructure structure;
  CredalPartition partition;
  std::optional<AssociationMatrix> association;  // absent for ECM
  FitConfig config;
  std::vector<double> objective_trace;
  bool converged = false;
  int iterations = 0;
  /// Number of centre solves that needed ridge regularisation.
  int regularized_solves = 0;
};

/// State after each completed iteration, for tracing and diagnostics.
struct IterationState {
  int iteration;
  const CredalPartition& partition;
  const AssociationMatrix* association;
  const Matrix& centers;
  double objective;
};
using FitObserver = std::function<void(const IterationState&)>;

/// c distinct data rows drawn uniformly without replacement.
Matrix init_centers(const Dataset& data, std::size_t c, std::uint64_t seed);

/// Evidential c-means on the target data alone.
ClusterModel ecm_fit(const Dataset& data, std::size_t c, const FitConfig& config,
                     const FitObserver& observer = {});

/// Runs ECM on the source domain and keeps its focal-set barycenters.
SourceKnowledge extract_source_knowledge(const Dataset& source, std::size_t c_source,
                                         const FitConfig& config);

/// Transfer ECM: alternates masses, association, centres until the
/// objective moves by less than epsilon. With lambda = 0 the iterates are
/// exactly those of ecm_fit.
ClusterModel tecm_fit(const Dataset& data, std::size_t c, const SourceKnowledge& source,
                      const FitConfig& config, const FitObserver& observer = {});

/// Largest change of masses, association and centres produced by one more
/// full update round from the model's final state.
struct RoundShift {
  double masses = 0.0;
  double association = 0.0;
  double centers = 0.0;
  double max() const noexcept;
};
RoundShift extra_round_shift(const Dataset& data, const ClusterModel& model,
                             const SourceKnowledge* source);

/// Mean silhouette of the labelled objects, Euclidean distance. Objects with
/// `keep[i] == false` are ignored. Returns -1 when fewer than two clusters
/// remain.
double silhouette(const Matrix& points, const std::vector<std::size_t>& labels,
                  const std::vector<bool>& keep);

enum class Scorer { silhouette, accuracy };

struct GridCell {
  double lambda;
  double mean;
  double stddev;
  std::vector<double> scores;  // one per seed, in seed order
};

struct GridSearchResult {
  double best_lambda;
  std::vector<GridCell> cells;  // in grid order
};

struct GridSearchOptions {
  std::vector<double> grid;
  Scorer scorer = Scorer::silhouette;
  std::vector<std::uint64_t> seeds;  // empty: config.seed .. config.seed + 9
  double outlier_threshold = 0.5;
};

/// Fits once per (lambda, seed), averages the score per lambda and returns
/// the argmax (ties to the smaller lambda). Cells run in parallel.
GridSearchResult grid_search_lambda(const Dataset& data, std::size_t c,
                                    const SourceKnowledge& source, const FitConfig& config,
                                    const GridSearchOptions& options);

/// The lambda grid used by default: {0, 0.1, 0.5, 1, 5, 10, 50, 100, 300, 500, 1000}.
std::vector<double> default_lambda_grid();

}  // namespace credal
