#pragma once

#include <map>
#include <span>
#include <vector>

namespace credal {

struct AccuracyResult {
  double ac;
  /// Predicted cluster -> matched true label. Clusters left unmatched (more
  /// clusters than classes) are absent.
  std::map<int, int> matching;
};

struct EvaluationReport {
  double ac;
  double ri;
  double nmi;
  std::map<int, int> matching;
};

/// Fraction of objects whose predicted cluster maps to their true label under
/// the best one-to-one matching of clusters to labels.
AccuracyResult accuracy(std::span<const int> pred, std::span<const int> truth);

/// (pairs together in both + pairs apart in both) / (n choose 2). n >= 2.
double rand_index(std::span<const int> pred, std::span<const int> truth);

/// 2 I(X;Y) / (H(X) + H(Y)); 1 when both partitions are trivial.
double nmi(std::span<const int> pred, std::span<const int> truth);

EvaluationReport evaluate(std::span<const int> pred, std::span<const int> truth);

/// Maximum-weight perfect matching on a square matrix (Hungarian method).
/// Returns assignment[row] = column.
std::vector<std::size_t> max_weight_assignment(const std::vector<std::vector<double>>& weight);

}  // namespace credal
