#pragma once

#include <cstddef>
#include <vector>

#include "credal/matrix.hpp"

namespace credal {

/// Ordered enumeration of the nonempty focal sets of a frame of c clusters,
/// optionally capped at a maximum cardinality.
///
/// Order is canonical: ascending cardinality, then lexicographic by member
/// index. Cluster indices are 0-based.
class FocalStructure {
 public:
  FocalStructure() = default;

  std::size_t clusters() const noexcept { return clusters_; }
  std::size_t max_cardinality() const noexcept { return max_cardinality_; }
  std::size_t size() const noexcept { return sets_.size(); }

  const std::vector<std::vector<std::size_t>>& sets() const noexcept { return sets_; }
  const std::vector<std::size_t>& members(std::size_t j) const { return sets_.at(j); }
  std::size_t cardinality(std::size_t j) const { return sets_.at(j).size(); }

  /// s_kj: 1 iff cluster k belongs to focal set j.
  bool contains(std::size_t cluster, std::size_t j) const {
    return incidence_[cluster * sets_.size() + j] != 0;
  }

  /// Index of the focal set whose members are exactly `members` (sorted),
  /// or size() when absent.
  std::size_t index_of(const std::vector<std::size_t>& members) const;

  friend FocalStructure enumerate_focal_sets(std::size_t c, std::size_t max_cardinality);
  friend bool operator==(const FocalStructure& a, const FocalStructure& b) {
    return a.clusters_ == b.clusters_ && a.max_cardinality_ == b.max_cardinality_ &&
           a.sets_ == b.sets_;
  }

 private:
  std::size_t clusters_ = 0;
  std::size_t max_cardinality_ = 0;
  std::vector<std::vector<std::size_t>> sets_;
  std::vector<unsigned char> incidence_;  // c x f, row-major
};

/// Largest supported frame; 2^16 - 1 focal sets.
inline constexpr std::size_t kMaxClusters = 16;

/// Throws InvalidArgument unless 1 <= max_cardinality <= c <= kMaxClusters.
FocalStructure enumerate_focal_sets(std::size_t c, std::size_t max_cardinality);

/// Full structure (every nonempty subset).
inline FocalStructure enumerate_focal_sets(std::size_t c) { return enumerate_focal_sets(c, c); }

/// Row j is the mean of the centres of the members of focal set j.
Matrix compute_barycenters(const Matrix& centers, const FocalStructure& structure);

/// Per-object masses over the focal sets of a structure plus the empty set.
struct CredalPartition {
  Matrix masses;                    // n x f
  std::vector<double> empty_mass;   // n

  std::size_t objects() const noexcept { return masses.rows(); }
};

/// Throws InvalidArgument unless every row is nonnegative and sums to one
/// within `tolerance`.
void check_normalized(const CredalPartition& partition, double tolerance = 1e-12);

struct HardAssignment {
  std::vector<std::size_t> labels;   // 0-based cluster index per object
  std::vector<bool> outlier_flags;
  Matrix pignistic;                  // n x c
};

/// Pignistic probabilities with empty-mass renormalisation. A row carrying
/// all of its mass on the empty set maps to the uniform distribution.
Matrix pignistic_transform(const CredalPartition& partition, const FocalStructure& structure);

/// Argmax of the pignistic row (ties to the lowest index); flags objects
/// whose empty-set mass exceeds `outlier_threshold`.
HardAssignment harden(const CredalPartition& partition, const FocalStructure& structure,
                      double outlier_threshold = 0.5);

}  // namespace credal
