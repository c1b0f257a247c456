#include "credal/belief.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "credal/errors.hpp"

namespace credal {

std::size_t FocalStructure::index_of(const std::vector<std::size_t>& members) const {
  auto it = std::find(sets_.begin(), sets_.end(), members);
  return static_cast<std::size_t>(it - sets_.begin());
}

namespace {

// Appends every k-subset of {0..c-1} in lexicographic order.
void append_combinations(std::size_t c, std::size_t k,
                         std::vector<std::vector<std::size_t>>& out) {
  std::vector<std::size_t> idx(k);
  for (std::size_t i = 0; i < k; ++i) idx[i] = i;
  while (true) {
    out.push_back(idx);
    std::size_t pos = k;
    while (pos > 0 && idx[pos - 1] == c - k + pos - 1) --pos;
    if (pos == 0) return;
    ++idx[pos - 1];
    for (std::size_t i = pos; i < k; ++i) idx[i] = idx[i - 1] + 1;
  }
}

}  // namespace

FocalStructure enumerate_focal_sets(std::size_t c, std::size_t max_cardinality) {
  if (c < 1 || c > kMaxClusters)
    throw InvalidArgument("enumerate_focal_sets: cluster count must be in 1.." +
                          std::to_string(kMaxClusters) + ", got " + std::to_string(c));
  if (max_cardinality < 1 || max_cardinality > c)
    throw InvalidArgument("enumerate_focal_sets: max cardinality must be in 1.." +
                          std::to_string(c) + ", got " + std::to_string(max_cardinality));

  FocalStructure s;
  s.clusters_ = c;
  s.max_cardinality_ = max_cardinality;
  for (std::size_t k = 1; k <= max_cardinality; ++k) append_combinations(c, k, s.sets_);

  const std::size_t f = s.sets_.size();
  s.incidence_.assign(c * f, 0);
  for (std::size_t j = 0; j < f; ++j)
    for (std::size_t k : s.sets_[j]) s.incidence_[k * f + j] = 1;
  return s;
}

Matrix compute_barycenters(const Matrix& centers, const FocalStructure& structure) {
  if (centers.rows() != structure.clusters())
    throw InvalidArgument("compute_barycenters: " + std::to_string(centers.rows()) +
                          " centres for a frame of " + std::to_string(structure.clusters()));
  const std::size_t p = centers.cols();
  Matrix bary(structure.size(), p);
  for (std::size_t j = 0; j < structure.size(); ++j) {
    const auto& members = structure.members(j);
    auto out = bary.row(j);
    for (std::size_t k : members) {
      auto v = centers.row(k);
      for (std::size_t q = 0; q < p; ++q) out[q] += v[q];
    }
    const double card = static_cast<double>(members.size());
    for (std::size_t q = 0; q < p; ++q) out[q] /= card;
  }
  return bary;
}

void check_normalized(const CredalPartition& partition, double tolerance) {
  const std::size_t n = partition.masses.rows();
  if (partition.empty_mass.size() != n)
    throw InvalidArgument("credal partition: empty-mass length does not match object count");
  for (std::size_t i = 0; i < n; ++i) {
    double total = partition.empty_mass[i];
    if (!(partition.empty_mass[i] >= 0.0))
      throw InvalidArgument("credal partition: negative empty mass at row " + std::to_string(i));
    for (double m : partition.masses.row(i)) {
      if (!(m >= 0.0))
        throw InvalidArgument("credal partition: negative mass at row " + std::to_string(i));
      total += m;
    }
    if (std::abs(total - 1.0) > tolerance)
      throw InvalidArgument("credal partition: row " + std::to_string(i) + " sums to " +
                            std::to_string(total));
  }
}

Matrix pignistic_transform(const CredalPartition& partition, const FocalStructure& structure) {
  const std::size_t n = partition.masses.rows();
  const std::size_t c = structure.clusters();
  if (partition.masses.cols() != structure.size() || partition.empty_mass.size() != n)
    throw InvalidArgument("pignistic_transform: partition does not match focal structure");

  Matrix betp(n, c);
  for (std::size_t i = 0; i < n; ++i) {
    auto row = betp.row(i);
    const double nonempty = 1.0 - partition.empty_mass[i];
    double total = 0.0;
    for (std::size_t j = 0; j < structure.size(); ++j) {
      const double share = partition.masses(i, j) / static_cast<double>(structure.cardinality(j));
      for (std::size_t k : structure.members(j)) row[k] += share;
    }
    for (double v : row) total += v;
    if (nonempty <= 0.0 || total <= 0.0) {
      std::fill(row.begin(), row.end(), 1.0 / static_cast<double>(c));
      continue;
    }
    // Dividing by the realised total rather than 1 - m(empty) keeps the row
    // exactly stochastic when the masses carry rounding error.
    for (double& v : row) v /= total;
  }
  return betp;
}

HardAssignment harden(const CredalPartition& partition, const FocalStructure& structure,
                      double outlier_threshold) {
  if (!(outlier_threshold >= 0.0 && outlier_threshold <= 1.0))
    throw InvalidArgument("harden: outlier threshold must lie in [0, 1]");
  HardAssignment out;
  out.pignistic = pignistic_transform(partition, structure);
  const std::size_t n = out.pignistic.rows();
  out.labels.resize(n);
  out.outlier_flags.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto row = out.pignistic.row(i);
    out.labels[i] = static_cast<std::size_t>(std::max_element(row.begin(), row.end()) - row.begin());
    out.outlier_flags[i] = partition.empty_mass[i] > outlier_threshold;
  }
  return out;
}

}  // namespace credal
