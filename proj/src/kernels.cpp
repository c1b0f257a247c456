#include "credal/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "credal/errors.hpp"

namespace credal {

namespace {

// Rows per reduction block. Partial sums are formed per block and combined
// in block order, which makes reductions independent of the thread count.
constexpr std::size_t kBlock = 256;

std::size_t block_count(std::size_t n) { return (n + kBlock - 1) / kBlock; }

std::vector<double> cardinality_powers(const FocalStructure& s, double exponent) {
  std::vector<double> out(s.size());
  for (std::size_t j = 0; j < s.size(); ++j)
    out[j] = std::pow(static_cast<double>(s.cardinality(j)), exponent);
  return out;
}

// Fills `out` with the closed-form weights for one row of distances.
// Returns false when the row hits the zero-distance singularity, in which
// case `out` already holds the concentrated masses.
//   w_j = (c_j^a d_j)^(-1/(e-1)),  out_j = w_j / (sum_t w_t + floor)
bool weighted_row(std::span<const double> d, const std::vector<double>& card_alpha,
                  const FocalStructure& s, double exponent, double floor, std::span<double> out) {
  const std::size_t f = d.size();
  const double power = -1.0 / (exponent - 1.0);
  double total = floor;
  bool singular = false;
  for (std::size_t j = 0; j < f; ++j) {
    if (d[j] <= 0.0) {
      singular = true;
      out[j] = std::numeric_limits<double>::infinity();
      continue;
    }
    out[j] = std::pow(card_alpha[j] * d[j], power);
    if (std::isinf(out[j])) singular = true;
    total += out[j];
  }
  if (!singular) {
    for (std::size_t j = 0; j < f; ++j) out[j] /= total;
    return true;
  }
  // Mass concentrates on the coincident sets of minimal cardinality.
  std::size_t min_card = std::numeric_limits<std::size_t>::max();
  for (std::size_t j = 0; j < f; ++j)
    if (std::isinf(out[j])) min_card = std::min(min_card, s.cardinality(j));
  std::size_t ties = 0;
  for (std::size_t j = 0; j < f; ++j)
    if (std::isinf(out[j]) && s.cardinality(j) == min_card) ++ties;
  for (std::size_t j = 0; j < f; ++j)
    out[j] = std::isinf(out[j]) && s.cardinality(j) == min_card ? 1.0 / static_cast<double>(ties)
                                                                : 0.0;
  return false;
}

void check_params(const FitConfig& config) {
  if (!(config.beta > 1.0)) throw InvalidArgument("beta must exceed 1");
  if (!(config.delta > 0.0)) throw InvalidArgument("delta must be positive");
}

}  // namespace

Matrix squared_distances(const Matrix& points, const Matrix& barycenters) {
  if (points.cols() != barycenters.cols())
    throw InvalidArgument("squared_distances: points have " + std::to_string(points.cols()) +
                          " features, barycenters " + std::to_string(barycenters.cols()));
  const std::size_t n = points.rows(), f = barycenters.rows(), p = points.cols();
  Matrix d(n, f);
  const auto ni = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t ii = 0; ii < ni; ++ii) {
    const auto i = static_cast<std::size_t>(ii);
    auto x = points.row(i);
    auto out = d.row(i);
    for (std::size_t j = 0; j < f; ++j) {
      auto b = barycenters.row(j);
      double acc = 0.0;
      for (std::size_t q = 0; q < p; ++q) {
        const double diff = x[q] - b[q];
        acc += diff * diff;
      }
      out[j] = acc;
    }
  }
  return d;
}

CredalPartition update_masses(const Matrix& distances, const FocalStructure& structure,
                              const FitConfig& config) {
  check_params(config);
  if (distances.cols() != structure.size())
    throw InvalidArgument("update_masses: distance columns do not match focal structure");
  const std::size_t n = distances.rows();
  const auto card_alpha = cardinality_powers(structure, config.alpha);
  const double floor = std::pow(config.delta, -2.0 / (config.beta - 1.0));

  CredalPartition out{Matrix(n, structure.size()), std::vector<double>(n, 0.0)};
  const auto ni = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t ii = 0; ii < ni; ++ii) {
    const auto i = static_cast<std::size_t>(ii);
    auto row = out.masses.row(i);
    if (weighted_row(distances.row(i), card_alpha, structure, config.beta, floor, row)) {
      double assigned = 0.0;
      for (double m : row) assigned += m;
      out.empty_mass[i] = std::max(0.0, 1.0 - assigned);
    }
  }
  return out;
}

AssociationMatrix update_association(const Matrix& source_barycenters,
                                     const Matrix& target_barycenters,
                                     const FocalStructure& structure, const FitConfig& config) {
  if (!(config.gamma > 1.0)) throw InvalidArgument("gamma must exceed 1");
  if (target_barycenters.rows() != structure.size())
    throw InvalidArgument("update_association: target barycenters do not match focal structure");
  const Matrix d = squared_distances(source_barycenters, target_barycenters);
  const auto card_alpha = cardinality_powers(structure, config.alpha);
  AssociationMatrix out{Matrix(d.rows(), d.cols())};
  for (std::size_t k = 0; k < d.rows(); ++k)
    weighted_row(d.row(k), card_alpha, structure, config.gamma, 0.0, out.r.row(k));
  return out;
}

CenterSystem assemble_system(const Matrix& points, const CredalPartition& partition,
                             const std::optional<TransferTerm>& transfer,
                             const FocalStructure& structure, const FitConfig& config) {
  const std::size_t n = points.rows(), p = points.cols();
  const std::size_t c = structure.clusters(), f = structure.size();
  if (partition.masses.rows() != n || partition.masses.cols() != f)
    throw InvalidArgument("assemble_system: partition shape does not match data and structure");

  const auto card_a1 = cardinality_powers(structure, config.alpha - 1.0);
  const auto card_a2 = cardinality_powers(structure, config.alpha - 2.0);

  // Per block: B1 partial (c x p) and column sums of m^beta (f).
  const std::size_t blocks = block_count(n);
  std::vector<Matrix> b1_parts(blocks, Matrix(c, p));
  std::vector<std::vector<double>> col_parts(blocks, std::vector<double>(f, 0.0));
  const auto nb = static_cast<std::ptrdiff_t>(blocks);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t bb = 0; bb < nb; ++bb) {
    const auto b = static_cast<std::size_t>(bb);
    Matrix& b1 = b1_parts[b];
    std::vector<double>& cols = col_parts[b];
    std::vector<double> mb(f), weight(c);
    const std::size_t end = std::min(n, (b + 1) * kBlock);
    for (std::size_t i = b * kBlock; i < end; ++i) {
      std::fill(weight.begin(), weight.end(), 0.0);
      for (std::size_t j = 0; j < f; ++j) {
        mb[j] = std::pow(partition.masses(i, j), config.beta);
        cols[j] += mb[j];
        for (std::size_t l : structure.members(j)) weight[l] += card_a1[j] * mb[j];
      }
      auto x = points.row(i);
      for (std::size_t l = 0; l < c; ++l) {
        auto out = b1.row(l);
        for (std::size_t q = 0; q < p; ++q) out[q] += weight[l] * x[q];
      }
    }
  }

  CenterSystem sys{Matrix(c, c), Matrix(c, p)};
  std::vector<double> colsum(f, 0.0);
  for (std::size_t b = 0; b < blocks; ++b) {
    for (std::size_t k = 0; k < c * p; ++k) sys.rhs.data()[k] += b1_parts[b].data()[k];
    for (std::size_t j = 0; j < f; ++j) colsum[j] += col_parts[b][j];
  }
  for (std::size_t j = 0; j < f; ++j) {
    const double w = card_a2[j] * colsum[j];
    for (std::size_t l : structure.members(j))
      for (std::size_t z : structure.members(j)) sys.lhs(l, z) += w;
  }

  if (!transfer) return sys;

  const Matrix& src = transfer->source_barycenters;
  const Matrix& r = transfer->association.r;
  if (r.cols() != f || r.rows() != src.rows() || src.cols() != p)
    throw InvalidArgument("assemble_system: association or source barycenters have wrong shape");

  Matrix b2(c, p), h2(c, c);
  std::vector<double> rcol(f, 0.0), weight(c);
  for (std::size_t k = 0; k < r.rows(); ++k) {
    std::fill(weight.begin(), weight.end(), 0.0);
    for (std::size_t j = 0; j < f; ++j) {
      const double rg = std::pow(r(k, j), config.gamma);
      rcol[j] += rg;
      for (std::size_t l : structure.members(j)) weight[l] += card_a1[j] * rg;
    }
    auto v = src.row(k);
    for (std::size_t l = 0; l < c; ++l)
      for (std::size_t q = 0; q < p; ++q) b2(l, q) += weight[l] * v[q];
  }
  for (std::size_t j = 0; j < f; ++j) {
    const double w = card_a2[j] * rcol[j];
    for (std::size_t l : structure.members(j))
      for (std::size_t z : structure.members(j)) h2(l, z) += w;
  }
  for (std::size_t k = 0; k < c * c; ++k) sys.lhs.data()[k] += config.lambda * h2.data()[k];
  for (std::size_t k = 0; k < c * p; ++k) sys.rhs.data()[k] += config.lambda * b2.data()[k];
  return sys;
}

namespace {

double transfer_penalty(const Matrix& target_bary, const TransferTerm& transfer,
                        const std::vector<double>& card_alpha, const FitConfig& config) {
  const Matrix d = squared_distances(transfer.source_barycenters, target_bary);
  const Matrix& r = transfer.association.r;
  if (r.rows() != d.rows() || r.cols() != d.cols())
    throw InvalidArgument("objective: association shape does not match barycenters");
  double acc = 0.0;
  for (std::size_t k = 0; k < d.rows(); ++k)
    for (std::size_t j = 0; j < d.cols(); ++j)
      acc += card_alpha[j] * std::pow(r(k, j), config.gamma) * d(k, j);
  return acc;
}

}  // namespace

double objective(const Matrix& points, const CredalPartition& partition, const Matrix& centers,
                 const std::optional<TransferTerm>& transfer, const FocalStructure& structure,
                 const FitConfig& config) {
  const Matrix bary = compute_barycenters(centers, structure);
  const Matrix d = squared_distances(points, bary);
  if (partition.masses.rows() != d.rows() || partition.masses.cols() != d.cols())
    throw InvalidArgument("objective: partition shape does not match data and structure");
  const auto card_alpha = cardinality_powers(structure, config.alpha);
  const double delta2 = config.delta * config.delta;

  const std::size_t n = d.rows(), f = d.cols();
  const std::size_t blocks = block_count(n);
  std::vector<double> parts(blocks, 0.0);
  const auto nb = static_cast<std::ptrdiff_t>(blocks);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t bb = 0; bb < nb; ++bb) {
    const auto b = static_cast<std::size_t>(bb);
    double acc = 0.0;
    const std::size_t end = std::min(n, (b + 1) * kBlock);
    for (std::size_t i = b * kBlock; i < end; ++i) {
      for (std::size_t j = 0; j < f; ++j)
        acc += card_alpha[j] * std::pow(partition.masses(i, j), config.beta) * d(i, j);
      acc += delta2 * std::pow(partition.empty_mass[i], config.beta);
    }
    parts[b] = acc;
  }
  double total = 0.0;
  for (double v : parts) total += v;
  if (transfer) total += config.lambda * transfer_penalty(bary, *transfer, card_alpha, config);
  return total;
}

// Serial transcriptions, kept deliberately close to the formulas.
namespace ref {

Matrix squared_distances(const Matrix& points, const Matrix& barycenters) {
  if (points.cols() != barycenters.cols())
    throw InvalidArgument("squared_distances: dimension mismatch");
  Matrix d(points.rows(), barycenters.rows());
  for (std::size_t i = 0; i < points.rows(); ++i)
    for (std::size_t j = 0; j < barycenters.rows(); ++j)
      for (std::size_t q = 0; q < points.cols(); ++q)
        d(i, j) += (points(i, q) - barycenters(j, q)) * (points(i, q) - barycenters(j, q));
  return d;
}

CredalPartition update_masses(const Matrix& distances, const FocalStructure& structure,
                              const FitConfig& config) {
  check_params(config);
  const std::size_t n = distances.rows(), f = distances.cols();
  const double power = -1.0 / (config.beta - 1.0);
  CredalPartition out{Matrix(n, f), std::vector<double>(n, 0.0)};
  for (std::size_t i = 0; i < n; ++i) {
    bool singular = false;
    std::size_t min_card = structure.clusters() + 1;
    for (std::size_t j = 0; j < f; ++j)
      if (distances(i, j) == 0.0) {
        singular = true;
        min_card = std::min(min_card, structure.cardinality(j));
      }
    if (singular) {
      double ties = 0.0;
      for (std::size_t j = 0; j < f; ++j)
        if (distances(i, j) == 0.0 && structure.cardinality(j) == min_card) ties += 1.0;
      for (std::size_t j = 0; j < f; ++j)
        if (distances(i, j) == 0.0 && structure.cardinality(j) == min_card)
          out.masses(i, j) = 1.0 / ties;
      continue;
    }
    double denom = std::pow(config.delta, 2.0 * power);
    for (std::size_t t = 0; t < f; ++t)
      denom += std::pow(std::pow(structure.cardinality(t), config.alpha) * distances(i, t), power);
    double assigned = 0.0;
    for (std::size_t j = 0; j < f; ++j) {
      out.masses(i, j) =
          std::pow(std::pow(structure.cardinality(j), config.alpha) * distances(i, j), power) /
          denom;
      assigned += out.masses(i, j);
    }
    out.empty_mass[i] = std::max(0.0, 1.0 - assigned);
  }
  return out;
}

CenterSystem assemble_system(const Matrix& points, const CredalPartition& partition,
                             const std::optional<TransferTerm>& transfer,
                             const FocalStructure& structure, const FitConfig& config) {
  const std::size_t n = points.rows(), p = points.cols();
  const std::size_t c = structure.clusters(), f = structure.size();
  const double a = config.alpha;
  Matrix h1(c, c), b1(c, p), h2(c, c), b2(c, p);
  for (std::size_t l = 0; l < c; ++l) {
    for (std::size_t q = 0; q < p; ++q)
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < f; ++j)
          if (structure.contains(l, j))
            b1(l, q) += points(i, q) * std::pow(structure.cardinality(j), a - 1.0) *
                        std::pow(partition.masses(i, j), config.beta);
    for (std::size_t z = 0; z < c; ++z)
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < f; ++j)
          if (structure.contains(l, j) && structure.contains(z, j))
            h1(l, z) += std::pow(structure.cardinality(j), a - 2.0) *
                        std::pow(partition.masses(i, j), config.beta);
  }
  if (transfer) {
    const Matrix& src = transfer->source_barycenters;
    const Matrix& r = transfer->association.r;
    for (std::size_t l = 0; l < c; ++l) {
      for (std::size_t q = 0; q < p; ++q)
        for (std::size_t k = 0; k < r.rows(); ++k)
          for (std::size_t j = 0; j < f; ++j)
            if (structure.contains(l, j))
              b2(l, q) += src(k, q) * std::pow(structure.cardinality(j), a - 1.0) *
                          std::pow(r(k, j), config.gamma);
      for (std::size_t z = 0; z < c; ++z)
        for (std::size_t k = 0; k < r.rows(); ++k)
          for (std::size_t j = 0; j < f; ++j)
            if (structure.contains(l, j) && structure.contains(z, j))
              h2(l, z) += std::pow(structure.cardinality(j), a - 2.0) *
                          std::pow(r(k, j), config.gamma);
    }
  }
  CenterSystem sys{Matrix(c, c), Matrix(c, p)};
  for (std::size_t l = 0; l < c; ++l) {
    for (std::size_t z = 0; z < c; ++z) sys.lhs(l, z) = h1(l, z) + config.lambda * h2(l, z);
    for (std::size_t q = 0; q < p; ++q) sys.rhs(l, q) = b1(l, q) + config.lambda * b2(l, q);
  }
  return sys;
}

double objective(const Matrix& points, const CredalPartition& partition, const Matrix& centers,
                 const std::optional<TransferTerm>& transfer, const FocalStructure& structure,
                 const FitConfig& config) {
  const Matrix bary = compute_barycenters(centers, structure);
  const Matrix d = ref::squared_distances(points, bary);
  double j_total = 0.0;
  for (std::size_t i = 0; i < points.rows(); ++i) {
    for (std::size_t j = 0; j < structure.size(); ++j)
      j_total += std::pow(structure.cardinality(j), config.alpha) *
                 std::pow(partition.masses(i, j), config.beta) * d(i, j);
    j_total += config.delta * config.delta * std::pow(partition.empty_mass[i], config.beta);
  }
  if (transfer) {
    const Matrix dt = ref::squared_distances(transfer->source_barycenters, bary);
    for (std::size_t k = 0; k < dt.rows(); ++k)
      for (std::size_t j = 0; j < dt.cols(); ++j)
        j_total += config.lambda * std::pow(structure.cardinality(j), config.alpha) *
                   std::pow(transfer->association.r(k, j), config.gamma) * dt(k, j);
  }
  return j_total;
}

}  // namespace ref

}  // namespace credal
