#pragma once

// Per-iteration kernels of the alternating minimisation. The functions in
// namespace credal are OpenMP-parallel over objects; namespace credal::ref
// holds straight serial transcriptions of the same formulas that the tests
// and the benchmark compare against.
//
// Parallel kernels write disjoint rows or reduce in a fixed order, so their
// results do not depend on the thread count.

#include <optional>

#include "credal/belief.hpp"
#include "credal/config.hpp"
#include "credal/matrix.hpp"

namespace credal {

/// Row-stochastic association between source focal sets (rows) and target
/// focal sets (columns).
struct AssociationMatrix {
  Matrix r;  // f_s x f_t
};

/// The centre update as the linear system lhs * V = rhs.
struct CenterSystem {
  Matrix lhs;  // c x c, H1 + lambda H2
  Matrix rhs;  // c x p, B1 + lambda B2
};

/// Transfer term inputs for assembly and objective evaluation.
struct TransferTerm {
  const Matrix& source_barycenters;   // f_s x p
  const AssociationMatrix& association;
};

/// Entry (i, j) is ||x_i - b_j||^2.
Matrix squared_distances(const Matrix& points, const Matrix& barycenters);

/// Closed-form mass update for fixed barycenters. When an object sits exactly
/// on one or more barycenters its whole mass is split evenly across the
/// coincident focal sets of smallest cardinality.
CredalPartition update_masses(const Matrix& distances, const FocalStructure& structure,
                              const FitConfig& config);

/// Closed-form association update for fixed target barycenters, with the
/// same zero-distance rule as update_masses.
AssociationMatrix update_association(const Matrix& source_barycenters,
                                     const Matrix& target_barycenters,
                                     const FocalStructure& structure, const FitConfig& config);

/// Builds H1 + lambda H2 and B1 + lambda B2. With no transfer term the
/// system is the plain ECM one.
CenterSystem assemble_system(const Matrix& points, const CredalPartition& partition,
                             const std::optional<TransferTerm>& transfer,
                             const FocalStructure& structure, const FitConfig& config);

/// J = sum_ij c_j^a m_ij^b d_ij + lambda sum_kj c_j^a r_kj^g |v~_k - vbar_j|^2
///     + sum_i delta^2 m_i0^b
double objective(const Matrix& points, const CredalPartition& partition, const Matrix& centers,
                 const std::optional<TransferTerm>& transfer, const FocalStructure& structure,
                 const FitConfig& config);

namespace ref {

Matrix squared_distances(const Matrix& points, const Matrix& barycenters);
CredalPartition update_masses(const Matrix& distances, const FocalStructure& structure,
                              const FitConfig& config);
CenterSystem assemble_system(const Matrix& points, const CredalPartition& partition,
                             const std::optional<TransferTerm>& transfer,
                             const FocalStructure& structure, const FitConfig& config);
double objective(const Matrix& points, const CredalPartition& partition, const Matrix& centers,
                 const std::optional<TransferTerm>& transfer, const FocalStructure& structure,
                 const FitConfig& config);

}  // namespace ref

}  // namespace credal
