#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "credal/dataset.hpp"
#include "credal/matrix.hpp"

namespace credal {

struct GaussianCluster {
  std::vector<double> mean;
  Matrix covariance;
  std::size_t size;
};

/// A labelled Gaussian mixture with optional additive isotropic noise.
struct ScenarioSpec {
  std::string name;
  std::vector<GaussianCluster> clusters;
  double noise_sigma = 0.0;
  std::uint64_t seed = 0;
};

/// Samples every cluster in order (labels 1, 2, ...), then adds independent
/// N(0, noise_sigma^2) to each coordinate. Throws InvalidArgument when a
/// covariance is not symmetric positive semi-definite.
Dataset generate(const ScenarioSpec& spec);

/// The synthetic source/target scenarios S1-1, T1-1, S1-2, T1-2, T1-3, T1-4,
/// S2-1, T2-1, S2-2, T2-2 (seed 0).
const std::map<std::string, ScenarioSpec>& builtin_scenarios();

/// Lookup with a readable error for unknown names.
ScenarioSpec builtin_scenario(const std::string& name);

/// Lower-triangular L with L L^T = a for symmetric PSD a (zero columns where
/// a is singular).
Matrix cholesky_psd(const Matrix& a);

}  // namespace credal
