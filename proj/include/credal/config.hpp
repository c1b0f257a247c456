#pragma once

#include <cstdint>
#include <limits>

namespace credal {

/// Hyper-parameters shared by the ECM and TECM fits.
struct FitConfig {
  double alpha = 1.0;    // cardinality penalty exponent, >= 0
  double beta = 2.0;     // mass exponent, > 1
  double delta = 10.0;   // distance to the empty set, > 0 (data units)
  double gamma = 2.0;    // association exponent, > 1
  double lambda = 0.0;   // transfer weight, >= 0
  double epsilon = 1e-3; // stop when |J(t) - J(t-1)| < epsilon
  int max_iter = 100;
  /// Largest focal-set size; 0 means the full power set.
  std::size_t max_cardinality = 0;
  std::uint64_t seed = 0;
  double ridge = 1e-9;

  friend bool operator==(const FitConfig&, const FitConfig&) = default;
};

/// Throws InvalidArgument on any violated parameter constraint.
void validate(const FitConfig& config);

/// The cap that applies to a frame of c clusters.
inline std::size_t effective_cap(const FitConfig& config, std::size_t c) noexcept {
  return config.max_cardinality == 0 || config.max_cardinality > c ? c : config.max_cardinality;
}

}  // namespace credal
