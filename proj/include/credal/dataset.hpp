#pragma once

#include <optional>
#include <string>
#include <vector>

#include "credal/matrix.hpp"

namespace credal {

/// n x p feature matrix with optional integer ground-truth labels.
struct Dataset {
  Matrix features;
  std::optional<std::vector<int>> labels;
  std::string name;

  std::size_t size() const noexcept { return features.rows(); }
  std::size_t dims() const noexcept { return features.cols(); }
};

/// Throws InvalidArgument unless n >= 1, p >= 1, every feature is finite and
/// the label vector (when present) has n entries.
void validate(const Dataset& data);

}  // namespace credal
