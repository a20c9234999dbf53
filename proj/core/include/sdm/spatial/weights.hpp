#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "sdm/spatial/spatial_index.hpp"

namespace sdm::spatial {

/// Sparse non-negative n x n weights with a zero diagonal.
struct SpatialWeights {
  struct Entry {
    std::size_t j;
    double w;
  };

  std::vector<std::vector<Entry>> rows;
  bool row_standardized = false;
  double total = 0.0;        // sum of all weights
  std::string descriptor;    // e.g. "knn:k=8,row_standardized"

  std::size_t size() const { return rows.size(); }
};

/// Binary k-nearest-neighbour weights (self excluded), optionally row-standardised.
/// Requires 1 <= k < n.
SpatialWeights knn_weights(const SpatialIndex& index, std::size_t k, bool row_standardize);

}  // namespace sdm::spatial
