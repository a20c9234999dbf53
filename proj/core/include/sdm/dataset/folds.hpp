#pragma once

#include <cstdint>
#include <vector>

namespace sdm::data {

/// Seeded shuffle of 0..n-1 cut into k contiguous folds whose sizes differ
/// by at most one. fold[f] lists the held-out row indices of fold f.
std::vector<std::vector<std::size_t>> make_folds(std::size_t n, std::size_t k, std::uint64_t seed);

/// Complement of fold f.
std::vector<std::size_t> training_rows(const std::vector<std::vector<std::size_t>>& folds,
                                       std::size_t f);

}  // namespace sdm::data
