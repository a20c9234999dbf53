#include "sdm/spatial/weights.hpp"

#include <sstream>

#include "sdm/error.hpp"

namespace sdm::spatial {

SpatialWeights knn_weights(const SpatialIndex& index, std::size_t k, bool row_standardize) {
  const std::size_t n = index.size();
  if (k < 1 || k >= n) {
    std::ostringstream msg;
    msg << "knn weights need 1 <= k < n (k=" << k << ", n=" << n << ")";
    fail(ErrorCode::invalid_argument, msg.str());
  }
  SpatialWeights out;
  out.rows.resize(n);
  out.row_standardized = row_standardize;
  for (std::size_t i = 0; i < n; ++i) {
    // k+1 candidates cover the point itself; drop it by id.
    const auto nn = index.knn(index.point(i), k + 1);
    auto& row = out.rows[i];
    row.reserve(k);
    for (const auto& nb : nn) {
      if (nb.id == i) continue;
      if (row.size() == k) break;
      row.push_back({nb.id, 1.0});
    }
    if (row_standardize) {
      const double share = 1.0 / static_cast<double>(row.size());
      for (auto& e : row) e.w = share;
    }
    for (const auto& e : row) out.total += e.w;
  }
  std::ostringstream desc;
  desc << "knn:k=" << k << (row_standardize ? ",row_standardized" : ",binary");
  out.descriptor = desc.str();
  return out;
}

}  // namespace sdm::spatial
