#pragma once

#include <cstddef>
#include <string>
#include <string_view>

namespace sdm::spatial {

enum class Kernel { gaussian, exponential, bisquare, boxcar };

std::string_view to_string(Kernel kernel);
Kernel parse_kernel(std::string_view name);

/// True for kernels that are exactly zero at and beyond the bandwidth.
constexpr bool has_compact_support(Kernel kernel) {
  return kernel == Kernel::bisquare || kernel == Kernel::boxcar;
}

/// Distance-decay weight in [0, 1]; weight(0) = 1 for every family.
/// Throws ErrorCode::invalid_bandwidth when bandwidth <= 0.
double kernel_weight(Kernel kernel, double distance, double bandwidth);

/// Fixed distance in meters, or adaptive nearest-neighbour count.
struct Bandwidth {
  enum class Mode { fixed, adaptive };

  Mode mode = Mode::adaptive;
  double distance = 0.0;  // meters, fixed mode
  std::size_t k = 0;      // neighbours, adaptive mode

  static Bandwidth fixed(double meters);
  static Bandwidth adaptive(std::size_t neighbours);

  bool is_fixed() const { return mode == Mode::fixed; }
  /// Scalar used by bandwidth search: meters or neighbour count.
  double value() const { return is_fixed() ? distance : static_cast<double>(k); }

  friend bool operator==(const Bandwidth&, const Bandwidth&) = default;
};

/// "fixed:40800" or "adaptive:232".
std::string to_string(const Bandwidth& bw);
Bandwidth parse_bandwidth(std::string_view text);

}  // namespace sdm::spatial
