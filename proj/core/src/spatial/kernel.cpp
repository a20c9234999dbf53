#include "sdm/spatial/kernel.hpp"

#include <charconv>
#include <cmath>
#include <sstream>

#include "sdm/error.hpp"

namespace sdm::spatial {

std::string_view to_string(Kernel kernel) {
  switch (kernel) {
    case Kernel::gaussian: return "gaussian";
    case Kernel::exponential: return "exponential";
    case Kernel::bisquare: return "bisquare";
    case Kernel::boxcar: return "boxcar";
  }
  return "unknown";
}

Kernel parse_kernel(std::string_view name) {
  if (name == "gaussian") return Kernel::gaussian;
  if (name == "exponential") return Kernel::exponential;
  if (name == "bisquare") return Kernel::bisquare;
  if (name == "boxcar") return Kernel::boxcar;
  fail(ErrorCode::invalid_argument, "unknown kernel '" + std::string(name) + "'");
}

double kernel_weight(Kernel kernel, double distance, double bandwidth) {
  if (!(bandwidth > 0.0) || !std::isfinite(bandwidth)) {
    std::ostringstream msg;
    msg << "bandwidth must be positive and finite, got " << bandwidth;
    fail(ErrorCode::invalid_bandwidth, msg.str());
  }
  const double u = distance / bandwidth;
  switch (kernel) {
    case Kernel::gaussian: return std::exp(-0.5 * u * u);
    case Kernel::exponential: return std::exp(-u);
    case Kernel::bisquare: {
      if (u >= 1.0) return 0.0;
      const double t = 1.0 - u * u;
      return t * t;
    }
    case Kernel::boxcar: return u < 1.0 ? 1.0 : 0.0;
  }
  return 0.0;
}

Bandwidth Bandwidth::fixed(double meters) {
  if (!(meters > 0.0) || !std::isfinite(meters)) {
    fail(ErrorCode::invalid_bandwidth, "fixed bandwidth must be a positive distance");
  }
  Bandwidth bw;
  bw.mode = Mode::fixed;
  bw.distance = meters;
  return bw;
}

Bandwidth Bandwidth::adaptive(std::size_t neighbours) {
  if (neighbours == 0) fail(ErrorCode::invalid_bandwidth, "adaptive bandwidth needs k >= 1");
  Bandwidth bw;
  bw.mode = Mode::adaptive;
  bw.k = neighbours;
  return bw;
}

std::string to_string(const Bandwidth& bw) {
  std::ostringstream out;
  out.precision(17);
  if (bw.is_fixed()) out << "fixed:" << bw.distance;
  else out << "adaptive:" << bw.k;
  return out.str();
}

Bandwidth parse_bandwidth(std::string_view text) {
  const auto colon = text.find(':');
  if (colon == std::string_view::npos) {
    fail(ErrorCode::invalid_argument, "bandwidth must look like fixed:<meters> or adaptive:<k>");
  }
  const auto mode = text.substr(0, colon);
  const std::string value(text.substr(colon + 1));
  try {
    if (mode == "fixed") return Bandwidth::fixed(std::stod(value));
    if (mode == "adaptive") return Bandwidth::adaptive(std::stoul(value));
  } catch (const std::logic_error&) {
    fail(ErrorCode::invalid_argument, "bad bandwidth value '" + value + "'");
  }
  fail(ErrorCode::invalid_argument, "unknown bandwidth mode '" + std::string(mode) + "'");
}

}  // namespace sdm::spatial
