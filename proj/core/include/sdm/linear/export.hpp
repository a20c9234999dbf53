#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "sdm/linear/significance.hpp"

namespace sdm::linear {

/// One row per (station, term): station_id, x, y, term, beta, se, t, significant.
void write_coefficients(const std::filesystem::path& path, const std::vector<std::string>& station_ids,
                        const std::vector<spatial::Point>& locations, const Eigen::MatrixXd& beta,
                        const Eigen::MatrixXd& se, const Eigen::MatrixXd& tvalues,
                        const SignificanceReport& report);

/// Table 2/3 layout: term, mean, sd, min, median, max, t mean, t sd,
/// adjusted alpha, percent significant (+ bandwidth column when given).
void write_significance(const std::filesystem::path& path, const SignificanceReport& report,
                        const std::vector<std::string>& bandwidth_labels = {});

}  // namespace sdm::linear
