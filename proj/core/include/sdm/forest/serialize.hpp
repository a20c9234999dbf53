#pragma once

#include <json.hpp>

#include "sdm/forest/forest.hpp"
#include "sdm/forest/grf.hpp"

namespace sdm::forest {

inline constexpr int kForestFormatVersion = 1;

nlohmann::json to_json(const ForestParams& params);
ForestParams params_from_json(const nlohmann::json& j);

nlohmann::json to_json(const ForestModel& model);
ForestModel forest_from_json(const nlohmann::json& j);

nlohmann::json to_json(const GrfModel& model);
/// Rebuilds the spatial index from the stored locations.
GrfModel grf_from_json(const nlohmann::json& j);

}  // namespace sdm::forest
