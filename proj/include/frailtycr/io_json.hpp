#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "frailtycr/model.hpp"

namespace frailtycr {

// JSON (de)serialization for hazards, frailty laws, models and grids. Parse
// errors throw ParameterError naming the JSON path of the offending field,
// e.g. "model.frailty.sigma: must be a positive number".

nlohmann::json hazard_to_json(const ParametricHazard& hz);
ParametricHazard hazard_from_json(const nlohmann::json& j, const std::string& path);

nlohmann::json frailty_to_json(const FrailtySpec& spec);
FrailtySpec frailty_from_json(const nlohmann::json& j, const std::string& path);

nlohmann::json model_to_json(const ModelSpec& m);
ModelSpec model_from_json(const nlohmann::json& j, const std::string& path = "model");

std::string model_to_compact_string(const ModelSpec& m);
ModelSpec model_from_string(const std::string& text);
ModelSpec model_from_file(const std::string& file);

nlohmann::json load_json_file(const std::string& file);

// A grid axis is either an explicit array of times or
// {"start": a, "stop": b, "count": n, "spacing": "linear"|"log"}.
std::vector<double> grid_axis_from_json(const nlohmann::json& j, const std::string& path);

}  // namespace frailtycr
