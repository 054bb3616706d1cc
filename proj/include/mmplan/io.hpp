#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "mmplan/core.hpp"
#include "mmplan/human.hpp"
#include "mmplan/packing.hpp"

namespace mmplan::io {

using json = nlohmann::ordered_json;

class IoError : public Error {
public:
    using Error::Error;
};

json read_json(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, const std::string& text);

Scenario parse_scenario(const json& j);
json to_json(const Scenario& scenario);
Scenario load_scenario(const std::filesystem::path& path);

human::HumanSchedule parse_schedule(const json& j);
json to_json(const human::HumanSchedule& schedule);
human::HumanSchedule load_schedule(const std::filesystem::path& path);

NormStats parse_stats(const json& j);
json to_json(const NormStats& stats);
NormStats load_stats(const std::filesystem::path& path);

json layout_to_json(const packing::PlacementLayout& layout, const Scenario& scenario);

Plan parse_plan(const json& j);
json to_json(const Plan& plan);
Plan load_plan(const std::filesystem::path& path);

/// Pretty-printed JSON followed by a newline.
std::string dump(const json& j);

}  // namespace mmplan::io
