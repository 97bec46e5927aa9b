#pragma once

#include <filesystem>

#include <json.hpp>

#include "ftir/core.hpp"

namespace ftir {

using Json = nlohmann::json;

Json axis_to_json(const WavenumberAxis& axis);
WavenumberAxis axis_from_json(const Json& j);

Json stats_to_json(const NormStats& stats);
NormStats stats_from_json(const Json& j);

/// Reads and parses a JSON file; IoError on failure.
Json read_json(const std::filesystem::path& file);
/// Writes `j` with 2-space indentation and a trailing newline.
void write_json(const Json& j, const std::filesystem::path& file);

}  // namespace ftir
