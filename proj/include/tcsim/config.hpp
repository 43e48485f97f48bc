#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "tcsim/device_model.hpp"

namespace tcsim {

using Json = nlohmann::json;

/// Device in interface units (GHz, MHz, us, V). Missing keys keep the nominal values.
Device device_from_json(const Json& j);
Json device_to_json(const Device& d);

/// Either an explicit array or {"start", "stop", "points"}.
std::vector<double> grid_from_json(const Json& j, const std::string& name);

/// Reads a JSON file; "device_file" entries are resolved relative to it and inlined as "device".
Json load_config(const std::filesystem::path& path);

std::uint64_t fnv1a64(const std::string& bytes);
std::string hex64(std::uint64_t v);

}  // namespace tcsim
