#pragma once

#include <filesystem>

#include <nlohmann/json.hpp>

namespace vhs {

// Directory holding the bundled data files. Overridden by the VHS_DATA_DIR
// environment variable; otherwise the data/ directory of the source tree.
std::filesystem::path data_directory();

// Parses a JSON document; failures are reported as ConfigError naming the file.
nlohmann::json load_json(const std::filesystem::path& path);

}  // namespace vhs
