#include "vhs/data.hpp"

#include <cstdlib>
#include <fstream>

#include "vhs/error.hpp"

#ifndef VHS_DEFAULT_DATA_DIR
#define VHS_DEFAULT_DATA_DIR "data"
#endif

namespace vhs {

std::filesystem::path data_directory() {
  if (const char* env = std::getenv("VHS_DATA_DIR"); env != nullptr && *env != '\0') return env;
  return VHS_DEFAULT_DATA_DIR;
}

nlohmann::json load_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path.string());
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

}  // namespace vhs
