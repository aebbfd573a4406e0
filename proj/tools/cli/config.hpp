#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace nanopair::cli {

using nlohmann::json;

/// Bad command line or config document; maps to exit code 2.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Every recognised key with its default. Keys absent here are rejected.
json default_config();

/// Overlays `user` onto `base`; throws UsageError naming the first unknown
/// key or the first value whose JSON type differs from the default's.
void merge_config(json& base, const json& user, const std::string& path = "");

/// Applies one `section.key=value` override. The value is read as JSON when
/// it parses, otherwise as a string.
void apply_override(json& config, const std::string& assignment);

/// Defaults, then the file (if any), then the overrides in order.
json resolve_config(const std::filesystem::path& file, const std::vector<std::string>& overrides);

/// Typed read of config[section][key]; throws UsageError on a type mismatch.
template <typename T>
T get(const json& config, const char* section, const char* key) {
  try {
    return config.at(section).at(key).get<T>();
  } catch (const json::exception& e) {
    throw UsageError(std::string("config ") + section + "." + key + ": " + e.what());
  }
}

}  // namespace nanopair::cli
