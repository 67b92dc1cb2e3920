#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace lrt {

inline constexpr const char* kToolVersion = "0.1.0";
inline constexpr const char* kManifestName = "manifest.json";

std::string sha256_hex(std::string_view bytes);
std::string sha256_file(const std::filesystem::path& path);

// Record of one CLI run. `args` is the argument vector after the program
// name, so a run can be repeated with a different --out-dir.
struct RunManifest {
  std::string tool_version = kToolVersion;
  std::string command;
  std::vector<std::string> args;
  nlohmann::json config = nlohmann::json::object();
  std::map<std::string, std::string> inputs;   // path -> sha256
  std::map<std::string, std::string> outputs;  // file name inside the out dir -> sha256
  std::string started_at;
  std::string finished_at;
};

nlohmann::json manifest_to_json(const RunManifest& m);
RunManifest parse_manifest(const std::string& json_text);
RunManifest load_manifest(const std::filesystem::path& path);

std::string utc_timestamp();

}  // namespace lrt
