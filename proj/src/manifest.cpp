#include "lrt/manifest.hpp"

#include <chrono>
#include <ctime>
#include <memory>

#include <openssl/evp.h>

#include "lrt/corpus.hpp"
#include "lrt/error.hpp"

namespace lrt {

using nlohmann::json;

std::string sha256_hex(std::string_view bytes) {
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1 ||
      EVP_DigestUpdate(ctx.get(), bytes.data(), bytes.size()) != 1 ||
      EVP_DigestFinal_ex(ctx.get(), digest, &len) != 1) {
    throw Error("SHA-256 computation failed");
  }
  static const char* hex = "0123456789abcdef";
  std::string out;
  out.reserve(len * 2);
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[digest[i] >> 4];
    out += hex[digest[i] & 0xf];
  }
  return out;
}

std::string sha256_file(const std::filesystem::path& path) { return sha256_hex(read_file(path)); }

json manifest_to_json(const RunManifest& m) {
  return json{{"format_version", 1},     {"tool_version", m.tool_version}, {"command", m.command},
              {"args", m.args},          {"config", m.config},             {"inputs", m.inputs},
              {"outputs", m.outputs},    {"started_at", m.started_at},     {"finished_at", m.finished_at}};
}

RunManifest parse_manifest(const std::string& json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ParseError("byte " + std::to_string(e.byte), e.what());
  }
  if (!root.is_object() || root.value("format_version", 0) != 1) {
    throw ParseError("format_version", "unsupported manifest version");
  }
  RunManifest m;
  try {
    m.tool_version = root.at("tool_version").get<std::string>();
    m.command = root.at("command").get<std::string>();
    m.args = root.at("args").get<std::vector<std::string>>();
    m.config = root.at("config");
    m.inputs = root.at("inputs").get<std::map<std::string, std::string>>();
    m.outputs = root.at("outputs").get<std::map<std::string, std::string>>();
    m.started_at = root.value("started_at", std::string());
    m.finished_at = root.value("finished_at", std::string());
  } catch (const json::exception& e) {
    throw ParseError("manifest", e.what());
  }
  return m;
}

RunManifest load_manifest(const std::filesystem::path& path) { return parse_manifest(read_file(path)); }

std::string utc_timestamp() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace lrt
