#pragma once

#include <string>

#include <json.hpp>

#include "lrt/error.hpp"
#include "lrt/text.hpp"

namespace lrt::detail {

inline nlohmann::json config_to_json(const PreprocessConfig& c) {
  nlohmann::json j;
  j["lowercase"] = c.lowercase;
  j["strip_punctuation"] = c.strip_punctuation;
  j["remove_stopwords"] = c.remove_stopwords;
  j["stem"] = c.stem;
  j["stopwords"] = c.stopword_list;
  return j;
}

inline PreprocessConfig config_from_json(const nlohmann::json& j) {
  PreprocessConfig c;
  c.lowercase = j.at("lowercase").get<bool>();
  c.strip_punctuation = j.at("strip_punctuation").get<bool>();
  c.remove_stopwords = j.at("remove_stopwords").get<bool>();
  c.stem = j.at("stem").get<bool>();
  c.stopword_list = j.at("stopwords").get<std::set<std::string>>();
  c.validate();
  return c;
}

inline nlohmann::json parse_model_json(const std::string& text, const std::string& kind) {
  nlohmann::json root;
  try {
    root = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError("byte " + std::to_string(e.byte), e.what());
  }
  if (!root.is_object() || root.value("format_version", 0) != 1) {
    throw ParseError("format_version", "unsupported model file version");
  }
  if (root.value("kind", std::string()) != kind) throw ParseError("kind", "expected a " + kind + " model");
  return root;
}

}  // namespace lrt::detail
