#include "lrt/prediction.hpp"

#include <json.hpp>

#include "lrt/error.hpp"

namespace lrt {

using nlohmann::json;

namespace {
const std::set<std::string> kEmpty;
}

const std::set<std::string>& PredictionSet::codes(const std::string& req_id) const {
  const auto it = predictions.find(req_id);
  return it == predictions.end() ? kEmpty : it->second;
}

TraceLinkSet PredictionSet::as_links() const { return TraceLinkSet(predictions); }

std::size_t PredictionSet::link_count() const {
  std::size_t n = 0;
  for (const auto& [id, codes] : predictions) n += codes.size();
  return n;
}

PredictionSet union_to_parents(const PredictionSet& units,
                               const std::map<std::string, std::string>& parent_of,
                               const std::vector<std::string>& requirement_order) {
  PredictionSet out;
  out.strategy_tag = units.strategy_tag;
  for (const auto& id : requirement_order) out.predictions[id];
  for (const auto& [unit, codes] : units.predictions) {
    const auto it = parent_of.find(unit);
    if (it == parent_of.end()) throw ReferenceError(unit, "unit \"" + unit + "\" has no parent requirement");
    const auto slot = out.predictions.find(it->second);
    if (slot == out.predictions.end()) {
      throw ReferenceError(it->second, "parent \"" + it->second + "\" is not an evaluated requirement");
    }
    slot->second.insert(codes.begin(), codes.end());
  }
  out.thresholds_used = units.thresholds_used;
  out.pair_thresholds = units.pair_thresholds;
  return out;
}

std::string predictions_to_json(const PredictionSet& p) {
  json root = json::object();
  for (const auto& [id, codes] : p.predictions) root[id] = codes;
  return root.dump(2) + "\n";
}

std::string thresholds_to_json(const PredictionSet& p) {
  json root = json::object();
  root["strategy"] = p.strategy_tag;
  root["thresholds"] = p.thresholds_used;
  if (!p.pair_thresholds.empty()) root["pair_thresholds"] = p.pair_thresholds;
  return root.dump(2) + "\n";
}

PredictionSet parse_predictions(const std::string& json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ParseError("byte " + std::to_string(e.byte), e.what());
  }
  if (!root.is_object()) throw ParseError("$", "predictions must be an object");
  PredictionSet p;
  for (const auto& [id, codes] : root.items()) {
    if (!codes.is_array()) throw ParseError("$." + id, "expected an array of codes");
    auto& set = p.predictions[id];
    for (const auto& c : codes) {
      if (!c.is_string()) throw ParseError("$." + id, "codes must be strings");
      set.insert(c.get<std::string>());
    }
  }
  return p;
}

PredictionSet load_predictions(const std::filesystem::path& path) {
  return parse_predictions(read_file(path));
}

}  // namespace lrt
