#pragma once

#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "lrt/corpus.hpp"

namespace lrt {

// Predicted provision codes per requirement. Every evaluated requirement has
// an entry, possibly empty.
struct PredictionSet {
  std::map<std::string, std::set<std::string>> predictions;
  std::string strategy_tag;
  // Per-requirement threshold, for strategies where one exists.
  std::map<std::string, double> thresholds_used;
  // Per-(requirement, code) thresholds of the dynamic strategy.
  std::map<std::string, std::map<std::string, double>> pair_thresholds;

  const std::set<std::string>& codes(const std::string& req_id) const;
  TraceLinkSet as_links() const;
  std::size_t link_count() const;
};

// Unions unit-level predictions into their parent requirements.
// `parent_of` maps unit id -> requirement id; every requirement in
// `requirement_order` receives an entry.
PredictionSet union_to_parents(const PredictionSet& units,
                               const std::map<std::string, std::string>& parent_of,
                               const std::vector<std::string>& requirement_order);

// {requirement id -> sorted codes}.
std::string predictions_to_json(const PredictionSet& p);
// Sidecar with strategy tag and thresholds.
std::string thresholds_to_json(const PredictionSet& p);
PredictionSet parse_predictions(const std::string& json_text);
PredictionSet load_predictions(const std::filesystem::path& path);

}  // namespace lrt
