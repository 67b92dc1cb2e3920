#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "lrt/evaluation.hpp"
#include "lrt/linker.hpp"
#include "lrt/metrics.hpp"
#include "lrt/pipeline.hpp"

namespace lrt {

// Ratio as a percentage with one decimal ("49.3"), or "nan" when absent.
std::string format_percent(std::optional<double> ratio);

nlohmann::json optional_json(std::optional<double> v);
nlohmann::json counts_to_json(const ConfusionCounts& c);
nlohmann::json link_metrics_to_json(const LinkMetrics& m);
nlohmann::json requirement_report_to_json(const RequirementLevelReport& r);
nlohmann::json metrics_report_to_json(const MetricsReport& r);

// Machine report of a LOO run; numbers at full precision, absent as null.
nlohmann::json loo_result_to_json(const LooResult& r);

// Aligned plain-text tables: per split, then per method.
std::string metrics_report_to_text(const MetricsReport& r);
std::string loo_result_to_text(const LooResult& r);
std::string ranking_to_text(const std::vector<RankedModel>& ranking);
nlohmann::json ranking_to_json(const std::vector<RankedModel>& ranking);

std::string roc_points_to_csv(const std::vector<RocPoint>& points);

// Left-aligned first column, right-aligned others, two spaces between.
std::string render_table(const std::vector<std::string>& header, const std::vector<std::vector<std::string>>& rows);

}  // namespace lrt
