#include "lrt/report.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace lrt {

using nlohmann::json;

std::string format_percent(std::optional<double> ratio) {
  if (!ratio || !std::isfinite(*ratio)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.1f", *ratio * 100.0);
  return buf;
}

namespace {

std::string format_ratio(std::optional<double> v) {
  if (!v) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", *v);
  return buf;
}

std::string fmt_theta(std::optional<double> v) {
  if (!v) return "-";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", *v);
  return buf;
}

std::vector<std::string> metric_cells(const LinkMetrics& l, const RequirementLevelReport& r) {
  return {std::to_string(l.counts.tp),      std::to_string(l.counts.fp),     std::to_string(l.counts.fn),
          format_percent(l.precision),      format_percent(l.recall),        format_percent(l.f2),
          std::to_string(r.exact_match),    std::to_string(r.partial_match), format_percent(r.success_rate),
          format_percent(r.macro_recall),   format_percent(r.cost)};
}

const std::vector<std::string> kMetricHeader = {"TP", "FP", "FN", "P", "R", "F2", "EM", "PM", "SR", "MR", "Cost"};

}  // namespace

json optional_json(std::optional<double> v) { return v ? json(*v) : json(nullptr); }

json counts_to_json(const ConfusionCounts& c) {
  return json{{"tp", c.tp}, {"fp", c.fp}, {"fn", c.fn}, {"tn", c.tn}};
}

json link_metrics_to_json(const LinkMetrics& m) {
  return json{{"counts", counts_to_json(m.counts)},
              {"precision", optional_json(m.precision)},
              {"recall", optional_json(m.recall)},
              {"f2", optional_json(m.f2)}};
}

json requirement_report_to_json(const RequirementLevelReport& r) {
  return json{{"exact_match", r.exact_match},   {"partial_match", r.partial_match},
              {"incorrect", r.incorrect},       {"n_requirements", r.n_requirements},
              {"success_rate", r.success_rate}, {"macro_recall", r.macro_recall},
              {"cost", r.cost}};
}

json metrics_report_to_json(const MetricsReport& r) {
  json docs = json::array();
  for (const auto& d : r.per_document) {
    docs.push_back(json{{"doc_id", d.doc_id},
                        {"links", link_metrics_to_json(d.links)},
                        {"requirements", requirement_report_to_json(d.requirements)}});
  }
  return json{{"links", link_metrics_to_json(r.links)},
              {"map", optional_json(r.map)},
              {"auc", optional_json(r.auc)},
              {"requirements", requirement_report_to_json(r.requirements)},
              {"per_document", docs}};
}

json loo_result_to_json(const LooResult& r) {
  json splits = json::array();
  for (const auto& s : r.splits) splits.push_back(json{{"train", s.train_doc_ids}, {"test", s.test_doc_id}});
  json rows = json::array();
  for (const auto& row : r.rows) {
    rows.push_back(json{{"method", to_string(row.method)},
                        {"test_doc", row.test_doc_id},
                        {"theta", optional_json(row.theta)},
                        {"report", metrics_report_to_json(row.report)}});
  }
  json summary = json::array();
  for (const auto& s : r.summary) {
    summary.push_back(json{{"method", to_string(s.method)},
                           {"micro", link_metrics_to_json(s.micro)},
                           {"mean_f2", optional_json(s.mean_f2)},
                           {"mean_map", optional_json(s.mean_map)},
                           {"mean_auc", optional_json(s.mean_auc)},
                           {"requirements", requirement_report_to_json(s.requirements)}});
  }
  return json{{"format_version", 1}, {"splits", splits}, {"rows", rows}, {"summary", summary}};
}

std::string render_table(const std::vector<std::string>& header, const std::vector<std::vector<std::string>>& rows) {
  std::vector<std::size_t> width(header.size(), 0);
  const auto widen = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size() && i < width.size(); ++i) width[i] = std::max(width[i], cells[i].size());
  };
  widen(header);
  for (const auto& r : rows) widen(r);
  std::ostringstream out;
  const auto emit = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i > 0) out << "  ";
      const std::string pad(width[i] - cells[i].size(), ' ');
      if (i == 0) {
        out << cells[i] << (cells.size() > 1 ? pad : "");
      } else {
        out << pad << cells[i];
      }
    }
    out << '\n';
  };
  emit(header);
  for (const auto& r : rows) emit(r);
  return out.str();
}

std::string metrics_report_to_text(const MetricsReport& r) {
  std::vector<std::string> header = {"Document"};
  header.insert(header.end(), kMetricHeader.begin(), kMetricHeader.end());
  std::vector<std::vector<std::string>> rows;
  for (const auto& d : r.per_document) {
    std::vector<std::string> cells = {d.doc_id};
    const auto m = metric_cells(d.links, d.requirements);
    cells.insert(cells.end(), m.begin(), m.end());
    rows.push_back(std::move(cells));
  }
  std::vector<std::string> total = {"All"};
  const auto m = metric_cells(r.links, r.requirements);
  total.insert(total.end(), m.begin(), m.end());
  rows.push_back(std::move(total));
  std::string out = render_table(header, rows);
  out += "MAP " + format_ratio(r.map) + "  AUC " + format_ratio(r.auc) + "\n";
  return out;
}

std::string loo_result_to_text(const LooResult& r) {
  std::vector<std::string> header = {"Method", "Test", "theta"};
  header.insert(header.end(), kMetricHeader.begin(), kMetricHeader.end());
  header.push_back("MAP");
  header.push_back("AUC");
  std::vector<std::vector<std::string>> rows;
  for (const auto& row : r.rows) {
    std::vector<std::string> cells = {to_string(row.method), row.test_doc_id, fmt_theta(row.theta)};
    const auto m = metric_cells(row.report.links, row.report.requirements);
    cells.insert(cells.end(), m.begin(), m.end());
    cells.push_back(format_ratio(row.report.map));
    cells.push_back(format_ratio(row.report.auc));
    rows.push_back(std::move(cells));
  }
  std::string out = "Per split\n" + render_table(header, rows);

  std::vector<std::string> sum_header = {"Method"};
  sum_header.insert(sum_header.end(), kMetricHeader.begin(), kMetricHeader.end());
  sum_header.push_back("avgF2");
  sum_header.push_back("MAP");
  sum_header.push_back("AUC");
  std::vector<std::vector<std::string>> sum_rows;
  for (const auto& s : r.summary) {
    std::vector<std::string> cells = {to_string(s.method)};
    const auto m = metric_cells(s.micro, s.requirements);
    cells.insert(cells.end(), m.begin(), m.end());
    cells.push_back(format_percent(s.mean_f2));
    cells.push_back(format_ratio(s.mean_map));
    cells.push_back(format_ratio(s.mean_auc));
    sum_rows.push_back(std::move(cells));
  }
  out += "\nOverall\n" + render_table(sum_header, sum_rows);
  return out;
}

std::string ranking_to_text(const std::vector<RankedModel>& ranking) {
  std::vector<std::vector<std::string>> rows;
  for (std::size_t i = 0; i < ranking.size(); ++i) {
    rows.push_back({std::to_string(i + 1), ranking[i].tag, format_ratio(ranking[i].auc)});
  }
  return render_table({"Rank", "Model", "AUC"}, rows);
}

json ranking_to_json(const std::vector<RankedModel>& ranking) {
  json out = json::array();
  for (std::size_t i = 0; i < ranking.size(); ++i) {
    out.push_back(json{{"rank", i + 1}, {"tag", ranking[i].tag}, {"auc", ranking[i].auc}});
  }
  return out;
}

std::string roc_points_to_csv(const std::vector<RocPoint>& points) {
  std::ostringstream out;
  out.precision(17);
  out << "threshold,fpr,tpr\n";
  for (const auto& p : points) out << p.threshold << ',' << p.fpr << ',' << p.tpr << '\n';
  return out.str();
}

}  // namespace lrt
