#include "lrt/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "lrt/error.hpp"

namespace lrt {

std::optional<double> ConfusionCounts::precision() const {
  if (tp + fp == 0) return std::nullopt;
  return static_cast<double>(tp) / static_cast<double>(tp + fp);
}

std::optional<double> ConfusionCounts::recall() const {
  if (tp + fn == 0) return std::nullopt;
  return static_cast<double>(tp) / static_cast<double>(tp + fn);
}

ConfusionCounts& ConfusionCounts::operator+=(const ConfusionCounts& o) {
  tp += o.tp;
  fp += o.fp;
  fn += o.fn;
  tn += o.tn;
  return *this;
}

ConfusionCounts confusion(const PredictionSet& pred, const TraceLinkSet& gt,
                          const std::vector<std::string>& req_ids,
                          const std::vector<std::string>& codes) {
  const std::set<std::string> req_set(req_ids.begin(), req_ids.end());
  const std::set<std::string> code_set(codes.begin(), codes.end());
  const auto check = [&](const std::map<std::string, std::set<std::string>>& links, const char* what) {
    for (const auto& [id, linked] : links) {
      if (linked.empty()) continue;
      if (!req_set.contains(id)) {
        throw ReferenceError(id, std::string(what) + " requirement \"" + id + "\" is outside the universe");
      }
      for (const auto& c : linked) {
        if (!code_set.contains(c)) {
          throw ReferenceError(c, std::string(what) + " code \"" + c + "\" is outside the universe");
        }
      }
    }
  };
  check(pred.predictions, "predicted");
  check(gt.links(), "ground-truth");

  ConfusionCounts counts;
  for (const auto& id : req_ids) {
    const auto& p = pred.codes(id);
    const auto& g = gt.codes(id);
    std::uint64_t hit = 0;
    for (const auto& c : p) hit += g.contains(c) ? 1 : 0;
    counts.tp += hit;
    counts.fp += p.size() - hit;
    counts.fn += g.size() - hit;
  }
  counts.tn = static_cast<std::uint64_t>(req_ids.size()) * codes.size() - counts.tp - counts.fp - counts.fn;
  return counts;
}

std::optional<double> f_beta(std::optional<double> precision, std::optional<double> recall, double beta) {
  if (!(beta > 0.0)) throw ValidationError("beta must be positive");
  const double p = precision.value_or(0.0);
  const double r = recall.value_or(0.0);
  if (p == 0.0 && r == 0.0) return std::nullopt;
  const double b2 = beta * beta;
  return (1.0 + b2) * p * r / (b2 * p + r);
}

std::optional<double> f_beta(const ConfusionCounts& counts, double beta) {
  if (!(beta > 0.0)) throw ValidationError("beta must be positive");
  if (counts.tp == 0) return std::nullopt;
  // One correctly rounded division, so equal ratios from different counts
  // compare equal and threshold ties resolve by the grid order.
  const double b2 = beta * beta;
  const double tp = static_cast<double>(counts.tp);
  return (1.0 + b2) * tp / ((1.0 + b2) * tp + b2 * static_cast<double>(counts.fn) + static_cast<double>(counts.fp));
}

std::optional<double> mean_absent_as_zero(std::span<const std::optional<double>> values) {
  if (values.empty()) return std::nullopt;
  double sum = 0.0;
  for (const auto& v : values) sum += v.value_or(0.0);
  return sum / static_cast<double>(values.size());
}

std::optional<double> average_precision(std::span<const double> scores,
                                        const std::vector<std::string>& codes,
                                        const std::set<std::string>& relevant) {
  if (relevant.empty()) return std::nullopt;
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
    if (scores[x] != scores[y]) return scores[x] > scores[y];
    return codes[x] < codes[y];
  });
  double sum = 0.0;
  std::size_t hits = 0;
  for (std::size_t rank = 0; rank < order.size(); ++rank) {
    if (relevant.contains(codes[order[rank]])) {
      ++hits;
      sum += static_cast<double>(hits) / static_cast<double>(rank + 1);
    }
  }
  return sum / static_cast<double>(relevant.size());
}

double map_score(const SimilarityMatrix& matrix, const TraceLinkSet& gt) {
  double sum = 0.0;
  std::size_t counted = 0;
  for (std::size_t i = 0; i < matrix.rows(); ++i) {
    const auto ap = average_precision(matrix.row(i), matrix.prov_codes(), gt.codes(matrix.req_ids()[i]));
    if (!ap) continue;
    sum += *ap;
    ++counted;
  }
  if (counted == 0) throw ValidationError("MAP is undefined: no requirement has a ground-truth link");
  return sum / static_cast<double>(counted);
}

std::vector<double> AucMode::thresholds() const {
  if (!(step > 0.0) || hi < lo) throw ValidationError("invalid threshold sweep range");
  const auto n = static_cast<std::size_t>(std::llround((hi - lo) / step));
  std::vector<double> out;
  out.reserve(n + 1);
  for (std::size_t i = 0; i <= n; ++i) out.push_back(lo + static_cast<double>(i) * step);
  return out;
}

ScoredPairs pairs_from_matrix(const SimilarityMatrix& matrix, const TraceLinkSet& gt) {
  ScoredPairs out;
  out.scores = matrix.scores();
  out.labels.reserve(out.scores.size());
  for (const auto& id : matrix.req_ids()) {
    for (const auto& code : matrix.prov_codes()) out.labels.push_back(gt.linked(id, code) ? 1 : 0);
  }
  return out;
}

namespace {

std::pair<std::size_t, std::size_t> class_sizes(std::span<const double> scores, std::span<const int> labels) {
  if (scores.size() != labels.size()) throw DimensionError("scores and labels differ in length");
  std::size_t pos = 0;
  for (const int l : labels) {
    if (l != 0 && l != 1) throw ValidationError("labels must be 0 or 1");
    pos += static_cast<std::size_t>(l);
  }
  const std::size_t neg = labels.size() - pos;
  if (pos == 0 || neg == 0) throw ValidationError("ROC AUC needs both positive and negative pairs");
  return {pos, neg};
}

}  // namespace

std::vector<RocPoint> roc_points(std::span<const double> scores, std::span<const int> labels,
                                 const std::vector<double>& thresholds) {
  const auto [pos, neg] = class_sizes(scores, labels);
  std::vector<RocPoint> out;
  out.reserve(thresholds.size());
  for (const double t : thresholds) {
    std::size_t tp = 0;
    std::size_t fp = 0;
    for (std::size_t k = 0; k < scores.size(); ++k) {
      if (scores[k] > t) (labels[k] ? tp : fp) += 1;
    }
    out.push_back({t, static_cast<double>(fp) / static_cast<double>(neg),
                   static_cast<double>(tp) / static_cast<double>(pos)});
  }
  return out;
}

double roc_auc(std::span<const double> scores, std::span<const int> labels, AucMode mode) {
  const auto [pos, neg] = class_sizes(scores, labels);
  if (mode.kind == AucMode::Kind::kFull) {
    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return scores[x] < scores[y]; });
    double positive_rank_sum = 0.0;
    for (std::size_t i = 0; i < order.size();) {
      std::size_t j = i;
      while (j < order.size() && scores[order[j]] == scores[order[i]]) ++j;
      const double avg_rank = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
      for (std::size_t k = i; k < j; ++k) positive_rank_sum += labels[order[k]] ? avg_rank : 0.0;
      i = j;
    }
    const double p = static_cast<double>(pos);
    const double n = static_cast<double>(neg);
    return (positive_rank_sum - p * (p + 1.0) / 2.0) / (p * n);
  }
  std::vector<std::pair<double, double>> pts{{0.0, 0.0}, {1.0, 1.0}};
  for (const auto& rp : roc_points(scores, labels, mode.thresholds())) pts.emplace_back(rp.fpr, rp.tpr);
  std::sort(pts.begin(), pts.end());
  double area = 0.0;
  for (std::size_t k = 1; k < pts.size(); ++k) {
    area += (pts[k].first - pts[k - 1].first) * (pts[k].second + pts[k - 1].second) / 2.0;
  }
  return area;
}

RequirementLevelReport requirement_level_report(const PredictionSet& pred, const TraceLinkSet& gt,
                                                const std::vector<std::string>& req_ids,
                                                std::size_t n_provisions, MatchMode mode) {
  if (n_provisions == 0) throw ValidationError("provision count must be positive");
  RequirementLevelReport rep;
  rep.n_requirements = req_ids.size();
  double recall_sum = 0.0;
  double cost_sum = 0.0;
  for (const auto& id : req_ids) {
    const auto& p = pred.codes(id);
    const auto& g = gt.codes(id);
    std::size_t hit = 0;
    for (const auto& c : p) hit += g.contains(c) ? 1 : 0;
    const bool exact = p == g;
    bool partial = false;
    if (!exact) {
      if (mode == MatchMode::kSuperset) {
        partial = !g.empty() && hit == g.size();
      } else {
        partial = hit > 0;
      }
    }
    if (exact) {
      ++rep.exact_match;
    } else if (partial) {
      ++rep.partial_match;
    } else {
      ++rep.incorrect;
    }
    if (g.empty()) {
      recall_sum += p.empty() ? 1.0 : 0.0;
    } else {
      recall_sum += static_cast<double>(hit) / static_cast<double>(g.size());
    }
    cost_sum += static_cast<double>(p.size()) / static_cast<double>(n_provisions);
  }
  if (!req_ids.empty()) {
    const double n = static_cast<double>(req_ids.size());
    rep.success_rate = static_cast<double>(rep.exact_match + rep.partial_match) / n;
    rep.macro_recall = recall_sum / n;
    rep.cost = cost_sum / n;
  }
  return rep;
}

namespace {

double log_choose(std::uint64_t n, std::uint64_t k) {
  return std::lgamma(static_cast<double>(n) + 1.0) - std::lgamma(static_cast<double>(k) + 1.0) -
         std::lgamma(static_cast<double>(n - k) + 1.0);
}

// log P(a = x) for fixed margins r1 = a + b, r2 = c + d, c1 = a + c.
double log_hyper(std::uint64_t x, std::uint64_t r1, std::uint64_t r2, std::uint64_t c1) {
  return log_choose(r1, x) + log_choose(r2, c1 - x) - log_choose(r1 + r2, c1);
}

}  // namespace

double hypergeometric_probability(const ContingencyTable2x2& t) {
  return std::exp(log_hyper(t.a, t.a + t.b, t.c + t.d, t.a + t.c));
}

double fisher_exact(const ContingencyTable2x2& t) {
  const std::uint64_t r1 = t.a + t.b;
  const std::uint64_t r2 = t.c + t.d;
  const std::uint64_t c1 = t.a + t.c;
  const std::uint64_t lo = c1 > r2 ? c1 - r2 : 0;
  const std::uint64_t hi = std::min(r1, c1);
  const double observed = log_hyper(t.a, r1, r2, c1);
  const double cutoff = observed + std::log1p(1e-12);
  double p = 0.0;
  for (std::uint64_t x = lo; x <= hi; ++x) {
    const double lp = log_hyper(x, r1, r2, c1);
    if (lp <= cutoff) p += std::exp(lp);
  }
  return std::clamp(p, 0.0, 1.0);
}

std::string to_string(MatchMode mode) { return mode == MatchMode::kSuperset ? "superset" : "overlap"; }

MatchMode parse_match_mode(const std::string& s) {
  if (s == "superset") return MatchMode::kSuperset;
  if (s == "overlap") return MatchMode::kOverlap;
  throw ValidationError("unknown match mode \"" + s + "\" (expected superset or overlap)");
}

}  // namespace lrt
