#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lrt/corpus.hpp"
#include "lrt/embeddings.hpp"
#include "lrt/prediction.hpp"

namespace lrt {

struct ConfusionCounts {
  std::uint64_t tp = 0;
  std::uint64_t fp = 0;
  std::uint64_t fn = 0;
  std::uint64_t tn = 0;

  std::uint64_t total() const { return tp + fp + fn + tn; }
  // Absent when the denominator is zero.
  std::optional<double> precision() const;
  std::optional<double> recall() const;

  ConfusionCounts& operator+=(const ConfusionCounts& o);
  bool operator==(const ConfusionCounts&) const = default;
};

// Counts over the full universe req_ids x codes. Throws ReferenceError when
// a prediction or ground-truth link falls outside the universe.
ConfusionCounts confusion(const PredictionSet& pred, const TraceLinkSet& gt,
                          const std::vector<std::string>& req_ids,
                          const std::vector<std::string>& codes);

// (1 + b^2) P R / (b^2 P + R). An undefined P or R counts as 0; the score is
// absent when both end up 0.
std::optional<double> f_beta(const ConfusionCounts& counts, double beta);
std::optional<double> f_beta(std::optional<double> precision, std::optional<double> recall, double beta);

// Mean where absent values count as 0; absent for an empty input.
std::optional<double> mean_absent_as_zero(std::span<const std::optional<double>> values);

// Average precision of one ranking. Ties in score are broken by ascending
// code. Absent when `relevant` is empty.
std::optional<double> average_precision(std::span<const double> scores,
                                        const std::vector<std::string>& codes,
                                        const std::set<std::string>& relevant);

// Mean AP over matrix rows with at least one ground-truth link. Throws
// ValidationError when no row has one.
double map_score(const SimilarityMatrix& matrix, const TraceLinkSet& gt);

struct AucMode {
  enum class Kind { kFull, kSweep };
  Kind kind = Kind::kFull;
  double lo = 0.1;
  double hi = 0.9;
  double step = 0.05;

  static AucMode full() { return {}; }
  static AucMode sweep(double lo = 0.1, double hi = 0.9, double step = 0.05) {
    return {Kind::kSweep, lo, hi, step};
  }
  std::vector<double> thresholds() const;
};

struct RocPoint {
  double threshold;
  double fpr;
  double tpr;
};

// Pooled (micro) pairs of a matrix: row-major scores and 0/1 labels.
struct ScoredPairs {
  std::vector<double> scores;
  std::vector<int> labels;
};
ScoredPairs pairs_from_matrix(const SimilarityMatrix& matrix, const TraceLinkSet& gt);

// Full mode: rank-based (Mann-Whitney) AUC with average ranks for ties.
// Sweep mode: trapezoidal area under (FPR, TPR) at each threshold (a pair is
// positive when its score exceeds the threshold) plus (0,0) and (1,1).
// Throws ValidationError unless both classes are present.
double roc_auc(std::span<const double> scores, std::span<const int> labels, AucMode mode);

// ROC points at the given thresholds, in threshold order.
std::vector<RocPoint> roc_points(std::span<const double> scores, std::span<const int> labels,
                                 const std::vector<double>& thresholds);

enum class MatchMode { kSuperset, kOverlap };

struct RequirementLevelReport {
  std::uint64_t exact_match = 0;
  std::uint64_t partial_match = 0;
  std::uint64_t incorrect = 0;
  std::uint64_t n_requirements = 0;
  double success_rate = 0.0;
  double macro_recall = 0.0;
  double cost = 0.0;
};

// Exact: predicted set equals ground truth (both empty counts). Partial in
// superset mode: prediction strictly contains a non-empty ground truth; in
// overlap mode: non-empty intersection without being exact. Macro recall
// scores a requirement with empty ground truth 1 when its prediction is also
// empty and 0 otherwise. Cost is the mean predicted-set size over
// `n_provisions`.
RequirementLevelReport requirement_level_report(const PredictionSet& pred, const TraceLinkSet& gt,
                                                const std::vector<std::string>& req_ids,
                                                std::size_t n_provisions,
                                                MatchMode mode = MatchMode::kSuperset);

// [[a, b], [c, d]]
struct ContingencyTable2x2 {
  std::uint64_t a = 0;
  std::uint64_t b = 0;
  std::uint64_t c = 0;
  std::uint64_t d = 0;
};

// Hypergeometric probability of `table` given its margins.
double hypergeometric_probability(const ContingencyTable2x2& table);

// Two-sided Fisher exact p-value: total probability of every table with the
// same margins that is no more likely than the observed one (relative slack
// 1e-12). Clamped to [0, 1].
double fisher_exact(const ContingencyTable2x2& table);

std::string to_string(MatchMode mode);
MatchMode parse_match_mode(const std::string& s);

}  // namespace lrt
