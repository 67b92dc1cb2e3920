#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "lrt/corpus.hpp"
#include "lrt/embeddings.hpp"
#include "lrt/prediction.hpp"

namespace lrt {

inline constexpr double kDefaultConstantThreshold = 0.5;
inline constexpr std::size_t kDefaultNegativeSampleSize = 10;

// Link (r_i, c_j) iff score > theta.
PredictionSet predict_constant(const SimilarityMatrix& matrix, double theta);

// Requirements known not to trace to each provision, sampled once per run.
struct NegativeExampleBank {
  std::map<std::string, std::vector<std::string>> per_provision;
  std::size_t sample_size = kDefaultNegativeSampleSize;
  std::uint64_t seed = 16;
};

// For each code, samples up to `sample_size` requirements from
// `candidate_req_ids` without a ground-truth link to it (seeded, without
// replacement). Candidates keep their input order before sampling.
NegativeExampleBank build_negative_bank(const TraceLinkSet& gt,
                                        const std::vector<std::string>& candidate_req_ids,
                                        const std::vector<std::string>& codes,
                                        std::size_t sample_size, std::uint64_t seed);

// theta_ij = mean cosine between r_i and the sampled negatives of c_j; link
// iff score_ij > theta_ij. `req_embeddings` must hold the matrix rows and all
// negatives. Throws ValidationError for a provision with no negatives.
PredictionSet predict_dynamic(const EmbeddingSet& req_embeddings, const SimilarityMatrix& matrix,
                              const NegativeExampleBank& bank);

// Per row: sort scores descending (ties by code), find the largest gap
// between neighbours (earliest on ties), set theta to the lower value of that
// pair and link everything strictly above it. A row without any positive gap
// links its top-ranked provision only. Throws ValidationError with fewer than
// two provisions.
PredictionSet predict_delta(const SimilarityMatrix& matrix);

struct ThresholdPoint {
  double theta;
  double f2;  // absent F2 recorded as 0
};

struct ThresholdCurve {
  std::vector<ThresholdPoint> points;
  double best_theta = 0.0;
  double best_f2 = 0.0;
};

// Grid theta = k / 100 for k = 1..99; best = highest F2, smallest theta on ties.
ThresholdCurve tune_threshold(const SimilarityMatrix& matrix_train, const TraceLinkSet& gt_train);

// n_points thresholds evenly spaced over [0, 1].
ThresholdCurve sweep_thresholds(const SimilarityMatrix& matrix, const TraceLinkSet& gt,
                                std::size_t n_points);

std::string curve_to_csv(const ThresholdCurve& curve);

}  // namespace lrt
