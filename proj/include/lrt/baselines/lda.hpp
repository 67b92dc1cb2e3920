#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "lrt/embeddings.hpp"

namespace lrt {

inline constexpr std::size_t kDefaultLdaTopics = 50;
inline constexpr double kDefaultLdaPrior = 0.02;
inline constexpr int kDefaultLdaIterations = 500;
inline constexpr int kLdaAveragedSweeps = 100;
inline constexpr int kDefaultFoldInIterations = 200;

struct LdaModel {
  std::size_t topics = 0;
  double alpha = kDefaultLdaPrior;
  double beta = kDefaultLdaPrior;
  std::vector<std::string> vocabulary;  // sorted
  std::vector<std::vector<double>> topic_word;  // topics x |V|, rows sum to 1
  std::vector<std::vector<double>> doc_topic;  // training documents, rows sum to 1
  int iterations = kDefaultLdaIterations;
  std::uint64_t seed = 16;
};

// Sampler state after a sweep, handed to an optional observer.
struct GibbsState {
  int sweep = 0;
  const std::vector<std::vector<std::size_t>>* words = nullptr;  // vocabulary ids per doc
  const std::vector<std::vector<std::size_t>>* assignments = nullptr;  // topic per token
  const std::vector<std::vector<std::uint32_t>>* doc_topic_counts = nullptr;
  const std::vector<std::vector<std::uint32_t>>* topic_word_counts = nullptr;
  const std::vector<std::uint32_t>* topic_counts = nullptr;
};
using GibbsObserver = std::function<void(const GibbsState&)>;

// Collapsed Gibbs sampling. Posterior means are averaged over the final
// min(100, iterations) sweeps. Throws ValidationError for an empty corpus,
// topics == 0, non-positive priors or iterations < 1.
LdaModel fit_lda(const std::vector<std::vector<std::string>>& docs, std::size_t topics, double alpha,
                 double beta, int iterations, std::uint64_t seed, const GibbsObserver& observer = {});

// Topic distribution of an unseen document by Gibbs sampling with topic_word
// frozen, seeded from the model seed and the tokens themselves. Unknown terms
// are ignored; throws ValidationError when nothing is left.
std::vector<double> lda_fold_in(const LdaModel& model, const std::vector<std::string>& tokens,
                                int iterations = kDefaultFoldInIterations);

// Cosine of folded-in topic distributions. A document with no known terms
// raises ValidationError under kThrow and scores 0 under kScoreZero.
SimilarityMatrix lda_similarity_matrix(const LdaModel& model,
                                       const std::vector<std::pair<std::string, std::vector<std::string>>>& req_docs,
                                       const std::vector<std::pair<std::string, std::vector<std::string>>>& prov_docs,
                                       DegeneratePolicy policy = DegeneratePolicy::kThrow);

std::string lda_model_to_json(const LdaModel& model);
LdaModel parse_lda_model(const std::string& json_text);

}  // namespace lrt
