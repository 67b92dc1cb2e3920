#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "lrt/corpus.hpp"
#include "lrt/embeddings.hpp"
#include "lrt/evaluation.hpp"
#include "lrt/linker.hpp"
#include "lrt/prediction.hpp"

namespace lrt {

enum class Method { kConstant, kDynamic, kDelta, kTuned, kTfidf, kLsi, kLda, kIndicator };

inline constexpr Method kAllMethods[] = {Method::kConstant, Method::kDynamic, Method::kDelta, Method::kTuned,
                                         Method::kTfidf,    Method::kLsi,     Method::kLda,   Method::kIndicator};

std::string to_string(Method m);
Method parse_method(const std::string& s);
// Methods scoring with embedding vectors rather than a fitted baseline.
bool uses_embeddings(Method m);

struct EmbedItem {
  std::string id;
  std::string text;
  std::string parent;  // requirement id of a sentence unit; empty otherwise
};

class EmbeddingProvider {
 public:
  virtual ~EmbeddingProvider() = default;
  virtual EmbeddingSet embed(const std::vector<EmbedItem>& items) = 0;
};

class HashEmbeddingProvider : public EmbeddingProvider {
 public:
  HashEmbeddingProvider(std::size_t dim, std::uint64_t seed);
  EmbeddingSet embed(const std::vector<EmbedItem>& items) override;

 private:
  std::size_t dim_;
  std::uint64_t seed_;
};

// Looks vectors up by id; a sentence unit missing from the file falls back
// to its parent requirement's vector.
class FileEmbeddingProvider : public EmbeddingProvider {
 public:
  explicit FileEmbeddingProvider(EmbeddingSet vectors);
  EmbeddingSet embed(const std::vector<EmbedItem>& items) override;

 private:
  EmbeddingSet vectors_;
};

class HttpEmbeddingProvider : public EmbeddingProvider {
 public:
  explicit HttpEmbeddingProvider(HttpProviderConfig config);
  EmbeddingSet embed(const std::vector<EmbedItem>& items) override;

 private:
  HttpProviderConfig config_;
};

// Sentence units of requirements. A single-sentence requirement is its own
// unit; otherwise units are named "<id>#1", "<id>#2", ...
struct UnitIndex {
  std::vector<std::string> unit_ids;
  std::vector<std::string> parents;  // aligned with unit_ids
  std::map<std::string, std::string> parent_of;
  std::map<std::string, std::string> text;
};

UnitIndex sentence_units(const Corpus& corpus, const std::vector<std::string>& req_ids);

struct CorpusEmbeddings {
  EmbeddingSet requirements{1, ""};
  EmbeddingSet units{1, ""};  // requirement vectors plus any multi-sentence units
  EmbeddingSet provisions{1, ""};
  UnitIndex index;
};

CorpusEmbeddings embed_corpus(const Corpus& corpus, EmbeddingProvider& provider,
                              ProvisionText provision_mode = ProvisionText::kTitleAndDescription);

struct PipelineConfig {
  double theta = kDefaultConstantThreshold;
  std::size_t negatives = kDefaultNegativeSampleSize;
  std::uint64_t seed = 16;
  std::size_t lsi_k = 50;
  std::size_t lda_topics = 50;
  double lda_alpha = 0.02;
  double lda_beta = 0.02;
  int lda_iterations = 500;
  MatchMode match_mode = MatchMode::kSuperset;
};

struct MethodOutput {
  PredictionSet predictions;  // test requirements only
  SimilarityMatrix scores;  // requirement-level scores of the test requirements
  std::optional<ThresholdCurve> curve;  // tuned methods: the training curve
};

// Fits on `train_doc_ids` (where the method learns anything) and predicts
// the requirements of `test_req_ids`. Embedding methods need `embeddings`.
MethodOutput run_method(Method method, const Corpus& corpus, const CorpusEmbeddings* embeddings,
                        const std::vector<std::string>& train_doc_ids, const std::vector<std::string>& test_req_ids,
                        const PipelineConfig& config);

struct LooRow {
  Method method;
  std::string test_doc_id;
  MetricsReport report;
  std::optional<double> theta;
};

struct MethodSummary {
  Method method;
  LinkMetrics micro;  // counts summed over splits
  std::optional<double> mean_f2;  // undefined split scores count as 0
  std::optional<double> mean_map;
  std::optional<double> mean_auc;
  RequirementLevelReport requirements;
};

struct LooResult {
  std::vector<LooSplit> splits;
  std::vector<Method> methods;
  std::vector<LooRow> rows;
  std::vector<MethodSummary> summary;
  std::map<Method, PredictionSet> predictions;  // every held-out requirement
  std::map<std::pair<Method, std::string>, ThresholdCurve> curves;
};

LooResult run_loo(const Corpus& corpus, const CorpusEmbeddings* embeddings, const std::set<std::string>& excluded,
                  const std::vector<Method>& methods, const PipelineConfig& config);

}  // namespace lrt
