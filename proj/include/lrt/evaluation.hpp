#pragma once

#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "lrt/corpus.hpp"
#include "lrt/embeddings.hpp"
#include "lrt/metrics.hpp"
#include "lrt/prediction.hpp"

namespace lrt {

struct LinkMetrics {
  ConfusionCounts counts;
  std::optional<double> precision;
  std::optional<double> recall;
  std::optional<double> f2;
};

LinkMetrics link_metrics(const ConfusionCounts& counts);

struct DocumentRow {
  std::string doc_id;
  LinkMetrics links;
  RequirementLevelReport requirements;
};

struct MetricsReport {
  LinkMetrics links;
  std::optional<double> map;
  std::optional<double> auc;  // full mode, pooled over all pairs
  RequirementLevelReport requirements;
  std::vector<DocumentRow> per_document;
};

// Scores every requirement of `req_ids` against the whole catalog. `scores`,
// when given, must cover `req_ids` and feeds MAP and AUC; each is left absent
// when undefined (no linked row, or a single-class pair set).
MetricsReport evaluate_predictions(const Corpus& corpus, const PredictionSet& pred,
                                   const std::vector<std::string>& req_ids, const SimilarityMatrix* scores,
                                   MatchMode mode = MatchMode::kSuperset);

struct LooSplit {
  std::vector<std::string> train_doc_ids;
  std::string test_doc_id;
};

// One split per non-excluded document, in corpus order. Throws
// ReferenceError for an unknown excluded id and ValidationError when fewer
// than two documents remain.
std::vector<LooSplit> loo_splits(const Corpus& corpus, const std::set<std::string>& excluded_doc_ids);

struct ModelEmbeddings {
  std::string tag;
  EmbeddingSet requirements;
  EmbeddingSet provisions;
};

struct RankedModel {
  std::string tag;
  double auc = 0.0;
};

// Sweep-mode micro AUC per model over every requirement x provision pair,
// sorted by descending AUC (ties by tag). Throws ReferenceError naming the
// first id a model does not cover.
std::vector<RankedModel> rank_models(const std::vector<ModelEmbeddings>& models, const Corpus& corpus,
                                     AucMode mode = AucMode::sweep());

}  // namespace lrt
