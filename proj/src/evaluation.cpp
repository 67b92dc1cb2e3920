#include "lrt/evaluation.hpp"

#include <algorithm>

#include "lrt/error.hpp"

namespace lrt {

LinkMetrics link_metrics(const ConfusionCounts& counts) {
  LinkMetrics m;
  m.counts = counts;
  m.precision = counts.precision();
  m.recall = counts.recall();
  m.f2 = f_beta(counts, 2.0);
  return m;
}

MetricsReport evaluate_predictions(const Corpus& corpus, const PredictionSet& pred,
                                   const std::vector<std::string>& req_ids, const SimilarityMatrix* scores,
                                   MatchMode mode) {
  const auto codes = corpus.codes();
  for (const auto& id : req_ids) corpus.requirement(id);
  const TraceLinkSet gt = corpus.ground_truth().restricted_to(req_ids);

  MetricsReport report;
  report.links = link_metrics(confusion(pred, gt, req_ids, codes));
  report.requirements = requirement_level_report(pred, gt, req_ids, codes.size(), mode);

  if (scores != nullptr) {
    const SimilarityMatrix m = scores->select_rows(req_ids);
    if (gt.link_count() > 0) report.map = map_score(m, gt);
    const ScoredPairs pairs = pairs_from_matrix(m, gt);
    const auto positives = std::count(pairs.labels.begin(), pairs.labels.end(), 1);
    if (positives > 0 && static_cast<std::size_t>(positives) < pairs.labels.size()) {
      report.auc = roc_auc(pairs.scores, pairs.labels, AucMode::full());
    }
  }

  const std::set<std::string> wanted(req_ids.begin(), req_ids.end());
  for (const auto& doc : corpus.documents()) {
    std::vector<std::string> ids;
    for (const auto& r : doc.requirements) {
      if (wanted.contains(r.id)) ids.push_back(r.id);
    }
    if (ids.empty()) continue;
    const TraceLinkSet doc_gt = gt.restricted_to(ids);
    PredictionSet doc_pred;
    for (const auto& id : ids) doc_pred.predictions[id] = pred.codes(id);
    DocumentRow row;
    row.doc_id = doc.id;
    row.links = link_metrics(confusion(doc_pred, doc_gt, ids, codes));
    row.requirements = requirement_level_report(doc_pred, doc_gt, ids, codes.size(), mode);
    report.per_document.push_back(std::move(row));
  }
  return report;
}

std::vector<LooSplit> loo_splits(const Corpus& corpus, const std::set<std::string>& excluded_doc_ids) {
  for (const auto& id : excluded_doc_ids) {
    if (!corpus.has_document(id)) throw ReferenceError(id, "unknown excluded document \"" + id + "\"");
  }
  std::vector<std::string> kept;
  for (const auto& id : corpus.document_ids()) {
    if (!excluded_doc_ids.contains(id)) kept.push_back(id);
  }
  if (kept.size() < 2) throw ValidationError("leave-one-out needs at least two documents");
  std::vector<LooSplit> out;
  for (const auto& test : kept) {
    LooSplit s;
    s.test_doc_id = test;
    for (const auto& id : kept) {
      if (id != test) s.train_doc_ids.push_back(id);
    }
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<RankedModel> rank_models(const std::vector<ModelEmbeddings>& models, const Corpus& corpus,
                                     AucMode mode) {
  if (models.empty()) throw ValidationError("rank_models needs at least one model");
  const auto req_ids = corpus.requirement_ids();
  const auto codes = corpus.codes();
  std::vector<RankedModel> out;
  for (const auto& m : models) {
    for (const auto& id : m.requirements.missing(req_ids)) {
      throw ReferenceError(id, "model \"" + m.tag + "\" has no vector for requirement \"" + id + "\"");
    }
    for (const auto& code : m.provisions.missing(codes)) {
      throw ReferenceError(code, "model \"" + m.tag + "\" has no vector for provision \"" + code + "\"");
    }
    const SimilarityMatrix matrix = build_similarity_matrix(m.requirements, req_ids, m.provisions, codes);
    const ScoredPairs pairs = pairs_from_matrix(matrix, corpus.ground_truth());
    out.push_back({m.tag, roc_auc(pairs.scores, pairs.labels, mode)});
  }
  std::sort(out.begin(), out.end(), [](const RankedModel& a, const RankedModel& b) {
    if (a.auc != b.auc) return a.auc > b.auc;
    return a.tag < b.tag;
  });
  return out;
}

}  // namespace lrt
