#include "lrt/pipeline.hpp"

#include <algorithm>

#include "lrt/baselines/indicator.hpp"
#include "lrt/baselines/lda.hpp"
#include "lrt/baselines/lsi.hpp"
#include "lrt/baselines/tfidf.hpp"
#include "lrt/error.hpp"
#include "lrt/text.hpp"

namespace lrt {

std::string to_string(Method m) {
  switch (m) {
    case Method::kConstant: return "constant";
    case Method::kDynamic: return "dynamic";
    case Method::kDelta: return "delta";
    case Method::kTuned: return "tuned";
    case Method::kTfidf: return "tfidf";
    case Method::kLsi: return "lsi";
    case Method::kLda: return "lda";
    case Method::kIndicator: return "indicator";
  }
  return "unknown";
}

Method parse_method(const std::string& s) {
  for (const auto m : kAllMethods) {
    if (to_string(m) == s) return m;
  }
  throw ValidationError("unknown strategy \"" + s +
                        "\" (expected constant, dynamic, delta, tuned, tfidf, lsi, lda or indicator)");
}

bool uses_embeddings(Method m) {
  return m == Method::kConstant || m == Method::kDynamic || m == Method::kDelta || m == Method::kTuned;
}

HashEmbeddingProvider::HashEmbeddingProvider(std::size_t dim, std::uint64_t seed) : dim_(dim), seed_(seed) {
  if (dim < 8) throw ValidationError("hash embeddings need dim >= 8");
}

EmbeddingSet HashEmbeddingProvider::embed(const std::vector<EmbedItem>& items) {
  EmbeddingSet out(dim_, "hash:" + std::to_string(dim_) + ":" + std::to_string(seed_));
  for (const auto& item : items) out.add(item.id, hash_embed(item.text, dim_, seed_));
  return out;
}

FileEmbeddingProvider::FileEmbeddingProvider(EmbeddingSet vectors) : vectors_(std::move(vectors)) {}

EmbeddingSet FileEmbeddingProvider::embed(const std::vector<EmbedItem>& items) {
  EmbeddingSet out(vectors_.dim(), vectors_.provider());
  for (const auto& item : items) {
    if (vectors_.contains(item.id)) {
      out.add(item.id, vectors_.at(item.id));
    } else if (!item.parent.empty() && vectors_.contains(item.parent)) {
      out.add(item.id, vectors_.at(item.parent));
    } else {
      throw ReferenceError(item.id, "embedding file has no vector for \"" + item.id + "\"");
    }
  }
  return out;
}

HttpEmbeddingProvider::HttpEmbeddingProvider(HttpProviderConfig config) : config_(std::move(config)) {
  config_.validate();
}

EmbeddingSet HttpEmbeddingProvider::embed(const std::vector<EmbedItem>& items) {
  std::vector<std::pair<std::string, std::string>> texts;
  texts.reserve(items.size());
  for (const auto& item : items) texts.emplace_back(item.id, item.text);
  return fetch_embeddings(config_, texts);
}

UnitIndex sentence_units(const Corpus& corpus, const std::vector<std::string>& req_ids) {
  UnitIndex index;
  for (const auto& id : req_ids) {
    const auto& text = corpus.requirement(id).text;
    const auto sentences = split_sentences(text);
    if (sentences.size() <= 1) {
      index.unit_ids.push_back(id);
      index.parents.push_back(id);
      index.parent_of[id] = id;
      index.text[id] = text;
      continue;
    }
    for (std::size_t k = 0; k < sentences.size(); ++k) {
      const std::string uid = id + "#" + std::to_string(k + 1);
      index.unit_ids.push_back(uid);
      index.parents.push_back(id);
      index.parent_of[uid] = id;
      index.text[uid] = sentences[k];
    }
  }
  return index;
}

CorpusEmbeddings embed_corpus(const Corpus& corpus, EmbeddingProvider& provider, ProvisionText provision_mode) {
  const auto req_ids = corpus.requirement_ids();
  UnitIndex index = sentence_units(corpus, req_ids);
  std::vector<EmbedItem> items;
  for (const auto& id : req_ids) items.push_back({id, corpus.requirement(id).text, ""});
  for (std::size_t i = 0; i < index.unit_ids.size(); ++i) {
    if (index.unit_ids[i] != index.parents[i]) {
      items.push_back({index.unit_ids[i], index.text.at(index.unit_ids[i]), index.parents[i]});
    }
  }
  std::vector<EmbedItem> prov_items;
  for (const auto& p : corpus.catalog()) prov_items.push_back({p.code, provision_text(p, provision_mode), ""});

  CorpusEmbeddings out;
  out.units = provider.embed(items);
  out.provisions = provider.embed(prov_items);
  if (out.units.dim() != out.provisions.dim()) {
    throw DimensionError("requirement and provision embeddings differ in dimension");
  }
  out.requirements = EmbeddingSet(out.units.dim(), out.units.provider());
  for (const auto& id : req_ids) out.requirements.add(id, out.units.at(id));
  out.index = std::move(index);
  return out;
}

namespace {

using TokenDocs = std::vector<std::pair<std::string, std::vector<std::string>>>;

TokenDocs tokenize_reqs(const Corpus& corpus, const std::vector<std::string>& ids, const PreprocessConfig& cfg) {
  TokenDocs out;
  for (const auto& id : ids) out.emplace_back(id, preprocess(corpus.requirement(id).text, cfg));
  return out;
}

TokenDocs tokenize_provs(const Corpus& corpus, const PreprocessConfig& cfg) {
  TokenDocs out;
  for (const auto& p : corpus.catalog()) out.emplace_back(p.code, preprocess(provision_text(p), cfg));
  return out;
}

std::vector<std::vector<std::string>> fit_docs(const TokenDocs& a, const TokenDocs& b) {
  std::vector<std::vector<std::string>> out;
  for (const auto& [id, toks] : a) out.push_back(toks);
  for (const auto& [id, toks] : b) out.push_back(toks);
  return out;
}

SimilarityMatrix unit_matrix(const CorpusEmbeddings& emb, const UnitIndex& units, const std::vector<std::string>& codes) {
  return build_similarity_matrix(emb.units, units.unit_ids, emb.provisions, codes);
}

// Predicts the test rows at the F2-optimal threshold of the training rows.
MethodOutput tuned_output(const SimilarityMatrix& train, const SimilarityMatrix& test, const TraceLinkSet& gt,
                          const std::string& tag) {
  MethodOutput out;
  out.curve = tune_threshold(train, gt);
  out.predictions = predict_constant(test, out.curve->best_theta);
  out.predictions.strategy_tag = tag;
  out.scores = test;
  return out;
}

}  // namespace

MethodOutput run_method(Method method, const Corpus& corpus, const CorpusEmbeddings* embeddings,
                        const std::vector<std::string>& train_doc_ids, const std::vector<std::string>& test_req_ids,
                        const PipelineConfig& config) {
  const auto codes = corpus.codes();
  const auto& gt = corpus.ground_truth();
  const bool needs_training = method != Method::kConstant && method != Method::kDelta;
  if (needs_training && train_doc_ids.empty()) {
    throw ValidationError("strategy \"" + to_string(method) + "\" needs at least one training document");
  }
  const auto train_req_ids = train_doc_ids.empty() ? std::vector<std::string>{} : corpus.requirement_ids(train_doc_ids);

  if (uses_embeddings(method)) {
    if (embeddings == nullptr) throw ValidationError("strategy \"" + to_string(method) + "\" needs embeddings");
    const UnitIndex test_units = sentence_units(corpus, test_req_ids);
    const SimilarityMatrix units = unit_matrix(*embeddings, test_units, codes);
    const SimilarityMatrix pooled = max_pool_rows(units, test_units.parents, test_req_ids);
    MethodOutput out;
    out.scores = pooled;
    switch (method) {
      case Method::kConstant:
        out.predictions = predict_constant(pooled, config.theta);
        break;
      case Method::kDelta:
        out.predictions = union_to_parents(predict_delta(units), test_units.parent_of, test_req_ids);
        break;
      case Method::kDynamic: {
        const auto bank = build_negative_bank(gt, train_req_ids, codes, config.negatives, config.seed);
        out.predictions = union_to_parents(predict_dynamic(embeddings->units, units, bank), test_units.parent_of,
                                           test_req_ids);
        break;
      }
      case Method::kTuned: {
        const UnitIndex train_units = sentence_units(corpus, train_req_ids);
        const SimilarityMatrix train =
            max_pool_rows(unit_matrix(*embeddings, train_units, codes), train_units.parents, train_req_ids);
        return tuned_output(train, pooled, gt, "tuned");
      }
      default:
        break;
    }
    return out;
  }

  const PreprocessConfig cfg = method == Method::kLda ? PreprocessConfig::lda() : PreprocessConfig::lsi();
  const TokenDocs train = tokenize_reqs(corpus, train_req_ids, cfg);
  const TokenDocs test = tokenize_reqs(corpus, test_req_ids, cfg);
  const TokenDocs provs = tokenize_provs(corpus, cfg);

  switch (method) {
    case Method::kTfidf: {
      const TfIdfModel model = fit_tfidf(fit_docs(train, provs), std::nullopt, cfg);
      const EmbeddingSet p = tfidf_embedding_set(model, provs);
      const auto matrix = [&](const TokenDocs& docs, const std::vector<std::string>& ids) {
        return build_similarity_matrix(tfidf_embedding_set(model, docs), ids, p, codes, DegeneratePolicy::kScoreZero);
      };
      return tuned_output(matrix(train, train_req_ids), matrix(test, test_req_ids), gt, "tfidf");
    }
    case Method::kLsi: {
      const TfIdfModel model = fit_tfidf(fit_docs(train, provs), std::nullopt, cfg);
      const std::size_t v = model.vocabulary.size();
      const EmbeddingSet train_vecs = tfidf_embedding_set(model, train);
      const EmbeddingSet prov_vecs = tfidf_embedding_set(model, provs);
      DenseMatrix a(train.size() + provs.size(), v);
      std::size_t row = 0;
      for (const auto& [id, toks] : train) {
        std::copy(train_vecs.at(id).begin(), train_vecs.at(id).end(), a.data.begin() + static_cast<long>(row++ * v));
      }
      for (const auto& [code, toks] : provs) {
        std::copy(prov_vecs.at(code).begin(), prov_vecs.at(code).end(), a.data.begin() + static_cast<long>(row++ * v));
      }
      const LsiModel lsi = fit_lsi(a, std::min(config.lsi_k, std::min(a.rows, a.cols)));
      const SimilarityMatrix train_m =
          lsi_similarity_matrix(lsi, train_vecs, train_req_ids, prov_vecs, codes, DegeneratePolicy::kScoreZero);
      const SimilarityMatrix test_m = lsi_similarity_matrix(lsi, tfidf_embedding_set(model, test), test_req_ids,
                                                            prov_vecs, codes, DegeneratePolicy::kScoreZero);
      return tuned_output(train_m, test_m, gt, "lsi");
    }
    case Method::kLda: {
      const LdaModel lda = fit_lda(fit_docs(train, provs), config.lda_topics, config.lda_alpha, config.lda_beta,
                                   config.lda_iterations, config.seed);
      return tuned_output(lda_similarity_matrix(lda, train, provs, DegeneratePolicy::kScoreZero),
                          lda_similarity_matrix(lda, test, provs, DegeneratePolicy::kScoreZero), gt, "lda");
    }
    case Method::kIndicator: {
      const IndicatorTermModel model = fit_indicator_model(corpus, train_doc_ids, cfg);
      return tuned_output(indicator_score_matrix(model, train, codes), indicator_score_matrix(model, test, codes), gt,
                          "indicator");
    }
    default:
      break;
  }
  throw ValidationError("unhandled strategy \"" + to_string(method) + "\"");
}

LooResult run_loo(const Corpus& corpus, const CorpusEmbeddings* embeddings, const std::set<std::string>& excluded,
                  const std::vector<Method>& methods, const PipelineConfig& config) {
  if (methods.empty()) throw ValidationError("no strategy selected");
  LooResult result;
  result.splits = loo_splits(corpus, excluded);
  result.methods = methods;
  std::vector<std::string> all_test;
  for (const auto& split : result.splits) {
    const auto test_ids = corpus.requirement_ids({split.test_doc_id});
    all_test.insert(all_test.end(), test_ids.begin(), test_ids.end());
    for (const auto m : methods) {
      MethodOutput out = run_method(m, corpus, embeddings, split.train_doc_ids, test_ids, config);
      LooRow row;
      row.method = m;
      row.test_doc_id = split.test_doc_id;
      row.report = evaluate_predictions(corpus, out.predictions, test_ids, &out.scores, config.match_mode);
      if (out.curve) {
        row.theta = out.curve->best_theta;
        result.curves[{m, split.test_doc_id}] = *out.curve;
      } else if (m == Method::kConstant) {
        row.theta = config.theta;
      }
      result.rows.push_back(std::move(row));
      auto& merged = result.predictions[m];
      merged.strategy_tag = to_string(m);
      for (const auto& id : test_ids) merged.predictions[id] = out.predictions.codes(id);
    }
  }

  const TraceLinkSet gt = corpus.ground_truth().restricted_to(all_test);
  for (const auto m : methods) {
    MethodSummary s;
    s.method = m;
    ConfusionCounts total;
    std::vector<std::optional<double>> f2s;
    double map_sum = 0.0;
    double auc_sum = 0.0;
    std::size_t maps = 0;
    std::size_t aucs = 0;
    for (const auto& row : result.rows) {
      if (row.method != m) continue;
      total += row.report.links.counts;
      f2s.push_back(row.report.links.f2);
      if (row.report.map) {
        map_sum += *row.report.map;
        ++maps;
      }
      if (row.report.auc) {
        auc_sum += *row.report.auc;
        ++aucs;
      }
    }
    s.micro = link_metrics(total);
    s.mean_f2 = mean_absent_as_zero(f2s);
    if (maps > 0) s.mean_map = map_sum / static_cast<double>(maps);
    if (aucs > 0) s.mean_auc = auc_sum / static_cast<double>(aucs);
    s.requirements =
        requirement_level_report(result.predictions.at(m), gt, all_test, corpus.catalog().size(), config.match_mode);
    result.summary.push_back(std::move(s));
  }
  return result;
}

}  // namespace lrt
