#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "lrt/embeddings.hpp"
#include "lrt/text.hpp"

namespace lrt {

// (term index, weight), sorted by index.
struct SparseVector {
  std::vector<std::pair<std::size_t, double>> entries;
  bool degenerate() const { return entries.empty(); }
};

struct TfIdfModel {
  std::vector<std::string> vocabulary;  // sorted, unique
  std::vector<double> idf;
  PreprocessConfig config;  // how the fitted token streams were produced
  std::optional<double> max_df_cutoff;

  std::optional<std::size_t> index_of(const std::string& term) const;
};

// idf(t) = ln((1 + N) / (1 + df(t))) + 1. With `max_df`, terms whose document
// frequency ratio exceeds it are dropped. Throws ValidationError when every
// document is empty.
TfIdfModel fit_tfidf(const std::vector<std::vector<std::string>>& docs,
                     std::optional<double> max_df = std::nullopt,
                     PreprocessConfig config = PreprocessConfig::lsi());

// tf(t) * idf(t), L2-normalized. Out-of-vocabulary tokens are ignored; a
// document without known terms yields an empty (degenerate) vector.
SparseVector tfidf_vector(const TfIdfModel& model, const std::vector<std::string>& tokens);

std::vector<double> to_dense(const SparseVector& v, std::size_t dim);

// Throws DegenerateVectorError when either side is empty.
double sparse_cosine(const SparseVector& a, const SparseVector& b);

// Vectors for token streams keyed by id, densified so they can feed
// build_similarity_matrix. Degenerate documents become zero vectors.
EmbeddingSet tfidf_embedding_set(const TfIdfModel& model,
                                 const std::vector<std::pair<std::string, std::vector<std::string>>>& docs);

std::string tfidf_model_to_json(const TfIdfModel& model);
TfIdfModel parse_tfidf_model(const std::string& json_text);

}  // namespace lrt
