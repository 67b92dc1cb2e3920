#pragma once

#include <string>
#include <vector>

#include "lrt/baselines/svd.hpp"
#include "lrt/embeddings.hpp"

namespace lrt {

inline constexpr std::size_t kDefaultLsiComponents = 50;

struct LsiModel {
  std::size_t k = 0;
  DenseMatrix term_projection;  // |V| x k, the leading right singular vectors
  std::vector<double> singular_values;  // k values, non-increasing
  DenseMatrix doc_coordinates;  // docs x k, the leading left singular vectors

  // U_k diag(S_k) V_k^T.
  DenseMatrix reconstruct() const;
};

// Rank-k truncation of the docs x terms matrix. Throws ValidationError when
// k is 0 or exceeds min(docs, terms), ConvergenceError from the SVD.
LsiModel fit_lsi(const DenseMatrix& tfidf_matrix, std::size_t k);

// q V_k diag(S_k)^-1; components with a zero singular value are left at 0.
std::vector<double> lsi_fold_in(const LsiModel& model, std::span<const double> term_vector);

// Cosine between folded-in requirement and provision vectors, each rescaled
// by S_k. A zero latent vector raises DegenerateVectorError under kThrow and
// scores 0 under kScoreZero.
SimilarityMatrix lsi_similarity_matrix(const LsiModel& model, const EmbeddingSet& req_vectors,
                                       const std::vector<std::string>& req_ids,
                                       const EmbeddingSet& prov_vectors,
                                       const std::vector<std::string>& codes,
                                       DegeneratePolicy policy = DegeneratePolicy::kThrow);

std::string lsi_model_to_json(const LsiModel& model);
LsiModel parse_lsi_model(const std::string& json_text);

}  // namespace lrt
