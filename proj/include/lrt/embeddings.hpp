#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace lrt {

inline constexpr int kEmbeddingFormatVersion = 1;

using EmbeddingVector = std::vector<double>;

// Cosine similarity clamped to [-1, 1]. Throws DimensionError on length
// mismatch and DegenerateVectorError on a zero-norm input.
double cosine(std::span<const double> u, std::span<const double> v);

double l2_norm(std::span<const double> v);

// Id-keyed vectors sharing one dimensionality.
class EmbeddingSet {
 public:
  EmbeddingSet(std::size_t dim, std::string provider);

  // Throws DimensionError naming `id` on a length mismatch, ValidationError on
  // a duplicate id or non-finite entry.
  void add(const std::string& id, EmbeddingVector values);

  std::size_t dim() const { return dim_; }
  const std::string& provider() const { return provider_; }
  bool contains(const std::string& id) const { return vectors_.contains(id); }
  // Throws ReferenceError when absent.
  const EmbeddingVector& at(const std::string& id) const;
  std::size_t size() const { return vectors_.size(); }
  const std::map<std::string, EmbeddingVector>& vectors() const { return vectors_; }

  // Ids from `ids` not present in this set.
  std::vector<std::string> missing(const std::vector<std::string>& ids) const;

  bool operator==(const EmbeddingSet&) const = default;

 private:
  std::size_t dim_;
  std::string provider_;
  std::map<std::string, EmbeddingVector> vectors_;
};

EmbeddingSet parse_embedding_set(const std::string& json_text);
EmbeddingSet load_embedding_set(const std::filesystem::path& path);
std::string embedding_set_to_json(const EmbeddingSet& set);
void save_embedding_set(const EmbeddingSet& set, const std::filesystem::path& path);

// Signed feature hashing of lowercase, punctuation-free token counts into
// `dim` buckets, then L2 normalization. Empty text yields the zero vector.
EmbeddingVector hash_embed(std::string_view text, std::size_t dim, std::uint64_t seed);

// n x m requirement-by-provision score grid, row-major.
class SimilarityMatrix {
 public:
  SimilarityMatrix() = default;
  SimilarityMatrix(std::vector<std::string> req_ids, std::vector<std::string> prov_codes,
                   std::vector<double> scores);

  std::size_t rows() const { return req_ids_.size(); }
  std::size_t cols() const { return prov_codes_.size(); }
  double at(std::size_t i, std::size_t j) const { return scores_[i * cols() + j]; }
  std::span<const double> row(std::size_t i) const {
    return {scores_.data() + i * cols(), cols()};
  }
  const std::vector<std::string>& req_ids() const { return req_ids_; }
  const std::vector<std::string>& prov_codes() const { return prov_codes_; }
  const std::vector<double>& scores() const { return scores_; }

  // Rows restricted to `ids`, in that order.
  SimilarityMatrix select_rows(const std::vector<std::string>& ids) const;

  bool operator==(const SimilarityMatrix&) const = default;

 private:
  std::vector<std::string> req_ids_;
  std::vector<std::string> prov_codes_;
  std::vector<double> scores_;
};

// What to do with a pair involving a zero-norm vector.
enum class DegeneratePolicy { kThrow, kScoreZero };

// scores[i][j] = cosine(reqs[req_ids[i]], provs[codes[j]]).
SimilarityMatrix build_similarity_matrix(const EmbeddingSet& reqs,
                                         const std::vector<std::string>& req_ids,
                                         const EmbeddingSet& provs,
                                         const std::vector<std::string>& codes,
                                         DegeneratePolicy policy = DegeneratePolicy::kThrow);

// Collapses rows of sentence units into their parent requirement by taking
// the maximum score per provision. `parents[i]` is the parent of row i;
// output rows follow `order`.
SimilarityMatrix max_pool_rows(const SimilarityMatrix& units,
                               const std::vector<std::string>& parents,
                               const std::vector<std::string>& order);

std::string similarity_matrix_to_json(const SimilarityMatrix& m);
SimilarityMatrix parse_similarity_matrix(const std::string& json_text);
SimilarityMatrix load_similarity_matrix(const std::filesystem::path& path);

// Embedding endpoint settings. The bearer token comes from LLM_API_KEY.
struct HttpProviderConfig {
  std::string endpoint_url;
  std::string model_name;
  std::size_t batch_size = 32;
  double timeout_seconds = 60.0;
  int max_retries = 3;
  // Initial backoff; doubles after every failed attempt.
  double backoff_seconds = 0.5;

  void validate() const;
};

// POSTs {"model","input"} batches and collects {"data":[{"index","embedding"}]}.
EmbeddingSet fetch_embeddings(const HttpProviderConfig& config,
                              const std::vector<std::pair<std::string, std::string>>& texts);

}  // namespace lrt
