#include "lrt/embeddings.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

#include "lrt/corpus.hpp"
#include "lrt/error.hpp"
#include "lrt/random.hpp"
#include "lrt/text.hpp"

namespace lrt {

using nlohmann::json;

double l2_norm(std::span<const double> v) {
  double s = 0.0;
  for (const double x : v) s += x * x;
  return std::sqrt(s);
}

double cosine(std::span<const double> u, std::span<const double> v) {
  if (u.size() != v.size()) {
    throw DimensionError("cosine of vectors with dimensions " + std::to_string(u.size()) + " and " +
                         std::to_string(v.size()));
  }
  double dot = 0.0;
  double uu = 0.0;
  double vv = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    dot += u[i] * v[i];
    uu += u[i] * u[i];
    vv += v[i] * v[i];
  }
  if (uu == 0.0 || vv == 0.0) throw DegenerateVectorError("cosine of a zero-norm vector");
  return std::clamp(dot / (std::sqrt(uu) * std::sqrt(vv)), -1.0, 1.0);
}

EmbeddingSet::EmbeddingSet(std::size_t dim, std::string provider)
    : dim_(dim), provider_(std::move(provider)) {
  if (dim_ == 0) throw ValidationError("embedding dimensionality must be positive");
}

void EmbeddingSet::add(const std::string& id, EmbeddingVector values) {
  if (values.size() != dim_) {
    throw DimensionError("vector \"" + id + "\" has length " + std::to_string(values.size()) +
                         ", expected " + std::to_string(dim_));
  }
  for (const double x : values) {
    if (!std::isfinite(x)) throw ValidationError("vector \"" + id + "\" has a non-finite entry");
  }
  if (!vectors_.emplace(id, std::move(values)).second) {
    throw ValidationError("duplicate vector id \"" + id + "\"");
  }
}

const EmbeddingVector& EmbeddingSet::at(const std::string& id) const {
  const auto it = vectors_.find(id);
  if (it == vectors_.end()) throw ReferenceError(id, "no embedding for \"" + id + "\"");
  return it->second;
}

std::vector<std::string> EmbeddingSet::missing(const std::vector<std::string>& ids) const {
  std::vector<std::string> out;
  for (const auto& id : ids) {
    if (!contains(id)) out.push_back(id);
  }
  return out;
}

EmbeddingSet parse_embedding_set(const std::string& json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ParseError("byte " + std::to_string(e.byte), e.what());
  }
  if (!root.is_object()) throw ParseError("$", "embedding file must be a JSON object");
  if (!root.contains("format_version") || root["format_version"] != kEmbeddingFormatVersion) {
    throw ParseError("$.format_version", "unsupported embedding format version");
  }
  if (!root.contains("dim") || !root["dim"].is_number_integer() || root["dim"].get<long long>() <= 0) {
    throw ParseError("$.dim", "expected a positive integer");
  }
  const std::string provider =
      root.contains("provider") && root["provider"].is_string() ? root["provider"].get<std::string>() : "";
  EmbeddingSet set(root["dim"].get<std::size_t>(), provider);
  if (!root.contains("vectors") || !root["vectors"].is_object()) {
    throw ParseError("$.vectors", "expected an object of id -> array");
  }
  for (const auto& [id, values] : root["vectors"].items()) {
    if (!values.is_array()) throw ParseError("$.vectors." + id, "expected an array of numbers");
    EmbeddingVector v;
    v.reserve(values.size());
    for (const auto& x : values) {
      if (!x.is_number()) throw ParseError("$.vectors." + id, "expected numbers");
      v.push_back(x.get<double>());
    }
    set.add(id, std::move(v));
  }
  return set;
}

EmbeddingSet load_embedding_set(const std::filesystem::path& path) {
  return parse_embedding_set(read_file(path));
}

std::string embedding_set_to_json(const EmbeddingSet& set) {
  json root = json::object();
  root["format_version"] = kEmbeddingFormatVersion;
  root["dim"] = set.dim();
  root["provider"] = set.provider();
  json vectors = json::object();
  for (const auto& [id, v] : set.vectors()) vectors[id] = v;
  root["vectors"] = std::move(vectors);
  return root.dump() + "\n";
}

void save_embedding_set(const EmbeddingSet& set, const std::filesystem::path& path) {
  write_file(path, embedding_set_to_json(set));
}

EmbeddingVector hash_embed(std::string_view text, std::size_t dim, std::uint64_t seed) {
  if (dim < 8) throw ValidationError("hash embedding dimensionality must be at least 8");
  EmbeddingVector v(dim, 0.0);
  const std::uint64_t bucket_basis = mix64(seed);
  const std::uint64_t sign_basis = mix64(seed ^ 0x5bd1e9955bd1e995ULL);
  for (const auto& token : preprocess(text, PreprocessConfig::basic())) {
    const std::uint64_t bucket = mix64(fnv1a64(token) ^ bucket_basis) % dim;
    const bool negative = (mix64(fnv1a64(token) ^ sign_basis) >> 63) != 0;
    v[bucket] += negative ? -1.0 : 1.0;
  }
  const double norm = l2_norm(v);
  if (norm > 0.0) {
    for (double& x : v) x /= norm;
  }
  return v;
}

SimilarityMatrix::SimilarityMatrix(std::vector<std::string> req_ids,
                                   std::vector<std::string> prov_codes, std::vector<double> scores)
    : req_ids_(std::move(req_ids)), prov_codes_(std::move(prov_codes)), scores_(std::move(scores)) {
  if (scores_.size() != req_ids_.size() * prov_codes_.size()) {
    throw DimensionError("similarity grid has " + std::to_string(scores_.size()) +
                         " entries, expected " +
                         std::to_string(req_ids_.size() * prov_codes_.size()));
  }
  for (const double s : scores_) {
    if (!std::isfinite(s)) throw ValidationError("similarity matrix has a non-finite entry");
  }
}

SimilarityMatrix SimilarityMatrix::select_rows(const std::vector<std::string>& ids) const {
  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < req_ids_.size(); ++i) index.emplace(req_ids_[i], i);
  std::vector<double> scores;
  scores.reserve(ids.size() * cols());
  for (const auto& id : ids) {
    const auto it = index.find(id);
    if (it == index.end()) throw ReferenceError(id, "similarity matrix has no row \"" + id + "\"");
    const auto r = row(it->second);
    scores.insert(scores.end(), r.begin(), r.end());
  }
  return SimilarityMatrix(ids, prov_codes_, std::move(scores));
}

SimilarityMatrix build_similarity_matrix(const EmbeddingSet& reqs,
                                         const std::vector<std::string>& req_ids,
                                         const EmbeddingSet& provs,
                                         const std::vector<std::string>& codes,
                                         DegeneratePolicy policy) {
  if (reqs.dim() != provs.dim()) {
    throw DimensionError("requirement vectors have dimension " + std::to_string(reqs.dim()) +
                         " but provision vectors have " + std::to_string(provs.dim()));
  }
  std::vector<double> scores;
  scores.reserve(req_ids.size() * codes.size());
  for (const auto& id : req_ids) {
    const auto& u = reqs.at(id);
    for (const auto& code : codes) {
      try {
        scores.push_back(cosine(u, provs.at(code)));
      } catch (const DegenerateVectorError& e) {
        if (policy == DegeneratePolicy::kScoreZero) {
          scores.push_back(0.0);
          continue;
        }
        throw DegenerateVectorError(std::string(e.what()) + " (requirement \"" + id +
                                    "\", provision \"" + code + "\")");
      }
    }
  }
  return SimilarityMatrix(req_ids, codes, std::move(scores));
}

SimilarityMatrix max_pool_rows(const SimilarityMatrix& units, const std::vector<std::string>& parents,
                               const std::vector<std::string>& order) {
  if (parents.size() != units.rows()) throw DimensionError("one parent id per unit row is required");
  std::map<std::string, std::size_t> slot;
  for (std::size_t i = 0; i < order.size(); ++i) slot.emplace(order[i], i);
  const std::size_t m = units.cols();
  std::vector<double> scores(order.size() * m, -2.0);
  std::vector<bool> seen(order.size(), false);
  for (std::size_t u = 0; u < units.rows(); ++u) {
    const auto it = slot.find(parents[u]);
    if (it == slot.end()) throw ReferenceError(parents[u], "unit parent not in requirement order");
    seen[it->second] = true;
    for (std::size_t j = 0; j < m; ++j) {
      double& cell = scores[it->second * m + j];
      cell = std::max(cell, units.at(u, j));
    }
  }
  for (std::size_t i = 0; i < order.size(); ++i) {
    if (!seen[i]) throw ReferenceError(order[i], "requirement \"" + order[i] + "\" has no unit rows");
  }
  return SimilarityMatrix(order, units.prov_codes(), std::move(scores));
}

std::string similarity_matrix_to_json(const SimilarityMatrix& m) {
  json root = json::object();
  root["format_version"] = 1;
  root["req_ids"] = m.req_ids();
  root["prov_codes"] = m.prov_codes();
  json rows = json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    const auto r = m.row(i);
    rows.push_back(std::vector<double>(r.begin(), r.end()));
  }
  root["scores"] = std::move(rows);
  return root.dump() + "\n";
}

SimilarityMatrix parse_similarity_matrix(const std::string& json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ParseError("byte " + std::to_string(e.byte), e.what());
  }
  try {
    auto req_ids = root.at("req_ids").get<std::vector<std::string>>();
    auto codes = root.at("prov_codes").get<std::vector<std::string>>();
    const auto& rows = root.at("scores");
    if (!rows.is_array() || rows.size() != req_ids.size()) {
      throw ParseError("$.scores", "expected one row per requirement id");
    }
    std::vector<double> scores;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      auto r = rows[i].get<std::vector<double>>();
      if (r.size() != codes.size()) {
        throw ParseError("$.scores[" + std::to_string(i) + "]", "expected one score per provision");
      }
      scores.insert(scores.end(), r.begin(), r.end());
    }
    return SimilarityMatrix(std::move(req_ids), std::move(codes), std::move(scores));
  } catch (const json::exception& e) {
    throw ParseError("$", e.what());
  }
}

SimilarityMatrix load_similarity_matrix(const std::filesystem::path& path) {
  return parse_similarity_matrix(read_file(path));
}

void HttpProviderConfig::validate() const {
  if (endpoint_url.empty()) throw ValidationError("embedding endpoint URL is empty");
  if (batch_size < 1) throw ValidationError("batch_size must be at least 1");
  if (!(timeout_seconds > 0.0)) throw ValidationError("timeout_seconds must be positive");
  if (max_retries < 0) throw ValidationError("max_retries must be non-negative");
}

}  // namespace lrt
