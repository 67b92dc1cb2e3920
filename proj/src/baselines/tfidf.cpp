#include "lrt/baselines/tfidf.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include <json.hpp>

#include "lrt/error.hpp"
#include "model_json.hpp"

namespace lrt {

using nlohmann::json;

std::optional<std::size_t> TfIdfModel::index_of(const std::string& term) const {
  const auto it = std::lower_bound(vocabulary.begin(), vocabulary.end(), term);
  if (it == vocabulary.end() || *it != term) return std::nullopt;
  return static_cast<std::size_t>(it - vocabulary.begin());
}

TfIdfModel fit_tfidf(const std::vector<std::vector<std::string>>& docs, std::optional<double> max_df,
                     PreprocessConfig config) {
  if (max_df && !(*max_df > 0.0 && *max_df <= 1.0)) throw ValidationError("max_df must lie in (0, 1]");
  std::map<std::string, std::size_t> df;
  bool any = false;
  for (const auto& doc : docs) {
    const std::set<std::string> distinct(doc.begin(), doc.end());
    any = any || !distinct.empty();
    for (const auto& t : distinct) ++df[t];
  }
  if (!any) throw ValidationError("cannot fit TF-IDF on an all-empty corpus");
  const double n = static_cast<double>(docs.size());
  TfIdfModel model;
  model.config = std::move(config);
  model.max_df_cutoff = max_df;
  for (const auto& [term, count] : df) {
    if (max_df && static_cast<double>(count) / n > *max_df) continue;
    model.vocabulary.push_back(term);
    model.idf.push_back(std::log((1.0 + n) / (1.0 + static_cast<double>(count))) + 1.0);
  }
  return model;
}

SparseVector tfidf_vector(const TfIdfModel& model, const std::vector<std::string>& tokens) {
  std::map<std::size_t, double> tf;
  for (const auto& t : tokens) {
    if (const auto idx = model.index_of(t)) tf[*idx] += 1.0;
  }
  SparseVector out;
  double norm2 = 0.0;
  for (const auto& [idx, count] : tf) {
    const double w = count * model.idf[idx];
    out.entries.emplace_back(idx, w);
    norm2 += w * w;
  }
  if (norm2 == 0.0) {
    out.entries.clear();
    return out;
  }
  const double norm = std::sqrt(norm2);
  for (auto& [idx, w] : out.entries) w /= norm;
  return out;
}

std::vector<double> to_dense(const SparseVector& v, std::size_t dim) {
  std::vector<double> out(dim, 0.0);
  for (const auto& [idx, w] : v.entries) {
    if (idx >= dim) throw DimensionError("sparse index exceeds dense dimension");
    out[idx] = w;
  }
  return out;
}

double sparse_cosine(const SparseVector& a, const SparseVector& b) {
  if (a.degenerate() || b.degenerate()) throw DegenerateVectorError("cosine of an empty TF-IDF vector");
  double dot = 0.0;
  double na = 0.0;
  double nb = 0.0;
  for (const auto& [i, w] : a.entries) na += w * w;
  for (const auto& [i, w] : b.entries) nb += w * w;
  auto ia = a.entries.begin();
  auto ib = b.entries.begin();
  while (ia != a.entries.end() && ib != b.entries.end()) {
    if (ia->first < ib->first) {
      ++ia;
    } else if (ib->first < ia->first) {
      ++ib;
    } else {
      dot += ia->second * ib->second;
      ++ia;
      ++ib;
    }
  }
  return std::clamp(dot / (std::sqrt(na) * std::sqrt(nb)), -1.0, 1.0);
}

EmbeddingSet tfidf_embedding_set(const TfIdfModel& model,
                                 const std::vector<std::pair<std::string, std::vector<std::string>>>& docs) {
  EmbeddingSet out(model.vocabulary.size(), "tfidf");
  for (const auto& [id, tokens] : docs) out.add(id, to_dense(tfidf_vector(model, tokens), model.vocabulary.size()));
  return out;
}

std::string tfidf_model_to_json(const TfIdfModel& model) {
  json root;
  root["format_version"] = 1;
  root["kind"] = "tfidf";
  root["config"] = detail::config_to_json(model.config);
  root["max_df"] = model.max_df_cutoff ? json(*model.max_df_cutoff) : json(nullptr);
  root["vocabulary"] = model.vocabulary;
  root["idf"] = model.idf;
  return root.dump(2) + "\n";
}

TfIdfModel parse_tfidf_model(const std::string& json_text) {
  const json root = detail::parse_model_json(json_text, "tfidf");
  TfIdfModel model;
  try {
    model.config = detail::config_from_json(root.at("config"));
    if (!root.at("max_df").is_null()) model.max_df_cutoff = root.at("max_df").get<double>();
    model.vocabulary = root.at("vocabulary").get<std::vector<std::string>>();
    model.idf = root.at("idf").get<std::vector<double>>();
  } catch (const json::exception& e) {
    throw ParseError("tfidf model", e.what());
  }
  if (model.vocabulary.size() != model.idf.size()) throw ValidationError("vocabulary and idf differ in length");
  if (!std::is_sorted(model.vocabulary.begin(), model.vocabulary.end()) ||
      std::adjacent_find(model.vocabulary.begin(), model.vocabulary.end()) != model.vocabulary.end()) {
    throw ValidationError("vocabulary must be sorted and unique");
  }
  for (const double w : model.idf) {
    if (!std::isfinite(w) || w < 0.0) throw ValidationError("idf weights must be finite and non-negative");
  }
  return model;
}

}  // namespace lrt
