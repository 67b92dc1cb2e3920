#include "lrt/baselines/lsi.hpp"

#include <cmath>

#include <json.hpp>

#include "lrt/error.hpp"
#include "model_json.hpp"

namespace lrt {

using nlohmann::json;

DenseMatrix LsiModel::reconstruct() const {
  DenseMatrix out(doc_coordinates.rows, term_projection.rows);
  for (std::size_t i = 0; i < out.rows; ++i) {
    for (std::size_t j = 0; j < out.cols; ++j) {
      double s = 0.0;
      for (std::size_t c = 0; c < k; ++c) s += doc_coordinates(i, c) * singular_values[c] * term_projection(j, c);
      out(i, j) = s;
    }
  }
  return out;
}

LsiModel fit_lsi(const DenseMatrix& tfidf_matrix, std::size_t k) {
  const std::size_t limit = std::min(tfidf_matrix.rows, tfidf_matrix.cols);
  if (k == 0 || k > limit) {
    throw ValidationError("LSI needs 1 <= k <= " + std::to_string(limit) + ", got " + std::to_string(k));
  }
  const SvdResult svd = jacobi_svd(tfidf_matrix);
  LsiModel model;
  model.k = k;
  model.singular_values.assign(svd.singular_values.begin(), svd.singular_values.begin() + static_cast<long>(k));
  model.term_projection = DenseMatrix(svd.v.rows, k);
  for (std::size_t i = 0; i < svd.v.rows; ++i) {
    for (std::size_t c = 0; c < k; ++c) model.term_projection(i, c) = svd.v(i, c);
  }
  model.doc_coordinates = DenseMatrix(svd.u.rows, k);
  for (std::size_t i = 0; i < svd.u.rows; ++i) {
    for (std::size_t c = 0; c < k; ++c) model.doc_coordinates(i, c) = svd.u(i, c);
  }
  return model;
}

namespace {

bool zero_singular(const LsiModel& model, std::size_t c) {
  const double largest = model.singular_values.empty() ? 0.0 : model.singular_values.front();
  return model.singular_values[c] <= kSvdTolerance * std::max(largest, 1.0);
}

}  // namespace

std::vector<double> lsi_fold_in(const LsiModel& model, std::span<const double> term_vector) {
  if (term_vector.size() != model.term_projection.rows) {
    throw DimensionError("query has " + std::to_string(term_vector.size()) + " terms, model has " +
                         std::to_string(model.term_projection.rows));
  }
  std::vector<double> out(model.k, 0.0);
  for (std::size_t c = 0; c < model.k; ++c) {
    if (zero_singular(model, c)) continue;
    double s = 0.0;
    for (std::size_t t = 0; t < term_vector.size(); ++t) s += term_vector[t] * model.term_projection(t, c);
    out[c] = s / model.singular_values[c];
  }
  return out;
}

SimilarityMatrix lsi_similarity_matrix(const LsiModel& model, const EmbeddingSet& req_vectors,
                                       const std::vector<std::string>& req_ids,
                                       const EmbeddingSet& prov_vectors,
                                       const std::vector<std::string>& codes, DegeneratePolicy policy) {
  const auto latent = [&](const EmbeddingSet& src, const std::vector<std::string>& ids) {
    EmbeddingSet out(model.k, "lsi");
    for (const auto& id : ids) {
      auto q = lsi_fold_in(model, src.at(id));
      for (std::size_t c = 0; c < model.k; ++c) q[c] *= model.singular_values[c];
      out.add(id, std::move(q));
    }
    return out;
  };
  return build_similarity_matrix(latent(req_vectors, req_ids), req_ids, latent(prov_vectors, codes), codes,
                                 policy);
}

namespace {

json matrix_to_json(const DenseMatrix& m) {
  return json{{"rows", m.rows}, {"cols", m.cols}, {"data", m.data}};
}

DenseMatrix matrix_from_json(const json& j) {
  DenseMatrix m(j.at("rows").get<std::size_t>(), j.at("cols").get<std::size_t>());
  m.data = j.at("data").get<std::vector<double>>();
  if (m.data.size() != m.rows * m.cols) throw ValidationError("matrix data does not match its shape");
  return m;
}

}  // namespace

std::string lsi_model_to_json(const LsiModel& model) {
  json root;
  root["format_version"] = 1;
  root["kind"] = "lsi";
  root["k"] = model.k;
  root["singular_values"] = model.singular_values;
  root["term_projection"] = matrix_to_json(model.term_projection);
  root["doc_coordinates"] = matrix_to_json(model.doc_coordinates);
  return root.dump(2) + "\n";
}

LsiModel parse_lsi_model(const std::string& json_text) {
  const json root = detail::parse_model_json(json_text, "lsi");
  LsiModel model;
  try {
    model.k = root.at("k").get<std::size_t>();
    model.singular_values = root.at("singular_values").get<std::vector<double>>();
    model.term_projection = matrix_from_json(root.at("term_projection"));
    model.doc_coordinates = matrix_from_json(root.at("doc_coordinates"));
  } catch (const json::exception& e) {
    throw ParseError("lsi model", e.what());
  }
  if (model.singular_values.size() != model.k || model.term_projection.cols != model.k ||
      model.doc_coordinates.cols != model.k) {
    throw ValidationError("LSI model parts disagree on k");
  }
  for (std::size_t c = 0; c < model.k; ++c) {
    if (model.singular_values[c] < 0.0 || (c > 0 && model.singular_values[c] > model.singular_values[c - 1])) {
      throw ValidationError("singular values must be non-negative and non-increasing");
    }
  }
  return model;
}

}  // namespace lrt
