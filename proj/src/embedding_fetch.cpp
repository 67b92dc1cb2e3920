#include <algorithm>

#include <json.hpp>

#include "lrt/embeddings.hpp"
#include "lrt/error.hpp"
#include "lrt/http.hpp"

namespace lrt {

using nlohmann::json;

EmbeddingSet fetch_embeddings(const HttpProviderConfig& config,
                              const std::vector<std::pair<std::string, std::string>>& texts) {
  config.validate();
  const http::RetryPolicy policy{config.max_retries, config.timeout_seconds, config.backoff_seconds};
  const auto token = http::api_key_from_env();

  std::optional<EmbeddingSet> out;
  for (std::size_t begin = 0; begin < texts.size(); begin += config.batch_size) {
    const std::size_t end = std::min(texts.size(), begin + config.batch_size);
    json input = json::array();
    for (std::size_t i = begin; i < end; ++i) input.push_back(texts[i].second);
    const json request = {{"model", config.model_name}, {"input", std::move(input)}};
    const std::string body = http::post_json(config.endpoint_url, request.dump(), token, policy);

    json response;
    try {
      response = json::parse(body);
    } catch (const json::parse_error& e) {
      throw ResponseError(std::string("embedding response is not JSON: ") + e.what());
    }
    if (!response.is_object() || !response.contains("data") || !response["data"].is_array()) {
      throw ResponseError("embedding response lacks a \"data\" array");
    }
    const auto& data = response["data"];
    if (data.size() != end - begin) {
      throw ResponseError("embedding response has " + std::to_string(data.size()) +
                          " items for a batch of " + std::to_string(end - begin));
    }
    std::vector<std::optional<EmbeddingVector>> batch(end - begin);
    for (const auto& item : data) {
      if (!item.is_object() || !item.contains("index") || !item["index"].is_number_integer() ||
          !item.contains("embedding") || !item["embedding"].is_array()) {
        throw ResponseError("embedding item lacks \"index\" or \"embedding\"");
      }
      const auto index = item["index"].get<long long>();
      if (index < 0 || static_cast<std::size_t>(index) >= batch.size() || batch[index]) {
        throw ResponseError("embedding item has an invalid or repeated index " + std::to_string(index));
      }
      EmbeddingVector v;
      for (const auto& x : item["embedding"]) {
        if (!x.is_number()) throw ResponseError("embedding values must be numbers");
        v.push_back(x.get<double>());
      }
      batch[index] = std::move(v);
    }
    for (std::size_t k = 0; k < batch.size(); ++k) {
      const auto& id = texts[begin + k].first;
      if (!out) {
        if (batch[k]->empty()) throw DimensionError("empty embedding for \"" + id + "\"");
        out.emplace(batch[k]->size(), "http:" + config.model_name);
      }
      if (batch[k]->size() != out->dim()) {
        throw DimensionError("inconsistent embedding dimension for \"" + id + "\": " +
                             std::to_string(batch[k]->size()) + " vs " + std::to_string(out->dim()));
      }
      out->add(id, std::move(*batch[k]));
    }
  }
  if (!out) throw ValidationError("no texts to embed");
  return std::move(*out);
}

}  // namespace lrt
