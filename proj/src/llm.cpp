#include "lrt/llm.hpp"

#include <atomic>
#include <fstream>
#include <mutex>
#include <thread>

#include "lrt/error.hpp"
#include "lrt/http.hpp"
#include "lrt/manifest.hpp"

namespace lrt {

using nlohmann::json;

void LlmConfig::validate() const {
  if (!(temperature >= 0.0)) throw ValidationError("temperature must be >= 0");
  if (max_tokens <= 0) throw ValidationError("max_tokens must be positive");
  if (!(top_p > 0.0 && top_p <= 1.0)) throw ValidationError("top_p must lie in (0, 1]");
  if (max_retries < 0) throw ValidationError("max_retries must be non-negative");
  if (!(timeout_seconds > 0.0)) throw ValidationError("timeout must be positive");
  if (model_name.empty()) throw ValidationError("model name must be non-empty");
}

json llm_config_to_json(const LlmConfig& c) {
  return json{{"endpoint_url", c.endpoint_url},
              {"model", c.model_name},
              {"temperature", c.temperature},
              {"seed", c.seed},
              {"max_tokens", c.max_tokens},
              {"frequency_penalty", c.frequency_penalty},
              {"presence_penalty", c.presence_penalty},
              {"top_p", c.top_p},
              {"max_retries", c.max_retries}};
}

json chat_request_body(const LlmConfig& config, const std::string& prompt) {
  return json{{"model", config.model_name},
              {"messages", json::array({json{{"role", "user"}, {"content", prompt}}})},
              {"temperature", config.temperature},
              {"seed", config.seed},
              {"max_tokens", config.max_tokens},
              {"frequency_penalty", config.frequency_penalty},
              {"presence_penalty", config.presence_penalty},
              {"top_p", config.top_p}};
}

std::string parse_chat_response(const std::string& body) {
  json root;
  try {
    root = json::parse(body);
  } catch (const json::parse_error& e) {
    throw ResponseError(std::string("chat response is not JSON: ") + e.what());
  }
  const json* content = nullptr;
  if (root.is_object() && root.contains("choices") && root["choices"].is_array() && !root["choices"].empty()) {
    const auto& first = root["choices"][0];
    if (first.is_object() && first.contains("message") && first["message"].is_object() &&
        first["message"].contains("content") && first["message"]["content"].is_string()) {
      content = &first["message"]["content"];
    }
  }
  if (content == nullptr) throw ResponseError("chat response lacks choices[0].message.content");
  return content->get<std::string>();
}

HttpLlmClient::HttpLlmClient(LlmConfig config) : config_(std::move(config)) { config_.validate(); }

std::string HttpLlmClient::complete(const std::string& prompt) {
  const auto token = http::api_key_from_env();
  if (!token) throw AuthError("LLM_API_KEY is not set");
  const http::RetryPolicy policy{config_.max_retries, config_.timeout_seconds, config_.backoff_seconds};
  const std::string body = http::post_json(config_.endpoint_url, chat_request_body(config_, prompt).dump(), token,
                                           policy);
  return parse_chat_response(body);
}

std::string OfflineLlmClient::complete(const std::string&) {
  throw TransportError("no recorded response for this prompt and network access is disabled");
}

std::string query_llm(const LlmConfig& config, const std::string& prompt) {
  HttpLlmClient client(config);
  return client.complete(prompt);
}

json transcript_record_to_json(const TranscriptRecord& r) {
  return json{{"variant", r.variant},   {"req_id", r.req_id},         {"prov_code", r.prov_code},
              {"prompt", r.prompt},     {"response", r.response},     {"ok", r.ok},
              {"error", r.error},       {"parsed", r.parsed},         {"config", r.config},
              {"started_at", r.started_at}, {"finished_at", r.finished_at}};
}

TranscriptRecord transcript_record_from_json(const json& j) {
  TranscriptRecord r;
  r.variant = j.at("variant").get<std::string>();
  r.req_id = j.at("req_id").get<std::string>();
  r.prov_code = j.value("prov_code", std::string());
  r.prompt = j.value("prompt", std::string());
  r.response = j.value("response", std::string());
  r.ok = j.value("ok", false);
  r.error = j.value("error", std::string());
  r.parsed = j.value("parsed", json());
  r.config = j.value("config", json());
  r.started_at = j.value("started_at", std::string());
  r.finished_at = j.value("finished_at", std::string());
  return r;
}

Transcript::Transcript(std::filesystem::path path) : path_(std::move(path)) {
  if (!std::filesystem::exists(*path_)) return;
  std::ifstream in(*path_);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      records_.push_back(transcript_record_from_json(json::parse(line)));
    } catch (const json::exception& e) {
      throw ParseError(path_->string() + ":" + std::to_string(line_no), e.what());
    }
    if (records_.back().ok) latest_ok_[records_.back().key()] = records_.size() - 1;
  }
}

std::optional<std::string> Transcript::cached_response(const TranscriptKey& key) const {
  const auto it = latest_ok_.find(key);
  if (it == latest_ok_.end()) return std::nullopt;
  return records_[it->second].response;
}

void Transcript::append(const TranscriptRecord& record) {
  records_.push_back(record);
  if (record.ok) latest_ok_[record.key()] = records_.size() - 1;
  if (path_) {
    if (path_->has_parent_path()) std::filesystem::create_directories(path_->parent_path());
    std::ofstream out(*path_, std::ios::app);
    if (!out) throw Error("cannot append to transcript " + path_->string());
    out << transcript_record_to_json(record).dump() << '\n';
  }
}

namespace {

std::vector<std::string> run_req_ids(const Corpus& corpus, const PromptRunOptions& options) {
  if (options.req_ids.empty()) return corpus.requirement_ids();
  for (const auto& id : options.req_ids) corpus.requirement(id);
  return options.req_ids;
}

}  // namespace

std::vector<PromptItem> render_prompts(const Corpus& corpus, const PromptRunOptions& options,
                                       const EmbeddingSet* req_embeddings, const EmbeddingSet* prov_embeddings) {
  const auto ids = run_req_ids(corpus, options);
  std::vector<PromptItem> items;
  switch (options.variant) {
    case PromptVariant::kRice: {
      const auto catalog = with_else_sentinel(corpus.catalog());
      for (const auto& id : ids) {
        items.push_back({id, "", build_rice_prompt(catalog, options.examples, corpus.requirement(id),
                                                   options.regulation)});
      }
      break;
    }
    case PromptVariant::kP2:
      for (const auto& id : ids) {
        items.push_back({id, "", build_p2_prompt(corpus.requirement(id), corpus.catalog(), options.regulation)});
      }
      break;
    case PromptVariant::kP1: {
      const bool all = options.top_k >= corpus.catalog().size();
      if (!all && (req_embeddings == nullptr || prov_embeddings == nullptr)) {
        throw ValidationError("P1 with k below the catalog size needs requirement and provision embeddings");
      }
      for (const auto& id : ids) {
        std::vector<std::string> candidates;
        if (all) {
          candidates = corpus.codes();
        } else {
          candidates = retrieve_topk(req_embeddings->at(id), *prov_embeddings, options.top_k);
        }
        for (const auto& code : candidates) {
          items.push_back({id, code, build_p1_prompt(corpus.requirement(id), corpus.provision(code),
                                                     options.regulation)});
        }
      }
      break;
    }
    case PromptVariant::kP3_1:
    case PromptVariant::kP3_2:
      for (const auto& id : ids) {
        for (const auto& p : corpus.catalog()) {
          items.push_back({id, p.code, build_p3_prompt(options.variant, corpus.requirement(id), p,
                                                       options.regulation)});
        }
      }
      break;
  }
  return items;
}

PromptRunResult run_prompt_strategy(const Corpus& corpus, LlmClient& client, const PromptRunOptions& options,
                                    Transcript* transcript, const EmbeddingSet* req_embeddings,
                                    const EmbeddingSet* prov_embeddings) {
  const auto items = render_prompts(corpus, options, req_embeddings, prov_embeddings);
  const std::string variant = to_string(options.variant);
  const auto codes = corpus.codes();

  struct Outcome {
    bool failed = false;
    std::string error;
    bool linked = false;
    std::set<std::string> codes;
    std::string rationale;
  };
  std::vector<Outcome> outcomes(items.size());
  std::mutex lock;
  std::atomic<std::size_t> next{0};
  std::atomic<std::size_t> issued{0};
  std::atomic<std::size_t> hits{0};

  const auto work = [&](std::size_t i) {
    const PromptItem& item = items[i];
    TranscriptRecord rec;
    rec.variant = variant;
    rec.req_id = item.req_id;
    rec.prov_code = item.prov_code;
    rec.prompt = item.prompt;
    rec.config = options.config_snapshot;

    std::optional<std::string> response;
    if (transcript != nullptr) {
      std::lock_guard<std::mutex> g(lock);
      response = transcript->cached_response(rec.key());
    }
    const bool cached = response.has_value();
    Outcome& out = outcomes[i];
    if (cached) {
      ++hits;
    } else {
      rec.started_at = utc_timestamp();
      ++issued;
      try {
        response = client.complete(item.prompt);
      } catch (const std::exception& e) {
        out.failed = true;
        out.error = e.what();
      }
      rec.finished_at = utc_timestamp();
    }
    if (response) {
      rec.response = *response;
      rec.ok = true;
      try {
        if (options.variant == PromptVariant::kRice || options.variant == PromptVariant::kP2) {
          const ParsedPrediction parsed = parse_code_list(*response, codes);
          out.codes = parsed.codes;
          out.rationale = parsed.rationale;
          rec.parsed = json{{"codes", parsed.codes}, {"else", parsed.else_sentinel}};
        } else {
          out.linked = options.variant == PromptVariant::kP1 ? parse_trace_tag(*response) : parse_yes_no(*response);
          rec.parsed = json{{"linked", out.linked}};
        }
      } catch (const std::exception& e) {
        out.failed = true;
        out.error = e.what();
        rec.parsed = json{{"error", out.error}};
      }
    } else {
      rec.error = out.error;
    }
    if (transcript != nullptr && !cached) {
      std::lock_guard<std::mutex> g(lock);
      transcript->append(rec);
    }
  };

  const std::size_t workers = std::max<std::size_t>(1, std::min(options.parallelism, items.size()));
  if (workers == 1) {
    for (std::size_t i = 0; i < items.size(); ++i) work(i);
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < items.size(); i = next++) work(i);
      });
    }
    for (auto& t : pool) t.join();
  }

  PromptRunResult result;
  result.predictions.strategy_tag = "prompt:" + variant;
  for (const auto& id : run_req_ids(corpus, options)) result.predictions.predictions[id];
  for (std::size_t i = 0; i < items.size(); ++i) {
    const auto& item = items[i];
    const auto& out = outcomes[i];
    if (out.failed) {
      result.failures.push_back({item.req_id, item.prov_code, out.error});
      continue;
    }
    auto& linked = result.predictions.predictions[item.req_id];
    if (is_pairwise(options.variant)) {
      if (out.linked) linked.insert(item.prov_code);
    } else {
      linked.insert(out.codes.begin(), out.codes.end());
      result.rationales[item.req_id] = out.rationale;
    }
  }
  result.requests_issued = issued.load();
  result.cache_hits = hits.load();
  return result;
}

}  // namespace lrt
