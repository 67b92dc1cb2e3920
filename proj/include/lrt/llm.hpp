#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include <json.hpp>

#include "lrt/corpus.hpp"
#include "lrt/embeddings.hpp"
#include "lrt/prediction.hpp"
#include "lrt/prompting.hpp"

namespace lrt {

struct LlmConfig {
  std::string endpoint_url = "https://api.openai.com/v1/chat/completions";
  std::string model_name = "gpt-4o";
  double temperature = 0.0;
  std::int64_t seed = 16;
  int max_tokens = 2000;
  double frequency_penalty = 0.0;
  double presence_penalty = 0.0;
  double top_p = 1.0;
  int max_retries = 3;
  double timeout_seconds = 120.0;
  double backoff_seconds = 1.0;

  // Throws ValidationError for temperature < 0, max_tokens <= 0, top_p
  // outside (0, 1] or a negative retry count.
  void validate() const;
};

nlohmann::json llm_config_to_json(const LlmConfig& c);

// Chat-completion body: one user message carrying `prompt` plus every
// sampling field of `config`.
nlohmann::json chat_request_body(const LlmConfig& config, const std::string& prompt);

// choices[0].message.content; throws ResponseError on any other shape.
std::string parse_chat_response(const std::string& body);

class LlmClient {
 public:
  virtual ~LlmClient() = default;
  virtual std::string complete(const std::string& prompt) = 0;
};

// Sends requests to config.endpoint_url with the LLM_API_KEY bearer token.
class HttpLlmClient : public LlmClient {
 public:
  explicit HttpLlmClient(LlmConfig config);
  std::string complete(const std::string& prompt) override;

 private:
  LlmConfig config_;
};

// Answers through a callback; used for stubs and tests.
class CallbackLlmClient : public LlmClient {
 public:
  explicit CallbackLlmClient(std::function<std::string(const std::string&)> fn) : fn_(std::move(fn)) {}
  std::string complete(const std::string& prompt) override { return fn_(prompt); }

 private:
  std::function<std::string(const std::string&)> fn_;
};

// Refuses every request; pairs with a transcript to replay a recorded run.
class OfflineLlmClient : public LlmClient {
 public:
  std::string complete(const std::string& prompt) override;
};

// A single chat completion with `config`.
std::string query_llm(const LlmConfig& config, const std::string& prompt);

// (variant, requirement id, provision code); the code is empty for
// per-requirement variants.
using TranscriptKey = std::tuple<std::string, std::string, std::string>;

struct TranscriptRecord {
  std::string variant;
  std::string req_id;
  std::string prov_code;
  std::string prompt;
  std::string response;
  bool ok = false;
  std::string error;
  nlohmann::json parsed;
  nlohmann::json config;
  std::string started_at;
  std::string finished_at;

  TranscriptKey key() const { return {variant, req_id, prov_code}; }
};

nlohmann::json transcript_record_to_json(const TranscriptRecord& r);
TranscriptRecord transcript_record_from_json(const nlohmann::json& j);

// JSON-lines log of requests. Later records for a key supersede earlier ones.
class Transcript {
 public:
  Transcript() = default;
  // Loads existing records (if the file exists) and appends new ones to it.
  explicit Transcript(std::filesystem::path path);

  // Most recent successful response for `key`.
  std::optional<std::string> cached_response(const TranscriptKey& key) const;
  void append(const TranscriptRecord& record);
  const std::vector<TranscriptRecord>& records() const { return records_; }

 private:
  std::optional<std::filesystem::path> path_;
  std::vector<TranscriptRecord> records_;
  std::map<TranscriptKey, std::size_t> latest_ok_;
};

struct PromptRunOptions {
  PromptVariant variant = PromptVariant::kRice;
  std::vector<std::string> req_ids;  // empty: every requirement in the corpus
  std::vector<FewShotExample> examples;  // RICE only
  std::size_t top_k = 26;  // P1 only
  std::string regulation = kDefaultRegulation;
  std::size_t parallelism = 1;
  nlohmann::json config_snapshot;  // stored with each transcript record
};

struct ItemFailure {
  std::string req_id;
  std::string prov_code;
  std::string error;
};

struct PromptRunResult {
  PredictionSet predictions;
  std::map<std::string, std::string> rationales;
  std::vector<ItemFailure> failures;
  std::size_t requests_issued = 0;
  std::size_t cache_hits = 0;
};

// One prompt per work item, rendered in requirement / candidate order.
struct PromptItem {
  std::string req_id;
  std::string prov_code;
  std::string prompt;
};

// Renders every prompt of a run without sending anything. P1 needs
// `req_embeddings` and `prov_embeddings` for top-k retrieval.
std::vector<PromptItem> render_prompts(const Corpus& corpus, const PromptRunOptions& options,
                                       const EmbeddingSet* req_embeddings = nullptr,
                                       const EmbeddingSet* prov_embeddings = nullptr);

// Sends each item (or reuses a cached transcript response), parses the
// answers and aggregates them per requirement. Failures are recorded per
// item and do not stop the batch.
PromptRunResult run_prompt_strategy(const Corpus& corpus, LlmClient& client, const PromptRunOptions& options,
                                    Transcript* transcript = nullptr, const EmbeddingSet* req_embeddings = nullptr,
                                    const EmbeddingSet* prov_embeddings = nullptr);

}  // namespace lrt
