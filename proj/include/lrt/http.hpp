#pragma once

#include <cstdint>
#include <optional>
#include <string>

namespace lrt::http {

struct Url {
  std::string scheme_host_port;  // e.g. "http://127.0.0.1:8080"
  std::string path;              // e.g. "/v1/embeddings"
};

// Splits an absolute http(s) URL; throws ValidationError otherwise.
Url parse_url(const std::string& url);

struct RetryPolicy {
  int max_retries = 3;
  double timeout_seconds = 60.0;
  double backoff_seconds = 0.5;
};

// POSTs a JSON body and returns the 2xx response body. Connection failures,
// 408, 429 and 5xx are retried up to max_retries times with exponential
// backoff; 401/403 raise AuthError immediately; other statuses raise
// TransportError.
std::string post_json(const std::string& url, const std::string& body,
                      const std::optional<std::string>& bearer_token, const RetryPolicy& policy);

// Value of LLM_API_KEY, if set and non-empty.
std::optional<std::string> api_key_from_env();

// Number of HTTP requests attempted by this process.
std::uint64_t request_count();

}  // namespace lrt::http
