#include "lrt/http.hpp"

#include <atomic>
#include <chrono>
#include <cstdlib>
#include <thread>

#include <httplib.h>

#include "lrt/error.hpp"

namespace lrt::http {

namespace {

std::atomic<std::uint64_t> g_requests{0};

bool transient(int status) { return status == 408 || status == 429 || status >= 500; }

}  // namespace

Url parse_url(const std::string& url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) throw ValidationError("not an absolute URL: \"" + url + "\"");
  const std::string scheme = url.substr(0, scheme_end);
  if (scheme != "http" && scheme != "https") {
    throw ValidationError("unsupported URL scheme \"" + scheme + "\"");
  }
  const auto path_start = url.find('/', scheme_end + 3);
  if (path_start == scheme_end + 3) throw ValidationError("URL has no host: \"" + url + "\"");
  Url out;
  out.scheme_host_port = url.substr(0, path_start);
  out.path = path_start == std::string::npos ? "/" : url.substr(path_start);
  return out;
}

std::string post_json(const std::string& url, const std::string& body,
                      const std::optional<std::string>& bearer_token, const RetryPolicy& policy) {
  const Url target = parse_url(url);
  httplib::Headers headers;
  if (bearer_token) headers.emplace("Authorization", "Bearer " + *bearer_token);

  const auto secs = static_cast<time_t>(policy.timeout_seconds);
  const auto usecs = static_cast<time_t>((policy.timeout_seconds - static_cast<double>(secs)) * 1e6);
  double backoff = policy.backoff_seconds;
  std::string last_error;
  for (int attempt = 0; attempt <= policy.max_retries; ++attempt) {
    if (attempt > 0) {
      std::this_thread::sleep_for(std::chrono::duration<double>(backoff));
      backoff *= 2.0;
    }
    httplib::Client client(target.scheme_host_port);
    client.set_connection_timeout(secs, usecs);
    client.set_read_timeout(secs, usecs);
    client.set_write_timeout(secs, usecs);
    ++g_requests;
    auto res = client.Post(target.path, headers, body, "application/json");
    if (!res) {
      last_error = "request to " + url + " failed: " + httplib::to_string(res.error());
      continue;
    }
    if (res->status >= 200 && res->status < 300) return res->body;
    if (res->status == 401 || res->status == 403) {
      throw AuthError("authentication rejected by " + url + " (HTTP " + std::to_string(res->status) + ")");
    }
    last_error = "HTTP " + std::to_string(res->status) + " from " + url;
    if (!transient(res->status)) throw TransportError(last_error);
  }
  throw TransportError(last_error + " after " + std::to_string(policy.max_retries) + " retries");
}

std::optional<std::string> api_key_from_env() {
  const char* key = std::getenv("LLM_API_KEY");
  if (key == nullptr || *key == '\0') return std::nullopt;
  return std::string(key);
}

std::uint64_t request_count() { return g_requests.load(); }

}  // namespace lrt::http
