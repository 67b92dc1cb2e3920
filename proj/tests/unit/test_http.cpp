#include <doctest.h>

#include <httplib.h>

#include <cstdlib>
#include <functional>
#include <mutex>
#include <thread>

#include <json.hpp>

#include "lrt/embeddings.hpp"
#include "lrt/error.hpp"
#include "lrt/http.hpp"
#include "lrt/llm.hpp"

using namespace lrt;
using nlohmann::json;

namespace {

// Local server answering POSTs with a scripted sequence of (status, body).
class StubServer {
 public:
  using Handler = std::function<std::pair<int, std::string>(int call, const std::string& body)>;

  explicit StubServer(Handler h) : handler_(std::move(h)) {
    server_.Post(R"(/.*)", [this](const httplib::Request& req, httplib::Response& res) {
      std::lock_guard<std::mutex> g(lock_);
      bodies_.push_back(req.body);
      if (req.has_header("Authorization")) auth_ = req.get_header_value("Authorization");
      const auto [status, body] = handler_(static_cast<int>(bodies_.size()), req.body);
      res.status = status;
      res.set_content(body, "application/json");
    });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~StubServer() {
    server_.stop();
    thread_.join();
  }

  std::string url(const std::string& path) const { return "http://127.0.0.1:" + std::to_string(port_) + path; }
  std::vector<std::string> bodies() {
    std::lock_guard<std::mutex> g(lock_);
    return bodies_;
  }
  std::string auth() {
    std::lock_guard<std::mutex> g(lock_);
    return auth_;
  }

 private:
  httplib::Server server_;
  Handler handler_;
  int port_ = 0;
  std::thread thread_;
  std::mutex lock_;
  std::vector<std::string> bodies_;
  std::string auth_;
};

std::string embedding_response(const json& request, std::size_t dim_of_last) {
  json data = json::array();
  const auto& input = request["input"];
  for (std::size_t i = 0; i < input.size(); ++i) {
    const std::size_t dim = i + 1 == input.size() ? dim_of_last : 3;
    std::vector<double> v(dim, 0.0);
    v[i % dim] = 1.0;
    data.push_back({{"index", i}, {"embedding", v}});
  }
  return json{{"data", data}}.dump();
}

HttpProviderConfig provider_config(const StubServer& s) {
  HttpProviderConfig c;
  c.endpoint_url = s.url("/v1/embeddings");
  c.model_name = "stub-model";
  c.batch_size = 2;
  c.backoff_seconds = 0.001;
  c.timeout_seconds = 5;
  return c;
}

const std::vector<std::pair<std::string, std::string>> kTexts{{"a", "first"}, {"b", "second"}, {"c", "third"}};

struct EnvKey {
  explicit EnvKey(const char* value) {
    if (value) {
      ::setenv("LLM_API_KEY", value, 1);
    } else {
      ::unsetenv("LLM_API_KEY");
    }
  }
  ~EnvKey() { ::unsetenv("LLM_API_KEY"); }
};

}  // namespace

TEST_CASE("url parsing") {
  const auto u = http::parse_url("http://127.0.0.1:8080/v1/embeddings");
  CHECK(u.scheme_host_port == "http://127.0.0.1:8080");
  CHECK(u.path == "/v1/embeddings");
  CHECK(http::parse_url("https://example.org").path == "/");
  CHECK_THROWS_AS(http::parse_url("ftp://x/y"), ValidationError);
  CHECK_THROWS_AS(http::parse_url("no-scheme"), ValidationError);
}

TEST_CASE("embedding fetch batches and keeps order") {
  StubServer s([](int, const std::string& body) {
    return std::pair{200, embedding_response(json::parse(body), 3)};
  });
  const EmbeddingSet e = fetch_embeddings(provider_config(s), kTexts);
  CHECK(e.dim() == 3);
  CHECK(e.provider() == "http:stub-model");
  CHECK(e.at("a") == std::vector<double>{1, 0, 0});
  CHECK(e.at("b") == std::vector<double>{0, 1, 0});
  CHECK(e.at("c") == std::vector<double>{1, 0, 0});
  const auto bodies = s.bodies();
  REQUIRE(bodies.size() == 2);
  CHECK(json::parse(bodies[0])["model"] == "stub-model");
  CHECK(json::parse(bodies[0])["input"] == json{"first", "second"});
  CHECK(json::parse(bodies[1])["input"] == json{"third"});
}

TEST_CASE("transient statuses are retried") {
  StubServer s([](int call, const std::string& body) {
    if (call <= 2) return std::pair{500, std::string("{}")};
    if (call == 3) return std::pair{429, std::string("{}")};
    return std::pair{200, embedding_response(json::parse(body), 3)};
  });
  const auto before = http::request_count();
  const EmbeddingSet e = fetch_embeddings(provider_config(s), kTexts);
  CHECK(e.size() == 3);
  CHECK(s.bodies().size() == 5);
  CHECK(http::request_count() - before == 5);
}

TEST_CASE("retries give up after the limit") {
  StubServer s([](int, const std::string&) { return std::pair{503, std::string("{}")}; });
  HttpProviderConfig c = provider_config(s);
  c.max_retries = 2;
  CHECK_THROWS_AS(fetch_embeddings(c, kTexts), TransportError);
  CHECK(s.bodies().size() == 3);
}

TEST_CASE("client errors are not retried") {
  StubServer s([](int, const std::string&) { return std::pair{400, std::string("{}")}; });
  CHECK_THROWS_AS(fetch_embeddings(provider_config(s), kTexts), TransportError);
  CHECK(s.bodies().size() == 1);
}

TEST_CASE("ragged embedding dimensions are rejected") {
  StubServer s([](int, const std::string& body) {
    return std::pair{200, embedding_response(json::parse(body), 4)};
  });
  CHECK_THROWS_AS(fetch_embeddings(provider_config(s), kTexts), DimensionError);
}

TEST_CASE("malformed embedding responses") {
  StubServer s([](int, const std::string&) { return std::pair{200, std::string(R"({"data": []})")}; });
  CHECK_THROWS_AS(fetch_embeddings(provider_config(s), kTexts), ResponseError);
}

TEST_CASE("chat completions carry the sampling configuration") {
  EnvKey key("secret-token");
  StubServer s([](int, const std::string&) {
    return std::pair{200, std::string(R"({"choices": [{"message": {"content": "<trace>yes</trace>"}}]})")};
  });
  LlmConfig c;
  c.endpoint_url = s.url("/v1/chat/completions");
  c.backoff_seconds = 0.001;
  HttpLlmClient client(c);
  CHECK(client.complete("Is there a link?") == "<trace>yes</trace>");
  const json body = json::parse(s.bodies().at(0));
  CHECK(body["model"] == "gpt-4o");
  CHECK(body["temperature"] == 0.0);
  CHECK(body["seed"] == 16);
  CHECK(body["max_tokens"] == 2000);
  CHECK(body["messages"][0]["content"] == "Is there a link?");
  CHECK(s.auth() == "Bearer secret-token");
}

TEST_CASE("authentication failures") {
  StubServer s([](int, const std::string&) { return std::pair{401, std::string("{}")}; });
  LlmConfig c;
  c.endpoint_url = s.url("/v1/chat/completions");
  {
    EnvKey key("wrong");
    HttpLlmClient client(c);
    CHECK_THROWS_AS(client.complete("x"), AuthError);
    CHECK(s.bodies().size() == 1);
  }
  {
    EnvKey key(nullptr);
    HttpLlmClient client(c);
    const auto before = http::request_count();
    CHECK_THROWS_AS(client.complete("x"), AuthError);
    CHECK(http::request_count() == before);
  }
}
