#include <doctest.h>

#include <atomic>
#include <mutex>

#include "lrt/error.hpp"
#include "lrt/llm.hpp"
#include "support.hpp"

using namespace lrt;

namespace {

PromptRunOptions rice_options() {
  PromptRunOptions o;
  o.variant = PromptVariant::kRice;
  o.examples = load_examples(test::source_path("fixtures/examples.json"));
  return o;
}

// Answers every RICE prompt with the ground truth codes of the requirement it
// ends with.
std::string oracle_answer(const Corpus& c, const std::string& prompt) {
  for (const auto& id : c.requirement_ids()) {
    const std::string& text = c.requirement(id).text;
    if (prompt.size() >= text.size() + 1 && prompt.compare(prompt.size() - text.size() - 1, text.size(), text) == 0) {
      const auto codes = c.ground_truth().codes(id);
      if (codes.empty()) return "Trace links: [ELSE]\nRationale: none.";
      return render_example_output(codes, "from " + id);
    }
  }
  return "?";
}

}  // namespace

TEST_CASE("config validation and request body") {
  LlmConfig c;
  CHECK_NOTHROW(c.validate());
  const auto body = chat_request_body(c, "hello");
  CHECK(body["temperature"] == 0.0);
  CHECK(body["seed"] == 16);
  CHECK(body["max_tokens"] == 2000);
  CHECK(body["messages"][0]["role"] == "user");
  CHECK(body["messages"][0]["content"] == "hello");
  LlmConfig bad = c;
  bad.temperature = -1;
  CHECK_THROWS_AS(bad.validate(), ValidationError);
  bad = c;
  bad.max_tokens = 0;
  CHECK_THROWS_AS(bad.validate(), ValidationError);
  bad = c;
  bad.top_p = 0.0;
  CHECK_THROWS_AS(bad.validate(), ValidationError);
  CHECK(llm_config_to_json(c)["model"] == c.model_name);
}

TEST_CASE("chat response parsing") {
  CHECK(parse_chat_response(R"({"choices": [{"message": {"content": "hi"}}]})") == "hi");
  CHECK_THROWS_AS(parse_chat_response("not json"), ResponseError);
  CHECK_THROWS_AS(parse_chat_response(R"({"choices": []})"), ResponseError);
}

TEST_CASE("RICE run with a stub client aggregates per requirement") {
  const Corpus c = test::fixture_corpus();
  std::atomic<int> calls{0};
  CallbackLlmClient stub([&](const std::string& p) {
    ++calls;
    return oracle_answer(c, p);
  });
  const PromptRunResult r = run_prompt_strategy(c, stub, rice_options());
  CHECK(calls == 10);
  CHECK(r.requests_issued == 10);
  CHECK(r.failures.empty());
  for (const auto& id : c.requirement_ids()) CHECK(r.predictions.codes(id) == c.ground_truth().codes(id));
  CHECK(r.rationales.at("HP-1").find("from HP-1") != std::string::npos);
}

TEST_CASE("ELSE everywhere yields empty predictions and no failures") {
  const Corpus c = test::fixture_corpus();
  CallbackLlmClient stub([](const std::string&) { return std::string("Trace links: [ELSE]"); });
  const PromptRunResult r = run_prompt_strategy(c, stub, rice_options());
  CHECK(r.failures.empty());
  CHECK(r.predictions.predictions.size() == 10);
  CHECK(r.predictions.link_count() == 0);
}

TEST_CASE("unparseable answers are recorded as failures") {
  const Corpus c = test::fixture_corpus();
  CallbackLlmClient stub([](const std::string&) { return std::string("I would rather not say."); });
  PromptRunOptions o = rice_options();
  o.req_ids = {"KP-1", "OS-2"};
  const PromptRunResult r = run_prompt_strategy(c, stub, o);
  CHECK(r.failures.size() == 2);
  CHECK(r.failures[0].error.find("I would rather not say.") != std::string::npos);
  CHECK(r.predictions.predictions.size() == 2);
}

TEST_CASE("pairwise variants link only the affirmed pairs") {
  const Corpus c = test::fixture_corpus();
  const std::string sec = c.provision("SEC").description;
  CallbackLlmClient yes_no([&](const std::string& p) {
    return std::string(p.find(sec) != std::string::npos ? "Yes, it does." : "No.");
  });
  PromptRunOptions o;
  o.variant = PromptVariant::kP3_2;
  o.req_ids = {"KP-1"};
  const PromptRunResult r = run_prompt_strategy(c, yes_no, o);
  CHECK(r.requests_issued == 26);
  CHECK(r.predictions.codes("KP-1") == std::set<std::string>{"SEC"});

  CallbackLlmClient tags([&](const std::string& p) {
    return std::string(p.find(sec) != std::string::npos ? "<trace>yes</trace>" : "<trace>no</trace>");
  });
  o.variant = PromptVariant::kP1;
  CHECK(run_prompt_strategy(c, tags, o).predictions.codes("KP-1") == std::set<std::string>{"SEC"});
}

TEST_CASE("P1 retrieves the top-k candidates") {
  const Corpus c = test::fixture_corpus();
  EmbeddingSet reqs(2, "t");
  for (const auto& id : c.requirement_ids()) reqs.add(id, {1, 0});
  EmbeddingSet provs(2, "t");
  for (const auto& code : c.codes()) provs.add(code, code == "SEC" || code == "CNF" ? std::vector<double>{1, 0}
                                                                                      : std::vector<double>{0, 1});
  PromptRunOptions o;
  o.variant = PromptVariant::kP1;
  o.req_ids = {"KP-1"};
  o.top_k = 2;
  const auto items = render_prompts(c, o, &reqs, &provs);
  REQUIRE(items.size() == 2);
  CHECK(items[0].prov_code == "CNF");
  CHECK(items[1].prov_code == "SEC");
  CHECK_THROWS_AS(render_prompts(c, o), ValidationError);
  o.top_k = 26;
  CHECK(render_prompts(c, o).size() == 26);
}

TEST_CASE("P2 sends one request per requirement") {
  const Corpus c = test::fixture_corpus();
  std::atomic<int> calls{0};
  CallbackLlmClient stub([&](const std::string&) {
    ++calls;
    return std::string("ACC\nPRT");
  });
  PromptRunOptions o;
  o.variant = PromptVariant::kP2;
  const PromptRunResult r = run_prompt_strategy(c, stub, o);
  CHECK(calls == 10);
  CHECK(r.predictions.codes("OS-3") == std::set<std::string>{"ACC", "PRT"});
}

TEST_CASE("transcript replays offline to identical predictions") {
  const Corpus c = test::fixture_corpus();
  test::TempDir dir;
  const auto path = dir.path() / "transcript.jsonl";
  CallbackLlmClient stub([&](const std::string& p) { return oracle_answer(c, p); });
  PromptRunResult first;
  {
    Transcript t(path);
    first = run_prompt_strategy(c, stub, rice_options(), &t);
    CHECK(t.records().size() == 10);
  }
  Transcript again(path);
  CHECK(again.records().size() == 10);
  OfflineLlmClient offline;
  const PromptRunResult second = run_prompt_strategy(c, offline, rice_options(), &again);
  CHECK(second.requests_issued == 0);
  CHECK(second.cache_hits == 10);
  CHECK(second.failures.empty());
  CHECK(second.predictions.predictions == first.predictions.predictions);
  CHECK(second.rationales == first.rationales);

  Transcript empty;
  const PromptRunResult none = run_prompt_strategy(c, offline, rice_options(), &empty);
  CHECK(none.failures.size() == 10);
}

TEST_CASE("later transcript records supersede earlier ones") {
  Transcript t;
  TranscriptRecord r;
  r.variant = "rice";
  r.req_id = "R";
  r.response = "old";
  r.ok = true;
  t.append(r);
  r.response = "new";
  t.append(r);
  r.ok = false;
  r.response.clear();
  t.append(r);
  CHECK(*t.cached_response({"rice", "R", ""}) == "new");
  CHECK(!t.cached_response({"p1", "R", ""}).has_value());
  const TranscriptRecord back = transcript_record_from_json(transcript_record_to_json(r));
  CHECK(back.key() == r.key());
}

TEST_CASE("parallel runs give the same result as sequential ones") {
  const Corpus c = test::fixture_corpus();
  CallbackLlmClient stub([&](const std::string& p) {
    return std::string(p.find("database") != std::string::npos ? "Yes" : "No");
  });
  PromptRunOptions o;
  o.variant = PromptVariant::kP3_2;
  const PromptRunResult seq = run_prompt_strategy(c, stub, o);
  o.parallelism = 4;
  const PromptRunResult par = run_prompt_strategy(c, stub, o);
  CHECK(par.predictions.predictions == seq.predictions.predictions);
  CHECK(par.requests_issued == 260);
  CHECK(seq.predictions.link_count() > 0);
}
