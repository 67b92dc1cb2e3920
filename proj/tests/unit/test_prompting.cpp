#include <doctest.h>

#include <fstream>
#include <sstream>

#include "lrt/error.hpp"
#include "lrt/prompting.hpp"
#include "support.hpp"

using namespace lrt;

namespace {

std::string read_golden(const std::string& name) {
  std::ifstream in(test::source_path("tests/golden/" + name), std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> codes_of(const Corpus& c) {
  std::vector<std::string> out;
  for (const auto& p : c.catalog()) out.push_back(p.code);
  return out;
}

std::vector<FewShotExample> fixture_examples() { return load_examples(test::source_path("fixtures/examples.json")); }

}  // namespace

TEST_CASE("prompt templates match the golden files") {
  const Corpus c = test::fixture_corpus();
  const auto& r = c.requirement("KP-1");
  const auto& sec = c.provision("SEC");
  CHECK(build_rice_prompt(with_else_sentinel(c.catalog()), fixture_examples(), r) == read_golden("rice.txt"));
  CHECK(build_p1_prompt(r, sec) == read_golden("p1.txt"));
  CHECK(build_p2_prompt(r, c.catalog()) == read_golden("p2.txt"));
  CHECK(build_p3_prompt(PromptVariant::kP3_1, r, sec) == read_golden("p3_1.txt"));
  CHECK(build_p3_prompt(PromptVariant::kP3_2, r, sec) == read_golden("p3_2.txt"));
}

TEST_CASE("RICE prompt carries the fixed instruction phrases") {
  const Corpus c = test::fixture_corpus();
  const std::string p = build_rice_prompt(with_else_sentinel(c.catalog()), fixture_examples(), c.requirement("OS-2"));
  CHECK(p.find("prioritizing recall over precision") != std::string::npos);
  CHECK(p.find("Choose at least one regulation for each requirement.") != std::string::npos);
  CHECK(p.find("ELSE: ") != std::string::npos);
  CHECK(p.find("GDPR") != std::string::npos);
  CHECK(p.find("HIPAA") == std::string::npos);
  const std::string hipaa =
      build_rice_prompt(with_else_sentinel(c.catalog()), fixture_examples(), c.requirement("OS-2"), "HIPAA");
  CHECK(hipaa.find("HIPAA") != std::string::npos);
  CHECK(p.substr(p.size() - c.requirement("OS-2").text.size() - 1) == c.requirement("OS-2").text + "\n");
}

TEST_CASE("RICE prompt validation") {
  const Corpus c = test::fixture_corpus();
  const auto& r = c.requirement("KP-1");
  auto ex = fixture_examples();
  CHECK_THROWS_AS(build_rice_prompt(c.catalog(), ex, r), ValidationError);
  auto four = ex;
  four.pop_back();
  CHECK_THROWS_AS(build_rice_prompt(with_else_sentinel(c.catalog()), four, r), ValidationError);
  auto bad = ex;
  bad[0].codes = {"NOPE"};
  CHECK_THROWS_AS(build_rice_prompt(with_else_sentinel(c.catalog()), bad, r), ReferenceError);
  auto dup = with_else_sentinel(c.catalog());
  dup.insert(dup.begin(), dup[0]);
  CHECK_THROWS_AS(build_rice_prompt(dup, ex, r), ValidationError);
  CHECK_THROWS_AS(parse_examples(R"({"examples": [{"requirement": "x", "codes": [], "rationale": "y"}]})"), ValidationError);
  CHECK_THROWS_AS(parse_examples("{"), ParseError);
  CHECK_THROWS_AS(parse_examples("[]"), ParseError);
}

TEST_CASE("variant names") {
  for (const PromptVariant v : kAllPromptVariants) CHECK(parse_prompt_variant(to_string(v)) == v);
  CHECK(parse_prompt_variant("RICE") == PromptVariant::kRice);
  CHECK(parse_prompt_variant("P3_2") == PromptVariant::kP3_2);
  CHECK_THROWS_AS(parse_prompt_variant("p4"), ValidationError);
  CHECK(is_pairwise(PromptVariant::kP1));
  CHECK(!is_pairwise(PromptVariant::kP2));
  CHECK(!is_pairwise(PromptVariant::kRice));
}

TEST_CASE("code list parsing") {
  const std::vector<std::string> codes = codes_of(test::fixture_corpus());
  const std::string example = read_golden("../../fixtures/rice_example_output.txt");
  const ParsedPrediction p = parse_code_list(example, codes);
  CHECK(p.codes == std::set<std::string>{"ACC", "CNF", "SEC"});
  CHECK(!p.else_sentinel);
  CHECK(p.rationale.find("- ACC:") != std::string::npos);
  CHECK(p.raw == example);

  const ParsedPrediction e = parse_code_list("Trace links: [ELSE]\nRationale: nothing personal.", codes);
  CHECK(e.codes.empty());
  CHECK(e.else_sentinel);

  const ParsedPrediction lower = parse_code_list("[acc, SEC] because both apply", codes);
  CHECK(lower.codes == std::set<std::string>{"ACC", "SEC"});
  CHECK(lower.rationale == "because both apply");

  const ParsedPrediction lines = parse_code_list("- ACC: access\n- PRT: portability\n\nunrelated ERS", codes);
  CHECK(lines.codes == std::set<std::string>{"ACC", "PRT"});

  const ParsedPrediction plain = parse_code_list("ACC, SEC", codes);
  CHECK(plain.codes == std::set<std::string>{"ACC", "SEC"});

  const ParsedPrediction unknown = parse_code_list("[FOO, TIM]", codes);
  CHECK(unknown.codes == std::set<std::string>{"TIM"});

  CHECK_THROWS_AS(parse_code_list("I cannot tell.", codes), ParseError);
  try {
    parse_code_list("I cannot tell.", codes);
  } catch (const ParseError& err) {
    CHECK(std::string(err.what()).find("I cannot tell.") != std::string::npos);
  }
}

TEST_CASE("example output round trip") {
  const std::vector<std::string> codes = codes_of(test::fixture_corpus());
  const std::string text = render_example_output({"SEC", "ACC"}, "Both apply.");
  CHECK(text == "Trace links: [ACC, SEC]\nRationale: Both apply.\n");
  const ParsedPrediction p = parse_code_list(text, codes);
  CHECK(p.codes == std::set<std::string>{"ACC", "SEC"});
  CHECK(p.rationale.find("Both apply.") != std::string::npos);
}

TEST_CASE("trace tag and yes/no parsing") {
  CHECK(parse_trace_tag("Reasoning... <trace>Yes</trace>"));
  CHECK(!parse_trace_tag("<trace> no </trace> <trace>yes</trace>"));
  CHECK_THROWS_AS(parse_trace_tag("<trace>yes"), ParseError);
  CHECK_THROWS_AS(parse_trace_tag("yes"), ParseError);
  CHECK(parse_yes_no("Yes, because the key protects data."));
  CHECK(!parse_yes_no("No. Eyes are not relevant, yes?"));
  CHECK(!parse_yes_no("Answer: NO"));
  CHECK_THROWS_AS(parse_yes_no("Eyes and nose."), ParseError);
}

TEST_CASE("top-k retrieval orders by cosine with code tie break") {
  EmbeddingSet provs(2, "t");
  provs.add("B", {1, 0});
  provs.add("A", {1, 0});
  provs.add("C", {0, 1});
  const std::vector<double> q{1, 0.1};
  CHECK(retrieve_topk(q, provs, 2) == std::vector<std::string>{"A", "B"});
  CHECK(retrieve_topk(q, provs, 3).back() == "C");
  CHECK_THROWS_AS(retrieve_topk(q, provs, 0), ValidationError);
  CHECK_THROWS_AS(retrieve_topk(q, provs, 4), ValidationError);
}
