#include <doctest.h>

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "cli.hpp"
#include "lrt/http.hpp"
#include "lrt/manifest.hpp"
#include "support.hpp"

using nlohmann::json;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out;
  std::ostringstream err;
  const int code = lrt::cli::dispatch(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string fixture(const std::string& rel) { return test::source_path("fixtures/" + rel).string(); }

}  // namespace

TEST_CASE("validate accepts the fixture and writes a manifest") {
  test::TempDir dir;
  const Run r = run({"validate", fixture("corpus.json"), "--out-dir", dir.str()});
  CHECK(r.code == 0);
  CHECK(std::filesystem::exists(dir.path() / "validation.json"));
  const lrt::RunManifest m = lrt::load_manifest(dir.path() / "manifest.json");
  CHECK(m.command == "validate");
  CHECK(m.outputs.count("validation.json") == 1);
  CHECK(m.inputs.size() == 1);
}

TEST_CASE("usage and domain errors map to exit codes") {
  test::TempDir dir;
  CHECK(run({}).code == 2);
  CHECK(run({"frobnicate"}).code == 2);
  CHECK(run({"predict", "--strategy"}).code == 2);
  CHECK(run({"fisher", "1", "2", "3"}).code == 2);
  CHECK(run({"--help"}).code == 0);
  CHECK(run({"predict", "--strategy", "nope", "--corpus", fixture("corpus.json"), "--out-dir", dir.str()}).code == 1);
  CHECK(run({"validate", fixture("missing.json"), "--out-dir", dir.str()}).code == 1);
  const Run bad = run({"predict", "--strategy", "tuned", "--matrix", fixture("delta_matrix.json"), "--out-dir",
                       dir.str()});
  CHECK(bad.code == 2);
}

TEST_CASE("delta prediction from a matrix file") {
  test::TempDir dir;
  const Run r = run({"predict", "--strategy", "delta", "--matrix", fixture("delta_matrix.json"), "--out-dir",
                     dir.str()});
  REQUIRE(r.code == 0);
  const json p = json::parse(slurp(dir.path() / "predictions.json"));
  CHECK(p["R1"] == json{"c1", "c4"});
  CHECK(p["R2"] == json{"c1"});
  const json t = json::parse(slurp(dir.path() / "thresholds.json"));
  CHECK(t["strategy"] == "delta");
  CHECK(t["thresholds"]["R1"].get<double>() == doctest::Approx(0.3));
}

TEST_CASE("fisher prints the p-value") {
  test::TempDir dir;
  const Run r = run({"fisher", "3", "1", "1", "3", "--out-dir", dir.str()});
  CHECK(r.code == 0);
  const json f = json::parse(slurp(dir.path() / "fisher.json"));
  CHECK(f["p_value"].get<double>() == doctest::Approx(0.4857142857));
}

TEST_CASE("dry run renders prompts without network access") {
  test::TempDir dir;
  const auto before = lrt::http::request_count();
  const Run r = run({"prompt", "--variant", "rice", "--dry-run", "--corpus", fixture("corpus.json"), "--examples",
                     fixture("examples.json"), "--endpoint", "http://127.0.0.1:9/unreachable", "--out-dir",
                     dir.str()});
  REQUIRE(r.code == 0);
  CHECK(lrt::http::request_count() == before);
  const json prompts = json::parse(slurp(dir.path() / "prompts.json"));
  CHECK(prompts.size() == 10);
  CHECK(slurp(dir.path() / "prompts" / "0001_KP-1.txt") == slurp(test::source_path("tests/golden/rice.txt")));

  test::TempDir p1;
  REQUIRE(run({"prompt", "--variant", "p3_2", "--dry-run", "--corpus", fixture("corpus.json"), "--requirements",
               "KP-1", "--out-dir", p1.str()})
              .code == 0);
  CHECK(json::parse(slurp(p1.path() / "prompts.json")).size() == 26);
  CHECK(lrt::http::request_count() == before);
}

TEST_CASE("offline prompting without a transcript records failures") {
  test::TempDir dir;
  const auto before = lrt::http::request_count();
  const Run r = run({"prompt", "--variant", "p2", "--offline", "--corpus", fixture("corpus.json"), "--requirements",
                     "KP-1,KP-2", "--out-dir", dir.str()});
  CHECK(r.code == 0);
  CHECK(lrt::http::request_count() == before);
  CHECK(json::parse(slurp(dir.path() / "failures.json")).size() == 2);
}

TEST_CASE("leave-one-out run replays byte for byte") {
  test::TempDir dir;
  const std::string first = dir.str("first");
  const Run r = run({"loo", "--corpus", fixture("corpus.json"), "--methods", "constant,delta,tfidf,indicator",
                     "--dim", "64", "--out-dir", first});
  REQUIRE(r.code == 0);
  CHECK(std::filesystem::exists(dir.path() / "first" / "loo.txt"));
  const Run replay = run({"replay", first + "/manifest.json", "--out-dir", dir.str("second")});
  CHECK(replay.code == 0);
  CHECK(replay.out.find("replay identical") != std::string::npos);
  CHECK(slurp(dir.path() / "first" / "loo.json") == slurp(dir.path() / "second" / "loo.json"));
}

TEST_CASE("replay refuses changed inputs") {
  test::TempDir dir;
  const auto corpus = dir.path() / "corpus.json";
  std::filesystem::copy_file(fixture("corpus.json"), corpus);
  REQUIRE(run({"validate", corpus.string(), "--out-dir", dir.str("first")}).code == 0);
  {
    std::ofstream out(corpus, std::ios::app);
    out << "\n";
  }
  const Run replay = run({"replay", dir.str("first/manifest.json"), "--out-dir", dir.str("second")});
  CHECK(replay.code == 1);
  CHECK(replay.err.find("corpus.json") != std::string::npos);
}

TEST_CASE("embed, similarity, sweep and evaluate chain together") {
  test::TempDir dir;
  const std::string corpus = fixture("corpus.json");
  REQUIRE(run({"embed", "--corpus", corpus, "--dim", "64", "--out-dir", dir.str("emb")}).code == 0);
  const std::string emb = dir.str("emb/embeddings.json");
  REQUIRE(run({"similarity", "--corpus", corpus, "--provider", "file", "--embeddings", emb, "--out-dir",
               dir.str("sim")})
              .code == 0);
  const std::string sim = dir.str("sim/similarity.json");
  REQUIRE(run({"sweep", "--corpus", corpus, "--scores", sim, "--points", "11", "--out-dir", dir.str("sweep")})
              .code == 0);
  CHECK(slurp(dir.path() / "sweep" / "curve.csv").rfind("theta,f2\n", 0) == 0);
  REQUIRE(run({"predict", "--strategy", "constant", "--matrix", sim, "--theta", "0.2", "--out-dir",
               dir.str("pred")})
              .code == 0);
  const Run ev = run({"evaluate", "--corpus", corpus, "--predictions", dir.str("pred/predictions.json"), "--scores",
                      sim, "--out-dir", dir.str("eval")});
  REQUIRE(ev.code == 0);
  const json report = json::parse(slurp(dir.path() / "eval" / "report.json"));
  CHECK(report.contains("links"));
  CHECK(std::filesystem::exists(dir.path() / "eval" / "report.txt"));
  const Run rank = run({"rank-models", "--corpus", corpus, "--embeddings", emb, "--out-dir", dir.str("rank")});
  CHECK(rank.code == 0);
}
