#include <doctest.h>

#include <cmath>

#include "lrt/embeddings.hpp"
#include "lrt/error.hpp"
#include "lrt/pipeline.hpp"
#include "support.hpp"

using namespace lrt;

TEST_CASE("cosine of the worked example") {
  const std::vector<double> u{1, 2, 3};
  const std::vector<double> v{4, 5, 6};
  CHECK(cosine(u, v) == doctest::Approx(0.974631846).epsilon(1e-9));
  CHECK(cosine(u, u) == doctest::Approx(1.0));
  const std::vector<double> w{-1, -2, -3};
  CHECK(cosine(u, w) == doctest::Approx(-1.0));
}

TEST_CASE("cosine errors") {
  const std::vector<double> u{1, 2, 3};
  const std::vector<double> short_v{1, 2};
  const std::vector<double> zero{0, 0, 0};
  CHECK_THROWS_AS(cosine(u, short_v), DimensionError);
  CHECK_THROWS_AS(cosine(u, zero), DegenerateVectorError);
}

TEST_CASE("embedding set invariants") {
  EmbeddingSet s(3, "test");
  s.add("a", {1, 0, 0});
  CHECK_THROWS_AS(s.add("b", {1, 0}), DimensionError);
  CHECK_THROWS_AS(s.add("a", {0, 1, 0}), ValidationError);
  CHECK_THROWS_AS(s.add("c", {NAN, 0, 0}), ValidationError);
  CHECK_THROWS_AS(s.at("zz"), ReferenceError);
  CHECK(s.missing({"a", "q"}) == std::vector<std::string>{"q"});
  CHECK_THROWS_AS(EmbeddingSet(0, "x"), ValidationError);
}

TEST_CASE("embedding file round trip and parse errors") {
  EmbeddingSet s(2, "p");
  s.add("x", {0.25, -1.5});
  s.add("y", {1e-300, 3});
  CHECK(parse_embedding_set(embedding_set_to_json(s)) == s);
  CHECK_THROWS_AS(parse_embedding_set("nope"), ParseError);
  CHECK_THROWS_AS(parse_embedding_set(R"({"format_version": 2, "dim": 2, "vectors": {}})"), ParseError);
  CHECK_THROWS_AS(parse_embedding_set(R"({"format_version": 1, "dim": 2, "vectors": {"a": [1, 2, 3]}})"),
                  DimensionError);
  CHECK_THROWS_AS(parse_embedding_set(R"({"format_version": 1, "dim": 2, "vectors": {"a": [1, "x"]}})"),
                  ParseError);
}

TEST_CASE("hash_embed golden vector") {
  const auto v = hash_embed("The user shall export personal data.", 64, 7);
  REQUIRE(v.size() == 64);
  std::map<std::size_t, double> nonzero;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (v[i] != 0.0) nonzero[i] = v[i];
  }
  const std::map<std::size_t, double> golden{{9, 0.5}, {15, 0.5}, {18, -0.5}, {22, -0.5}};
  CHECK(nonzero == golden);
  CHECK(hash_embed("", 64, 7) == std::vector<double>(64, 0.0));
  CHECK(hash_embed("The USER, shall export personal data", 64, 7) == v);
  CHECK(hash_embed("The user shall export personal data.", 64, 8) != v);
  CHECK_THROWS_AS(hash_embed("x", 4, 7), ValidationError);
}

TEST_CASE("similarity matrix and max pooling") {
  EmbeddingSet reqs(2, "t");
  reqs.add("r1#1", {1, 0});
  reqs.add("r1#2", {0, 1});
  reqs.add("r2", {1, 1});
  EmbeddingSet provs(2, "t");
  provs.add("A", {1, 0});
  provs.add("B", {0, 1});
  const auto m = build_similarity_matrix(reqs, {"r1#1", "r1#2", "r2"}, provs, {"A", "B"});
  CHECK(m.rows() == 3);
  CHECK(m.at(0, 0) == doctest::Approx(1.0));
  CHECK(m.at(0, 1) == doctest::Approx(0.0));
  const auto pooled = max_pool_rows(m, {"r1", "r1", "r2"}, {"r1", "r2"});
  CHECK(pooled.req_ids() == std::vector<std::string>{"r1", "r2"});
  CHECK(pooled.at(0, 0) == doctest::Approx(1.0));
  CHECK(pooled.at(0, 1) == doctest::Approx(1.0));
  CHECK(pooled.at(1, 0) == doctest::Approx(std::sqrt(0.5)));
  CHECK(parse_similarity_matrix(similarity_matrix_to_json(pooled)) == pooled);
  CHECK(pooled.select_rows({"r2"}).rows() == 1);
  CHECK_THROWS_AS(pooled.select_rows({"zz"}), ReferenceError);
  CHECK_THROWS_AS(max_pool_rows(m, {"r1", "r1", "r2"}, {"r1", "r2", "r3"}), ReferenceError);
}

TEST_CASE("degenerate policy") {
  EmbeddingSet reqs(2, "t");
  reqs.add("z", {0, 0});
  EmbeddingSet provs(2, "t");
  provs.add("A", {1, 0});
  CHECK_THROWS_AS(build_similarity_matrix(reqs, {"z"}, provs, {"A"}), DegenerateVectorError);
  CHECK(build_similarity_matrix(reqs, {"z"}, provs, {"A"}, DegeneratePolicy::kScoreZero).at(0, 0) == 0.0);
  EmbeddingSet wide(3, "t");
  wide.add("A", {1, 0, 0});
  CHECK_THROWS_AS(build_similarity_matrix(reqs, {"z"}, wide, {"A"}), DimensionError);
}

TEST_CASE("sentence units and corpus embedding") {
  const Corpus c = test::fixture_corpus();
  const UnitIndex idx = sentence_units(c, {"KP-1", "KP-3"});
  CHECK(idx.unit_ids == std::vector<std::string>{"KP-1", "KP-3#1", "KP-3#2"});
  CHECK(idx.parent_of.at("KP-3#2") == "KP-3");
  HashEmbeddingProvider hash(64, 16);
  const CorpusEmbeddings emb = embed_corpus(c, hash);
  CHECK(emb.requirements.size() == 10);
  CHECK(emb.provisions.size() == 26);
  CHECK(emb.units.contains("KP-3#1"));
  CHECK(emb.units.provider() == "hash:64:16");

  EmbeddingSet file(64, "file");
  for (const auto& [id, v] : emb.requirements.vectors()) file.add(id, v);
  for (const auto& [id, v] : emb.provisions.vectors()) file.add(id, v);
  FileEmbeddingProvider from_file(file);
  const CorpusEmbeddings back = embed_corpus(c, from_file);
  CHECK(back.units.at("KP-3#1") == emb.requirements.at("KP-3"));

  EmbeddingSet partial(64, "file");
  partial.add("KP-1", emb.requirements.at("KP-1"));
  FileEmbeddingProvider missing(partial);
  CHECK_THROWS_AS(embed_corpus(c, missing), ReferenceError);
}
