#include <doctest.h>

#include <cmath>

#include "lrt/baselines/indicator.hpp"
#include "lrt/baselines/lda.hpp"
#include "lrt/baselines/lsi.hpp"
#include "lrt/baselines/svd.hpp"
#include "lrt/baselines/tfidf.hpp"
#include "lrt/error.hpp"
#include "lrt/random.hpp"
#include "support.hpp"

using namespace lrt;

namespace {

using Docs = std::vector<std::vector<std::string>>;

DenseMatrix random_matrix(std::size_t r, std::size_t c, std::uint64_t seed) {
  Rng rng(seed);
  DenseMatrix m(r, c);
  for (auto& x : m.data) x = rng.unit() * 2.0 - 1.0;
  return m;
}

DenseMatrix multiply(const DenseMatrix& a, const DenseMatrix& b) {
  DenseMatrix out(a.rows, b.cols);
  for (std::size_t i = 0; i < a.rows; ++i) {
    for (std::size_t k = 0; k < a.cols; ++k) {
      for (std::size_t j = 0; j < b.cols; ++j) out(i, j) += a(i, k) * b(k, j);
    }
  }
  return out;
}

}  // namespace

TEST_CASE("tf-idf uses smoothed idf") {
  const Docs docs{{"alpha", "beta"}, {"beta", "gamma"}};
  const TfIdfModel m = fit_tfidf(docs);
  CHECK(m.vocabulary == std::vector<std::string>{"alpha", "beta", "gamma"});
  CHECK(m.idf[*m.index_of("alpha")] == doctest::Approx(std::log(1.5) + 1.0));
  CHECK(m.idf[*m.index_of("alpha")] == doctest::Approx(1.405465).epsilon(1e-6));
  CHECK(m.idf[*m.index_of("beta")] == doctest::Approx(1.0));
  CHECK(!m.index_of("delta").has_value());
  const SparseVector v = tfidf_vector(m, {"alpha", "alpha", "beta", "unknown"});
  double norm = 0.0;
  for (const auto& [i, w] : v.entries) norm += w * w;
  CHECK(norm == doctest::Approx(1.0));
  CHECK(tfidf_vector(m, {"zzz"}).degenerate());
  CHECK_THROWS_AS(sparse_cosine(tfidf_vector(m, {"zzz"}), v), DegenerateVectorError);
  CHECK(sparse_cosine(v, v) == doctest::Approx(1.0));
  CHECK_THROWS_AS(fit_tfidf({{}, {}}), ValidationError);
  CHECK_THROWS_AS(fit_tfidf(docs, 0.0), ValidationError);
  const TfIdfModel cut = fit_tfidf(docs, 0.5);
  CHECK(!cut.index_of("beta").has_value());
  const TfIdfModel back = parse_tfidf_model(tfidf_model_to_json(m));
  CHECK(back.vocabulary == m.vocabulary);
  CHECK(back.idf == m.idf);
}

TEST_CASE("tf-idf embedding set gives zero vectors to empty documents") {
  const TfIdfModel m = fit_tfidf({{"alpha"}, {"beta"}});
  const EmbeddingSet s = tfidf_embedding_set(m, {{"x", {"alpha"}}, {"y", {"nothing"}}});
  CHECK(s.dim() == 2);
  CHECK(s.at("y") == std::vector<double>{0.0, 0.0});
  CHECK(s.at("x")[0] == doctest::Approx(1.0));
}

TEST_CASE("Jacobi SVD reconstructs tall, wide and rank-deficient matrices") {
  for (const auto& [r, c] : std::vector<std::pair<std::size_t, std::size_t>>{{6, 4}, {4, 7}, {5, 5}}) {
    const DenseMatrix a = random_matrix(r, c, r * 31 + c);
    const SvdResult s = jacobi_svd(a);
    const std::size_t k = s.singular_values.size();
    CHECK(k == std::min(r, c));
    DenseMatrix us(r, k);
    for (std::size_t i = 0; i < r; ++i) {
      for (std::size_t j = 0; j < k; ++j) us(i, j) = s.u(i, j) * s.singular_values[j];
    }
    const DenseMatrix back = multiply(us, s.v.transposed());
    for (std::size_t i = 0; i < a.data.size(); ++i) CHECK(back.data[i] == doctest::Approx(a.data[i]).epsilon(1e-9));
    for (std::size_t j = 1; j < k; ++j) CHECK(s.singular_values[j - 1] >= s.singular_values[j]);
    const DenseMatrix vtv = multiply(s.v.transposed(), s.v);
    for (std::size_t i = 0; i < k; ++i) {
      for (std::size_t j = 0; j < k; ++j) CHECK(vtv(i, j) == doctest::Approx(i == j ? 1.0 : 0.0));
    }
  }
  DenseMatrix rank1(3, 3);
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = 0; j < 3; ++j) rank1(i, j) = static_cast<double>((i + 1) * (j + 1));
  }
  const SvdResult s = jacobi_svd(rank1);
  CHECK(s.singular_values[0] == doctest::Approx(14.0));
  CHECK(s.singular_values[1] == doctest::Approx(0.0));
  CHECK(s.u(0, 1) == 0.0);
  CHECK_THROWS_AS(jacobi_svd(random_matrix(6, 6, 3), 0), ConvergenceError);
}

TEST_CASE("LSI fit, fold-in and reconstruction") {
  const DenseMatrix a = random_matrix(5, 8, 99);
  const LsiModel full = fit_lsi(a, 5);
  const DenseMatrix back = full.reconstruct();
  for (std::size_t i = 0; i < a.data.size(); ++i) CHECK(back.data[i] == doctest::Approx(a.data[i]).epsilon(1e-9));
  const std::vector<double> row0(a.data.begin(), a.data.begin() + 8);
  const auto folded = lsi_fold_in(full, row0);
  for (std::size_t j = 0; j < 5; ++j) CHECK(folded[j] == doctest::Approx(full.doc_coordinates(0, j)).epsilon(1e-9));
  const LsiModel two = fit_lsi(a, 2);
  CHECK(two.term_projection.cols == 2);
  CHECK(two.singular_values.size() == 2);
  CHECK_THROWS_AS(fit_lsi(a, 0), ValidationError);
  CHECK_THROWS_AS(fit_lsi(a, 6), ValidationError);
  CHECK_THROWS_AS(lsi_fold_in(two, std::vector<double>(3, 1.0)), DimensionError);
  const LsiModel parsed = parse_lsi_model(lsi_model_to_json(two));
  CHECK(parsed.k == 2);
  CHECK(parsed.singular_values == two.singular_values);
  CHECK(parsed.term_projection.data == two.term_projection.data);
}

TEST_CASE("LDA is seeded and stochastic") {
  const Docs docs{{"a", "b", "a", "c"}, {"x", "y", "y", "z"}, {"a", "c", "b"}, {"z", "x", "y"}};
  const LdaModel m = fit_lda(docs, 2, 0.1, 0.1, 50, 7);
  const LdaModel again = fit_lda(docs, 2, 0.1, 0.1, 50, 7);
  CHECK(m.topic_word == again.topic_word);
  CHECK(m.doc_topic == again.doc_topic);
  for (const auto& row : m.topic_word) {
    double s = 0.0;
    for (const double x : row) {
      CHECK(x >= 0.0);
      s += x;
    }
    CHECK(s == doctest::Approx(1.0).epsilon(1e-12));
  }
  CHECK(m.doc_topic.size() == 4);
  const auto theta = lda_fold_in(m, {"a", "b", "unknown"});
  CHECK(theta.size() == 2);
  CHECK(theta[0] + theta[1] == doctest::Approx(1.0));
  CHECK(lda_fold_in(m, {"a", "b"}) == lda_fold_in(m, {"a", "b"}));
  CHECK_THROWS_AS(lda_fold_in(m, {"unknown"}), ValidationError);
  CHECK_THROWS_AS(fit_lda(docs, 0, 0.1, 0.1, 10, 1), ValidationError);
  CHECK_THROWS_AS(fit_lda(docs, 2, -1.0, 0.1, 10, 1), ValidationError);
  int calls = 0;
  fit_lda(docs, 2, 0.1, 0.1, 12, 7, [&](const GibbsState& s) {
    ++calls;
    CHECK(s.assignments->size() == 4);
  });
  CHECK(calls == 12);
  const LdaModel parsed = parse_lda_model(lda_model_to_json(m));
  CHECK(parsed.topic_word == m.topic_word);
  CHECK(parsed.vocabulary == m.vocabulary);
}

TEST_CASE("LDA similarity matrix handles unknown-only documents by policy") {
  const Docs docs{{"a", "b"}, {"x", "y"}};
  const LdaModel m = fit_lda(docs, 2, 0.1, 0.1, 30, 3);
  const std::vector<std::pair<std::string, std::vector<std::string>>> reqs{{"r1", {"a"}}, {"r2", {"qq"}}};
  const std::vector<std::pair<std::string, std::vector<std::string>>> provs{{"A", {"a", "b"}}, {"X", {"x"}}};
  CHECK_THROWS(lda_similarity_matrix(m, reqs, provs));
  const auto s = lda_similarity_matrix(m, reqs, provs, DegeneratePolicy::kScoreZero);
  CHECK(s.at(1, 0) == 0.0);
  CHECK(s.at(0, 0) > s.at(0, 1));
}

TEST_CASE("indicator model fits and scores") {
  const Corpus c = load_corpus(test::source_path("fixtures/indicator_corpus.json"));
  const IndicatorTermModel m = fit_indicator_model(c, {"D1", "D2", "D3"});
  CHECK(m.flagged == std::set<std::string>{"ACC"});
  CHECK(m.normalizer.at("SEC") == doctest::Approx(2.5));
  CHECK(indicator_score(m, {"secure", "export"}, "SEC") == doctest::Approx(0.4));
  CHECK(indicator_score(m, {"secure", "export"}, "ACC") == 0.0);
  CHECK(indicator_score(m, {"secure", "secure"}, "SEC") == doctest::Approx(0.4));
  CHECK_THROWS_AS(indicator_score(m, {"secure"}, "ZZZ"), ReferenceError);
  CHECK_THROWS_AS(fit_indicator_model(c, {"D3"}), ValidationError);
  CHECK_THROWS_AS(fit_indicator_model(c, {"Q"}), ReferenceError);
  const IndicatorTermModel parsed = parse_indicator_model(indicator_model_to_json(m));
  CHECK(parsed.weights == m.weights);
  CHECK(parsed.normalizer == m.normalizer);
  CHECK(parsed.flagged == m.flagged);
  const auto grid = indicator_score_matrix(m, {{"q", {"password"}}}, {"ACC", "PRT", "SEC"});
  CHECK(grid.at(0, 2) == doctest::Approx(0.4));
}
