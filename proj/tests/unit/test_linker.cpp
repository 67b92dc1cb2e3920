#include <doctest.h>

#include "lrt/error.hpp"
#include "lrt/linker.hpp"
#include "support.hpp"

using namespace lrt;

namespace {

SimilarityMatrix one_row(std::vector<double> scores, std::vector<std::string> codes = {"c1", "c2", "c3", "c4"}) {
  return SimilarityMatrix({"r"}, std::move(codes), std::move(scores));
}

}  // namespace

TEST_CASE("constant strategy links strictly above theta") {
  const auto m = SimilarityMatrix({"r1", "r2"}, {"A", "B"}, {0.5, 0.51, 0.2, 0.9});
  const auto p = predict_constant(m, 0.5);
  CHECK(p.codes("r1") == std::set<std::string>{"B"});
  CHECK(p.codes("r2") == std::set<std::string>{"B"});
  CHECK(p.thresholds_used.at("r1") == 0.5);
  CHECK(predict_constant(m, 1.0).link_count() == 0);
  CHECK(predict_constant(m, 0.0).link_count() == 4);
  CHECK_THROWS_AS(predict_constant(m, 1.5), ValidationError);
  CHECK_THROWS_AS(predict_constant(m, -0.1), ValidationError);
}

TEST_CASE("delta strategy reproduces the worked example") {
  const auto p = predict_delta(one_row({0.98, 0.1, 0.3, 0.7}));
  CHECK(p.codes("r") == std::set<std::string>{"c1", "c4"});
  CHECK(p.thresholds_used.at("r") == doctest::Approx(0.3));
}

TEST_CASE("delta strategy edge cases") {
  CHECK(predict_delta(one_row({0.4, 0.4, 0.4, 0.4})).codes("r") == std::set<std::string>{"c1"});
  // Equal largest gaps: the topmost one wins.
  CHECK(predict_delta(one_row({0.9, 0.6, 0.3, 0.3})).codes("r") == std::set<std::string>{"c1"});
  // A tie at the top is linked as a block.
  CHECK(predict_delta(one_row({0.8, 0.8, 0.1, 0.05})).codes("r") == std::set<std::string>{"c1", "c2"});
  // Ties on the top score resolve by code for the single-link case.
  CHECK(predict_delta(one_row({0.5, 0.5}, {"b", "a"})).codes("r") == std::set<std::string>{"a"});
  CHECK_THROWS_AS(predict_delta(SimilarityMatrix({"r"}, {"A"}, {0.3})), ValidationError);
  CHECK(predict_delta(SimilarityMatrix({}, {"A", "B"}, {})).predictions.empty());
}

TEST_CASE("negative bank samples unlinked training requirements") {
  TraceLinkSet gt;
  gt.add("r1", "A");
  gt.add("r2", "A");
  const std::vector<std::string> cands{"r1", "r2", "r3", "r4", "r5"};
  const auto bank = build_negative_bank(gt, cands, {"A", "B"}, 2, 16);
  REQUIRE(bank.per_provision.at("A").size() == 2);
  for (const auto& id : bank.per_provision.at("A")) CHECK((id == "r3" || id == "r4" || id == "r5"));
  CHECK(bank.per_provision.at("B").size() == 2);
  const auto again = build_negative_bank(gt, cands, {"A", "B"}, 2, 16);
  CHECK(again.per_provision == bank.per_provision);
  const auto all = build_negative_bank(gt, cands, {"A"}, 10, 16);
  CHECK(all.per_provision.at("A").size() == 3);
  CHECK_THROWS_AS(build_negative_bank(gt, cands, {"A"}, 0, 16), ValidationError);
}

TEST_CASE("dynamic strategy uses the mean negative similarity") {
  EmbeddingSet e(2, "t");
  e.add("q", {1, 0});
  e.add("n1", {1, 0});
  e.add("n2", {0, 1});
  NegativeExampleBank bank;
  bank.per_provision["A"] = {"n1", "n2"};
  bank.per_provision["B"] = {"n1"};
  const auto m = SimilarityMatrix({"q"}, {"A", "B"}, {0.6, 0.99});
  const auto p = predict_dynamic(e, m, bank);
  CHECK(p.pair_thresholds.at("q").at("A") == doctest::Approx(0.5));
  CHECK(p.pair_thresholds.at("q").at("B") == doctest::Approx(1.0));
  CHECK(p.codes("q") == std::set<std::string>{"A"});
  bank.per_provision["B"].clear();
  CHECK_THROWS_AS(predict_dynamic(e, m, bank), ValidationError);
}

TEST_CASE("tune_threshold picks the smallest best theta") {
  TraceLinkSet gt;
  gt.add("r1", "A");
  const auto m = SimilarityMatrix({"r1", "r2"}, {"A", "B"}, {0.705, 0.2, 0.1, 0.3});
  const auto c = tune_threshold(m, gt);
  CHECK(c.points.size() == 99);
  CHECK(c.points.front().theta == doctest::Approx(0.01));
  CHECK(c.points.back().theta == doctest::Approx(0.99));
  CHECK(c.best_theta == doctest::Approx(0.30));
  CHECK(c.best_f2 == doctest::Approx(1.0));
  CHECK(c.points[99 - 1].f2 == 0.0);
  TraceLinkSet none;
  CHECK_THROWS_AS(tune_threshold(m, none), ValidationError);
  TraceLinkSet elsewhere;
  elsewhere.add("zz", "A");
  CHECK_THROWS_AS(tune_threshold(m, elsewhere), ValidationError);
}

TEST_CASE("sweep thresholds spans [0, 1]") {
  TraceLinkSet gt;
  gt.add("r1", "A");
  const auto m = SimilarityMatrix({"r1"}, {"A", "B"}, {0.9, 0.1});
  const auto c = sweep_thresholds(m, gt, 5);
  REQUIRE(c.points.size() == 5);
  CHECK(c.points[0].theta == 0.0);
  CHECK(c.points[2].theta == 0.5);
  CHECK(c.points[4].theta == 1.0);
  CHECK(c.best_theta == 0.25);
  CHECK_THROWS_AS(sweep_thresholds(m, gt, 1), ValidationError);
  const std::string csv = curve_to_csv(c);
  CHECK(csv.rfind("theta,f2\n0,", 0) == 0);
}
