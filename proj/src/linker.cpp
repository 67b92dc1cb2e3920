#include "lrt/linker.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

#include "lrt/error.hpp"
#include "lrt/metrics.hpp"
#include "lrt/random.hpp"

namespace lrt {

namespace {

PredictionSet empty_predictions(const SimilarityMatrix& matrix, std::string tag) {
  PredictionSet out;
  out.strategy_tag = std::move(tag);
  for (const auto& id : matrix.req_ids()) out.predictions[id];
  return out;
}

double f2_at(const SimilarityMatrix& matrix, const TraceLinkSet& gt, double theta) {
  const PredictionSet p = predict_constant(matrix, theta);
  return f_beta(confusion(p, gt, matrix.req_ids(), matrix.prov_codes()), 2.0).value_or(0.0);
}

ThresholdCurve curve_over(const SimilarityMatrix& matrix, const TraceLinkSet& gt,
                          const std::vector<double>& grid) {
  const TraceLinkSet restricted = gt.restricted_to(matrix.req_ids());
  ThresholdCurve curve;
  curve.points.reserve(grid.size());
  bool first = true;
  for (const double theta : grid) {
    const double f2 = f2_at(matrix, restricted, theta);
    curve.points.push_back({theta, f2});
    if (first || f2 > curve.best_f2) {
      curve.best_f2 = f2;
      curve.best_theta = theta;
      first = false;
    }
  }
  return curve;
}

}  // namespace

PredictionSet predict_constant(const SimilarityMatrix& matrix, double theta) {
  if (!(theta >= 0.0 && theta <= 1.0)) throw ValidationError("constant threshold must lie in [0, 1]");
  PredictionSet out = empty_predictions(matrix, "constant");
  for (std::size_t i = 0; i < matrix.rows(); ++i) {
    auto& linked = out.predictions[matrix.req_ids()[i]];
    for (std::size_t j = 0; j < matrix.cols(); ++j) {
      if (matrix.at(i, j) > theta) linked.insert(matrix.prov_codes()[j]);
    }
    out.thresholds_used[matrix.req_ids()[i]] = theta;
  }
  return out;
}

NegativeExampleBank build_negative_bank(const TraceLinkSet& gt,
                                        const std::vector<std::string>& candidate_req_ids,
                                        const std::vector<std::string>& codes,
                                        std::size_t sample_size, std::uint64_t seed) {
  if (sample_size == 0) throw ValidationError("negative sample size must be positive");
  NegativeExampleBank bank;
  bank.sample_size = sample_size;
  bank.seed = seed;
  for (std::size_t j = 0; j < codes.size(); ++j) {
    std::vector<std::string> pool;
    for (const auto& id : candidate_req_ids) {
      if (!gt.linked(id, codes[j])) pool.push_back(id);
    }
    Rng rng(mix64(seed ^ fnv1a64(codes[j])));
    rng.shuffle(std::span<std::string>(pool));
    if (pool.size() > sample_size) pool.resize(sample_size);
    bank.per_provision[codes[j]] = std::move(pool);
  }
  return bank;
}

PredictionSet predict_dynamic(const EmbeddingSet& req_embeddings, const SimilarityMatrix& matrix,
                              const NegativeExampleBank& bank) {
  PredictionSet out = empty_predictions(matrix, "dynamic");
  for (const auto& code : matrix.prov_codes()) {
    const auto it = bank.per_provision.find(code);
    if (it == bank.per_provision.end() || it->second.empty()) {
      throw ValidationError("provision \"" + code + "\" has no negative examples");
    }
  }
  for (std::size_t i = 0; i < matrix.rows(); ++i) {
    const auto& id = matrix.req_ids()[i];
    const auto& r = req_embeddings.at(id);
    auto& linked = out.predictions[id];
    auto& thresholds = out.pair_thresholds[id];
    for (std::size_t j = 0; j < matrix.cols(); ++j) {
      const auto& code = matrix.prov_codes()[j];
      const auto& negatives = bank.per_provision.at(code);
      double sum = 0.0;
      for (const auto& neg : negatives) sum += cosine(r, req_embeddings.at(neg));
      const double theta = sum / static_cast<double>(negatives.size());
      thresholds[code] = theta;
      if (matrix.at(i, j) > theta) linked.insert(code);
    }
  }
  return out;
}

PredictionSet predict_delta(const SimilarityMatrix& matrix) {
  if (matrix.cols() < 2) throw ValidationError("the delta strategy needs at least two provisions");
  PredictionSet out = empty_predictions(matrix, "delta");
  const auto& codes = matrix.prov_codes();
  std::vector<std::size_t> order(matrix.cols());
  for (std::size_t i = 0; i < matrix.rows(); ++i) {
    const auto row = matrix.row(i);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
      if (row[x] != row[y]) return row[x] > row[y];
      return codes[x] < codes[y];
    });
    double best_gap = 0.0;
    std::size_t best_k = order.size();
    for (std::size_t k = 0; k + 1 < order.size(); ++k) {
      const double gap = row[order[k]] - row[order[k + 1]];
      if (gap > best_gap) {
        best_gap = gap;
        best_k = k;
      }
    }
    auto& linked = out.predictions[matrix.req_ids()[i]];
    if (best_k == order.size()) {
      linked.insert(codes[order.front()]);
      out.thresholds_used[matrix.req_ids()[i]] = row[order.front()];
      continue;
    }
    const double theta = row[order[best_k + 1]];
    for (std::size_t j = 0; j < row.size(); ++j) {
      if (row[j] > theta) linked.insert(codes[j]);
    }
    out.thresholds_used[matrix.req_ids()[i]] = theta;
  }
  return out;
}

ThresholdCurve tune_threshold(const SimilarityMatrix& matrix_train, const TraceLinkSet& gt_train) {
  if (gt_train.restricted_to(matrix_train.req_ids()).link_count() == 0) {
    throw ValidationError("threshold tuning needs at least one training link");
  }
  std::vector<double> grid;
  for (int k = 1; k <= 99; ++k) grid.push_back(static_cast<double>(k) / 100.0);
  return curve_over(matrix_train, gt_train, grid);
}

ThresholdCurve sweep_thresholds(const SimilarityMatrix& matrix, const TraceLinkSet& gt,
                                std::size_t n_points) {
  if (n_points < 2) throw ValidationError("a threshold sweep needs at least two points");
  std::vector<double> grid;
  for (std::size_t k = 0; k < n_points; ++k) {
    grid.push_back(static_cast<double>(k) / static_cast<double>(n_points - 1));
  }
  return curve_over(matrix, gt, grid);
}

std::string curve_to_csv(const ThresholdCurve& curve) {
  std::ostringstream out;
  out.precision(17);
  out << "theta,f2\n";
  for (const auto& p : curve.points) out << p.theta << ',' << p.f2 << '\n';
  return out.str();
}

}  // namespace lrt
