#include "lrt/baselines/lda.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include <json.hpp>

#include "lrt/error.hpp"
#include "lrt/random.hpp"
#include "model_json.hpp"

namespace lrt {

using nlohmann::json;

namespace {

std::size_t draw(Rng& rng, const std::vector<double>& weights, double total) {
  double u = rng.unit() * total;
  for (std::size_t t = 0; t < weights.size(); ++t) {
    u -= weights[t];
    if (u < 0.0) return t;
  }
  return weights.size() - 1;
}

void normalize_row(std::vector<double>& row) {
  double s = 0.0;
  for (const double x : row) s += x;
  for (double& x : row) x /= s;
}

std::vector<std::size_t> known_ids(const LdaModel& model, const std::vector<std::string>& tokens) {
  std::vector<std::size_t> ids;
  for (const auto& t : tokens) {
    const auto it = std::lower_bound(model.vocabulary.begin(), model.vocabulary.end(), t);
    if (it != model.vocabulary.end() && *it == t) ids.push_back(static_cast<std::size_t>(it - model.vocabulary.begin()));
  }
  return ids;
}

}  // namespace

LdaModel fit_lda(const std::vector<std::vector<std::string>>& docs, std::size_t topics, double alpha, double beta,
                 int iterations, std::uint64_t seed, const GibbsObserver& observer) {
  if (topics == 0) throw ValidationError("LDA needs at least one topic");
  if (!(alpha > 0.0) || !(beta > 0.0)) throw ValidationError("LDA priors must be positive");
  if (iterations < 1) throw ValidationError("LDA needs at least one iteration");

  LdaModel model;
  model.topics = topics;
  model.alpha = alpha;
  model.beta = beta;
  model.iterations = iterations;
  model.seed = seed;
  std::set<std::string> vocab;
  for (const auto& d : docs) vocab.insert(d.begin(), d.end());
  if (vocab.empty()) throw ValidationError("cannot fit LDA on an empty corpus");
  model.vocabulary.assign(vocab.begin(), vocab.end());
  const std::size_t v = model.vocabulary.size();

  std::vector<std::vector<std::size_t>> words;
  words.reserve(docs.size());
  for (const auto& d : docs) words.push_back(known_ids(model, d));

  Rng rng(seed);
  std::vector<std::vector<std::size_t>> z(docs.size());
  std::vector<std::vector<std::uint32_t>> ndt(docs.size(), std::vector<std::uint32_t>(topics, 0));
  std::vector<std::vector<std::uint32_t>> ntw(topics, std::vector<std::uint32_t>(v, 0));
  std::vector<std::uint32_t> nt(topics, 0);
  for (std::size_t d = 0; d < words.size(); ++d) {
    z[d].resize(words[d].size());
    for (std::size_t i = 0; i < words[d].size(); ++i) {
      const auto t = static_cast<std::size_t>(rng.below(topics));
      z[d][i] = t;
      ++ndt[d][t];
      ++ntw[t][words[d][i]];
      ++nt[t];
    }
  }

  const int averaged = std::min(kLdaAveragedSweeps, iterations);
  model.topic_word.assign(topics, std::vector<double>(v, 0.0));
  model.doc_topic.assign(docs.size(), std::vector<double>(topics, 0.0));
  std::vector<double> weights(topics);
  const double vbeta = static_cast<double>(v) * beta;
  const double talpha = static_cast<double>(topics) * alpha;

  for (int sweep = 1; sweep <= iterations; ++sweep) {
    for (std::size_t d = 0; d < words.size(); ++d) {
      for (std::size_t i = 0; i < words[d].size(); ++i) {
        const std::size_t w = words[d][i];
        const std::size_t old = z[d][i];
        --ndt[d][old];
        --ntw[old][w];
        --nt[old];
        double total = 0.0;
        for (std::size_t t = 0; t < topics; ++t) {
          weights[t] = (ndt[d][t] + alpha) * (ntw[t][w] + beta) / (nt[t] + vbeta);
          total += weights[t];
        }
        const std::size_t fresh = draw(rng, weights, total);
        z[d][i] = fresh;
        ++ndt[d][fresh];
        ++ntw[fresh][w];
        ++nt[fresh];
      }
    }
    if (observer) {
      observer(GibbsState{sweep, &words, &z, &ndt, &ntw, &nt});
    }
    if (sweep > iterations - averaged) {
      for (std::size_t t = 0; t < topics; ++t) {
        for (std::size_t w = 0; w < v; ++w) model.topic_word[t][w] += (ntw[t][w] + beta) / (nt[t] + vbeta);
      }
      for (std::size_t d = 0; d < words.size(); ++d) {
        const double len = static_cast<double>(words[d].size());
        for (std::size_t t = 0; t < topics; ++t) model.doc_topic[d][t] += (ndt[d][t] + alpha) / (len + talpha);
      }
    }
  }
  for (auto& row : model.topic_word) normalize_row(row);
  for (auto& row : model.doc_topic) normalize_row(row);
  return model;
}

std::vector<double> lda_fold_in(const LdaModel& model, const std::vector<std::string>& tokens, int iterations) {
  if (iterations < 1) throw ValidationError("fold-in needs at least one iteration");
  const auto words = known_ids(model, tokens);
  if (words.empty()) throw ValidationError("document has no terms in the LDA vocabulary");
  std::uint64_t h = fnv1a64("");
  for (const auto& t : tokens) h = fnv1a64(t, fnv1a64("\x1f", h));
  Rng rng(mix64(model.seed ^ h));

  const std::size_t topics = model.topics;
  std::vector<std::size_t> z(words.size());
  std::vector<std::uint32_t> ndt(topics, 0);
  for (std::size_t i = 0; i < words.size(); ++i) {
    z[i] = static_cast<std::size_t>(rng.below(topics));
    ++ndt[z[i]];
  }
  const int averaged = std::max(1, iterations / 2);
  const double len = static_cast<double>(words.size());
  const double talpha = static_cast<double>(topics) * model.alpha;
  std::vector<double> theta(topics, 0.0);
  std::vector<double> weights(topics);
  for (int sweep = 1; sweep <= iterations; ++sweep) {
    for (std::size_t i = 0; i < words.size(); ++i) {
      --ndt[z[i]];
      double total = 0.0;
      for (std::size_t t = 0; t < topics; ++t) {
        weights[t] = (ndt[t] + model.alpha) * model.topic_word[t][words[i]];
        total += weights[t];
      }
      z[i] = draw(rng, weights, total);
      ++ndt[z[i]];
    }
    if (sweep > iterations - averaged) {
      for (std::size_t t = 0; t < topics; ++t) theta[t] += (ndt[t] + model.alpha) / (len + talpha);
    }
  }
  normalize_row(theta);
  return theta;
}

SimilarityMatrix lda_similarity_matrix(const LdaModel& model,
                                       const std::vector<std::pair<std::string, std::vector<std::string>>>& req_docs,
                                       const std::vector<std::pair<std::string, std::vector<std::string>>>& prov_docs,
                                       DegeneratePolicy policy) {
  const auto fold = [&](const std::vector<std::pair<std::string, std::vector<std::string>>>& docs,
                        std::vector<std::string>& ids) {
    EmbeddingSet out(model.topics, "lda");
    for (const auto& [id, tokens] : docs) {
      ids.push_back(id);
      if (policy == DegeneratePolicy::kScoreZero && known_ids(model, tokens).empty()) {
        out.add(id, std::vector<double>(model.topics, 0.0));
        continue;
      }
      out.add(id, lda_fold_in(model, tokens));
    }
    return out;
  };
  std::vector<std::string> req_ids;
  std::vector<std::string> codes;
  const EmbeddingSet reqs = fold(req_docs, req_ids);
  const EmbeddingSet provs = fold(prov_docs, codes);
  return build_similarity_matrix(reqs, req_ids, provs, codes, policy);
}

std::string lda_model_to_json(const LdaModel& model) {
  json root;
  root["format_version"] = 1;
  root["kind"] = "lda";
  root["topics"] = model.topics;
  root["alpha"] = model.alpha;
  root["beta"] = model.beta;
  root["iterations"] = model.iterations;
  root["seed"] = model.seed;
  root["vocabulary"] = model.vocabulary;
  root["topic_word"] = model.topic_word;
  root["doc_topic"] = model.doc_topic;
  return root.dump(2) + "\n";
}

LdaModel parse_lda_model(const std::string& json_text) {
  const json root = detail::parse_model_json(json_text, "lda");
  LdaModel model;
  try {
    model.topics = root.at("topics").get<std::size_t>();
    model.alpha = root.at("alpha").get<double>();
    model.beta = root.at("beta").get<double>();
    model.iterations = root.at("iterations").get<int>();
    model.seed = root.at("seed").get<std::uint64_t>();
    model.vocabulary = root.at("vocabulary").get<std::vector<std::string>>();
    model.topic_word = root.at("topic_word").get<std::vector<std::vector<double>>>();
    model.doc_topic = root.at("doc_topic").get<std::vector<std::vector<double>>>();
  } catch (const json::exception& e) {
    throw ParseError("lda model", e.what());
  }
  if (model.topic_word.size() != model.topics) throw ValidationError("topic_word must have one row per topic");
  for (const auto& row : model.topic_word) {
    if (row.size() != model.vocabulary.size()) throw ValidationError("topic_word rows must span the vocabulary");
    double s = 0.0;
    for (const double x : row) s += x;
    if (std::abs(s - 1.0) > 1e-9) throw ValidationError("topic_word rows must sum to 1");
  }
  if (!(model.alpha > 0.0) || !(model.beta > 0.0)) throw ValidationError("LDA priors must be positive");
  return model;
}

}  // namespace lrt
