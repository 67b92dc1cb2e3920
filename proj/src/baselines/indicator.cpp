#include "lrt/baselines/indicator.hpp"

#include <cmath>

#include <json.hpp>

#include "lrt/error.hpp"
#include "model_json.hpp"

namespace lrt {

using nlohmann::json;

IndicatorTermModel fit_indicator_model(const Corpus& corpus, const std::vector<std::string>& train_doc_ids,
                                       PreprocessConfig config) {
  config.validate();
  for (const auto& d : train_doc_ids) {
    if (!corpus.has_document(d)) throw ReferenceError(d, "unknown training document \"" + d + "\"");
  }
  IndicatorTermModel model;
  model.config = config;

  struct Req {
    std::string doc;
    std::map<std::string, int> counts;
  };
  std::map<std::string, Req> reqs;
  std::map<std::string, int> total_counts;
  for (const auto& doc_id : train_doc_ids) {
    for (const auto& r : corpus.document(doc_id).requirements) {
      Req entry{doc_id, {}};
      for (const auto& t : preprocess(r.text, config)) ++entry.counts[t];
      for (const auto& [t, n] : entry.counts) total_counts[t] += n;
      reqs.emplace(r.id, std::move(entry));
    }
  }

  bool any_link = false;
  for (const auto& code : corpus.codes()) {
    std::vector<const Req*> traced;
    for (const auto& [id, req] : reqs) {
      if (corpus.ground_truth().linked(id, code)) traced.push_back(&req);
    }
    if (traced.empty()) {
      model.flagged.insert(code);
      model.normalizer[code] = 0.0;
      model.weights[code];
      continue;
    }
    any_link = true;

    std::map<std::string, int> in_traced;
    std::map<std::string, int> reqs_with;
    std::map<std::string, std::set<std::string>> docs_with;
    std::set<std::string> traced_docs;
    for (const Req* r : traced) {
      traced_docs.insert(r->doc);
      for (const auto& [t, n] : r->counts) {
        in_traced[t] += n;
        ++reqs_with[t];
        docs_with[t].insert(r->doc);
      }
    }
    auto& w = model.weights[code];
    auto& f = model.factors[code];
    double sum = 0.0;
    for (const auto& [t, n] : in_traced) {
      IndicatorFactors factors;
      factors.f1 = static_cast<double>(n) / static_cast<double>(total_counts.at(t));
      factors.f2 = static_cast<double>(reqs_with.at(t)) / static_cast<double>(traced.size());
      factors.f3 = static_cast<double>(docs_with.at(t).size()) / static_cast<double>(traced_docs.size());
      const double weight = factors.weight();
      if (weight <= 0.0) continue;
      f[t] = factors;
      w[t] = weight;
      sum += weight;
    }
    model.normalizer[code] = sum;
  }
  if (!any_link) throw ValidationError("the training documents contain no trace link");
  return model;
}

double indicator_score(const IndicatorTermModel& model, const std::vector<std::string>& req_tokens,
                       const std::string& prov_code) {
  const auto it = model.weights.find(prov_code);
  if (it == model.weights.end()) throw ReferenceError(prov_code, "indicator model has no provision \"" + prov_code + "\"");
  const double denom = model.normalizer.at(prov_code);
  if (denom == 0.0) return 0.0;
  const std::set<std::string> distinct(req_tokens.begin(), req_tokens.end());
  double num = 0.0;
  for (const auto& t : distinct) {
    const auto w = it->second.find(t);
    if (w != it->second.end()) num += w->second;
  }
  return std::min(1.0, num / denom);
}

SimilarityMatrix indicator_score_matrix(const IndicatorTermModel& model,
                                        const std::vector<std::pair<std::string, std::vector<std::string>>>& reqs,
                                        const std::vector<std::string>& codes) {
  std::vector<std::string> ids;
  std::vector<double> scores;
  scores.reserve(reqs.size() * codes.size());
  for (const auto& [id, tokens] : reqs) {
    ids.push_back(id);
    for (const auto& c : codes) scores.push_back(indicator_score(model, tokens, c));
  }
  return SimilarityMatrix(std::move(ids), codes, std::move(scores));
}

std::string indicator_model_to_json(const IndicatorTermModel& model) {
  json root;
  root["format_version"] = 1;
  root["kind"] = "indicator";
  root["config"] = detail::config_to_json(model.config);
  root["weights"] = model.weights;
  root["normalizer"] = model.normalizer;
  root["flagged"] = model.flagged;
  return root.dump(2) + "\n";
}

IndicatorTermModel parse_indicator_model(const std::string& json_text) {
  const json root = detail::parse_model_json(json_text, "indicator");
  IndicatorTermModel model;
  try {
    model.config = detail::config_from_json(root.at("config"));
    model.weights = root.at("weights").get<std::map<std::string, std::map<std::string, double>>>();
    model.normalizer = root.at("normalizer").get<std::map<std::string, double>>();
    model.flagged = root.at("flagged").get<std::set<std::string>>();
  } catch (const json::exception& e) {
    throw ParseError("indicator model", e.what());
  }
  for (const auto& [code, terms] : model.weights) {
    if (!model.normalizer.contains(code)) throw ValidationError("missing normalizer for \"" + code + "\"");
    for (const auto& [t, w] : terms) {
      if (!std::isfinite(w) || w < 0.0) throw ValidationError("indicator weights must be finite and non-negative");
    }
  }
  return model;
}

}  // namespace lrt
