#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "lrt/corpus.hpp"
#include "lrt/embeddings.hpp"
#include "lrt/text.hpp"

namespace lrt {

struct IndicatorFactors {
  double f1 = 0.0;  // occurrences inside c-traced requirements / occurrences in all training requirements
  double f2 = 0.0;  // share of c-traced requirements containing the term
  double f3 = 0.0;  // share of documents with c-traced requirements where one of them contains the term
  double weight() const { return f1 * f2 * f3; }
};

struct IndicatorTermModel {
  // code -> term -> weight; only positive weights are kept.
  std::map<std::string, std::map<std::string, double>> weights;
  // code -> sum of its weights.
  std::map<std::string, double> normalizer;
  // Codes without a single training positive; they have no weights.
  std::set<std::string> flagged;
  PreprocessConfig config;
  std::map<std::string, std::map<std::string, IndicatorFactors>> factors;
};

// Fits on the requirements of `train_doc_ids`, tokenized with `config`.
// Throws ValidationError when the training documents hold no link at all and
// ReferenceError for an unknown document id.
IndicatorTermModel fit_indicator_model(const Corpus& corpus, const std::vector<std::string>& train_doc_ids,
                                       PreprocessConfig config = PreprocessConfig::lsi());

// Sum of the weights of c's indicator terms present in the requirement
// (each term counted once) over the sum of all of c's weights; 0 when c has
// no weights. Throws ReferenceError for a code the model never saw.
double indicator_score(const IndicatorTermModel& model, const std::vector<std::string>& req_tokens,
                       const std::string& prov_code);

SimilarityMatrix indicator_score_matrix(const IndicatorTermModel& model,
                                        const std::vector<std::pair<std::string, std::vector<std::string>>>& reqs,
                                        const std::vector<std::string>& codes);

std::string indicator_model_to_json(const IndicatorTermModel& model);
IndicatorTermModel parse_indicator_model(const std::string& json_text);

}  // namespace lrt
