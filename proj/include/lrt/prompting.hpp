#pragma once

#include <filesystem>
#include <set>
#include <string>
#include <vector>

#include "lrt/corpus.hpp"
#include "lrt/embeddings.hpp"

namespace lrt {

enum class PromptVariant { kRice, kP1, kP2, kP3_1, kP3_2 };

inline constexpr PromptVariant kAllPromptVariants[] = {PromptVariant::kRice, PromptVariant::kP1, PromptVariant::kP2,
                                                       PromptVariant::kP3_1, PromptVariant::kP3_2};

std::string to_string(PromptVariant v);
// Accepts rice, p1, p2, p3_1, p3_2 (any case).
PromptVariant parse_prompt_variant(const std::string& s);

// True for variants that query one (requirement, provision) pair at a time.
bool is_pairwise(PromptVariant v);

inline constexpr const char* kElseCode = "ELSE";
inline constexpr const char* kDefaultRegulation = "GDPR";
inline constexpr std::size_t kRiceExampleCount = 5;

struct FewShotExample {
  std::string requirement_text;
  std::set<std::string> codes;
  std::string rationale;
};

std::vector<FewShotExample> parse_examples(const std::string& json_text);
std::vector<FewShotExample> load_examples(const std::filesystem::path& path);

// The catalog with the ELSE sentinel appended as its last entry.
std::vector<Provision> with_else_sentinel(std::vector<Provision> catalog);

// One "CODE: Title - description" line per provision, in catalog order.
std::string render_catalog(const std::vector<Provision>& catalog);

// Context, Examples, Instruction and Output Indicator, then the requirement.
// The catalog must end with the ELSE sentinel; exactly five examples whose
// codes all belong to the catalog. Throws ValidationError otherwise.
std::string build_rice_prompt(const std::vector<Provision>& catalog, const std::vector<FewShotExample>& examples,
                              const Requirement& requirement, const std::string& regulation = kDefaultRegulation);

std::string build_p1_prompt(const Requirement& requirement, const Provision& provision,
                            const std::string& regulation = kDefaultRegulation);
std::string build_p2_prompt(const Requirement& requirement, const std::vector<Provision>& catalog,
                            const std::string& regulation = kDefaultRegulation);
// `variant` must be kP3_1 or kP3_2.
std::string build_p3_prompt(PromptVariant variant, const Requirement& requirement, const Provision& provision,
                            const std::string& regulation = kDefaultRegulation);

// Codes of `prov_set` by descending cosine to `req_vector`, ties broken by
// code. Throws ValidationError unless 1 <= k <= |prov_set|.
std::vector<std::string> retrieve_topk(std::span<const double> req_vector, const EmbeddingSet& prov_set,
                                       std::size_t k);

struct ParsedPrediction {
  std::set<std::string> codes;
  std::string rationale;
  std::string raw;
  bool else_sentinel = false;
};

// Takes the first bracketed list holding a known code, otherwise the first
// block of lines listing codes ("ACC, SEC", "- ACC: ...", "Trace links: ACC").
// Codes are case-folded; unknown ones are dropped; ELSE yields an empty set.
// Text after the list is the rationale, minus a leading "Rationale:" label.
// Throws ParseError carrying the raw text when no known code appears.
ParsedPrediction parse_code_list(const std::string& raw, const std::vector<std::string>& catalog_codes);

// True iff the first <trace>...</trace> pair contains "yes" (any case).
// Throws ParseError when no complete tag pair exists.
bool parse_trace_tag(const std::string& raw);

// First standalone "yes" or "no" word (any case). Throws ParseError when
// neither appears.
bool parse_yes_no(const std::string& raw);

// "Trace links: [A, B]\nRationale: ..." as shown in the example output.
std::string render_example_output(const std::set<std::string>& codes, const std::string& rationale);

}  // namespace lrt
