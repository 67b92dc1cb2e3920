#include "lrt/prompting.hpp"

#include <algorithm>
#include <cctype>
#include <numeric>

#include <json.hpp>

#include "lrt/error.hpp"
#include "lrt/text.hpp"

namespace lrt {

using nlohmann::json;

namespace {

const char* const kRiceContext =
    "I am currently working on a task focused on establishing traceability between software requirements and "
    "regulatory codes. This involves analyzing and mapping requirements to relevant {REG} regulations, ensuring "
    "that our software development aligns with regulatory compliance. Below are the main regulatory codes that I "
    "want you to remember at first:";

const char* const kRiceExamples =
    "Here are five sample traceability examples. I've also added my rationale for tracing regulatory codes to the "
    "requirements for your reference.";

const char* const kRiceInstruction =
    "Find the trace links for a given requirement and provide the rationale behind your choice extended from the "
    "examples I provided. Please consider regulatory codes which I have not used in the examples. Pay attention to "
    "the roles (AS_ROLE) in the requirement, if there are any. Remember, regulations' text focus on personal data, "
    "but try to consider all types of data, role, or functionalities in a software system. Pay attention to "
    "commonsense and indirect relations between requirement and regulations. Aim to include regulations even if "
    "they have a low likelihood of being traced, prioritizing recall over precision. Choose at least one "
    "regulation for each requirement.";

const char* const kRiceOutputIndicator =
    "List of alphabetical order of regulatory codes (if any) similar to the examples I provided to you. Newline to "
    "explain the rational behind the choice(s).";

const char* const kP1Head =
    "Below are artifacts from a software system requirement and the {REG}. Is there a traceability link between "
    "(1) and (2)? Give your reasoning and then answer with 'yes' or 'no' enclosed in <trace> </trace>.";

const char* const kP2Head =
    "Act as a requirements engineering domain expert and list the IDs of the {REG} regulations that are dependent "
    "on the following requirement:";

const char* const kP3Scenario =
    "Consider the following scenario where the Requirement text represent requirements of the software system and "
    "Regulation represent a {REG} regulation.";

const char* const kP3_1Task =
    " Let's think step by step: 1. Identify the key elements of the requirement; 2. Match these elements with the "
    "regulation; 3. Highlight any gaps; 4. Infer implicit traceability; Finally, answer with Yes or No if there is "
    "a traceability relationship, and provide a brief rationale in about 10 words.";

const char* const kP3_2Task = " Answer with Yes or No: Does the regulation trace back to the requirement?";

std::string with_regulation(const char* tmpl, const std::string& regulation) {
  std::string s(tmpl);
  const std::string key = "{REG}";
  const auto pos = s.find(key);
  if (pos != std::string::npos) s.replace(pos, key.size(), regulation);
  return s;
}

std::string triple_quoted(const std::string& s) { return "'''" + s + "'''"; }

void require_text(const Requirement& r) {
  if (trim(r.text).empty()) throw ValidationError("requirement \"" + r.id + "\" has empty text");
}

std::string join_codes(const std::set<std::string>& codes) {
  std::string out;
  for (const auto& c : codes) {
    if (!out.empty()) out += ", ";
    out += c;
  }
  return out;
}

std::string upper(std::string s) {
  for (char& c : s) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return s;
}

std::string lower(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

bool is_code_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

// Splits on anything that cannot be part of a code.
std::vector<std::string> code_tokens(std::string_view s) {
  std::vector<std::string> out;
  std::string cur;
  for (const char c : s) {
    if (is_code_char(c)) {
      cur += c;
    } else if (!cur.empty()) {
      out.push_back(upper(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) out.push_back(upper(cur));
  return out;
}

std::string strip_rationale_label(std::string s) {
  s = trim(s);
  std::size_t i = 0;
  while (i < s.size() && (s[i] == '*' || s[i] == '#')) ++i;
  const std::string label = "rationale";
  if (lower(s.substr(i, label.size())) == label) {
    std::size_t j = i + label.size();
    while (j < s.size() && (s[j] == '*' || s[j] == ' ')) ++j;
    if (j < s.size() && s[j] == ':') {
      ++j;
      while (j < s.size() && s[j] == '*') ++j;
      return trim(s.substr(j));
    }
  }
  return s;
}

struct Known {
  std::set<std::string> codes;
  bool contains(const std::string& c) const { return codes.contains(c) || c == kElseCode; }
};

void absorb(ParsedPrediction& out, const std::vector<std::string>& tokens, const Known& known) {
  for (const auto& t : tokens) {
    if (t == kElseCode) {
      out.else_sentinel = true;
    } else if (known.codes.contains(t)) {
      out.codes.insert(t);
    }
  }
}

std::string strip_bullet(std::string line) {
  line = trim(line);
  std::size_t i = 0;
  while (i < line.size() && (line[i] == '-' || line[i] == '*' || line[i] == '+' || line[i] == ' ')) ++i;
  if (line.compare(i, 3, "\xe2\x80\xa2") == 0) i += 3;
  std::size_t j = i;
  while (j < line.size() && std::isdigit(static_cast<unsigned char>(line[j]))) ++j;
  if (j > i && j < line.size() && (line[j] == '.' || line[j] == ')')) i = j + 1;
  return trim(line.substr(i));
}

// Codes listed on one line, or nothing when the line is not a code line.
std::optional<std::vector<std::string>> line_codes(const std::string& raw_line, const Known& known) {
  const std::string line = strip_bullet(raw_line);
  if (line.empty()) return std::nullopt;
  const auto all_known = [&](const std::vector<std::string>& toks) {
    return !toks.empty() && std::all_of(toks.begin(), toks.end(), [&](const auto& t) { return known.contains(t); });
  };
  const auto whole = code_tokens(line);
  if (all_known(whole)) return whole;
  const auto colon = line.find(':');
  if (colon != std::string::npos) {
    const auto head = code_tokens(line.substr(0, colon));
    if (head.size() == 1 && known.contains(head.front())) return head;
    const auto tail = code_tokens(line.substr(colon + 1));
    if (all_known(tail)) return tail;
  }
  return std::nullopt;
}

}  // namespace

std::string to_string(PromptVariant v) {
  switch (v) {
    case PromptVariant::kRice: return "rice";
    case PromptVariant::kP1: return "p1";
    case PromptVariant::kP2: return "p2";
    case PromptVariant::kP3_1: return "p3_1";
    case PromptVariant::kP3_2: return "p3_2";
  }
  return "unknown";
}

PromptVariant parse_prompt_variant(const std::string& s) {
  const std::string l = lower(s);
  for (const auto v : kAllPromptVariants) {
    if (to_string(v) == l) return v;
  }
  throw ValidationError("unknown prompt variant \"" + s + "\" (expected rice, p1, p2, p3_1 or p3_2)");
}

bool is_pairwise(PromptVariant v) {
  return v == PromptVariant::kP1 || v == PromptVariant::kP3_1 || v == PromptVariant::kP3_2;
}

std::vector<FewShotExample> parse_examples(const std::string& json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ParseError("byte " + std::to_string(e.byte), e.what());
  }
  if (!root.is_object() || !root.contains("examples") || !root["examples"].is_array()) {
    throw ParseError("$", "expected an object with an \"examples\" array");
  }
  std::vector<FewShotExample> out;
  for (std::size_t i = 0; i < root["examples"].size(); ++i) {
    const auto& e = root["examples"][i];
    const std::string where = "examples[" + std::to_string(i) + "]";
    FewShotExample ex;
    try {
      ex.requirement_text = nfc(e.at("requirement").get<std::string>());
      ex.rationale = nfc(e.at("rationale").get<std::string>());
      for (const auto& c : e.at("codes")) ex.codes.insert(c.get<std::string>());
    } catch (const json::exception& err) {
      throw ParseError(where, err.what());
    }
    if (ex.codes.empty()) throw ValidationError(where + ": codes must be non-empty");
    if (trim(ex.rationale).empty()) throw ValidationError(where + ": rationale must be non-empty");
    if (trim(ex.requirement_text).empty()) throw ValidationError(where + ": requirement must be non-empty");
    out.push_back(std::move(ex));
  }
  return out;
}

std::vector<FewShotExample> load_examples(const std::filesystem::path& path) {
  return parse_examples(read_file(path));
}

std::vector<Provision> with_else_sentinel(std::vector<Provision> catalog) {
  catalog.push_back({kElseCode, "No trace link",
                     "The requirement does not trace to any of the regulatory codes listed above."});
  return catalog;
}

std::string render_catalog(const std::vector<Provision>& catalog) {
  std::string out;
  for (const auto& p : catalog) out += p.code + ": " + p.title + " - " + p.description + "\n";
  return out;
}

std::string build_rice_prompt(const std::vector<Provision>& catalog, const std::vector<FewShotExample>& examples,
                              const Requirement& requirement, const std::string& regulation) {
  require_text(requirement);
  if (catalog.empty() || catalog.back().code != kElseCode) {
    throw ValidationError("the RICE catalog must end with the ELSE sentinel");
  }
  std::set<std::string> codes;
  for (const auto& p : catalog) {
    if (!codes.insert(p.code).second) throw ValidationError("duplicate catalog code \"" + p.code + "\"");
  }
  if (examples.size() != kRiceExampleCount) {
    throw ValidationError("the RICE prompt needs exactly 5 examples, got " + std::to_string(examples.size()));
  }
  for (const auto& ex : examples) {
    for (const auto& c : ex.codes) {
      if (!codes.contains(c)) throw ReferenceError(c, "example code \"" + c + "\" is not in the catalog");
    }
  }

  std::string out = with_regulation(kRiceContext, regulation);
  out += "\n" + render_catalog(catalog) + "\n";
  out += kRiceExamples;
  out += "\n";
  for (const auto& ex : examples) {
    out += "\nRequirement: " + ex.requirement_text + "\n";
    out += "trace links: [" + join_codes(ex.codes) + "]\n";
    out += "rational behind choosing these codes: " + ex.rationale + "\n";
  }
  out += "\n";
  out += kRiceInstruction;
  out += "\n\n";
  out += kRiceOutputIndicator;
  out += "\n\nRequirement: " + requirement.text + "\n";
  return out;
}

std::string build_p1_prompt(const Requirement& requirement, const Provision& provision,
                            const std::string& regulation) {
  require_text(requirement);
  return with_regulation(kP1Head, regulation) + "\n(1) Requirement: " + triple_quoted(requirement.text) +
         "\n(2) Regulation: " + triple_quoted(provision_text(provision)) + "\n";
}

std::string build_p2_prompt(const Requirement& requirement, const std::vector<Provision>& catalog,
                            const std::string& regulation) {
  require_text(requirement);
  if (catalog.empty()) throw ValidationError("the P2 prompt needs a non-empty catalog");
  std::string list = render_catalog(catalog);
  if (!list.empty() && list.back() == '\n') list.pop_back();
  return with_regulation(kP2Head, regulation) + "\nRequirement: " + triple_quoted(requirement.text) +
         "\nList of Regulations: " + triple_quoted(list) + "\n";
}

std::string build_p3_prompt(PromptVariant variant, const Requirement& requirement, const Provision& provision,
                            const std::string& regulation) {
  require_text(requirement);
  std::string head = with_regulation(kP3Scenario, regulation);
  if (variant == PromptVariant::kP3_1) {
    head += kP3_1Task;
  } else if (variant == PromptVariant::kP3_2) {
    head += kP3_2Task;
  } else {
    throw ValidationError("build_p3_prompt needs variant p3_1 or p3_2, got " + to_string(variant));
  }
  return head + "\nRequirement: " + triple_quoted(requirement.text) + "\nRegulation: " + triple_quoted(provision_text(provision)) +
         "\n";
}

std::vector<std::string> retrieve_topk(std::span<const double> req_vector, const EmbeddingSet& prov_set,
                                       std::size_t k) {
  if (k == 0 || k > prov_set.size()) {
    throw ValidationError("top-k retrieval needs 1 <= k <= " + std::to_string(prov_set.size()));
  }
  std::vector<std::pair<double, std::string>> ranked;
  for (const auto& [code, v] : prov_set.vectors()) ranked.emplace_back(cosine(req_vector, v), code);
  std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return a.second < b.second;
  });
  std::vector<std::string> out;
  for (std::size_t i = 0; i < k; ++i) out.push_back(ranked[i].second);
  return out;
}

ParsedPrediction parse_code_list(const std::string& raw, const std::vector<std::string>& catalog_codes) {
  Known known;
  for (const auto& c : catalog_codes) known.codes.insert(upper(c));
  known.codes.erase(kElseCode);
  ParsedPrediction out;
  out.raw = raw;

  for (std::size_t open = raw.find('['); open != std::string::npos; open = raw.find('[', open + 1)) {
    const auto close = raw.find(']', open);
    if (close == std::string::npos) break;
    const auto tokens = code_tokens(std::string_view(raw).substr(open + 1, close - open - 1));
    if (std::none_of(tokens.begin(), tokens.end(), [&](const auto& t) { return known.contains(t); })) continue;
    absorb(out, tokens, known);
    out.rationale = strip_rationale_label(raw.substr(close + 1));
    if (!out.codes.empty()) out.else_sentinel = false;
    return out;
  }

  std::vector<std::string> lines;
  std::size_t start = 0;
  while (start <= raw.size()) {
    const auto nl = raw.find('\n', start);
    lines.push_back(raw.substr(start, nl == std::string::npos ? std::string::npos : nl - start));
    if (nl == std::string::npos) break;
    start = nl + 1;
  }
  std::size_t i = 0;
  while (i < lines.size() && !line_codes(lines[i], known)) ++i;
  if (i == lines.size()) {
    throw ParseError("response", "no recognizable provision code in LLM output: " + raw);
  }
  for (; i < lines.size(); ++i) {
    const auto codes = line_codes(lines[i], known);
    if (!codes) break;
    absorb(out, *codes, known);
  }
  std::string rest;
  for (std::size_t j = i; j < lines.size(); ++j) {
    rest += lines[j];
    if (j + 1 < lines.size()) rest += "\n";
  }
  out.rationale = strip_rationale_label(rest);
  if (!out.codes.empty()) out.else_sentinel = false;
  return out;
}

bool parse_trace_tag(const std::string& raw) {
  const std::string l = lower(raw);
  const auto open = l.find("<trace>");
  if (open == std::string::npos) throw ParseError("response", "no <trace> tag in LLM output: " + raw);
  const auto close = l.find("</trace>", open);
  if (close == std::string::npos) throw ParseError("response", "unterminated <trace> tag in LLM output: " + raw);
  return l.substr(open + 7, close - open - 7).find("yes") != std::string::npos;
}

bool parse_yes_no(const std::string& raw) {
  const std::string l = lower(raw);
  std::size_t i = 0;
  while (i < l.size()) {
    if (!std::isalpha(static_cast<unsigned char>(l[i]))) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < l.size() && std::isalpha(static_cast<unsigned char>(l[j]))) ++j;
    const std::string word = l.substr(i, j - i);
    if (word == "yes") return true;
    if (word == "no") return false;
    i = j;
  }
  throw ParseError("response", "no yes/no answer in LLM output: " + raw);
}

std::string render_example_output(const std::set<std::string>& codes, const std::string& rationale) {
  return "Trace links: [" + join_codes(codes) + "]\nRationale: " + rationale + "\n";
}

}  // namespace lrt
