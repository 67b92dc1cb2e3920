#include "lrt/text.hpp"

#include <algorithm>
#include <array>

#include <unicode/normalizer2.h>
#include <unicode/uchar.h>
#include <unicode/unistr.h>
#include <unicode/utf8.h>

#include "lrt/error.hpp"

namespace lrt {

namespace {

bool is_ascii_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

bool is_terminal(char c) { return c == '.' || c == '!' || c == '?'; }

bool is_closer(char c) { return c == '"' || c == '\'' || c == ')' || c == ']'; }

bool ends_with(std::string_view s, std::string_view suffix) {
  return s.size() >= suffix.size() && s.substr(s.size() - suffix.size()) == suffix;
}

bool has_vowel(std::string_view s) {
  return s.find_first_of("aeiouy") != std::string_view::npos;
}

bool has_alnum(std::string_view token) {
  const auto* bytes = reinterpret_cast<const uint8_t*>(token.data());
  const auto length = static_cast<int32_t>(token.size());
  int32_t i = 0;
  while (i < length) {
    UChar32 c;
    U8_NEXT(bytes, i, length, c);
    if (c >= 0 && u_isalnum(c)) return true;
  }
  return false;
}

// One rewrite step; returns false when no rule applies.
bool stem_step(std::string& w) {
  struct Rule {
    std::string_view suffix;
    std::string_view replacement;
    std::size_t min_remaining;
    bool needs_vowel;
  };
  static constexpr std::array<Rule, 5> kRules{{
      {"sses", "ss", 1, false},
      {"ies", "y", 2, false},
      {"ing", "", 3, true},
      {"ed", "", 3, true},
      {"ly", "", 3, true},
  }};
  for (const auto& rule : kRules) {
    if (!ends_with(w, rule.suffix)) continue;
    const std::string_view remaining(w.data(), w.size() - rule.suffix.size());
    if (remaining.size() < rule.min_remaining) continue;
    if (rule.needs_vowel && !has_vowel(remaining)) continue;
    w = std::string(remaining) + std::string(rule.replacement);
    return true;
  }
  if (ends_with(w, "s") && !ends_with(w, "ss") && !ends_with(w, "us") && !ends_with(w, "is") &&
      w.size() - 1 >= 3) {
    w.pop_back();
    return true;
  }
  if (ends_with(w, "e") && w.size() - 1 >= 3) {
    w.pop_back();
    return true;
  }
  return false;
}

}  // namespace

void PreprocessConfig::validate() const {
  if (remove_stopwords && stopword_list.empty()) {
    throw ValidationError("remove_stopwords is set but the stopword list is empty");
  }
}

PreprocessConfig PreprocessConfig::basic() {
  PreprocessConfig c;
  c.lowercase = true;
  c.strip_punctuation = true;
  return c;
}

PreprocessConfig PreprocessConfig::lsi() {
  PreprocessConfig c = basic();
  c.remove_stopwords = true;
  c.stopword_list = english_stopwords();
  return c;
}

PreprocessConfig PreprocessConfig::lda() {
  PreprocessConfig c = lsi();
  c.stem = true;
  return c;
}

const std::vector<std::string>& default_abbreviations() {
  static const std::vector<std::string> kList = {
      "e.g.", "i.e.", "cf.", "vs.", "viz.", "approx.", "incl.", "resp.", "no.", "nos.",
      "art.", "arts.", "sec.", "fig.", "para.", "mr.", "mrs.", "ms.", "dr.", "prof.",
      "st.", "jr.", "sr.", "inc.", "ltd.", "co.", "corp.", "dept.", "min.", "max."};
  return kList;
}

std::string nfc(std::string_view text) {
  const auto* bytes = reinterpret_cast<const uint8_t*>(text.data());
  const auto length = static_cast<int32_t>(text.size());
  for (int32_t i = 0; i < length;) {
    const int32_t at = i;
    UChar32 c;
    U8_NEXT(bytes, i, length, c);
    if (c < 0) throw ParseError("byte " + std::to_string(at), "invalid UTF-8 sequence");
  }
  UErrorCode status = U_ZERO_ERROR;
  const icu::Normalizer2* normalizer = icu::Normalizer2::getNFCInstance(status);
  if (U_FAILURE(status)) throw Error("ICU NFC normalizer unavailable");
  const icu::UnicodeString source = icu::UnicodeString::fromUTF8(
      icu::StringPiece(text.data(), static_cast<int32_t>(text.size())));
  if (normalizer->isNormalized(source, status) && U_SUCCESS(status)) return std::string(text);
  status = U_ZERO_ERROR;
  const icu::UnicodeString composed = normalizer->normalize(source, status);
  if (U_FAILURE(status)) throw Error("NFC normalization failed");
  std::string out;
  composed.toUTF8String(out);
  return out;
}

std::string to_lower(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  const auto* bytes = reinterpret_cast<const uint8_t*>(text.data());
  const auto length = static_cast<int32_t>(text.size());
  int32_t i = 0;
  while (i < length) {
    const int32_t start = i;
    UChar32 c;
    U8_NEXT(bytes, i, length, c);
    if (c < 0) {
      out.append(text.substr(start, i - start));
      continue;
    }
    const UChar32 lower = u_tolower(c);
    uint8_t buf[U8_MAX_LENGTH];
    int32_t n = 0;
    UBool error = false;
    U8_APPEND(buf, n, U8_MAX_LENGTH, lower, error);
    if (error) {
      out.append(text.substr(start, i - start));
      continue;
    }
    out.append(reinterpret_cast<const char*>(buf), n);
  }
  return out;
}

std::string trim(std::string_view text) {
  std::size_t b = 0;
  std::size_t e = text.size();
  while (b < e && is_ascii_space(text[b])) ++b;
  while (e > b && is_ascii_space(text[e - 1])) --e;
  return std::string(text.substr(b, e - b));
}

std::vector<std::string> split_sentences(std::string_view text) {
  return split_sentences(text, default_abbreviations());
}

std::vector<std::string> split_sentences(std::string_view text,
                                         const std::vector<std::string>& abbreviations) {
  std::vector<std::string> out;
  std::size_t start = 0;
  std::size_t i = 0;
  const auto emit = [&](std::size_t end) {
    std::string sentence = trim(text.substr(start, end - start));
    if (!sentence.empty()) out.push_back(std::move(sentence));
    start = end;
  };
  while (i < text.size()) {
    if (!is_terminal(text[i])) {
      ++i;
      continue;
    }
    std::size_t j = i + 1;
    while (j < text.size() && (is_terminal(text[j]) || is_closer(text[j]))) ++j;
    const bool at_break = j == text.size() || is_ascii_space(text[j]);
    if (at_break && text[i] == '.' && j == i + 1) {
      std::size_t w = i;
      while (w > start && !is_ascii_space(text[w - 1])) --w;
      std::string word = to_lower(text.substr(w, i + 1 - w));
      while (!word.empty() && (word.front() == '(' || word.front() == '"' || word.front() == '\'')) {
        word.erase(word.begin());
      }
      if (std::find(abbreviations.begin(), abbreviations.end(), word) != abbreviations.end()) {
        i = j;
        continue;
      }
    }
    if (at_break) emit(j);
    i = j;
  }
  emit(text.size());
  return out;
}

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  const auto* bytes = reinterpret_cast<const uint8_t*>(text.data());
  const auto length = static_cast<int32_t>(text.size());
  int32_t i = 0;
  int32_t word_start = -1;
  while (i < length) {
    const int32_t at = i;
    UChar32 c;
    U8_NEXT(bytes, i, length, c);
    const bool word_char = c >= 0 && u_isalnum(c);
    if (word_char) {
      if (word_start < 0) word_start = at;
      continue;
    }
    if (word_start >= 0) {
      tokens.emplace_back(text.substr(word_start, at - word_start));
      word_start = -1;
    }
    if (c >= 0 && (u_isUWhiteSpace(c) || u_isspace(c))) continue;
    tokens.emplace_back(text.substr(at, i - at));
  }
  if (word_start >= 0) tokens.emplace_back(text.substr(word_start));
  return tokens;
}

std::string stem(std::string_view word) {
  std::string w(word);
  while (stem_step(w)) {
  }
  return w;
}

std::vector<std::string> normalize(const std::vector<std::string>& tokens,
                                   const PreprocessConfig& config) {
  config.validate();
  std::vector<std::string> out;
  out.reserve(tokens.size());
  for (const auto& token : tokens) {
    std::string t = config.lowercase ? to_lower(token) : token;
    if (config.strip_punctuation && !has_alnum(t)) continue;
    std::string s = config.stem ? stem(t) : t;
    if (config.remove_stopwords) {
      const auto& list = config.stopword_list;
      if (list.contains(to_lower(t)) || list.contains(to_lower(s))) continue;
    }
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<std::string> preprocess(std::string_view text, const PreprocessConfig& config) {
  return normalize(tokenize(text), config);
}

}  // namespace lrt
