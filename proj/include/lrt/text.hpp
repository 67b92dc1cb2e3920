#pragma once

#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace lrt {

// Token filters applied by normalize(). Filters run in a fixed order:
// lowercase, punctuation strip, stem, stopword removal.
struct PreprocessConfig {
  bool lowercase = false;
  bool strip_punctuation = false;
  bool remove_stopwords = false;
  bool stem = false;
  std::set<std::string> stopword_list;

  // Throws ValidationError when remove_stopwords is set with an empty list.
  void validate() const;

  // Lowercase + punctuation strip.
  static PreprocessConfig basic();
  // basic() + English stopwords (LSI, TF-IDF, indicator baseline).
  static PreprocessConfig lsi();
  // lsi() + stemming (LDA).
  static PreprocessConfig lda();
};

// The shipped English stopword list (also in data/stopwords_en.txt).
const std::set<std::string>& english_stopwords();

// Default abbreviations that never end a sentence, lowercase with the
// trailing period, e.g. "e.g.".
const std::vector<std::string>& default_abbreviations();

// Canonical composition (NFC) of UTF-8 text. Invalid UTF-8 raises ParseError.
std::string nfc(std::string_view text);

// ASCII/Unicode simple lowercase of UTF-8 text.
std::string to_lower(std::string_view text);

std::string trim(std::string_view text);

// Rule-based splitter: a sentence ends at '.', '!' or '?' (plus trailing
// closing quotes/brackets) followed by whitespace or end of text, unless the
// word carrying the period is a known abbreviation.
std::vector<std::string> split_sentences(std::string_view text);
std::vector<std::string> split_sentences(std::string_view text,
                                         const std::vector<std::string>& abbreviations);

// Maximal runs of letters/digits; every other non-space code point is a
// token of its own.
std::vector<std::string> tokenize(std::string_view text);

// Suffix-stripping stemmer applied to a fixpoint, so stem(stem(w)) == stem(w).
std::string stem(std::string_view word);

std::vector<std::string> normalize(const std::vector<std::string>& tokens,
                                   const PreprocessConfig& config);

// tokenize() followed by normalize().
std::vector<std::string> preprocess(std::string_view text, const PreprocessConfig& config);

}  // namespace lrt
