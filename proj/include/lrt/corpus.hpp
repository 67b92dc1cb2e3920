#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace lrt {

inline constexpr int kCorpusFormatVersion = 1;

struct Provision {
  std::string code;
  std::string title;
  std::string description;

  bool operator==(const Provision&) const = default;
};

struct Requirement {
  std::string id;
  std::string text;
  std::string doc_id;

  bool operator==(const Requirement&) const = default;
};

struct Document {
  std::string id;
  std::string name;
  std::vector<Requirement> requirements;

  bool operator==(const Document&) const = default;
};

// Ground-truth or predicted links: requirement id -> provision codes.
// Requirements absent from the map have no links.
class TraceLinkSet {
 public:
  TraceLinkSet() = default;
  explicit TraceLinkSet(std::map<std::string, std::set<std::string>> links);

  // Codes linked to `req_id`; empty when none.
  const std::set<std::string>& codes(const std::string& req_id) const;
  bool linked(const std::string& req_id, const std::string& code) const;
  void add(const std::string& req_id, const std::string& code);

  // Copy keeping only the given requirements.
  TraceLinkSet restricted_to(const std::vector<std::string>& req_ids) const;

  std::size_t link_count() const;
  const std::map<std::string, std::set<std::string>>& links() const { return links_; }

  bool operator==(const TraceLinkSet& other) const;

 private:
  std::map<std::string, std::set<std::string>> links_;
};

struct TrainingPair {
  std::string req_id;
  std::string prov_code;
  int label = 0;

  bool operator==(const TrainingPair&) const = default;
};

class Corpus {
 public:
  Corpus() = default;
  // Validates every invariant; throws ValidationError / ReferenceError.
  Corpus(std::vector<Document> documents, std::vector<Provision> catalog, TraceLinkSet ground_truth);

  const std::vector<Document>& documents() const { return documents_; }
  const std::vector<Provision>& catalog() const { return catalog_; }
  const TraceLinkSet& ground_truth() const { return ground_truth_; }

  const Document& document(const std::string& doc_id) const;
  bool has_document(const std::string& doc_id) const;
  const Requirement& requirement(const std::string& req_id) const;
  const Provision& provision(const std::string& code) const;

  std::vector<std::string> codes() const;
  // Requirement ids in document order; all documents when `doc_ids` is empty.
  std::vector<std::string> requirement_ids() const;
  std::vector<std::string> requirement_ids(const std::vector<std::string>& doc_ids) const;
  std::vector<std::string> document_ids() const;
  std::size_t requirement_count() const;

 private:
  void validate() const;

  std::vector<Document> documents_;
  std::vector<Provision> catalog_;
  TraceLinkSet ground_truth_;
  std::map<std::string, std::pair<std::size_t, std::size_t>> req_index_;
};

Corpus parse_corpus(const std::string& json_text);
Corpus load_corpus(const std::filesystem::path& path);
std::string corpus_to_json(const Corpus& corpus);
void save_corpus(const Corpus& corpus, const std::filesystem::path& path);

// All requirement x provision pairs of the non-held-out documents, in
// document / requirement / catalog order.
std::vector<TrainingPair> build_training_pairs(const Corpus& corpus,
                                               const std::set<std::string>& heldout_doc_ids);

// Text embedded for a provision.
enum class ProvisionText { kTitle, kTitleAndDescription };
std::string provision_text(const Provision& p, ProvisionText mode = ProvisionText::kTitleAndDescription);

// Reads a whole file; throws Error when unreadable.
std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const std::string& contents);

}  // namespace lrt
