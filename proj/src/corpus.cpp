#include "lrt/corpus.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "lrt/error.hpp"
#include "lrt/text.hpp"

namespace lrt {

using nlohmann::json;

namespace {

const std::set<std::string> kNoCodes;

std::string line_column(const std::string& text, std::size_t byte) {
  std::size_t line = 1;
  std::size_t column = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      column = 1;
    } else {
      ++column;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(column);
}

const json& member(const json& obj, const char* key, const std::string& where) {
  if (!obj.is_object()) throw ParseError(where, "expected an object");
  const auto it = obj.find(key);
  if (it == obj.end()) throw ParseError(where, std::string("missing field \"") + key + "\"");
  return *it;
}

std::string string_field(const json& obj, const char* key, const std::string& where) {
  const json& v = member(obj, key, where);
  if (!v.is_string()) throw ParseError(where + "." + key, "expected a string");
  try {
    return nfc(v.get<std::string>());
  } catch (const ParseError& e) {
    throw ParseError(where + "." + key, e.what());
  }
}

const json& array_field(const json& obj, const char* key, const std::string& where) {
  const json& v = member(obj, key, where);
  if (!v.is_array()) throw ParseError(where + "." + key, "expected an array");
  return v;
}

}  // namespace

TraceLinkSet::TraceLinkSet(std::map<std::string, std::set<std::string>> links)
    : links_(std::move(links)) {}

const std::set<std::string>& TraceLinkSet::codes(const std::string& req_id) const {
  const auto it = links_.find(req_id);
  return it == links_.end() ? kNoCodes : it->second;
}

bool TraceLinkSet::linked(const std::string& req_id, const std::string& code) const {
  return codes(req_id).contains(code);
}

void TraceLinkSet::add(const std::string& req_id, const std::string& code) {
  links_[req_id].insert(code);
}

TraceLinkSet TraceLinkSet::restricted_to(const std::vector<std::string>& req_ids) const {
  std::map<std::string, std::set<std::string>> out;
  for (const auto& id : req_ids) {
    const auto it = links_.find(id);
    if (it != links_.end() && !it->second.empty()) out.emplace(id, it->second);
  }
  return TraceLinkSet(std::move(out));
}

std::size_t TraceLinkSet::link_count() const {
  std::size_t n = 0;
  for (const auto& [id, codes] : links_) n += codes.size();
  return n;
}

bool TraceLinkSet::operator==(const TraceLinkSet& other) const {
  // Empty entries are equivalent to missing ones.
  const auto non_empty = [](const TraceLinkSet& s) {
    std::map<std::string, std::set<std::string>> m;
    for (const auto& [id, codes] : s.links_) {
      if (!codes.empty()) m.emplace(id, codes);
    }
    return m;
  };
  return non_empty(*this) == non_empty(other);
}

Corpus::Corpus(std::vector<Document> documents, std::vector<Provision> catalog,
               TraceLinkSet ground_truth)
    : documents_(std::move(documents)),
      catalog_(std::move(catalog)),
      ground_truth_(std::move(ground_truth)) {
  for (std::size_t d = 0; d < documents_.size(); ++d) {
    for (std::size_t r = 0; r < documents_[d].requirements.size(); ++r) {
      auto& req = documents_[d].requirements[r];
      req.doc_id = documents_[d].id;
      if (!req_index_.emplace(req.id, std::make_pair(d, r)).second) {
        throw ValidationError("duplicate requirement id \"" + req.id + "\"");
      }
    }
  }
  validate();
}

void Corpus::validate() const {
  if (catalog_.empty()) throw ValidationError("provision catalog is empty");
  std::set<std::string> codes;
  for (const auto& p : catalog_) {
    if (p.code.empty()) throw ValidationError("provision with empty code");
    if (trim(p.description).empty()) {
      throw ValidationError("provision \"" + p.code + "\" has an empty description");
    }
    if (!codes.insert(p.code).second) {
      throw ValidationError("duplicate provision code \"" + p.code + "\"");
    }
  }
  std::set<std::string> doc_ids;
  for (const auto& d : documents_) {
    if (d.id.empty()) throw ValidationError("document with empty id");
    if (!doc_ids.insert(d.id).second) throw ValidationError("duplicate document id \"" + d.id + "\"");
    for (const auto& r : d.requirements) {
      if (r.id.empty()) throw ValidationError("requirement with empty id in document \"" + d.id + "\"");
      if (trim(r.text).empty()) {
        throw ValidationError("requirement \"" + r.id + "\" has empty text");
      }
    }
  }
  for (const auto& [req_id, linked] : ground_truth_.links()) {
    if (!req_index_.contains(req_id)) {
      throw ReferenceError(req_id, "trace link references unknown requirement \"" + req_id + "\"");
    }
    for (const auto& code : linked) {
      if (!codes.contains(code)) {
        throw ReferenceError(code, "requirement \"" + req_id + "\" links to unknown provision \"" +
                                       code + "\"");
      }
    }
  }
}

const Document& Corpus::document(const std::string& doc_id) const {
  for (const auto& d : documents_) {
    if (d.id == doc_id) return d;
  }
  throw ReferenceError(doc_id, "unknown document \"" + doc_id + "\"");
}

bool Corpus::has_document(const std::string& doc_id) const {
  for (const auto& d : documents_) {
    if (d.id == doc_id) return true;
  }
  return false;
}

const Requirement& Corpus::requirement(const std::string& req_id) const {
  const auto it = req_index_.find(req_id);
  if (it == req_index_.end()) throw ReferenceError(req_id, "unknown requirement \"" + req_id + "\"");
  return documents_[it->second.first].requirements[it->second.second];
}

const Provision& Corpus::provision(const std::string& code) const {
  for (const auto& p : catalog_) {
    if (p.code == code) return p;
  }
  throw ReferenceError(code, "unknown provision \"" + code + "\"");
}

std::vector<std::string> Corpus::codes() const {
  std::vector<std::string> out;
  out.reserve(catalog_.size());
  for (const auto& p : catalog_) out.push_back(p.code);
  return out;
}

std::vector<std::string> Corpus::requirement_ids() const {
  std::vector<std::string> out;
  for (const auto& d : documents_) {
    for (const auto& r : d.requirements) out.push_back(r.id);
  }
  return out;
}

std::vector<std::string> Corpus::requirement_ids(const std::vector<std::string>& doc_ids) const {
  std::vector<std::string> out;
  for (const auto& id : doc_ids) {
    for (const auto& r : document(id).requirements) out.push_back(r.id);
  }
  return out;
}

std::vector<std::string> Corpus::document_ids() const {
  std::vector<std::string> out;
  for (const auto& d : documents_) out.push_back(d.id);
  return out;
}

std::size_t Corpus::requirement_count() const { return req_index_.size(); }

Corpus parse_corpus(const std::string& json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ParseError(line_column(json_text, e.byte == 0 ? 0 : e.byte - 1), e.what());
  }
  if (!root.is_object()) throw ParseError("$", "corpus must be a JSON object");
  const json& version = member(root, "format_version", "$");
  if (!version.is_number_integer() || version.get<int>() != kCorpusFormatVersion) {
    throw ParseError("$.format_version", "unsupported corpus format version");
  }

  std::vector<Document> documents;
  const json& docs = array_field(root, "documents", "$");
  for (std::size_t d = 0; d < docs.size(); ++d) {
    const std::string where = "documents[" + std::to_string(d) + "]";
    Document doc;
    doc.id = string_field(docs[d], "id", where);
    doc.name = docs[d].contains("name") ? string_field(docs[d], "name", where) : std::string();
    const json& reqs = array_field(docs[d], "requirements", where);
    for (std::size_t r = 0; r < reqs.size(); ++r) {
      const std::string rwhere = where + ".requirements[" + std::to_string(r) + "]";
      Requirement req;
      req.id = string_field(reqs[r], "id", rwhere);
      req.text = string_field(reqs[r], "text", rwhere);
      req.doc_id = doc.id;
      doc.requirements.push_back(std::move(req));
    }
    documents.push_back(std::move(doc));
  }

  std::vector<Provision> catalog;
  const json& provs = array_field(root, "provisions", "$");
  for (std::size_t p = 0; p < provs.size(); ++p) {
    const std::string where = "provisions[" + std::to_string(p) + "]";
    catalog.push_back(Provision{string_field(provs[p], "code", where),
                                string_field(provs[p], "title", where),
                                string_field(provs[p], "description", where)});
  }

  std::map<std::string, std::set<std::string>> links;
  if (root.contains("links")) {
    const json& obj = root["links"];
    if (!obj.is_object()) throw ParseError("links", "expected an object");
    for (const auto& [req_id, codes] : obj.items()) {
      const std::string where = "links." + req_id;
      if (!codes.is_array()) throw ParseError(where, "expected an array of codes");
      auto& set = links[nfc(req_id)];
      for (const auto& code : codes) {
        if (!code.is_string()) throw ParseError(where, "codes must be strings");
        if (!set.insert(nfc(code.get<std::string>())).second) {
          throw ValidationError("requirement \"" + req_id + "\" lists code \"" +
                                code.get<std::string>() + "\" twice");
        }
      }
    }
  }
  return Corpus(std::move(documents), std::move(catalog), TraceLinkSet(std::move(links)));
}

Corpus load_corpus(const std::filesystem::path& path) { return parse_corpus(read_file(path)); }

std::string corpus_to_json(const Corpus& corpus) {
  json root = json::object();
  root["format_version"] = kCorpusFormatVersion;
  json docs = json::array();
  for (const auto& d : corpus.documents()) {
    json reqs = json::array();
    for (const auto& r : d.requirements) reqs.push_back({{"id", r.id}, {"text", r.text}});
    docs.push_back({{"id", d.id}, {"name", d.name}, {"requirements", std::move(reqs)}});
  }
  root["documents"] = std::move(docs);
  json provs = json::array();
  for (const auto& p : corpus.catalog()) {
    provs.push_back({{"code", p.code}, {"title", p.title}, {"description", p.description}});
  }
  root["provisions"] = std::move(provs);
  json links = json::object();
  for (const auto& [id, codes] : corpus.ground_truth().links()) {
    if (!codes.empty()) links[id] = codes;
  }
  root["links"] = std::move(links);
  return root.dump(2) + "\n";
}

void save_corpus(const Corpus& corpus, const std::filesystem::path& path) {
  write_file(path, corpus_to_json(corpus));
}

std::vector<TrainingPair> build_training_pairs(const Corpus& corpus,
                                               const std::set<std::string>& heldout_doc_ids) {
  for (const auto& id : heldout_doc_ids) {
    if (!corpus.has_document(id)) throw ReferenceError(id, "unknown held-out document \"" + id + "\"");
  }
  std::vector<TrainingPair> pairs;
  for (const auto& doc : corpus.documents()) {
    if (heldout_doc_ids.contains(doc.id)) continue;
    for (const auto& req : doc.requirements) {
      for (const auto& prov : corpus.catalog()) {
        pairs.push_back({req.id, prov.code, corpus.ground_truth().linked(req.id, prov.code) ? 1 : 0});
      }
    }
  }
  return pairs;
}

std::string provision_text(const Provision& p, ProvisionText mode) {
  if (mode == ProvisionText::kTitle) return p.title;
  return p.title + ": " + p.description;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read \"" + path.string() + "\"");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, const std::string& contents) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write \"" + path.string() + "\"");
  out << contents;
  if (!out) throw Error("write failed for \"" + path.string() + "\"");
}

}  // namespace lrt
