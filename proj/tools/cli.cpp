#include "cli.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>

#include <CLI11.hpp>
#include <json.hpp>

#include "lrt/corpus.hpp"
#include "lrt/embeddings.hpp"
#include "lrt/error.hpp"
#include "lrt/evaluation.hpp"
#include "lrt/linker.hpp"
#include "lrt/llm.hpp"
#include "lrt/manifest.hpp"
#include "lrt/metrics.hpp"
#include "lrt/pipeline.hpp"
#include "lrt/prediction.hpp"
#include "lrt/prompting.hpp"
#include "lrt/report.hpp"

namespace lrt::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string dump(const json& j) { return j.dump(2) + "\n"; }

class RunRecorder {
 public:
  RunRecorder(std::string command, const std::vector<std::string>& args, const std::string& out_dir)
      : out_dir_(out_dir) {
    manifest_.command = std::move(command);
    manifest_.args = args;
    manifest_.started_at = utc_timestamp();
    manifest_.config["cwd"] = fs::current_path().string();
  }

  void input(const std::string& path) {
    manifest_.inputs[fs::absolute(path).lexically_normal().string()] = sha256_file(path);
  }

  void write(const std::string& name, const std::string& contents) {
    const fs::path target = out_dir_ / name;
    if (target.has_parent_path()) fs::create_directories(target.parent_path());
    write_file(target, contents);
    manifest_.outputs[name] = sha256_hex(contents);
  }

  json& config() { return manifest_.config; }
  const fs::path& out_dir() const { return out_dir_; }

  void finish() {
    manifest_.finished_at = utc_timestamp();
    fs::create_directories(out_dir_);
    write_file(out_dir_ / kManifestName, dump(manifest_to_json(manifest_)));
  }

 private:
  fs::path out_dir_;
  RunManifest manifest_;
};

struct ProviderOptions {
  std::string provider = "hash";
  std::string embeddings;
  std::string endpoint;
  std::string model = "text-embedding-3-small";
  std::size_t dim = 256;
  std::size_t batch_size = 32;
};

void add_provider_options(CLI::App* cmd, ProviderOptions& p, const std::string& endpoint_flag = "--endpoint") {
  cmd->add_option("--provider", p.provider, "Embedding provider")
      ->check(CLI::IsMember({"hash", "file", "http"}))
      ->capture_default_str();
  cmd->add_option("--embeddings", p.embeddings, "Embedding file (file provider)");
  cmd->add_option(endpoint_flag, p.endpoint, "Embedding endpoint URL (http provider)");
  cmd->add_option("--embedding-model", p.model, "Embedding model name (http provider)")->capture_default_str();
  cmd->add_option("--dim", p.dim, "Hash embedding dimension")->capture_default_str();
  cmd->add_option("--batch-size", p.batch_size, "Texts per embedding request")->capture_default_str();
}

std::unique_ptr<EmbeddingProvider> make_provider(const ProviderOptions& p, std::uint64_t seed, RunRecorder& rec) {
  json cfg{{"provider", p.provider}};
  std::unique_ptr<EmbeddingProvider> out;
  if (p.provider == "hash") {
    cfg["dim"] = p.dim;
    cfg["seed"] = seed;
    out = std::make_unique<HashEmbeddingProvider>(p.dim, seed);
  } else if (p.provider == "file") {
    if (p.embeddings.empty()) throw UsageError("--provider file needs --embeddings");
    rec.input(p.embeddings);
    cfg["embeddings"] = p.embeddings;
    out = std::make_unique<FileEmbeddingProvider>(load_embedding_set(p.embeddings));
  } else {
    if (p.endpoint.empty()) throw UsageError("--provider http needs an endpoint URL");
    HttpProviderConfig hc;
    hc.endpoint_url = p.endpoint;
    hc.model_name = p.model;
    hc.batch_size = p.batch_size;
    cfg["endpoint"] = p.endpoint;
    cfg["model"] = p.model;
    cfg["batch_size"] = p.batch_size;
    out = std::make_unique<HttpEmbeddingProvider>(hc);
  }
  rec.config()["embedding"] = cfg;
  return out;
}

Corpus read_corpus(const std::string& path, RunRecorder& rec) {
  if (path.empty()) throw UsageError("--corpus is required");
  rec.input(path);
  return load_corpus(path);
}

SimilarityMatrix read_matrix(const std::string& path, RunRecorder& rec) {
  rec.input(path);
  return load_similarity_matrix(path);
}

// Requirement-level scores: sentence units max-pooled into their parent.
SimilarityMatrix pooled_matrix(const Corpus& corpus, const CorpusEmbeddings& emb,
                               const std::vector<std::string>& req_ids) {
  const UnitIndex units = sentence_units(corpus, req_ids);
  const SimilarityMatrix m = build_similarity_matrix(emb.units, units.unit_ids, emb.provisions, corpus.codes());
  return max_pool_rows(m, units.parents, req_ids);
}

std::vector<std::string> select_requirements(const Corpus& corpus, const std::vector<std::string>& doc_ids) {
  if (doc_ids.empty()) return corpus.requirement_ids();
  for (const auto& d : doc_ids) corpus.document(d);
  return corpus.requirement_ids(doc_ids);
}

std::string safe_name(std::string s) {
  for (auto& c : s) {
    if (c == '/' || c == '\\' || c == ':' || c == ' ') c = '_';
  }
  return s;
}

struct Options {
  std::string out_dir = "out";
  std::uint64_t seed = 16;
  std::string corpus;
  ProviderOptions provider;
  std::string match_mode = "superset";

  // validate
  std::string positional_corpus;
  // similarity / evaluate / sweep
  std::vector<std::string> docs;
  std::string scores;
  std::string predictions;
  std::size_t points = 101;
  // predict
  std::string strategy;
  std::string matrix;
  std::string test_doc;
  double theta = kDefaultConstantThreshold;
  std::size_t k = 50;
  std::size_t topics = 50;
  std::size_t negatives = kDefaultNegativeSampleSize;
  int iterations = 500;
  // prompt
  std::string variant;
  std::string examples;
  bool dry_run = false;
  bool offline = false;
  std::string transcript;
  std::size_t parallel = 1;
  std::size_t top_k = 26;
  std::string llm_endpoint = LlmConfig{}.endpoint_url;
  std::string llm_model = LlmConfig{}.model_name;
  std::string regulation = kDefaultRegulation;
  std::vector<std::string> requirements;
  // loo
  std::vector<std::string> methods;
  std::vector<std::string> exclude;
  // rank-models
  std::vector<std::string> model_files;
  // fisher
  std::vector<std::uint64_t> table;
  // replay
  std::string manifest;
};

PipelineConfig pipeline_config(const Options& o) {
  PipelineConfig c;
  c.theta = o.theta;
  c.negatives = o.negatives;
  c.seed = o.seed;
  c.lsi_k = o.k;
  c.lda_topics = o.topics;
  c.lda_iterations = o.iterations;
  c.match_mode = parse_match_mode(o.match_mode);
  return c;
}

json pipeline_config_json(const PipelineConfig& c) {
  return json{{"theta", c.theta},         {"negatives", c.negatives},   {"seed", c.seed},
              {"lsi_k", c.lsi_k},         {"lda_topics", c.lda_topics}, {"lda_alpha", c.lda_alpha},
              {"lda_beta", c.lda_beta},   {"lda_iterations", c.lda_iterations},
              {"match_mode", to_string(c.match_mode)}};
}

int cmd_validate(const Options& o, RunRecorder& rec, std::ostream& out) {
  std::string path = o.positional_corpus.empty() ? o.corpus : o.positional_corpus;
  if (!o.positional_corpus.empty() && !o.corpus.empty() && o.positional_corpus != o.corpus) {
    throw UsageError("give the corpus either positionally or with --corpus");
  }
  const Corpus corpus = read_corpus(path, rec);
  const json summary{{"valid", true},
                     {"documents", corpus.documents().size()},
                     {"requirements", corpus.requirement_count()},
                     {"provisions", corpus.catalog().size()},
                     {"links", corpus.ground_truth().link_count()}};
  rec.write("validation.json", dump(summary));
  out << "corpus ok: " << corpus.documents().size() << " documents, " << corpus.requirement_count()
      << " requirements, " << corpus.catalog().size() << " provisions, " << corpus.ground_truth().link_count()
      << " links\n";
  return kExitOk;
}

int cmd_embed(const Options& o, RunRecorder& rec, std::ostream& out) {
  const Corpus corpus = read_corpus(o.corpus, rec);
  auto provider = make_provider(o.provider, o.seed, rec);
  const CorpusEmbeddings emb = embed_corpus(corpus, *provider);
  EmbeddingSet all(emb.units.dim(), emb.units.provider());
  for (const auto& [id, v] : emb.units.vectors()) all.add(id, v);
  for (const auto& [code, v] : emb.provisions.vectors()) {
    if (all.contains(code)) throw ValidationError("provision code \"" + code + "\" collides with a requirement id");
    all.add(code, v);
  }
  rec.write("embeddings.json", embedding_set_to_json(all));
  out << "embedded " << emb.units.size() << " requirement units and " << emb.provisions.size()
      << " provisions (dim " << all.dim() << ")\n";
  return kExitOk;
}

int cmd_similarity(const Options& o, RunRecorder& rec, std::ostream& out) {
  const Corpus corpus = read_corpus(o.corpus, rec);
  auto provider = make_provider(o.provider, o.seed, rec);
  const CorpusEmbeddings emb = embed_corpus(corpus, *provider);
  const auto req_ids = select_requirements(corpus, o.docs);
  rec.config()["docs"] = o.docs;
  const SimilarityMatrix m = pooled_matrix(corpus, emb, req_ids);
  rec.write("similarity.json", similarity_matrix_to_json(m));
  out << "similarity matrix " << m.rows() << " x " << m.cols() << "\n";
  return kExitOk;
}

void write_predictions(RunRecorder& rec, const PredictionSet& p, const std::string& prefix = "") {
  rec.write(prefix + "predictions.json", predictions_to_json(p));
  rec.write(prefix + "thresholds.json", thresholds_to_json(p));
}

int cmd_predict(const Options& o, RunRecorder& rec, std::ostream& out) {
  const Method method = parse_method(o.strategy);
  const PipelineConfig config = pipeline_config(o);
  rec.config()["strategy"] = to_string(method);
  rec.config()["pipeline"] = pipeline_config_json(config);

  if (!o.matrix.empty()) {
    if (method != Method::kConstant && method != Method::kDelta) {
      throw UsageError("--matrix works with --strategy constant or delta only");
    }
    const SimilarityMatrix m = read_matrix(o.matrix, rec);
    PredictionSet p = method == Method::kConstant ? predict_constant(m, config.theta) : predict_delta(m);
    write_predictions(rec, p);
    out << to_string(method) << ": " << p.link_count() << " links over " << m.rows() << " requirements\n";
    return kExitOk;
  }

  const Corpus corpus = read_corpus(o.corpus, rec);
  std::vector<std::string> train_docs;
  std::vector<std::string> test_ids;
  if (o.test_doc.empty()) {
    train_docs = corpus.document_ids();
    test_ids = corpus.requirement_ids();
  } else {
    corpus.document(o.test_doc);
    for (const auto& d : corpus.document_ids()) {
      if (d != o.test_doc) train_docs.push_back(d);
    }
    test_ids = corpus.requirement_ids({o.test_doc});
  }
  rec.config()["test_doc"] = o.test_doc;

  std::optional<CorpusEmbeddings> emb;
  if (uses_embeddings(method)) {
    auto provider = make_provider(o.provider, o.seed, rec);
    emb = embed_corpus(corpus, *provider);
  }
  const MethodOutput result = run_method(method, corpus, emb ? &*emb : nullptr, train_docs, test_ids, config);
  write_predictions(rec, result.predictions);
  rec.write("scores.json", similarity_matrix_to_json(result.scores));
  if (result.curve) rec.write("curve.csv", curve_to_csv(*result.curve));
  out << to_string(method) << ": " << result.predictions.link_count() << " links over " << test_ids.size()
      << " requirements";
  if (result.curve) {
    char buf[64];
    std::snprintf(buf, sizeof buf, " (tuned theta %.2f)", result.curve->best_theta);
    out << buf;
  }
  out << "\n";
  return kExitOk;
}

std::string prompt_file_name(std::size_t index, const PromptItem& item) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04zu", index + 1);
  std::string name = std::string("prompts/") + buf + "_" + safe_name(item.req_id);
  if (!item.prov_code.empty()) name += "_" + safe_name(item.prov_code);
  return name + ".txt";
}

int cmd_prompt(const Options& o, RunRecorder& rec, std::ostream& out) {
  const Corpus corpus = read_corpus(o.corpus, rec);
  PromptRunOptions opts;
  opts.variant = parse_prompt_variant(o.variant);
  opts.req_ids = o.requirements;
  opts.top_k = o.top_k;
  opts.regulation = o.regulation;
  opts.parallelism = o.parallel;
  if (opts.variant == PromptVariant::kRice) {
    if (o.examples.empty()) throw UsageError("--variant rice needs --examples");
    rec.input(o.examples);
    opts.examples = load_examples(o.examples);
  }

  LlmConfig llm;
  llm.endpoint_url = o.llm_endpoint;
  llm.model_name = o.llm_model;
  llm.seed = static_cast<std::int64_t>(o.seed);
  llm.validate();
  opts.config_snapshot = llm_config_to_json(llm);
  rec.config()["variant"] = to_string(opts.variant);
  rec.config()["llm"] = opts.config_snapshot;
  rec.config()["top_k"] = o.top_k;
  rec.config()["regulation"] = o.regulation;
  rec.config()["requirements"] = o.requirements;
  rec.config()["dry_run"] = o.dry_run;

  std::optional<CorpusEmbeddings> emb;
  if (opts.variant == PromptVariant::kP1 && o.top_k < corpus.catalog().size()) {
    auto provider = make_provider(o.provider, o.seed, rec);
    emb = embed_corpus(corpus, *provider);
  }
  const EmbeddingSet* req_emb = emb ? &emb->requirements : nullptr;
  const EmbeddingSet* prov_emb = emb ? &emb->provisions : nullptr;

  if (o.dry_run) {
    const auto items = render_prompts(corpus, opts, req_emb, prov_emb);
    json index = json::array();
    for (std::size_t i = 0; i < items.size(); ++i) {
      const std::string name = prompt_file_name(i, items[i]);
      rec.write(name, items[i].prompt);
      index.push_back(json{{"file", name}, {"req_id", items[i].req_id}, {"prov_code", items[i].prov_code}});
    }
    rec.write("prompts.json", dump(index));
    out << "rendered " << items.size() << " prompts (dry run, no requests sent)\n";
    return kExitOk;
  }

  const std::string transcript_path =
      o.transcript.empty() ? (rec.out_dir() / "transcript.jsonl").string() : o.transcript;
  if (fs::exists(transcript_path)) rec.input(transcript_path);
  Transcript transcript{fs::path(transcript_path)};
  std::unique_ptr<LlmClient> client;
  if (o.offline) {
    client = std::make_unique<OfflineLlmClient>();
  } else {
    client = std::make_unique<HttpLlmClient>(llm);
  }
  const PromptRunResult result = run_prompt_strategy(corpus, *client, opts, &transcript, req_emb, prov_emb);
  write_predictions(rec, result.predictions);
  rec.write("rationales.json", dump(json(result.rationales)));
  json failures = json::array();
  for (const auto& f : result.failures) {
    failures.push_back(json{{"req_id", f.req_id}, {"prov_code", f.prov_code}, {"error", f.error}});
  }
  rec.write("failures.json", dump(failures));
  out << to_string(opts.variant) << ": " << result.predictions.link_count() << " links, "
      << result.requests_issued << " requests, " << result.cache_hits << " cached, " << result.failures.size()
      << " failed\n";
  return kExitOk;
}

int cmd_evaluate(const Options& o, RunRecorder& rec, std::ostream& out) {
  const Corpus corpus = read_corpus(o.corpus, rec);
  if (o.predictions.empty()) throw UsageError("--predictions is required");
  rec.input(o.predictions);
  const PredictionSet pred = load_predictions(o.predictions);
  std::vector<std::string> req_ids;
  for (const auto& id : corpus.requirement_ids()) {
    if (pred.predictions.contains(id)) req_ids.push_back(id);
  }
  for (const auto& [id, codes] : pred.predictions) corpus.requirement(id);
  if (req_ids.empty()) throw ValidationError("prediction file covers no requirement");
  std::optional<SimilarityMatrix> scores;
  if (!o.scores.empty()) scores = read_matrix(o.scores, rec).select_rows(req_ids);
  const MatchMode mode = parse_match_mode(o.match_mode);
  rec.config()["match_mode"] = to_string(mode);
  const MetricsReport report = evaluate_predictions(corpus, pred, req_ids, scores ? &*scores : nullptr, mode);
  const std::string text = metrics_report_to_text(report);
  rec.write("report.json", dump(metrics_report_to_json(report)));
  rec.write("report.txt", text);
  out << text;
  return kExitOk;
}

int cmd_sweep(const Options& o, RunRecorder& rec, std::ostream& out) {
  const Corpus corpus = read_corpus(o.corpus, rec);
  SimilarityMatrix m;
  if (!o.scores.empty()) {
    m = read_matrix(o.scores, rec);
  } else {
    auto provider = make_provider(o.provider, o.seed, rec);
    const CorpusEmbeddings emb = embed_corpus(corpus, *provider);
    m = pooled_matrix(corpus, emb, select_requirements(corpus, o.docs));
  }
  rec.config()["points"] = o.points;
  const TraceLinkSet gt = corpus.ground_truth().restricted_to(m.req_ids());
  const ThresholdCurve curve = sweep_thresholds(m, gt, o.points);
  rec.write("curve.csv", curve_to_csv(curve));
  const ScoredPairs pairs = pairs_from_matrix(m, gt);
  json summary{{"best_theta", curve.best_theta}, {"best_f2", curve.best_f2}};
  const bool both = std::count(pairs.labels.begin(), pairs.labels.end(), 1) > 0 &&
                    std::count(pairs.labels.begin(), pairs.labels.end(), 0) > 0;
  if (both) {
    const AucMode mode = AucMode::sweep();
    rec.write("roc.csv", roc_points_to_csv(roc_points(pairs.scores, pairs.labels, mode.thresholds())));
    summary["auc_sweep"] = roc_auc(pairs.scores, pairs.labels, mode);
    summary["auc_full"] = roc_auc(pairs.scores, pairs.labels, AucMode::full());
  }
  rec.write("sweep.json", dump(summary));
  char buf[96];
  std::snprintf(buf, sizeof buf, "best theta %.4f with F2 %s over %zu points\n", curve.best_theta,
                format_percent(curve.best_f2).c_str(), o.points);
  out << buf;
  return kExitOk;
}

int cmd_loo(const Options& o, RunRecorder& rec, std::ostream& out) {
  const Corpus corpus = read_corpus(o.corpus, rec);
  std::vector<Method> methods;
  if (o.methods.empty()) {
    methods.assign(std::begin(kAllMethods), std::end(kAllMethods));
  } else {
    for (const auto& m : o.methods) methods.push_back(parse_method(m));
  }
  const PipelineConfig config = pipeline_config(o);
  json method_names = json::array();
  for (const auto m : methods) method_names.push_back(to_string(m));
  rec.config()["methods"] = method_names;
  rec.config()["exclude"] = o.exclude;
  rec.config()["pipeline"] = pipeline_config_json(config);

  std::optional<CorpusEmbeddings> emb;
  if (std::any_of(methods.begin(), methods.end(), uses_embeddings)) {
    auto provider = make_provider(o.provider, o.seed, rec);
    emb = embed_corpus(corpus, *provider);
  }
  const std::set<std::string> excluded(o.exclude.begin(), o.exclude.end());
  const LooResult result = run_loo(corpus, emb ? &*emb : nullptr, excluded, methods, config);
  const std::string text = loo_result_to_text(result);
  rec.write("loo.json", dump(loo_result_to_json(result)));
  rec.write("loo.txt", text);
  for (const auto& [m, p] : result.predictions) rec.write("predictions/" + to_string(m) + ".json", predictions_to_json(p));
  for (const auto& [key, curve] : result.curves) {
    rec.write("curves/" + to_string(key.first) + "_" + safe_name(key.second) + ".csv", curve_to_csv(curve));
  }
  out << text;
  return kExitOk;
}

int cmd_rank_models(const Options& o, RunRecorder& rec, std::ostream& out) {
  const Corpus corpus = read_corpus(o.corpus, rec);
  if (o.model_files.empty()) throw UsageError("--embeddings needs at least one file");
  std::vector<ModelEmbeddings> models;
  for (const auto& path : o.model_files) {
    rec.input(path);
    const EmbeddingSet set = load_embedding_set(path);
    const std::string tag = set.provider().empty() ? fs::path(path).stem().string() : set.provider();
    ModelEmbeddings m{tag, EmbeddingSet(set.dim(), set.provider()), EmbeddingSet(set.dim(), set.provider())};
    for (const auto& id : corpus.requirement_ids()) {
      if (set.contains(id)) m.requirements.add(id, set.at(id));
    }
    for (const auto& code : corpus.codes()) {
      if (set.contains(code)) m.provisions.add(code, set.at(code));
    }
    models.push_back(std::move(m));
  }
  const auto ranking = rank_models(models, corpus);
  const std::string text = ranking_to_text(ranking);
  rec.write("ranking.json", dump(ranking_to_json(ranking)));
  rec.write("ranking.txt", text);
  out << text;
  return kExitOk;
}

int cmd_fisher(const Options& o, RunRecorder& rec, std::ostream& out) {
  if (o.table.size() != 4) throw UsageError("fisher takes exactly four counts: a b c d");
  const ContingencyTable2x2 t{o.table[0], o.table[1], o.table[2], o.table[3]};
  const double p = fisher_exact(t);
  rec.write("fisher.json", dump(json{{"table", json::array({json::array({t.a, t.b}), json::array({t.c, t.d})})},
                                     {"p_value", p}}));
  char buf[64];
  std::snprintf(buf, sizeof buf, "two-sided p = %.6g\n", p);
  out << buf;
  return kExitOk;
}

std::vector<std::string> with_out_dir(std::vector<std::string> args, const std::string& out_dir) {
  bool replaced = false;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--out-dir" && i + 1 < args.size()) {
      args[i + 1] = out_dir;
      replaced = true;
      ++i;
    } else if (args[i].rfind("--out-dir=", 0) == 0) {
      args[i] = "--out-dir=" + out_dir;
      replaced = true;
    }
  }
  if (!replaced) {
    args.push_back("--out-dir");
    args.push_back(out_dir);
  }
  return args;
}

class CurrentPathGuard {
 public:
  explicit CurrentPathGuard(const fs::path& p) : saved_(fs::current_path()) { fs::current_path(p); }
  ~CurrentPathGuard() {
    std::error_code ec;
    fs::current_path(saved_, ec);
  }

 private:
  fs::path saved_;
};

int cmd_replay(const Options& o, std::ostream& out, std::ostream& err) {
  if (o.manifest.empty()) throw UsageError("replay needs a manifest path");
  const RunManifest original = load_manifest(o.manifest);
  if (original.command == "replay") throw ValidationError("a replay manifest cannot be replayed");
  if (original.tool_version != kToolVersion) {
    throw ValidationError("manifest was written by tool version " + original.tool_version);
  }
  const fs::path new_out = fs::absolute(o.out_dir).lexically_normal();
  const fs::path cwd = original.config.value("cwd", fs::current_path().string());
  {
    const CurrentPathGuard guard(cwd);
    for (const auto& [path, digest] : original.inputs) {
      if (!fs::exists(path)) throw ValidationError("input " + path + " no longer exists");
      if (sha256_file(path) != digest) throw ValidationError("input " + path + " changed since the recorded run");
    }
    std::ostringstream inner;
    const int status = dispatch(with_out_dir(original.args, new_out.string()), inner, err);
    if (status != kExitOk) return status;
  }
  const RunManifest again = load_manifest(new_out / kManifestName);
  std::vector<std::string> differences;
  for (const auto& [name, digest] : original.outputs) {
    const auto it = again.outputs.find(name);
    if (it == again.outputs.end()) {
      differences.push_back(name + " (missing)");
    } else if (it->second != digest) {
      differences.push_back(name);
    }
  }
  for (const auto& [name, digest] : again.outputs) {
    if (!original.outputs.contains(name)) differences.push_back(name + " (new)");
  }
  if (!differences.empty()) {
    err << "replay differs in " << differences.size() << " output(s):\n";
    for (const auto& d : differences) err << "  " << d << "\n";
    return kExitDomain;
  }
  out << "replay identical: " << original.outputs.size() << " outputs of `" << original.command << "` in "
      << new_out.string() << "\n";
  return kExitOk;
}

}  // namespace

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Legal requirements traceability engine", "lrt"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kToolVersion);
  Options o;

  const auto common = [&](CLI::App* cmd) {
    cmd->add_option("--out-dir", o.out_dir, "Directory receiving outputs and manifest.json")->capture_default_str();
    cmd->add_option("--seed", o.seed, "Seed for every random choice")->capture_default_str();
  };
  const auto corpus_opt = [&](CLI::App* cmd) { cmd->add_option("--corpus", o.corpus, "Corpus JSON file"); };
  const auto pipeline_opts = [&](CLI::App* cmd) {
    cmd->add_option("--theta", o.theta, "Constant threshold")->capture_default_str();
    cmd->add_option("--k", o.k, "LSI rank")->capture_default_str();
    cmd->add_option("--topics", o.topics, "LDA topic count")->capture_default_str();
    cmd->add_option("--negatives", o.negatives, "Negative examples per provision (dynamic)")->capture_default_str();
    cmd->add_option("--iterations", o.iterations, "LDA Gibbs sweeps")->capture_default_str();
  };
  const auto match_opt = [&](CLI::App* cmd) {
    cmd->add_option("--match-mode", o.match_mode, "Partial-match rule")
        ->check(CLI::IsMember({"superset", "overlap"}))
        ->capture_default_str();
  };

  auto* validate = app.add_subcommand("validate", "Check a corpus file");
  validate->add_option("path", o.positional_corpus, "Corpus JSON file");
  corpus_opt(validate);
  common(validate);

  auto* embed = app.add_subcommand("embed", "Embed requirements, sentence units and provisions");
  corpus_opt(embed);
  add_provider_options(embed, o.provider);
  common(embed);

  auto* similarity = app.add_subcommand("similarity", "Write the requirement x provision cosine matrix");
  corpus_opt(similarity);
  similarity->add_option("--docs", o.docs, "Restrict to these documents")->delimiter(',');
  add_provider_options(similarity, o.provider);
  common(similarity);

  auto* predict = app.add_subcommand("predict", "Predict trace links with one strategy");
  predict->add_option("--strategy", o.strategy, "constant, dynamic, delta, tuned, tfidf, lsi, lda or indicator")
      ->required();
  predict->add_option("--matrix", o.matrix, "Similarity matrix file (constant and delta only)");
  predict->add_option("--test-doc", o.test_doc, "Hold out this document and train on the rest");
  corpus_opt(predict);
  pipeline_opts(predict);
  add_provider_options(predict, o.provider);
  common(predict);

  auto* prompt = app.add_subcommand("prompt", "Query an LLM with one prompt template");
  prompt->add_option("--variant", o.variant, "rice, p1, p2, p3_1 or p3_2")->required();
  prompt->add_option("--examples", o.examples, "Few-shot examples file (rice)");
  prompt->add_flag("--dry-run", o.dry_run, "Write the prompts without sending them");
  prompt->add_flag("--offline", o.offline, "Answer only from the transcript");
  prompt->add_option("--transcript", o.transcript, "Transcript JSONL (default: <out-dir>/transcript.jsonl)");
  prompt->add_option("--parallel", o.parallel, "Concurrent requests")->capture_default_str();
  prompt->add_option("--top-k", o.top_k, "Provisions retrieved per requirement (p1)")->capture_default_str();
  prompt->add_option("--endpoint", o.llm_endpoint, "Chat completion endpoint")->capture_default_str();
  prompt->add_option("--model", o.llm_model, "Chat model name")->capture_default_str();
  prompt->add_option("--regulation", o.regulation, "Regulation name used in the templates")->capture_default_str();
  prompt->add_option("--requirements", o.requirements, "Only these requirement ids")->delimiter(',');
  corpus_opt(prompt);
  add_provider_options(prompt, o.provider, "--embedding-endpoint");
  common(prompt);

  auto* evaluate = app.add_subcommand("evaluate", "Score a prediction file against the ground truth");
  corpus_opt(evaluate);
  evaluate->add_option("--predictions", o.predictions, "Prediction JSON file");
  evaluate->add_option("--scores", o.scores, "Similarity matrix for MAP and AUC");
  match_opt(evaluate);
  common(evaluate);

  auto* sweep = app.add_subcommand("sweep", "F2 over evenly spaced thresholds, plus ROC points");
  corpus_opt(sweep);
  sweep->add_option("--scores", o.scores, "Similarity matrix file (default: embed with the provider)");
  sweep->add_option("--points", o.points, "Number of thresholds over [0, 1]")->capture_default_str();
  sweep->add_option("--docs", o.docs, "Restrict to these documents")->delimiter(',');
  add_provider_options(sweep, o.provider);
  common(sweep);

  auto* loo = app.add_subcommand("loo", "Leave-one-document-out evaluation");
  corpus_opt(loo);
  loo->add_option("--methods", o.methods, "Strategies to run (default: all)")->delimiter(',');
  loo->add_option("--exclude", o.exclude, "Documents left out of every split")->delimiter(',');
  pipeline_opts(loo);
  match_opt(loo);
  add_provider_options(loo, o.provider);
  common(loo);

  auto* rank = app.add_subcommand("rank-models", "Rank embedding models by AUC");
  corpus_opt(rank);
  rank->add_option("--embeddings", o.model_files, "Embedding files, one per model")->required();
  common(rank);

  auto* fisher = app.add_subcommand("fisher", "Two-sided Fisher exact test on a 2x2 table");
  fisher->add_option("counts", o.table, "a b c d")->expected(4)->required();
  common(fisher);

  auto* replay = app.add_subcommand("replay", "Re-run a manifest and compare its outputs");
  replay->add_option("manifest", o.manifest, "manifest.json of the recorded run")->required();
  replay->add_option("--out-dir", o.out_dir, "Directory for the re-run")->required();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitUsage;
  }

  CLI::App* chosen = app.get_subcommands().front();
  const std::string name = chosen->get_name();
  try {
    if (name == "replay") return cmd_replay(o, out, err);
    RunRecorder rec(name, args, o.out_dir);
    int status = kExitOk;
    if (name == "validate") {
      status = cmd_validate(o, rec, out);
    } else if (name == "embed") {
      status = cmd_embed(o, rec, out);
    } else if (name == "similarity") {
      status = cmd_similarity(o, rec, out);
    } else if (name == "predict") {
      status = cmd_predict(o, rec, out);
    } else if (name == "prompt") {
      status = cmd_prompt(o, rec, out);
    } else if (name == "evaluate") {
      status = cmd_evaluate(o, rec, out);
    } else if (name == "sweep") {
      status = cmd_sweep(o, rec, out);
    } else if (name == "loo") {
      status = cmd_loo(o, rec, out);
    } else if (name == "rank-models") {
      status = cmd_rank_models(o, rec, out);
    } else if (name == "fisher") {
      status = cmd_fisher(o, rec, out);
    }
    rec.finish();
    return status;
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n\n" << chosen->help();
    return kExitUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitDomain;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitDomain;
  }
}

}  // namespace lrt::cli
