#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>

#include "cli.hpp"
#include "lrt/corpus.hpp"
#include "lrt/embeddings.hpp"
#include "lrt/error.hpp"
#include "lrt/evaluation.hpp"
#include "lrt/linker.hpp"
#include "lrt/manifest.hpp"
#include "lrt/metrics.hpp"
#include "lrt/pipeline.hpp"
#include "lrt/prompting.hpp"
#include "lrt/report.hpp"

namespace py = pybind11;
using namespace lrt;

namespace {

using Rows = std::vector<std::vector<double>>;
using LinkMap = std::map<std::string, std::set<std::string>>;

py::object from_json(const nlohmann::json& j) { return py::module_::import("json").attr("loads")(j.dump()); }

SimilarityMatrix make_matrix(std::vector<std::string> req_ids, std::vector<std::string> codes, const Rows& rows) {
  if (rows.size() != req_ids.size()) throw DimensionError("one score row per requirement id is required");
  std::vector<double> flat;
  for (const auto& r : rows) {
    if (r.size() != codes.size()) throw DimensionError("one score per provision code is required");
    flat.insert(flat.end(), r.begin(), r.end());
  }
  return SimilarityMatrix(std::move(req_ids), std::move(codes), std::move(flat));
}

Rows matrix_rows(const SimilarityMatrix& m) {
  Rows out;
  for (std::size_t i = 0; i < m.rows(); ++i) {
    const auto row = m.row(i);
    out.emplace_back(row.begin(), row.end());
  }
  return out;
}

std::vector<std::string> all_or(const Corpus& c, const std::optional<std::vector<std::string>>& ids) {
  return ids ? *ids : c.requirement_ids();
}

LinkMap ground_truth_map(const Corpus& c) {
  LinkMap out;
  for (const auto& id : c.requirement_ids()) out[id] = c.ground_truth().codes(id);
  return out;
}

std::unique_ptr<EmbeddingProvider> provider_for(const std::optional<std::string>& embeddings, std::size_t dim,
                                                std::uint64_t seed) {
  if (embeddings) return std::make_unique<FileEmbeddingProvider>(load_embedding_set(*embeddings));
  return std::make_unique<HashEmbeddingProvider>(dim, seed);
}

// Requirement x provision cosines, max-pooled over sentence units.
SimilarityMatrix corpus_similarity(const Corpus& c, const std::optional<std::vector<std::string>>& req_ids,
                                   const std::optional<std::string>& embeddings, std::size_t dim,
                                   std::uint64_t seed) {
  auto provider = provider_for(embeddings, dim, seed);
  const CorpusEmbeddings emb = embed_corpus(c, *provider);
  const auto ids = all_or(c, req_ids);
  const UnitIndex units = sentence_units(c, ids);
  const SimilarityMatrix m = build_similarity_matrix(emb.units, units.unit_ids, emb.provisions, c.codes());
  return max_pool_rows(m, units.parents, ids);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Requirements-to-regulation trace link recovery";
  m.attr("__version__") = kToolVersion;

  static py::exception<Error> base(m, "LrtError");
  py::register_exception<ParseError>(m, "ParseError", base.ptr());
  static py::exception<ValidationError> validation(m, "ValidationError", base.ptr());
  py::register_exception<ReferenceError>(m, "ReferenceError", validation.ptr());
  py::register_exception<DimensionError>(m, "DimensionError", base.ptr());
  py::register_exception<DegenerateVectorError>(m, "DegenerateVectorError", base.ptr());
  py::register_exception<ConvergenceError>(m, "ConvergenceError", base.ptr());
  static py::exception<TransportError> transport(m, "TransportError", base.ptr());
  py::register_exception<AuthError>(m, "AuthError", transport.ptr());
  py::register_exception<ResponseError>(m, "ResponseError", transport.ptr());

  py::class_<Corpus>(m, "Corpus")
      .def_static("load", &load_corpus, py::arg("path"))
      .def_static("parse", &parse_corpus, py::arg("json_text"))
      .def("document_ids", &Corpus::document_ids)
      .def("codes", &Corpus::codes)
      .def(
          "requirement_ids",
          [](const Corpus& c, const std::optional<std::vector<std::string>>& docs) {
            return docs ? c.requirement_ids(*docs) : c.requirement_ids();
          },
          py::arg("doc_ids") = py::none())
      .def("requirement_text", [](const Corpus& c, const std::string& id) { return c.requirement(id).text; })
      .def("provision_text", [](const Corpus& c, const std::string& code) { return provision_text(c.provision(code)); })
      .def("ground_truth", &ground_truth_map)
      .def("to_json", &corpus_to_json);

  py::class_<SimilarityMatrix>(m, "SimilarityMatrix")
      .def(py::init(&make_matrix), py::arg("req_ids"), py::arg("codes"), py::arg("rows"))
      .def_static("load", &load_similarity_matrix, py::arg("path"))
      .def_static("parse", &parse_similarity_matrix, py::arg("json_text"))
      .def_property_readonly("req_ids", &SimilarityMatrix::req_ids)
      .def_property_readonly("codes", &SimilarityMatrix::prov_codes)
      .def("rows", &matrix_rows)
      .def("at", &SimilarityMatrix::at, py::arg("row"), py::arg("col"))
      .def("to_json", &similarity_matrix_to_json);

  m.def("cosine", [](const std::vector<double>& u, const std::vector<double>& v) { return cosine(u, v); });
  m.def("hash_embed", &hash_embed, py::arg("text"), py::arg("dim"), py::arg("seed"));
  m.def(
      "load_embeddings",
      [](const std::string& path) {
        const EmbeddingSet s = load_embedding_set(path);
        return py::make_tuple(s.dim(), s.provider(), s.vectors());
      },
      py::arg("path"), "Returns (dim, provider, {id: vector}).");
  m.def("similarity", &corpus_similarity, py::arg("corpus"), py::arg("req_ids") = py::none(),
        py::arg("embeddings") = py::none(), py::arg("dim") = 256, py::arg("seed") = 16,
        "Hash embeddings unless an embedding file is given.");

  m.def("predict_constant", [](const SimilarityMatrix& s, double theta) { return predict_constant(s, theta).predictions; },
        py::arg("matrix"), py::arg("theta") = kDefaultConstantThreshold);
  m.def("predict_delta", [](const SimilarityMatrix& s) { return predict_delta(s).predictions; }, py::arg("matrix"));
  m.def(
      "tune_threshold",
      [](const SimilarityMatrix& s, const Corpus& c) {
        const ThresholdCurve curve = tune_threshold(s, c.ground_truth());
        std::vector<std::pair<double, double>> points;
        for (const auto& p : curve.points) points.emplace_back(p.theta, p.f2);
        return py::make_tuple(curve.best_theta, curve.best_f2, points);
      },
      py::arg("matrix"), py::arg("corpus"), "Returns (best theta, best F2, [(theta, F2)]).");

  m.def(
      "f_beta",
      [](std::int64_t tp, std::int64_t fp, std::int64_t fn, double beta) {
        ConfusionCounts c;
        c.tp = tp;
        c.fp = fp;
        c.fn = fn;
        return f_beta(c, beta);
      },
      py::arg("tp"), py::arg("fp"), py::arg("fn"), py::arg("beta") = 2.0);
  m.def(
      "fisher_exact",
      [](std::uint64_t a, std::uint64_t b, std::uint64_t c, std::uint64_t d) { return fisher_exact({a, b, c, d}); },
      py::arg("a"), py::arg("b"), py::arg("c"), py::arg("d"));
  m.def(
      "roc_auc",
      [](const std::vector<double>& scores, const std::vector<int>& labels, const std::string& mode) {
        if (mode != "full" && mode != "sweep") throw ValidationError("mode must be full or sweep");
        return roc_auc(scores, labels, mode == "full" ? AucMode::full() : AucMode::sweep());
      },
      py::arg("scores"), py::arg("labels"), py::arg("mode") = "full");
  m.def("map_score", [](const SimilarityMatrix& s, const Corpus& c) { return map_score(s, c.ground_truth()); },
        py::arg("matrix"), py::arg("corpus"));
  m.def(
      "evaluate",
      [](const Corpus& c, const LinkMap& predictions, const std::optional<SimilarityMatrix>& scores,
         const std::string& match_mode) {
        PredictionSet p;
        p.predictions = predictions;
        std::vector<std::string> ids;
        for (const auto& id : c.requirement_ids()) {
          if (predictions.contains(id)) ids.push_back(id);
        }
        for (const auto& [id, codes] : predictions) c.requirement(id);
        if (ids.empty()) throw ValidationError("predictions cover no requirement");
        const auto report =
            evaluate_predictions(c, p, ids, scores ? &*scores : nullptr, parse_match_mode(match_mode));
        return from_json(metrics_report_to_json(report));
      },
      py::arg("corpus"), py::arg("predictions"), py::arg("scores") = py::none(), py::arg("match_mode") = "superset");

  m.def(
      "run_loo",
      [](const Corpus& c, const std::optional<std::vector<std::string>>& methods,
         const std::set<std::string>& exclude, const std::optional<std::string>& embeddings, std::size_t dim,
         std::uint64_t seed) {
        std::vector<Method> ms;
        if (methods) {
          for (const auto& name : *methods) ms.push_back(parse_method(name));
        } else {
          ms.assign(std::begin(kAllMethods), std::end(kAllMethods));
        }
        PipelineConfig config;
        config.seed = seed;
        auto provider = provider_for(embeddings, dim, seed);
        const CorpusEmbeddings emb = embed_corpus(c, *provider);
        return from_json(loo_result_to_json(run_loo(c, &emb, exclude, ms, config)));
      },
      py::arg("corpus"), py::arg("methods") = py::none(), py::arg("exclude") = std::set<std::string>{},
      py::arg("embeddings") = py::none(), py::arg("dim") = 256, py::arg("seed") = 16);

  m.def(
      "render_prompt",
      [](const Corpus& c, const std::string& variant, const std::string& req_id, const std::optional<std::string>& code,
         const std::optional<std::string>& examples, const std::string& regulation) {
        const PromptVariant v = parse_prompt_variant(variant);
        const Requirement& r = c.requirement(req_id);
        if (is_pairwise(v)) {
          if (!code) throw ValidationError(variant + " needs a provision code");
          const Provision& p = c.provision(*code);
          return v == PromptVariant::kP1 ? build_p1_prompt(r, p, regulation) : build_p3_prompt(v, r, p, regulation);
        }
        if (v == PromptVariant::kP2) return build_p2_prompt(r, c.catalog(), regulation);
        if (!examples) throw ValidationError("rice needs an examples file");
        return build_rice_prompt(with_else_sentinel(c.catalog()), load_examples(*examples), r, regulation);
      },
      py::arg("corpus"), py::arg("variant"), py::arg("req_id"), py::arg("code") = py::none(),
      py::arg("examples") = py::none(), py::arg("regulation") = kDefaultRegulation);
  m.def(
      "parse_code_list",
      [](const std::string& raw, const std::vector<std::string>& codes) {
        const ParsedPrediction p = parse_code_list(raw, codes);
        return py::make_tuple(p.codes, p.rationale, p.else_sentinel);
      },
      py::arg("raw"), py::arg("codes"), "Returns (codes, rationale, else_sentinel).");

  m.def(
      "run_cli",
      [](const std::vector<std::string>& args) {
        std::ostringstream out;
        std::ostringstream err;
        int code;
        {
          py::gil_scoped_release release;
          code = cli::dispatch(args, out, err);
        }
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"), "Runs the command line tool in-process. Returns (exit code, stdout, stderr).");
}
