// Copyright 2026 the oclrag authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "oclrag/evaluation.hpp"
#include "oclrag/generation.hpp"
#include "oclrag/harness.hpp"
#include "oclrag/pathocl.hpp"

namespace py = pybind11;
using namespace oclrag;

namespace {

KnowledgeBase kb_from_records(const std::vector<DatasetRecord>& records) {
  return build_kb(records);
}

std::vector<ScoredChunk> py_retrieve_top_k(const std::string& spec, const std::string& model,
                                           int k, const KnowledgeBase& kb,
                                           const std::string& scorer, std::size_t dense_dim) {
  HashingDenseEmbedder dense(dense_dim);
  SurrogateSparseProvider sparse;
  RetrieverContext ctx;
  ctx.dense = &dense;
  ctx.sparse = &sparse;
  return retrieve_top_k({spec, model, k}, kb, scorer_from_string(scorer), ctx);
}

std::pair<double, double> py_score_pair(const std::string& generated,
                                        const std::string& reference, std::size_t dim) {
  HashingDenseEmbedder embedder(dim);
  return score_pair(generated, reference, embedder);
}

}  // namespace

PYBIND11_MODULE(_oclrag, m) {
  m.doc() = "Retrieval-augmented OCL constraint generation toolkit";

  py::register_exception<Error>(m, "OclragError");

  py::enum_<ChunkKind>(m, "ChunkKind")
      .value("CLASS", ChunkKind::Class)
      .value("ENUM", ChunkKind::Enum)
      .value("ASSOCIATION", ChunkKind::Association);

  py::class_<Chunk>(m, "Chunk")
      .def_readonly("model_name", &Chunk::model_name)
      .def_readonly("index", &Chunk::index)
      .def_readonly("kind", &Chunk::kind)
      .def_readonly("text", &Chunk::text)
      .def("__repr__", [](const Chunk& c) {
        return "Chunk(" + c.model_name + "[" + std::to_string(c.index) + "], " +
               std::string(to_string(c.kind)) + ")";
      });

  py::class_<DatasetRecord>(m, "DatasetRecord")
      .def(py::init([](const std::string& sample_id, const std::string& ocl,
                       const std::string& spec, const std::string& model,
                       const std::string& plantuml) {
             return DatasetRecord{sample_id, ocl, spec, model, plantuml};
           }),
           py::arg("sample_id"), py::arg("ocl"), py::arg("spec"), py::arg("model"),
           py::arg("plantuml"))
      .def_readonly("sample_id", &DatasetRecord::sample_id)
      .def_readonly("ocl", &DatasetRecord::ocl_rule)
      .def_readonly("spec", &DatasetRecord::nl_spec)
      .def_readonly("model", &DatasetRecord::model_name)
      .def_readonly("plantuml", &DatasetRecord::plantuml_text);

  py::class_<KnowledgeBase>(m, "KnowledgeBase")
      .def("models", [](const KnowledgeBase& kb) {
        std::vector<std::string> names;
        for (const auto& [name, _] : kb.models) names.push_back(name);
        return names;
      })
      .def("chunks", &KnowledgeBase::chunks_for, py::arg("model"))
      .def("chunk_count", &KnowledgeBase::chunk_count, py::arg("model"))
      .def("total_chunks", &KnowledgeBase::total_chunks)
      .def("globally_unique_chunks", &KnowledgeBase::globally_unique_chunks);

  py::class_<ScoredChunk>(m, "ScoredChunk")
      .def_readonly("chunk", &ScoredChunk::chunk)
      .def_readonly("score", &ScoredChunk::score)
      .def_readonly("rank", &ScoredChunk::rank);

  py::class_<ModelGraph>(m, "ModelGraph")
      .def_property_readonly("nodes", [](const ModelGraph& g) { return g.nodes; })
      .def_property_readonly("edges",
                             [](const ModelGraph& g) {
                               std::vector<std::tuple<std::string, std::string, std::string>> out;
                               for (const GraphEdge& e : g.edges) {
                                 out.emplace_back(e.source, e.target, e.label);
                               }
                               return out;
                             })
      .def("has_edge", &ModelGraph::has_edge, py::arg("source"), py::arg("target"));

  py::class_<EvalRecord>(m, "EvalRecord")
      .def(py::init([](const std::string& sample_id, const std::string& retriever, int k,
                       double cs, double ed) {
             return EvalRecord{sample_id, retriever_from_string(retriever), k, cs, ed};
           }),
           py::arg("sample_id"), py::arg("retriever"), py::arg("k"), py::arg("cs"), py::arg("ed"))
      .def_readonly("sample_id", &EvalRecord::sample_id)
      .def_readonly("k", &EvalRecord::k)
      .def_readonly("cs", &EvalRecord::cosine_sim)
      .def_readonly("ed", &EvalRecord::euclid_dist);

  py::class_<AggregateStats>(m, "AggregateStats")
      .def_readonly("mean_cs", &AggregateStats::mean_cs)
      .def_readonly("var_cs", &AggregateStats::var_cs)
      .def_readonly("trimmed_mean_cs", &AggregateStats::trimmed_mean_cs)
      .def_readonly("mean_ed", &AggregateStats::mean_ed)
      .def_readonly("var_ed", &AggregateStats::var_ed)
      .def_readonly("trimmed_mean_ed", &AggregateStats::trimmed_mean_ed)
      .def_readonly("n", &AggregateStats::n)
      .def_readonly("trim_count", &AggregateStats::trim_count);

  m.def("normalize_text", [](const std::string& raw) { return normalize_text(raw); },
        py::arg("raw"), "Collapse whitespace runs and strip the ends.");
  m.def(
      "chunk_metamodel",
      [](const std::string& name, const std::string& plantuml) {
        return chunk_metamodel(RawMetaModel{name, plantuml});
      },
      py::arg("name"), py::arg("plantuml"),
      "Split PlantUML text into class/enum/association chunks.");
  m.def("tokenize", [](const std::string& text) { return tokenize(text); }, py::arg("text"));

  m.def(
      "bm25_scores",
      [](const std::vector<std::string>& query_tokens, const std::vector<Chunk>& chunks,
         double k1, double b) {
        std::vector<std::pair<Chunk, double>> out;
        for (auto& [chunk, score] : bm25_scores(query_tokens, chunks, BM25Params{k1, b})) {
          out.emplace_back(chunk, score);
        }
        return out;
      },
      py::arg("query_tokens"), py::arg("chunks"), py::arg("k1") = 1.5, py::arg("b") = 0.75);

  m.def("cosine_similarity", &cosine_similarity, py::arg("u"), py::arg("v"));
  m.def("euclidean_distance", &euclidean_distance, py::arg("u"), py::arg("v"));
  m.def("sparse_dot", &sparse_dot, py::arg("a"), py::arg("b"));
  m.def("jaccard_similarity", &jaccard_similarity, py::arg("a"), py::arg("b"));

  m.def("embed_dense",
        [](const std::vector<std::string>& texts, std::size_t dim) {
          HashingDenseEmbedder embedder(dim);
          return embed_dense(embedder, texts);
        },
        py::arg("texts"), py::arg("dim") = 256,
        "Deterministic hashing embeddings (the surrogate encoder).");
  m.def("encode_sparse",
        [](const std::vector<std::string>& texts, const std::vector<std::string>& corpus) {
          TfidfSparseEncoder encoder;
          encoder.fit(corpus);
          return encode_sparse(encoder, texts);
        },
        py::arg("texts"), py::arg("corpus"),
        "Corpus-fitted tf-idf sparse encodings (the surrogate encoder).");

  m.def("parse_dataset",
        [](const std::string& path) { return parse_dataset(std::filesystem::path(path)); },
        py::arg("path"));
  m.def("build_kb", &kb_from_records, py::arg("records"));
  m.def("load_kb", [](const std::string& path) { return load_kb(path); }, py::arg("path"));
  m.def("persist_kb",
        [](const KnowledgeBase& kb, const std::string& path) { persist_kb(kb, path); },
        py::arg("kb"), py::arg("path"));

  m.def("retrieve_top_k", &py_retrieve_top_k, py::arg("spec"), py::arg("model"), py::arg("k"),
        py::arg("kb"), py::arg("scorer") = "bm25", py::arg("dense_dim") = 256);

  m.def("build_prompt",
        [](const std::string& context, const std::string& spec) {
          return build_prompt(context, spec).rendered;
        },
        py::arg("context"), py::arg("spec"), "Render the generation prompt.");

  m.def("build_graph",
        [](const std::string& name, const std::string& plantuml) {
          return build_graph(RawMetaModel{name, plantuml});
        },
        py::arg("name"), py::arg("plantuml"));
  m.def("enumerate_simple_paths",
        [](const ModelGraph& graph, int max_path_len, long max_paths) {
          const PathEnumeration result =
              enumerate_simple_paths(graph, PathBudget{max_path_len, max_paths});
          return std::make_pair(result.paths, result.truncated);
        },
        py::arg("graph"), py::arg("max_path_len") = 6, py::arg("max_paths") = 10000);
  m.def("extract_elements",
        [](const std::string& spec, const ModelGraph& graph) {
          return extract_elements(spec, graph);
        },
        py::arg("spec"), py::arg("graph"));

  m.def("score_pair", &py_score_pair, py::arg("generated"), py::arg("reference"),
        py::arg("dim") = 256);
  m.def("aggregate_stats",
        [](const std::vector<EvalRecord>& records, const std::string& trim) {
          const TrimPolicy policy =
              trim == "cs-based" ? TrimPolicy::CosineBased : TrimPolicy::PerMetric;
          return aggregate_stats(records, policy);
        },
        py::arg("records"), py::arg("trim") = "per-metric");

  m.attr("PROMPT_TEMPLATE") = std::string(kPromptTemplate);
  m.attr("__version__") = "0.1.0";
}
