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

#include <fstream>
#include <iostream>
#include <optional>

#include <CLI11.hpp>
#include <json.hpp>

#include "oclrag/harness.hpp"
#include "oclrag/server.hpp"

namespace {

using namespace oclrag;
using nlohmann::json;

struct GlobalOpts {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string kb_path;
  std::string out_path;
};

ExperimentConfig effective_config(const GlobalOpts& opts) {
  ExperimentConfig config;
  if (!opts.config_path.empty()) config = load_config(opts.config_path);
  if (opts.seed) config.seed = *opts.seed;
  if (!opts.kb_path.empty()) config.kb_path = opts.kb_path;
  if (!opts.out_path.empty()) config.out_dir = opts.out_path;
  return config;
}

void write_or_print(const std::string& document, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << document;
    return;
  }
  std::ofstream out(out_path);
  if (!out) raise(ErrorCode::IoFailure, "cannot write '" + out_path + "'");
  out << document;
  std::cerr << "wrote " << out_path << "\n";
}

KnowledgeBase kb_for(const ExperimentConfig& config, const std::string& dataset_override) {
  const std::string dataset =
      dataset_override.empty() ? config.dataset_path : dataset_override;
  if (!config.kb_path.empty() && std::filesystem::exists(config.kb_path)) {
    return load_kb(config.kb_path);
  }
  if (dataset.empty()) {
    raise(ErrorCode::InvalidConfig, "need --kb with an existing file or a dataset path");
  }
  return build_kb(parse_dataset(dataset), dataset);
}

int run_cli(int argc, char** argv) {
  CLI::App app{"Retrieval-augmented OCL constraint generation toolkit"};
  app.require_subcommand(1);
  app.fallthrough();  // global flags may follow the subcommand

  GlobalOpts global;
  app.add_option("--config", global.config_path, "JSON experiment configuration")
      ->envname("OCLRAG_CONFIG");
  app.add_option("--seed", global.seed, "override the configured random seed");
  app.add_option("--kb", global.kb_path, "knowledge base file");
  app.add_option("--out", global.out_path, "output directory or file");

  // ingest: parse the dataset and report corpus statistics
  auto* ingest = app.add_subcommand("ingest", "Parse a dataset file and print corpus stats");
  std::string ingest_dataset;
  ingest->add_option("--dataset", ingest_dataset, "line-delimited dataset file");
  ingest->callback([&]() {
    ExperimentConfig config = effective_config(global);
    const std::string dataset = ingest_dataset.empty() ? config.dataset_path : ingest_dataset;
    if (dataset.empty()) raise(ErrorCode::InvalidConfig, "ingest needs --dataset");
    const auto records = parse_dataset(dataset);
    const KnowledgeBase kb = build_kb(records, dataset);
    std::size_t hard = 0;
    std::size_t small = 0;
    for (const auto& [_, chunks] : kb.models) {
      if (chunks.size() > 50) ++hard;
      if (chunks.size() < 100) ++small;
    }
    std::cout << "records: " << records.size() << "\n"
              << "models: " << kb.models.size() << "\n"
              << "chunks (unique per model): " << kb.total_chunks() << "\n"
              << "chunks (unique globally): " << kb.globally_unique_chunks() << "\n"
              << "models with > 50 chunks: " << hard << "\n"
              << "models with < 100 chunks: " << small << "\n";
  });

  // chunk: show the chunks of one meta-model
  auto* chunk = app.add_subcommand("chunk", "Chunk one meta-model and print the pieces");
  std::string chunk_dataset, chunk_model, chunk_file, chunk_name;
  bool chunk_edges = false;
  chunk->add_option("--dataset", chunk_dataset, "dataset to pull the model from");
  chunk->add_option("--model", chunk_model, "meta-model name within the dataset");
  chunk->add_option("--file", chunk_file, "raw PlantUML file to chunk instead");
  chunk->add_option("--name", chunk_name, "model name to use with --file");
  chunk->add_flag("--edges", chunk_edges, "print the class graph as edge-list lines instead");
  chunk->callback([&]() {
    ExperimentConfig config = effective_config(global);
    RawMetaModel model;
    if (!chunk_file.empty()) {
      std::ifstream in(chunk_file);
      if (!in) raise(ErrorCode::IoFailure, "cannot open '" + chunk_file + "'");
      std::ostringstream text;
      text << in.rdbuf();
      model.name = chunk_name.empty() ? chunk_file : chunk_name;
      model.plantuml_text = text.str();
    } else {
      const std::string dataset = chunk_dataset.empty() ? config.dataset_path : chunk_dataset;
      if (dataset.empty() || chunk_model.empty()) {
        raise(ErrorCode::InvalidConfig, "chunk needs --file or --dataset plus --model");
      }
      for (const auto& rec : parse_dataset(dataset)) {
        if (rec.model_name == chunk_model) {
          model = RawMetaModel{rec.model_name, rec.plantuml_text};
          break;
        }
      }
      if (model.name.empty()) raise(ErrorCode::UnknownModel, chunk_model);
    }
    if (chunk_edges) {
      std::cout << graph_to_edge_list(build_graph(model));
      return;
    }
    for (const Chunk& c : chunk_metamodel(model)) {
      std::cout << c.index << '\t' << to_string(c.kind) << '\t' << c.text << '\n';
    }
  });

  // index: build and persist the knowledge base
  auto* index = app.add_subcommand("index", "Build the knowledge base and persist it");
  std::string index_dataset;
  index->add_option("--dataset", index_dataset, "line-delimited dataset file");
  index->callback([&]() {
    ExperimentConfig config = effective_config(global);
    const std::string dataset = index_dataset.empty() ? config.dataset_path : index_dataset;
    if (dataset.empty()) raise(ErrorCode::InvalidConfig, "index needs --dataset");
    if (config.kb_path.empty()) raise(ErrorCode::InvalidConfig, "index needs --kb");
    const KnowledgeBase kb = build_kb(parse_dataset(dataset), dataset);
    persist_kb(kb, config.kb_path);
    std::cout << "indexed " << kb.models.size() << " models, " << kb.total_chunks()
              << " chunks -> " << config.kb_path << "\n";
  });

  // retrieve: score chunks for one query
  auto* retrieve = app.add_subcommand("retrieve", "Retrieve top-k chunks for a specification");
  std::string r_model, r_spec, r_retriever = "bm25", r_dataset;
  int r_k = 10;
  bool r_json = false;
  retrieve->add_option("--model", r_model, "meta-model name")->required();
  retrieve->add_option("--spec", r_spec, "natural language specification")->required();
  retrieve->add_option("--retriever", r_retriever, "bm25 | dense | sparse | pathocl-jaccard | pathocl-cosine");
  retrieve->add_option("--k", r_k, "number of chunks (or paths)");
  retrieve->add_option("--dataset", r_dataset, "dataset to build the KB from");
  retrieve->add_flag("--json", r_json, "emit JSON lines");
  retrieve->callback([&]() {
    ExperimentConfig config = effective_config(global);
    const KnowledgeBase kb = kb_for(config, r_dataset);
    const auto dense = make_dense_provider(config.dense_provider);
    const auto sparse = make_sparse_provider(config.sparse_provider);
    RetrieverContext ctx{config.bm25, dense.get(), sparse.get()};
    const RetrievedContext retrieved =
        retrieve_context(r_spec, r_model, retriever_from_string(r_retriever), r_k, kb, ctx,
                         config.path_budget);
    for (const ScoredChunk& sc : retrieved.chunks) {
      if (r_json) {
        std::cout << json{{"rank", sc.rank}, {"score", sc.score}, {"text", sc.chunk.text}}.dump()
                  << '\n';
      } else {
        std::cout << sc.rank << '\t' << sc.score << '\t' << sc.chunk.text << '\n';
      }
    }
  });

  // generate: one retrieval-augmented generation
  auto* generate = app.add_subcommand("generate", "Generate one OCL constraint");
  std::string g_model, g_spec, g_retriever = "bm25", g_dataset;
  int g_k = 10;
  bool g_show_prompt = false;
  generate->add_option("--model", g_model, "meta-model name")->required();
  generate->add_option("--spec", g_spec, "natural language specification")->required();
  generate->add_option("--retriever", g_retriever, "retriever id, or 'none' for the baseline");
  generate->add_option("--k", g_k, "number of chunks (or paths)");
  generate->add_option("--dataset", g_dataset, "dataset to build the KB from");
  generate->add_flag("--show-prompt", g_show_prompt, "print the rendered prompt to stderr");
  generate->callback([&]() {
    ExperimentConfig config = effective_config(global);
    const KnowledgeBase kb = kb_for(config, g_dataset);
    const auto dense = make_dense_provider(config.dense_provider);
    const auto sparse = make_sparse_provider(config.sparse_provider);
    const auto llm = make_llm_client(config.llm);
    RetrieverContext ctx{config.bm25, dense.get(), sparse.get()};
    const RetrieverId retriever = retriever_from_string(g_retriever);
    const int k = retriever == RetrieverId::None ? 0 : g_k;
    const RetrievedContext retrieved =
        retrieve_context(g_spec, g_model, retriever, k, kb, ctx, config.path_budget);
    const PromptSpec prompt = build_prompt(retrieved.context_text, g_spec);
    const GenerationRecord record = generate_ocl(prompt, *llm, config.generation);
    if (g_show_prompt) std::cerr << record.prompt << "\n---\n";
    std::cout << record.output_ocl << "\n";
  });

  // sweep: the full experiment grid
  auto* sweep = app.add_subcommand("sweep", "Run the full retriever x k experiment grid");
  sweep->callback([&]() {
    ExperimentConfig config = effective_config(global);
    const SweepResult result = run_sweep(config);
    const std::string report = render_report(result, ReportFormat::TableText);
    std::ofstream report_out(std::filesystem::path(config.out_dir) / "report.txt");
    report_out << report;
    std::ofstream csv_out(std::filesystem::path(config.out_dir) / "report.csv");
    csv_out << render_report(result, ReportFormat::Csv);
    std::cout << report;
    std::cerr << "artifacts in " << config.out_dir << "\n";
  });

  // report: re-render from a persisted record archive
  auto* report = app.add_subcommand("report", "Render a report from persisted eval records");
  std::string rep_records, rep_format = "table";
  report->add_option("--records", rep_records, "records.jsonl from a sweep")->required();
  report->add_option("--format", rep_format, "table | csv");
  report->callback([&]() {
    ExperimentConfig config = effective_config(global);
    SweepResult result = result_from_records(load_eval_records(rep_records), config.trim_policy);
    // Pick up the sweep's own metadata when it sits next to the records.
    const auto meta_path = std::filesystem::path(rep_records).parent_path() / "sweep_meta.json";
    if (std::filesystem::exists(meta_path)) {
      std::ifstream meta_in(meta_path);
      const json meta = json::parse(meta_in, nullptr, false);
      if (!meta.is_discarded()) {
        result.meta.seed = meta.value("seed", std::uint64_t{0});
        result.meta.config_digest = meta.value("config_digest", "");
      }
    }
    const ReportFormat format =
        rep_format == "csv" ? ReportFormat::Csv : ReportFormat::TableText;
    write_or_print(render_report(result, format), global.out_path);
  });

  // export-plots: per-sample metric values for external boxplots
  auto* plots = app.add_subcommand("export-plots", "Export raw per-sample metric groups");
  std::string plot_records;
  plots->add_option("--records", plot_records, "records.jsonl from a sweep")->required();
  plots->callback([&]() {
    ExperimentConfig config = effective_config(global);
    const SweepResult result =
        result_from_records(load_eval_records(plot_records), config.trim_policy);
    write_or_print(export_boxplot_data(result), global.out_path);
  });

  // serve: REST API
  auto* serve = app.add_subcommand("serve", "Serve /health, /retrieve and /generate over HTTP");
  int serve_port = 8080;
  serve->add_option("--port", serve_port, "TCP port");
  serve->callback([&]() {
    ExperimentConfig config = effective_config(global);
    std::cerr << "serving on port " << serve_port << "\n";
    serve_api(config, serve_port);
  });

  CLI11_PARSE(app, argc, argv);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run_cli(argc, argv);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
