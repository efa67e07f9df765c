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

#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "oclrag/evaluation.hpp"
#include "oclrag/generation.hpp"
#include "oclrag/pathocl.hpp"

namespace oclrag {

struct ProviderSpec {
  enum class Kind { Surrogate, Remote };
  Kind kind = Kind::Surrogate;
  std::size_t dim = 256;
  std::string endpoint;
  std::string auth_token;
  int timeout_ms = 30000;
  bool persistent_cache = false;
  std::string cache_path;
};

struct LlmSpec {
  enum class Kind { EchoMock, CannedMock, Remote };
  Kind kind = Kind::EchoMock;
  std::string endpoint;
  std::string auth_token;
  int timeout_ms = 60000;
  int min_interval_ms = 0;
  std::map<std::string, std::string> canned;  // CannedMock only
};

struct FilterSpec {
  enum class Mode { None, Above, Below };
  Mode mode = Mode::Above;
  int threshold = 50;
};

/// Everything one sweep needs, mirrored 1:1 by the JSON config file.
struct ExperimentConfig {
  std::string dataset_path;
  std::string kb_path;
  std::string out_dir = "out";
  std::vector<RetrieverId> retrievers{RetrieverId::Bm25, RetrieverId::Dense, RetrieverId::Sparse};
  std::vector<int> k_values{0, 10, 20, 30, 40, 50};
  std::vector<int> pathocl_k_values{1, 3, 5};
  std::size_t sample_n = 72;
  std::uint64_t seed = 17;
  FilterSpec filter{};
  BM25Params bm25{};
  PathBudget path_budget{};
  ProviderSpec dense_provider{};   // retrieval embeddings
  ProviderSpec sparse_provider{};  // retrieval sparse encodings
  ProviderSpec eval_provider{};    // evaluation embeddings
  LlmSpec llm{};
  GenerationConfig generation{};
  TrimPolicy trim_policy = TrimPolicy::PerMetric;
  int concurrency = 1;
};

ExperimentConfig load_config(const std::filesystem::path& path);
ExperimentConfig config_from_json_text(const std::string& text);
std::string config_to_json_text(const ExperimentConfig& config);

/// Rejects configs a sweep cannot honor: no k values, path-based retrievers
/// without a strictly-below chunk filter, remote specs with bad URLs.
void validate_config(const ExperimentConfig& config);

/// FNV-1a digest of the canonical JSON form, hex-encoded. Checkpoints store
/// it so a resumed sweep cannot silently mix configurations.
std::string config_digest(const ExperimentConfig& config);

std::shared_ptr<DenseProvider> make_dense_provider(const ProviderSpec& spec);
std::unique_ptr<SparseEncoderProvider> make_sparse_provider(const ProviderSpec& spec);
std::unique_ptr<LlmClient> make_llm_client(const LlmSpec& spec);

struct CellKey {
  RetrieverId retriever = RetrieverId::None;
  int k = 0;

  friend auto operator<=>(const CellKey&, const CellKey&) = default;
};

struct SweepMetadata {
  std::uint64_t seed = 0;
  std::string config_digest;
  std::string started_at;
  std::string finished_at;
  std::vector<std::string> sample_ids;  // shared by every cell
};

struct SweepResult {
  std::map<CellKey, AggregateStats> cells;
  std::vector<EvalRecord> records;  // canonical order: (retriever, k, sample position)
  SweepMetadata meta;
};

/// One retrieval pass for one sample: the selected chunks and the context
/// text exactly as the prompt will carry it. Chunk retrievers join chunk
/// texts with newlines; path-based retrievers serialize ranked paths.
/// k = 0 (or retriever "none") yields an empty context.
struct RetrievedContext {
  std::vector<ScoredChunk> chunks;
  std::string context_text;
};

RetrievedContext retrieve_context(const std::string& nl_spec, const std::string& model_name,
                                  RetrieverId retriever, int k, const KnowledgeBase& kb,
                                  const RetrieverContext& ctx, const PathBudget& budget);

/// Runs the full grid: build/load the KB, filter, draw the shared sample,
/// then retrieve + prompt + generate + score per (retriever, k, sample).
/// Results checkpoint per record under out_dir so an interrupted sweep
/// resumes without repeating completed LLM calls. When 0 is among the k
/// values the no-retrieval baseline runs once as cell ("none", 0). Failures
/// abort annotated with (retriever, k, sample); the checkpoint survives.
SweepResult run_sweep(const ExperimentConfig& config);

/// Re-derives a SweepResult from a persisted record archive.
SweepResult result_from_records(std::vector<EvalRecord> records,
                                TrimPolicy policy = TrimPolicy::PerMetric);

enum class ReportFormat { TableText, Csv };

/// One table per retriever: rows Mean/Variance/Trimmed Mean for CS and ED,
/// one column per k plus the shared baseline column. Values are rounded to
/// 4 decimals; the best non-baseline cell of each row is starred (highest
/// for CS means, lowest for distances and variances). The CSV form is one
/// (retriever, k, metric, value) line each.
std::string render_report(const SweepResult& result, ReportFormat format);

/// Raw per-sample metric values grouped by (retriever, metric, k) as CSV,
/// full precision, for external boxplotting. Distance groups are flagged
/// invert_axis=true since lower is better.
std::string export_boxplot_data(const SweepResult& result);

}  // namespace oclrag
