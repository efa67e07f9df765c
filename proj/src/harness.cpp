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

#include "oclrag/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "internal/http.hpp"
#include "internal/time.hpp"

namespace oclrag {

namespace {

using nlohmann::json;

std::string fmt4(double value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.4f", value);
  return buf;
}

std::string fmt_full(double value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  return buf;
}

FilterSpec::Mode filter_mode_from_string(const std::string& s) {
  if (s == "none") return FilterSpec::Mode::None;
  if (s == "above") return FilterSpec::Mode::Above;
  if (s == "below") return FilterSpec::Mode::Below;
  raise(ErrorCode::InvalidConfig, "unknown filter mode '" + s + "'");
}

std::string filter_mode_to_string(FilterSpec::Mode mode) {
  switch (mode) {
    case FilterSpec::Mode::None: return "none";
    case FilterSpec::Mode::Above: return "above";
    case FilterSpec::Mode::Below: return "below";
  }
  return "none";
}

ProviderSpec provider_from_json(const json& obj) {
  ProviderSpec spec;
  const std::string kind = obj.value("kind", "surrogate");
  if (kind == "surrogate") {
    spec.kind = ProviderSpec::Kind::Surrogate;
  } else if (kind == "remote") {
    spec.kind = ProviderSpec::Kind::Remote;
  } else {
    raise(ErrorCode::InvalidConfig, "unknown provider kind '" + kind + "'");
  }
  spec.dim = obj.value("dim", std::size_t{256});
  spec.endpoint = obj.value("endpoint", "");
  spec.auth_token = obj.value("auth_token", "");
  spec.timeout_ms = obj.value("timeout_ms", 30000);
  const std::string cache = obj.value("cache", "none");
  if (cache == "persistent") {
    spec.persistent_cache = true;
  } else if (cache != "none") {
    raise(ErrorCode::InvalidConfig, "unknown cache policy '" + cache + "'");
  }
  spec.cache_path = obj.value("cache_path", "");
  return spec;
}

json provider_to_json(const ProviderSpec& spec) {
  return json{{"kind", spec.kind == ProviderSpec::Kind::Surrogate ? "surrogate" : "remote"},
              {"dim", spec.dim},
              {"endpoint", spec.endpoint},
              {"auth_token", spec.auth_token},
              {"timeout_ms", spec.timeout_ms},
              {"cache", spec.persistent_cache ? "persistent" : "none"},
              {"cache_path", spec.cache_path}};
}

// Runs fn(0..count-1) on up to `workers` threads. The smallest-index
// exception wins so failures are reported deterministically.
void parallel_for(std::size_t count, int workers, const std::function<void(std::size_t)>& fn) {
  if (count == 0) return;
  const int n_threads = std::max(1, std::min<int>(workers, static_cast<int>(count)));
  if (n_threads == 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }

  std::atomic<std::size_t> next{0};
  std::mutex error_mutex;
  std::size_t error_index = count;
  std::exception_ptr error;

  auto worker = [&]() {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= count) return;
      {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (error) return;  // stop issuing new work after a failure
      }
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error || i < error_index) {
          error = std::current_exception();
          error_index = i;
        }
      }
    }
  };

  std::vector<std::thread> threads;
  threads.reserve(static_cast<std::size_t>(n_threads));
  for (int t = 0; t < n_threads; ++t) threads.emplace_back(worker);
  for (std::thread& t : threads) t.join();
  if (error) std::rethrow_exception(error);
}

struct CheckpointEntry {
  std::string output_ocl;
  double cosine_sim = 0.0;
  double euclid_dist = 0.0;
  std::int64_t latency_ms = 0;
  bool truncated = false;
};

std::string checkpoint_key(RetrieverId retriever, int k, const std::string& sample_id) {
  return std::string(to_string(retriever)) + '\x1f' + std::to_string(k) + '\x1f' + sample_id;
}

}  // namespace

ExperimentConfig config_from_json_text(const std::string& text) {
  json obj = json::parse(text, nullptr, false);
  if (obj.is_discarded() || !obj.is_object()) {
    raise(ErrorCode::InvalidConfig, "configuration is not a JSON object");
  }

  ExperimentConfig config;
  config.dataset_path = obj.value("dataset", "");
  config.kb_path = obj.value("kb", "");
  config.out_dir = obj.value("out", config.out_dir);
  if (obj.contains("retrievers")) {
    config.retrievers.clear();
    for (const json& r : obj["retrievers"]) {
      config.retrievers.push_back(retriever_from_string(r.get<std::string>()));
    }
  }
  if (obj.contains("k_values")) {
    config.k_values = obj["k_values"].get<std::vector<int>>();
  }
  if (obj.contains("pathocl_k_values")) {
    config.pathocl_k_values = obj["pathocl_k_values"].get<std::vector<int>>();
  }
  config.sample_n = obj.value("sample_n", config.sample_n);
  config.seed = obj.value("seed", config.seed);
  if (obj.contains("filter")) {
    config.filter.mode = filter_mode_from_string(obj["filter"].value("mode", "above"));
    config.filter.threshold = obj["filter"].value("threshold", 50);
  }
  if (obj.contains("bm25")) {
    config.bm25.k1 = obj["bm25"].value("k1", config.bm25.k1);
    config.bm25.b = obj["bm25"].value("b", config.bm25.b);
  }
  if (obj.contains("path_budget")) {
    config.path_budget.max_path_len =
        obj["path_budget"].value("max_path_len", config.path_budget.max_path_len);
    config.path_budget.max_paths =
        obj["path_budget"].value("max_paths", config.path_budget.max_paths);
  }
  if (obj.contains("dense_provider")) config.dense_provider = provider_from_json(obj["dense_provider"]);
  if (obj.contains("sparse_provider")) config.sparse_provider = provider_from_json(obj["sparse_provider"]);
  if (obj.contains("eval_provider")) config.eval_provider = provider_from_json(obj["eval_provider"]);
  if (obj.contains("llm")) {
    const json& llm = obj["llm"];
    const std::string kind = llm.value("kind", "echo-mock");
    if (kind == "echo-mock") {
      config.llm.kind = LlmSpec::Kind::EchoMock;
    } else if (kind == "canned-mock") {
      config.llm.kind = LlmSpec::Kind::CannedMock;
    } else if (kind == "remote") {
      config.llm.kind = LlmSpec::Kind::Remote;
    } else {
      raise(ErrorCode::InvalidConfig, "unknown llm kind '" + kind + "'");
    }
    config.llm.endpoint = llm.value("endpoint", "");
    config.llm.auth_token = llm.value("auth_token", "");
    config.llm.timeout_ms = llm.value("timeout_ms", 60000);
    config.llm.min_interval_ms = llm.value("min_interval_ms", 0);
    if (llm.contains("canned")) {
      config.llm.canned = llm["canned"].get<std::map<std::string, std::string>>();
    }
  }
  if (obj.contains("generation")) {
    config.generation.max_output_tokens =
        obj["generation"].value("max_output_tokens", config.generation.max_output_tokens);
    config.generation.system_role_text =
        obj["generation"].value("system_role_text", config.generation.system_role_text);
  }
  const std::string trim = obj.value("trim", "per-metric");
  if (trim == "per-metric") {
    config.trim_policy = TrimPolicy::PerMetric;
  } else if (trim == "cs-based") {
    config.trim_policy = TrimPolicy::CosineBased;
  } else {
    raise(ErrorCode::InvalidConfig, "unknown trim policy '" + trim + "'");
  }
  config.concurrency = obj.value("concurrency", 1);
  return config;
}

std::string config_to_json_text(const ExperimentConfig& config) {
  json retrievers = json::array();
  for (RetrieverId r : config.retrievers) retrievers.push_back(std::string(to_string(r)));
  json obj = {
      {"dataset", config.dataset_path},
      {"kb", config.kb_path},
      {"out", config.out_dir},
      {"retrievers", retrievers},
      {"k_values", config.k_values},
      {"pathocl_k_values", config.pathocl_k_values},
      {"sample_n", config.sample_n},
      {"seed", config.seed},
      {"filter",
       {{"mode", filter_mode_to_string(config.filter.mode)},
        {"threshold", config.filter.threshold}}},
      {"bm25", {{"k1", config.bm25.k1}, {"b", config.bm25.b}}},
      {"path_budget",
       {{"max_path_len", config.path_budget.max_path_len},
        {"max_paths", config.path_budget.max_paths}}},
      {"dense_provider", provider_to_json(config.dense_provider)},
      {"sparse_provider", provider_to_json(config.sparse_provider)},
      {"eval_provider", provider_to_json(config.eval_provider)},
      {"llm",
       {{"kind", config.llm.kind == LlmSpec::Kind::EchoMock
                     ? "echo-mock"
                     : (config.llm.kind == LlmSpec::Kind::CannedMock ? "canned-mock" : "remote")},
        {"endpoint", config.llm.endpoint},
        {"auth_token", config.llm.auth_token},
        {"timeout_ms", config.llm.timeout_ms},
        {"min_interval_ms", config.llm.min_interval_ms},
        {"canned", config.llm.canned}}},
      {"generation",
       {{"max_output_tokens", config.generation.max_output_tokens},
        {"system_role_text", config.generation.system_role_text}}},
      {"trim", config.trim_policy == TrimPolicy::PerMetric ? "per-metric" : "cs-based"},
      {"concurrency", config.concurrency},
  };
  return obj.dump(2);
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    raise(ErrorCode::IoFailure, "cannot open config file '" + path.string() + "'");
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return config_from_json_text(buffer.str());
}

void validate_config(const ExperimentConfig& config) {
  if (config.retrievers.empty()) {
    raise(ErrorCode::InvalidConfig, "at least one retriever is required");
  }
  if (config.k_values.empty()) {
    raise(ErrorCode::InvalidConfig, "k_values must be non-empty");
  }
  for (int k : config.k_values) {
    if (k < 0) raise(ErrorCode::InvalidConfig, "k values must be non-negative");
  }
  bool any_pathocl = false;
  for (RetrieverId r : config.retrievers) {
    if (r == RetrieverId::None) {
      raise(ErrorCode::InvalidConfig, "'none' is the implicit baseline, not a retriever choice");
    }
    any_pathocl = any_pathocl || is_pathocl(r);
  }
  if (any_pathocl) {
    if (config.filter.mode != FilterSpec::Mode::Below) {
      raise(ErrorCode::InvalidConfig,
            "path-based retrievers require the strictly-below chunk-count filter");
    }
    if (config.pathocl_k_values.empty()) {
      raise(ErrorCode::InvalidConfig, "pathocl_k_values must be non-empty");
    }
    for (int k : config.pathocl_k_values) {
      if (k < 1) raise(ErrorCode::InvalidConfig, "pathocl k values must be at least 1");
    }
  }
  if (config.sample_n == 0) {
    raise(ErrorCode::InvalidConfig, "sample_n must be at least 1");
  }
  if (config.concurrency < 1) {
    raise(ErrorCode::InvalidConfig, "concurrency must be at least 1");
  }
  auto check_remote = [](const ProviderSpec& spec, const char* name) {
    if (spec.kind == ProviderSpec::Kind::Remote) {
      internal::parse_http_url(spec.endpoint);
    }
    if (spec.dim == 0) {
      raise(ErrorCode::InvalidConfig, std::string(name) + " dim must be positive");
    }
    if (spec.persistent_cache && spec.cache_path.empty()) {
      raise(ErrorCode::InvalidConfig,
            std::string(name) + " has a persistent cache but no cache_path");
    }
  };
  check_remote(config.dense_provider, "dense provider");
  check_remote(config.eval_provider, "eval provider");
  if (config.sparse_provider.kind == ProviderSpec::Kind::Remote) {
    internal::parse_http_url(config.sparse_provider.endpoint);
  }
  if (config.llm.kind == LlmSpec::Kind::Remote) {
    internal::parse_http_url(config.llm.endpoint);
  }
  if (config.generation.max_output_tokens < 1) {
    raise(ErrorCode::InvalidConfig, "max_output_tokens must be positive");
  }
  if (config.path_budget.max_path_len < 1 || config.path_budget.max_paths < 1) {
    raise(ErrorCode::InvalidConfig, "path budget fields must be at least 1");
  }
}

std::string config_digest(const ExperimentConfig& config) {
  // Execution-only knobs stay out of the digest: neither the output
  // directory nor the worker count affects what a sweep computes, and a
  // checkpoint must stay resumable when they change.
  json canonical = json::parse(config_to_json_text(config));
  canonical.erase("out");
  canonical.erase("concurrency");
  const std::uint64_t h = fnv1a64(canonical.dump());
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::shared_ptr<DenseProvider> make_dense_provider(const ProviderSpec& spec) {
  std::shared_ptr<DenseProvider> provider;
  if (spec.kind == ProviderSpec::Kind::Surrogate) {
    provider = std::make_shared<HashingDenseEmbedder>(spec.dim);
  } else {
    provider = std::make_shared<RemoteDenseProvider>(
        RemoteEndpoint{spec.endpoint, spec.auth_token, spec.timeout_ms}, spec.dim);
  }
  if (spec.persistent_cache) {
    provider = std::make_shared<CachingDenseProvider>(std::move(provider), spec.cache_path);
  }
  return provider;
}

std::unique_ptr<SparseEncoderProvider> make_sparse_provider(const ProviderSpec& spec) {
  if (spec.kind == ProviderSpec::Kind::Surrogate) {
    return std::make_unique<SurrogateSparseProvider>();
  }
  return std::make_unique<RemoteSparseProvider>(
      RemoteEndpoint{spec.endpoint, spec.auth_token, spec.timeout_ms});
}

std::unique_ptr<LlmClient> make_llm_client(const LlmSpec& spec) {
  switch (spec.kind) {
    case LlmSpec::Kind::EchoMock:
      return std::make_unique<EchoMockClient>();
    case LlmSpec::Kind::CannedMock:
      return std::make_unique<CannedMockClient>(spec.canned);
    case LlmSpec::Kind::Remote:
      return std::make_unique<RemoteLlmClient>(
          RemoteEndpoint{spec.endpoint, spec.auth_token, spec.timeout_ms}, spec.min_interval_ms);
  }
  raise(ErrorCode::InvalidConfig, "unhandled llm kind");
}

RetrievedContext retrieve_context(const std::string& nl_spec, const std::string& model_name,
                                  RetrieverId retriever, int k, const KnowledgeBase& kb,
                                  const RetrieverContext& ctx, const PathBudget& budget) {
  const std::vector<Chunk>& model_chunks = kb.chunks_for(model_name);
  if (retriever == RetrieverId::None || k <= 0) {
    return {};
  }

  RetrievedContext result;
  if (!is_pathocl(retriever)) {
    Scorer scorer = Scorer::Bm25;
    if (retriever == RetrieverId::Dense) scorer = Scorer::Dense;
    if (retriever == RetrieverId::Sparse) scorer = Scorer::Sparse;
    result.chunks = retrieve_top_k(RetrievalQuery{nl_spec, model_name, k}, kb, scorer, ctx);
    for (const ScoredChunk& sc : result.chunks) {
      if (!result.context_text.empty()) result.context_text.push_back('\n');
      result.context_text.append(sc.chunk.text);
    }
    return result;
  }

  const ModelGraph graph = build_graph(model_chunks);
  const PathEnumeration enumeration = enumerate_simple_paths(graph, budget);
  const std::set<std::string> elements = extract_elements(nl_spec, graph);
  const PathMeasure measure =
      retriever == RetrieverId::PathoclJaccard ? PathMeasure::Jaccard : PathMeasure::Cosine;
  const std::vector<PathCandidate> candidates =
      rank_paths(enumeration.paths, elements, measure, k, ctx.dense);

  // Expand candidates to chunks one path at a time so every context chunk
  // carries its path's score; the emission order matches paths_to_context.
  std::set<std::pair<std::string, int>> emitted;
  int rank = 0;
  for (const PathCandidate& candidate : candidates) {
    for (const Chunk& chunk : path_context_chunks({candidate}, model_chunks)) {
      if (!emitted.insert({chunk.model_name, chunk.index}).second) continue;
      result.chunks.push_back(ScoredChunk{chunk, candidate.score, ++rank});
      if (!result.context_text.empty()) result.context_text.push_back(' ');
      result.context_text.append(chunk.text);
    }
  }
  return result;
}

namespace {

std::map<std::string, CheckpointEntry> load_checkpoint(const std::filesystem::path& path,
                                                       const std::string& digest) {
  std::map<std::string, CheckpointEntry> entries;
  std::ifstream in(path);
  if (!in) return entries;
  std::string line;
  if (!std::getline(in, line)) return entries;
  json header = json::parse(line, nullptr, false);
  if (header.is_discarded() || !header.is_object() || !header.contains("config_digest")) {
    raise(ErrorCode::CorruptKbFile, "checkpoint file has no header: " + path.string());
  }
  if (header["config_digest"].get<std::string>() != digest) {
    raise(ErrorCode::InvalidConfig,
          "checkpoint at '" + path.string() + "' was written by a different configuration; "
          "remove it or change the output directory");
  }
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json obj = json::parse(line, nullptr, false);
    if (obj.is_discarded() || !obj.is_object()) continue;  // torn tail write
    if (!obj.contains("retriever") || !obj.contains("k") || !obj.contains("sample") ||
        !obj.contains("cs") || !obj.contains("ed")) {
      continue;
    }
    CheckpointEntry entry;
    entry.output_ocl = obj.value("ocl", "");
    entry.cosine_sim = obj["cs"].get<double>();
    entry.euclid_dist = obj["ed"].get<double>();
    entry.latency_ms = obj.value("latency_ms", std::int64_t{0});
    entry.truncated = obj.value("truncated", false);
    entries[checkpoint_key(retriever_from_string(obj["retriever"].get<std::string>()),
                           obj["k"].get<int>(), obj["sample"].get<std::string>())] = entry;
  }
  return entries;
}

}  // namespace

SweepResult run_sweep(const ExperimentConfig& config) {
  validate_config(config);
  if (config.dataset_path.empty()) {
    raise(ErrorCode::InvalidConfig, "a sweep needs a dataset path");
  }

  const std::vector<DatasetRecord> all_records = parse_dataset(config.dataset_path);

  KnowledgeBase kb;
  if (!config.kb_path.empty() && std::filesystem::exists(config.kb_path)) {
    kb = load_kb(config.kb_path);
  } else {
    kb = build_kb(all_records, config.dataset_path);
    if (!config.kb_path.empty()) persist_kb(kb, config.kb_path);
  }

  std::vector<DatasetRecord> filtered;
  switch (config.filter.mode) {
    case FilterSpec::Mode::None:
      filtered = all_records;
      break;
    case FilterSpec::Mode::Above:
      filtered = filter_by_chunk_count(all_records, kb, config.filter.threshold, CountFilter::Above);
      break;
    case FilterSpec::Mode::Below:
      filtered = filter_by_chunk_count(all_records, kb, config.filter.threshold, CountFilter::Below);
      break;
  }
  if (filtered.empty()) {
    raise(ErrorCode::EmptyRecordSet, "the chunk-count filter removed every record");
  }

  // Small fixture datasets cannot fill the default draw of 72; clamp.
  const std::size_t n = std::min(config.sample_n, filtered.size());
  const std::vector<DatasetRecord> samples = sample_records(filtered, n, config.seed);

  SweepResult result;
  result.meta.seed = config.seed;
  result.meta.config_digest = config_digest(config);
  result.meta.started_at = internal::utc_now_iso8601();
  for (const DatasetRecord& r : samples) result.meta.sample_ids.push_back(r.sample_id);

  // Cell grid: the shared baseline first (when requested), then every
  // retriever with its k values in ascending order.
  std::vector<CellKey> cells;
  if (std::find(config.k_values.begin(), config.k_values.end(), 0) != config.k_values.end()) {
    cells.push_back(CellKey{RetrieverId::None, 0});
  }
  for (RetrieverId retriever : config.retrievers) {
    std::vector<int> ks = is_pathocl(retriever) ? config.pathocl_k_values : config.k_values;
    std::sort(ks.begin(), ks.end());
    for (int k : ks) {
      if (k == 0) continue;
      cells.push_back(CellKey{retriever, k});
    }
  }

  std::filesystem::create_directories(config.out_dir);
  const std::filesystem::path checkpoint_path =
      std::filesystem::path(config.out_dir) / "checkpoint.jsonl";
  std::map<std::string, CheckpointEntry> done =
      load_checkpoint(checkpoint_path, result.meta.config_digest);

  std::error_code size_ec;
  const bool fresh_checkpoint = !std::filesystem::exists(checkpoint_path) ||
                                std::filesystem::file_size(checkpoint_path, size_ec) == 0;
  std::ofstream checkpoint;
  if (fresh_checkpoint) {
    checkpoint.open(checkpoint_path, std::ios::trunc);
    checkpoint << json{{"config_digest", result.meta.config_digest}, {"seed", config.seed}}.dump()
               << std::endl;
  } else {
    checkpoint.open(checkpoint_path, std::ios::app);
  }
  if (!checkpoint) {
    raise(ErrorCode::IoFailure, "cannot write checkpoint to '" + checkpoint_path.string() + "'");
  }

  const std::shared_ptr<DenseProvider> dense = make_dense_provider(config.dense_provider);
  const std::unique_ptr<SparseEncoderProvider> sparse = make_sparse_provider(config.sparse_provider);
  const std::shared_ptr<DenseProvider> eval_provider = make_dense_provider(config.eval_provider);
  const std::unique_ptr<LlmClient> llm = make_llm_client(config.llm);
  RetrieverContext ctx;
  ctx.bm25 = config.bm25;
  ctx.dense = dense.get();
  ctx.sparse = sparse.get();

  std::mutex checkpoint_mutex;
  for (const CellKey& cell : cells) {
    std::vector<EvalRecord> cell_records(samples.size());
    parallel_for(samples.size(), config.concurrency, [&](std::size_t i) {
      const DatasetRecord& sample = samples[i];
      const std::string key = checkpoint_key(cell.retriever, cell.k, sample.sample_id);
      EvalRecord record;
      record.sample_id = sample.sample_id;
      record.retriever_id = cell.retriever;
      record.k = cell.k;
      if (auto it = done.find(key); it != done.end()) {
        record.cosine_sim = it->second.cosine_sim;
        record.euclid_dist = it->second.euclid_dist;
        cell_records[i] = std::move(record);
        return;
      }
      try {
        const RetrievedContext retrieved = retrieve_context(
            sample.nl_spec, sample.model_name, cell.retriever, cell.k, kb, ctx, config.path_budget);
        const PromptSpec prompt = build_prompt(retrieved.context_text, sample.nl_spec);
        GenerationRecord generation = generate_ocl(prompt, *llm, config.generation);
        generation.sample_id = sample.sample_id;
        generation.retriever_id = cell.retriever;
        generation.k = cell.k;
        const auto [cs, ed] = score_pair(generation.output_ocl, sample.ocl_rule, *eval_provider);
        record.cosine_sim = cs;
        record.euclid_dist = ed;

        std::lock_guard<std::mutex> lock(checkpoint_mutex);
        checkpoint << json{{"retriever", std::string(to_string(cell.retriever))},
                           {"k", cell.k},
                           {"sample", sample.sample_id},
                           {"ocl", generation.output_ocl},
                           {"cs", cs},
                           {"ed", ed},
                           {"latency_ms", generation.latency_ms},
                           {"truncated", generation.truncated}}
                          .dump()
                   << std::endl;
      } catch (const Error& e) {
        throw Error(e.code(), "retriever=" + std::string(to_string(cell.retriever)) +
                                  " k=" + std::to_string(cell.k) + " sample=" + sample.sample_id +
                                  ": " + e.what());
      }
      cell_records[i] = std::move(record);
    });

    result.cells.emplace(cell, aggregate_stats(cell_records, config.trim_policy));
    result.records.insert(result.records.end(), cell_records.begin(), cell_records.end());
  }

  result.meta.finished_at = internal::utc_now_iso8601();
  save_eval_records(result.records, std::filesystem::path(config.out_dir) / "records.jsonl");

  json meta = {{"seed", result.meta.seed},
               {"config_digest", result.meta.config_digest},
               {"started_at", result.meta.started_at},
               {"finished_at", result.meta.finished_at},
               {"sample_ids", result.meta.sample_ids}};
  std::ofstream meta_out(std::filesystem::path(config.out_dir) / "sweep_meta.json");
  meta_out << meta.dump(2) << '\n';
  return result;
}

SweepResult result_from_records(std::vector<EvalRecord> records, TrimPolicy policy) {
  if (records.empty()) {
    raise(ErrorCode::EmptyRecordSet, "no records to aggregate");
  }
  SweepResult result;
  std::map<CellKey, std::vector<EvalRecord>> groups;
  for (EvalRecord& r : records) {
    groups[CellKey{r.retriever_id, r.k}].push_back(r);
  }
  for (const auto& [key, group] : groups) {
    result.cells.emplace(key, aggregate_stats(group, policy));
    result.records.insert(result.records.end(), group.begin(), group.end());
  }
  for (const EvalRecord& r : groups.begin()->second) {
    result.meta.sample_ids.push_back(r.sample_id);
  }
  return result;
}

namespace {

struct MetricRow {
  const char* label;
  double AggregateStats::* field;
  bool higher_is_better;
};

constexpr MetricRow kMetricRows[] = {
    {"Mean CS", &AggregateStats::mean_cs, true},
    {"Variance CS", &AggregateStats::var_cs, false},
    {"Trimmed Mean CS", &AggregateStats::trimmed_mean_cs, true},
    {"Mean ED", &AggregateStats::mean_ed, false},
    {"Variance ED", &AggregateStats::var_ed, false},
    {"Trimmed Mean ED", &AggregateStats::trimmed_mean_ed, false},
};

const char* kCsvMetricNames[] = {"mean_cs", "var_cs", "trimmed_mean_cs",
                                 "mean_ed", "var_ed", "trimmed_mean_ed"};

std::vector<RetrieverId> table_retrievers(const SweepResult& result) {
  std::vector<RetrieverId> retrievers;
  for (const auto& [key, _] : result.cells) {
    if (key.retriever == RetrieverId::None) continue;
    if (std::find(retrievers.begin(), retrievers.end(), key.retriever) == retrievers.end()) {
      retrievers.push_back(key.retriever);
    }
  }
  if (retrievers.empty() && !result.cells.empty()) {
    retrievers.push_back(RetrieverId::None);
  }
  return retrievers;
}

}  // namespace

std::string render_report(const SweepResult& result, ReportFormat format) {
  if (result.cells.empty()) {
    raise(ErrorCode::EmptyRecordSet, "nothing to report");
  }

  if (format == ReportFormat::Csv) {
    std::string out = "retriever,k,metric,value\n";
    for (const auto& [key, stats] : result.cells) {
      for (std::size_t m = 0; m < std::size(kMetricRows); ++m) {
        out += std::string(to_string(key.retriever)) + ',' + std::to_string(key.k) + ',' +
               kCsvMetricNames[m] + ',' + fmt4(stats.*(kMetricRows[m].field)) + '\n';
      }
    }
    return out;
  }

  const AggregateStats* baseline = nullptr;
  if (auto it = result.cells.find(CellKey{RetrieverId::None, 0}); it != result.cells.end()) {
    baseline = &it->second;
  }

  std::ostringstream out;
  out << "sweep report\n";
  // Archives re-aggregated without their sweep metadata have no seed to show.
  if (!result.meta.config_digest.empty()) {
    out << "seed: " << result.meta.seed << '\n';
    out << "config: " << result.meta.config_digest << '\n';
  }
  out << "samples per cell: "
      << (result.cells.begin()->second.n) << "\n";

  for (RetrieverId retriever : table_retrievers(result)) {
    std::vector<std::pair<int, const AggregateStats*>> columns;
    for (const auto& [key, stats] : result.cells) {
      if (key.retriever == retriever) columns.emplace_back(key.k, &stats);
    }

    out << "\nretriever: " << to_string(retriever) << '\n';

    std::vector<std::vector<std::string>> grid;
    std::vector<std::string> header{"Metric"};
    for (const auto& [k, _] : columns) header.push_back("k = " + std::to_string(k));
    if (baseline != nullptr && retriever != RetrieverId::None) {
      header.push_back("k = 0 (baseline)");
    }
    grid.push_back(std::move(header));

    for (const MetricRow& row : kMetricRows) {
      std::vector<std::string> cells{row.label};
      // Star the best value across the retriever's own columns.
      std::size_t best = columns.size();
      for (std::size_t c = 0; c < columns.size(); ++c) {
        const double value = columns[c].second->*(row.field);
        if (best == columns.size()) {
          best = c;
          continue;
        }
        const double best_value = columns[best].second->*(row.field);
        if (row.higher_is_better ? value > best_value : value < best_value) best = c;
      }
      for (std::size_t c = 0; c < columns.size(); ++c) {
        std::string cell = fmt4(columns[c].second->*(row.field));
        if (c == best && columns.size() > 1) cell += '*';
        cells.push_back(std::move(cell));
      }
      if (baseline != nullptr && retriever != RetrieverId::None) {
        cells.push_back(fmt4(baseline->*(row.field)));
      }
      grid.push_back(std::move(cells));
    }

    std::vector<std::size_t> widths(grid.front().size(), 0);
    for (const auto& row : grid) {
      for (std::size_t c = 0; c < row.size(); ++c) widths[c] = std::max(widths[c], row[c].size());
    }
    for (const auto& row : grid) {
      for (std::size_t c = 0; c < row.size(); ++c) {
        out << row[c];
        if (c + 1 < row.size()) {
          out << std::string(widths[c] - row[c].size() + 2, ' ');
        }
      }
      out << '\n';
    }
  }
  return out.str();
}

std::string export_boxplot_data(const SweepResult& result) {
  std::string out = "retriever,metric,k,invert_axis,sample,value\n";
  for (const auto& [key, _] : result.cells) {
    for (const char* metric : {"cs", "ed"}) {
      for (const EvalRecord& r : result.records) {
        if (r.retriever_id != key.retriever || r.k != key.k) continue;
        const bool ed = metric[0] == 'e';
        out += std::string(to_string(key.retriever)) + ',' + metric + ',' +
               std::to_string(key.k) + ',' + (ed ? "true" : "false") + ',' + r.sample_id + ',' +
               fmt_full(ed ? r.euclid_dist : r.cosine_sim) + '\n';
      }
    }
  }
  return out;
}

}  // namespace oclrag
