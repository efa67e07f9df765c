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

#include <doctest.h>
#include <httplib.h>
#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <fstream>
#include <set>
#include <sstream>
#include <thread>

#include "oclrag/harness.hpp"
#include "support/fixtures.hpp"

using namespace oclrag;
using nlohmann::json;
using oclrag::testing::TempDir;

namespace {

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

ExperimentConfig fixture_config(const TempDir& dir, const std::filesystem::path& dataset) {
  ExperimentConfig config;
  config.dataset_path = dataset.string();
  config.out_dir = dir.file("out").string();
  config.filter.mode = FilterSpec::Mode::None;
  config.llm.kind = LlmSpec::Kind::EchoMock;
  config.dense_provider.dim = 64;
  config.eval_provider.dim = 64;
  return config;
}

}  // namespace

TEST_SUITE_BEGIN("harness");

TEST_CASE("config JSON round-trips and validates") {
  ExperimentConfig config;
  config.dataset_path = "data.jsonl";
  config.retrievers = {RetrieverId::Sparse, RetrieverId::Bm25};
  config.k_values = {0, 10};
  config.seed = 99;
  config.llm.kind = LlmSpec::Kind::CannedMock;
  config.llm.canned = {{"spec", "out"}};

  const ExperimentConfig parsed = config_from_json_text(config_to_json_text(config));
  CHECK(config_to_json_text(parsed) == config_to_json_text(config));
  CHECK(config_digest(parsed) == config_digest(config));
  validate_config(parsed);

  ExperimentConfig changed = config;
  changed.seed = 100;
  CHECK(config_digest(changed) != config_digest(config));
}

TEST_CASE("config validation rejects bad grids") {
  ExperimentConfig config;

  SUBCASE("no k values") {
    config.k_values.clear();
    CHECK_THROWS_AS(validate_config(config), Error);
  }
  SUBCASE("negative k") {
    config.k_values = {-1};
    CHECK_THROWS_AS(validate_config(config), Error);
  }
  SUBCASE("path retrievers demand the strictly-below filter") {
    config.retrievers = {RetrieverId::PathoclJaccard};
    config.filter.mode = FilterSpec::Mode::Above;
    CHECK_THROWS_AS(validate_config(config), Error);
    config.filter.mode = FilterSpec::Mode::Below;
    config.filter.threshold = 100;
    validate_config(config);  // now fine
  }
  SUBCASE("the baseline is not a retriever choice") {
    config.retrievers = {RetrieverId::None};
    CHECK_THROWS_AS(validate_config(config), Error);
  }
  SUBCASE("remote endpoints must parse") {
    config.llm.kind = LlmSpec::Kind::Remote;
    config.llm.endpoint = "nope";
    CHECK_THROWS_AS(validate_config(config), Error);
  }
}

TEST_CASE("retrieve_context joins chunk retrievers with newlines") {
  const KnowledgeBase kb = build_kb(testing::fixture_records());
  RetrieverContext ctx;
  const RetrievedContext retrieved =
      retrieve_context("book title", "library", RetrieverId::Bm25, 2, kb, ctx, {});
  REQUIRE(retrieved.chunks.size() == 2);
  CHECK(retrieved.context_text ==
        retrieved.chunks[0].chunk.text + "\n" + retrieved.chunks[1].chunk.text);

  const RetrievedContext baseline =
      retrieve_context("book title", "library", RetrieverId::None, 0, kb, ctx, {});
  CHECK(baseline.chunks.empty());
  CHECK(baseline.context_text.empty());
}

TEST_CASE("retrieve_context serializes ranked paths for pathocl retrievers") {
  const KnowledgeBase kb = build_kb(testing::fixture_records());
  RetrieverContext ctx;
  const RetrievedContext retrieved =
      retrieve_context("a keeper cleans cages", "zoo", RetrieverId::PathoclJaccard, 1, kb, ctx,
                       PathBudget{6, 1000});
  CHECK_FALSE(retrieved.chunks.empty());
  CHECK_FALSE(retrieved.context_text.empty());
  // the top path touches Keeper and Cage, so their class chunks are present
  CHECK(retrieved.context_text.find("class Keeper") != std::string::npos);
  CHECK(retrieved.context_text.find("class Cage") != std::string::npos);
}

TEST_CASE("a minimal sweep produces one baseline cell") {
  TempDir dir("sweep-min");
  const auto dataset = write_dataset_file(dir, testing::fixture_records());
  ExperimentConfig config = fixture_config(dir, dataset);
  config.retrievers = {RetrieverId::Bm25};
  config.k_values = {0};

  const SweepResult result = run_sweep(config);
  CHECK(result.cells.size() == 1);
  REQUIRE(result.cells.contains(CellKey{RetrieverId::None, 0}));
  CHECK(result.cells.at(CellKey{RetrieverId::None, 0}).n == 5);
  CHECK(result.records.size() == 5);
  CHECK(std::filesystem::exists(dir.file("out") / "records.jsonl"));
  CHECK(std::filesystem::exists(dir.file("out") / "checkpoint.jsonl"));
}

TEST_CASE("the default grid over the fixture dataset shares one sample draw") {
  TempDir dir("sweep-grid");
  const auto dataset = write_dataset_file(dir, testing::fixture_records());
  ExperimentConfig config = fixture_config(dir, dataset);
  // default retrievers {bm25, dense, sparse} and k {0,10,20,30,40,50}

  const SweepResult result = run_sweep(config);
  // one baseline cell + five k cells per retriever
  CHECK(result.cells.size() == 1 + 3 * 5);

  std::map<CellKey, std::set<std::string>> ids_by_cell;
  for (const EvalRecord& r : result.records) {
    ids_by_cell[CellKey{r.retriever_id, r.k}].insert(r.sample_id);
  }
  CHECK(ids_by_cell.size() == result.cells.size());
  const auto& first_ids = ids_by_cell.begin()->second;
  for (const auto& [key, ids] : ids_by_cell) {
    CHECK(ids == first_ids);
    CHECK(ids.size() == 5);
  }
}

TEST_CASE("two identical sweeps render byte-identical reports") {
  TempDir dir("sweep-deterministic");
  const auto dataset = write_dataset_file(dir, testing::fixture_records());

  ExperimentConfig config1 = fixture_config(dir, dataset);
  config1.k_values = {0, 10};
  config1.out_dir = dir.file("out1").string();
  ExperimentConfig config2 = config1;
  config2.out_dir = dir.file("out2").string();

  const SweepResult r1 = run_sweep(config1);
  const SweepResult r2 = run_sweep(config2);
  CHECK(render_report(r1, ReportFormat::TableText) == render_report(r2, ReportFormat::TableText));
  CHECK(render_report(r1, ReportFormat::Csv) == render_report(r2, ReportFormat::Csv));
  CHECK(slurp(dir.file("out1") / "records.jsonl") == slurp(dir.file("out2") / "records.jsonl"));
}

namespace {

// Completion server that can be told to fail after a number of requests.
class FlakyLlmServer {
 public:
  FlakyLlmServer() {
    server_.Post("/complete", [this](const httplib::Request& req, httplib::Response& res) {
      const int count = ++requests_;
      if (fail_after_ >= 0 && count > fail_after_) {
        res.status = 500;
        res.set_content("{}", "application/json");
        return;
      }
      const json body = json::parse(req.body);
      const std::string text =
          "inv: h" + std::to_string(fnv1a64(body["prompt"].get<std::string>()) % 100000);
      res.set_content(json{{"text", text}, {"truncated", false}}.dump(), "application/json");
    });
    port_ = server_.bind_to_any_port("127.0.0.1");
    worker_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~FlakyLlmServer() {
    server_.stop();
    worker_.join();
  }
  int port() const { return port_; }
  void fail_after(int n) { fail_after_ = n; }
  void heal() { fail_after_ = -1; }
  int requests() const { return requests_; }

 private:
  httplib::Server server_;
  std::thread worker_;
  std::atomic<int> requests_{0};
  std::atomic<int> fail_after_{-1};
  int port_ = 0;
};

}  // namespace

TEST_CASE("an interrupted sweep resumes from the checkpoint without repeat calls") {
  TempDir dir("sweep-resume");
  const auto dataset = write_dataset_file(dir, testing::fixture_records());
  FlakyLlmServer llm;

  ExperimentConfig config = fixture_config(dir, dataset);
  config.retrievers = {RetrieverId::Bm25};
  config.k_values = {0, 10};  // 2 cells x 5 samples = 10 calls
  config.llm.kind = LlmSpec::Kind::Remote;
  config.llm.endpoint = "http://127.0.0.1:" + std::to_string(llm.port()) + "/complete";
  config.llm.timeout_ms = 5000;

  // Reference run, uninterrupted.
  ExperimentConfig reference = config;
  reference.out_dir = dir.file("ref").string();
  const SweepResult expected = run_sweep(reference);
  CHECK(llm.requests() == 10);

  // Interrupted run: the 8th call and beyond fail.
  llm.fail_after(llm.requests() + 7);
  try {
    run_sweep(config);
    FAIL("expected the sweep to abort");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ClientUnavailable);
    CHECK(std::string(e.what()).find("retriever=") != std::string::npos);
    CHECK(std::string(e.what()).find("sample=") != std::string::npos);
  }
  CHECK(std::filesystem::exists(dir.file("out") / "checkpoint.jsonl"));

  // Resume against a healthy server: only the missing calls go out.
  llm.heal();
  const int before = llm.requests();
  const SweepResult resumed = run_sweep(config);
  CHECK(llm.requests() - before == 3);
  CHECK(resumed.records == expected.records);
  CHECK(render_report(resumed, ReportFormat::TableText) ==
        render_report(expected, ReportFormat::TableText));
}

TEST_CASE("worker count does not change sweep results") {
  TempDir dir("sweep-conc");
  const auto dataset = write_dataset_file(dir, testing::fixture_records());

  ExperimentConfig serial = fixture_config(dir, dataset);
  serial.k_values = {0, 10};
  serial.out_dir = dir.file("serial").string();
  serial.concurrency = 1;
  ExperimentConfig parallel = serial;
  parallel.out_dir = dir.file("parallel").string();
  parallel.concurrency = 4;

  const SweepResult a = run_sweep(serial);
  const SweepResult b = run_sweep(parallel);
  CHECK(a.records == b.records);
  CHECK(a.cells == b.cells);
}

TEST_CASE("a checkpoint from a different config is refused") {
  TempDir dir("sweep-mixed");
  const auto dataset = write_dataset_file(dir, testing::fixture_records());
  ExperimentConfig config = fixture_config(dir, dataset);
  config.retrievers = {RetrieverId::Bm25};
  config.k_values = {0};
  run_sweep(config);

  config.seed = config.seed + 1;
  try {
    run_sweep(config);
    FAIL("expected InvalidConfig");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::InvalidConfig);
  }
}

TEST_CASE("an unreachable LLM aborts with an annotated error, checkpoint intact") {
  TempDir dir("sweep-unreachable");
  const auto dataset = write_dataset_file(dir, testing::fixture_records());
  ExperimentConfig config = fixture_config(dir, dataset);
  config.retrievers = {RetrieverId::Bm25};
  config.k_values = {10};
  config.llm.kind = LlmSpec::Kind::Remote;
  config.llm.endpoint = "http://127.0.0.1:1/complete";
  config.llm.timeout_ms = 60000;

  try {
    run_sweep(config);
    FAIL("expected ClientUnavailable");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ClientUnavailable);
    CHECK(std::string(e.what()).find("retriever=bm25 k=10") != std::string::npos);
  }
  CHECK(std::filesystem::exists(dir.file("out") / "checkpoint.jsonl"));
}

TEST_CASE("pathocl retrievers run through the same sweep machinery") {
  TempDir dir("sweep-path");
  const auto dataset = write_dataset_file(dir, testing::fixture_records());
  ExperimentConfig config = fixture_config(dir, dataset);
  config.retrievers = {RetrieverId::PathoclJaccard, RetrieverId::PathoclCosine};
  config.k_values = {0};
  config.pathocl_k_values = {1, 3};
  config.filter.mode = FilterSpec::Mode::Below;
  config.filter.threshold = 100;

  const SweepResult result = run_sweep(config);
  CHECK(result.cells.size() == 1 + 2 * 2);
  CHECK(result.cells.contains(CellKey{RetrieverId::PathoclJaccard, 1}));
  CHECK(result.cells.contains(CellKey{RetrieverId::PathoclCosine, 3}));
}

TEST_CASE("sample ids and sweep metadata persist next to the records") {
  TempDir dir("sweep-meta");
  const auto dataset = write_dataset_file(dir, testing::fixture_records());
  ExperimentConfig config = fixture_config(dir, dataset);
  config.retrievers = {RetrieverId::Bm25};
  config.k_values = {0, 10};
  config.sample_n = 3;

  const SweepResult result = run_sweep(config);
  CHECK(result.meta.sample_ids.size() == 3);
  const json meta = json::parse(slurp(dir.file("out") / "sweep_meta.json"));
  CHECK(meta["seed"] == config.seed);
  CHECK(meta["sample_ids"].size() == 3);

  const auto loaded = load_eval_records(dir.file("out") / "records.jsonl");
  CHECK(loaded == result.records);
  const SweepResult rebuilt = result_from_records(loaded);
  CHECK(rebuilt.cells == result.cells);
}

TEST_CASE("report rendering rounds to four decimals and stars the best cells") {
  SweepResult result;
  result.meta.seed = 1;
  AggregateStats a{};
  a.n = 10;
  a.mean_cs = 0.93378;  // rounds to 0.9338
  a.var_cs = 0.001;
  a.trimmed_mean_cs = 0.94;
  a.mean_ed = 5.1;
  a.var_ed = 3.0;
  a.trimmed_mean_ed = 4.9;
  AggregateStats b = a;
  b.mean_cs = 0.91;
  b.mean_ed = 4.8;
  result.cells.emplace(CellKey{RetrieverId::Bm25, 10}, a);
  result.cells.emplace(CellKey{RetrieverId::Bm25, 20}, b);

  const std::string table = render_report(result, ReportFormat::TableText);
  CHECK(table.find("0.9338*") != std::string::npos);  // best CS starred
  CHECK(table.find("4.8000*") != std::string::npos);  // lowest ED starred
  CHECK(table.find("retriever: bm25") != std::string::npos);

  const std::string csv = render_report(result, ReportFormat::Csv);
  CHECK(csv.find("retriever,k,metric,value\n") == 0);
  CHECK(csv.find("bm25,10,mean_cs,0.9338\n") != std::string::npos);
  CHECK(csv.find("bm25,20,mean_ed,4.8000\n") != std::string::npos);

  // csv parses back into (retriever, k, metric, value) rows
  std::istringstream lines(csv);
  std::string line;
  std::getline(lines, line);
  int rows = 0;
  while (std::getline(lines, line)) {
    ++rows;
    CHECK(std::count(line.begin(), line.end(), ',') == 3);
  }
  CHECK(rows == 12);  // 2 cells x 6 metrics
}

TEST_CASE("boxplot export is lossless and headers an empty archive") {
  SweepResult empty;
  CHECK(export_boxplot_data(empty) == "retriever,metric,k,invert_axis,sample,value\n");

  SweepResult result;
  result.records = {
      {"s0", RetrieverId::Bm25, 10, 0.123456789012345678, 5.0682},
      {"s1", RetrieverId::Bm25, 10, 0.9, 4.0},
      {"s0", RetrieverId::Bm25, 20, 0.8, 3.5},
      {"s1", RetrieverId::Bm25, 20, 0.7, 3.25},
  };
  result.cells.emplace(CellKey{RetrieverId::Bm25, 10}, AggregateStats{});
  result.cells.emplace(CellKey{RetrieverId::Bm25, 20}, AggregateStats{});

  const std::string data = export_boxplot_data(result);
  std::istringstream lines(data);
  std::string line;
  std::getline(lines, line);  // header
  int cs_lines = 0;
  int ed_lines = 0;
  while (std::getline(lines, line)) {
    REQUIRE(std::count(line.begin(), line.end(), ',') == 5);
    const bool is_ed = line.find(",ed,") != std::string::npos;
    (is_ed ? ed_lines : cs_lines)++;
    if (is_ed) CHECK(line.find(",true,") != std::string::npos);

    // value parses back to the archived double exactly
    const std::string value_text = line.substr(line.rfind(',') + 1);
    const double value = std::stod(value_text);
    bool found = false;
    for (const EvalRecord& r : result.records) {
      if (value == (is_ed ? r.euclid_dist : r.cosine_sim)) found = true;
    }
    CHECK(found);
  }
  CHECK(cs_lines == 4);
  CHECK(ed_lines == 4);
}

TEST_SUITE_END();
