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

#include "oclrag/evaluation.hpp"

#include <algorithm>
#include <fstream>

#include <json.hpp>

namespace oclrag {

namespace {

using nlohmann::json;

// Welford's running mean/variance over sorted copies: bit-identical under
// any permutation of the records, and exactly constant-preserving (a list
// of identical values gives that value and variance 0, no residue).
double mean_of(const std::vector<double>& sorted) {
  double mean = 0.0;
  std::size_t count = 0;
  for (double v : sorted) {
    ++count;
    mean += (v - mean) / static_cast<double>(count);
  }
  return mean;
}

double population_variance(const std::vector<double>& sorted) {
  double mean = 0.0;
  double m2 = 0.0;
  std::size_t count = 0;
  for (double v : sorted) {
    ++count;
    const double delta = v - mean;
    mean += delta / static_cast<double>(count);
    m2 += delta * (v - mean);
  }
  return m2 / static_cast<double>(count);
}

}  // namespace

std::pair<double, double> score_pair(const std::string& generated, const std::string& reference,
                                     DenseProvider& provider) {
  if (generated.empty() || reference.empty()) {
    raise(ErrorCode::EmptyText, "score_pair needs two non-empty texts");
  }
  const std::vector<DenseVector> vectors = embed_dense(provider, {generated, reference});
  return {cosine_similarity(vectors[0], vectors[1]),
          euclidean_distance(vectors[0], vectors[1])};
}

AggregateStats aggregate_stats(const std::vector<EvalRecord>& records, TrimPolicy policy) {
  if (records.empty()) {
    raise(ErrorCode::EmptyRecordSet, "aggregate_stats needs at least one record");
  }
  for (const EvalRecord& r : records) {
    if (r.retriever_id != records.front().retriever_id || r.k != records.front().k) {
      raise(ErrorCode::InvalidArgument, "aggregate_stats needs a homogeneous (retriever, k) set");
    }
  }

  const std::size_t n = records.size();
  std::vector<std::pair<double, double>> pairs(n);  // (cs, ed)
  for (std::size_t i = 0; i < n; ++i) {
    pairs[i] = {records[i].cosine_sim, records[i].euclid_dist};
  }
  std::sort(pairs.begin(), pairs.end());  // worst cosine first

  std::vector<double> cs(n);
  std::vector<double> ed(n);
  for (std::size_t i = 0; i < n; ++i) cs[i] = pairs[i].first;
  for (std::size_t i = 0; i < n; ++i) ed[i] = pairs[i].second;
  std::sort(ed.begin(), ed.end());

  AggregateStats stats;
  stats.n = n;
  stats.trim_count = n / 10;  // floor(0.10 * n)
  stats.mean_cs = mean_of(cs);
  stats.var_cs = population_variance(cs);
  stats.mean_ed = mean_of(ed);
  stats.var_ed = population_variance(ed);

  const auto drop = static_cast<std::ptrdiff_t>(stats.trim_count);
  stats.trimmed_mean_cs = mean_of({cs.begin() + drop, cs.end()});
  if (policy == TrimPolicy::CosineBased) {
    // Drop the distances paired with the worst cosine scores.
    std::vector<double> kept;
    kept.reserve(n - stats.trim_count);
    for (std::size_t i = stats.trim_count; i < n; ++i) kept.push_back(pairs[i].second);
    std::sort(kept.begin(), kept.end());
    stats.trimmed_mean_ed = mean_of(kept);
  } else {
    // Worst distances are the highest ones.
    stats.trimmed_mean_ed = mean_of({ed.begin(), ed.end() - drop});
  }
  return stats;
}

void save_eval_records(const std::vector<EvalRecord>& records,
                       const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) {
    raise(ErrorCode::IoFailure, "cannot write eval records to '" + path.string() + "'");
  }
  for (const EvalRecord& r : records) {
    json obj = {{"sample", r.sample_id},
                {"retriever", std::string(to_string(r.retriever_id))},
                {"k", r.k},
                {"cs", r.cosine_sim},
                {"ed", r.euclid_dist}};
    out << obj.dump() << '\n';
  }
  if (!out.good()) {
    raise(ErrorCode::IoFailure, "write failed for '" + path.string() + "'");
  }
}

std::vector<EvalRecord> load_eval_records(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    raise(ErrorCode::IoFailure, "cannot open eval records file '" + path.string() + "'");
  }
  std::vector<EvalRecord> records;
  std::string line;
  std::size_t line_no = 0;
  for (; std::getline(in, line); ++line_no) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json obj = json::parse(line, nullptr, false);
    if (obj.is_discarded() || !obj.is_object() || !obj.contains("sample") ||
        !obj.contains("retriever") || !obj.contains("k") || !obj.contains("cs") ||
        !obj.contains("ed")) {
      raise(ErrorCode::MalformedRecord, "bad eval record at line " + std::to_string(line_no));
    }
    EvalRecord r;
    r.sample_id = obj["sample"].get<std::string>();
    r.retriever_id = retriever_from_string(obj["retriever"].get<std::string>());
    r.k = obj["k"].get<int>();
    r.cosine_sim = obj["cs"].get<double>();
    r.euclid_dist = obj["ed"].get<double>();
    records.push_back(std::move(r));
  }
  return records;
}

}  // namespace oclrag
