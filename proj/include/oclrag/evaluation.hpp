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

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "oclrag/retrieval.hpp"
#include "oclrag/vectorizers.hpp"

namespace oclrag {

/// Per-sample scores of one generated constraint against its reference,
/// both metrics from the same embedding pair.
struct EvalRecord {
  std::string sample_id;
  RetrieverId retriever_id = RetrieverId::None;
  int k = 0;
  double cosine_sim = 0.0;
  double euclid_dist = 0.0;

  friend bool operator==(const EvalRecord&, const EvalRecord&) = default;
};

/// Which records count as "worst" for the trimmed means: each metric trims
/// its own tail, or the cosine-worst set trims both.
enum class TrimPolicy { PerMetric, CosineBased };

struct AggregateStats {
  double mean_cs = 0.0;
  double var_cs = 0.0;
  double trimmed_mean_cs = 0.0;
  double mean_ed = 0.0;
  double var_ed = 0.0;
  double trimmed_mean_ed = 0.0;
  std::size_t n = 0;
  std::size_t trim_count = 0;  // floor(0.10 * n)

  friend bool operator==(const AggregateStats&, const AggregateStats&) = default;
};

/// Embeds both texts with the evaluation provider and returns
/// (cosine similarity, Euclidean distance). Throws EmptyText on empty input.
std::pair<double, double> score_pair(const std::string& generated, const std::string& reference,
                                     DenseProvider& provider);

/// Mean, population variance and trimmed mean per metric. The trimmed mean
/// discards the floor(0.10 * n) worst records: lowest cosine for CS,
/// highest distance for ED (or the cosine-worst set for both under
/// TrimPolicy::CosineBased). Values are unrounded; rounding is left to
/// report rendering.
AggregateStats aggregate_stats(const std::vector<EvalRecord>& records,
                               TrimPolicy policy = TrimPolicy::PerMetric);

/// Line-delimited persistence ({sample, retriever, k, cs, ed}) so sweeps
/// can be re-aggregated without re-running generation.
void save_eval_records(const std::vector<EvalRecord>& records,
                       const std::filesystem::path& path);
std::vector<EvalRecord> load_eval_records(const std::filesystem::path& path);

}  // namespace oclrag
