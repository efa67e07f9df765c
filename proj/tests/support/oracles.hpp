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

// Straight-line reference implementations, written independently of the
// library code they check. Keep them naive on purpose.

#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace oclrag::testing {

// Okapi BM25 with the "+1 inside ln" idf, one literal formula evaluation
// per (document, term) pair. Documents arrive pre-tokenized.
inline std::vector<double> oracle_bm25(const std::vector<std::string>& query_tokens,
                                       const std::vector<std::vector<std::string>>& docs,
                                       double k1, double b) {
  const double n = static_cast<double>(docs.size());
  double total_len = 0.0;
  for (const auto& doc : docs) total_len += static_cast<double>(doc.size());
  const double avgdl = total_len / n;

  std::set<std::string> distinct(query_tokens.begin(), query_tokens.end());

  std::vector<double> scores(docs.size(), 0.0);
  for (std::size_t d = 0; d < docs.size(); ++d) {
    for (const std::string& term : distinct) {
      double tf = 0.0;
      for (const std::string& tok : docs[d]) {
        if (tok == term) tf += 1.0;
      }
      if (tf == 0.0) continue;
      double df = 0.0;
      for (const auto& doc : docs) {
        if (std::find(doc.begin(), doc.end(), term) != doc.end()) df += 1.0;
      }
      const double idf = std::log((n - df + 0.5) / (df + 0.5) + 1.0);
      const double dl = static_cast<double>(docs[d].size());
      const double denom = tf + k1 * (1.0 - b + b * (avgdl > 0.0 ? dl / avgdl : 0.0));
      scores[d] += idf * (tf * (k1 + 1.0)) / denom;
    }
  }
  return scores;
}

// Every simple path (no repeated node) of length <= max_len in a directed
// graph given as an adjacency map, single nodes included.
inline std::set<std::vector<std::string>> oracle_simple_paths(
    const std::map<std::string, std::set<std::string>>& adjacency,
    const std::set<std::string>& nodes, int max_len) {
  std::set<std::vector<std::string>> paths;
  std::vector<std::string> current;

  const std::function<void(const std::string&)> extend = [&](const std::string& node) {
    current.push_back(node);
    paths.insert(current);
    if (static_cast<int>(current.size()) < max_len) {
      if (auto it = adjacency.find(node); it != adjacency.end()) {
        for (const std::string& next : it->second) {
          if (std::find(current.begin(), current.end(), next) == current.end()) extend(next);
        }
      }
    }
    current.pop_back();
  };

  for (const std::string& start : nodes) extend(start);
  return paths;
}

struct OracleStats {
  double mean_cs, var_cs, trimmed_cs, mean_ed, var_ed, trimmed_ed;
};

// Mean, population variance and trimmed means, recomputed from scratch with
// the textbook formulas. Trims floor(n/10) of the worst records per metric.
inline OracleStats oracle_stats(std::vector<double> cs, std::vector<double> ed) {
  const std::size_t n = cs.size();
  auto mean = [](const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
  };
  auto variance = [&](const std::vector<double>& v) {
    const double m = mean(v);
    double s = 0.0;
    for (double x : v) s += (x - m) * (x - m);
    return s / static_cast<double>(v.size());
  };

  OracleStats stats{};
  stats.mean_cs = mean(cs);
  stats.var_cs = variance(cs);
  stats.mean_ed = mean(ed);
  stats.var_ed = variance(ed);

  const std::size_t drop = n / 10;
  std::sort(cs.begin(), cs.end());                     // worst cosine = lowest
  std::sort(ed.begin(), ed.end(), std::greater<>());   // worst distance = highest
  const std::vector<double> kept_cs(cs.begin() + static_cast<std::ptrdiff_t>(drop), cs.end());
  const std::vector<double> kept_ed(ed.begin() + static_cast<std::ptrdiff_t>(drop), ed.end());
  stats.trimmed_cs = mean(kept_cs);
  stats.trimmed_ed = mean(kept_ed);
  return stats;
}

}  // namespace oclrag::testing
