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

#include <string>
#include <string_view>
#include <vector>

#include "oclrag/corpus.hpp"
#include "oclrag/vectorizers.hpp"

namespace oclrag {

/// Which context source produced a generation. "None" is the no-retrieval
/// baseline and always pairs with k = 0.
enum class RetrieverId { Bm25, Dense, Sparse, PathoclJaccard, PathoclCosine, None };

constexpr std::string_view to_string(RetrieverId id) {
  switch (id) {
    case RetrieverId::Bm25: return "bm25";
    case RetrieverId::Dense: return "dense";
    case RetrieverId::Sparse: return "sparse";
    case RetrieverId::PathoclJaccard: return "pathocl-jaccard";
    case RetrieverId::PathoclCosine: return "pathocl-cosine";
    case RetrieverId::None: return "none";
  }
  return "none";
}

RetrieverId retriever_from_string(std::string_view s);

constexpr bool is_pathocl(RetrieverId id) {
  return id == RetrieverId::PathoclJaccard || id == RetrieverId::PathoclCosine;
}

struct RetrievalQuery {
  std::string nl_spec;
  std::string model_name;
  int k = 0;
};

struct BM25Params {
  double k1 = 1.5;
  double b = 0.75;
};

struct ScoredChunk {
  Chunk chunk;
  double score = 0.0;
  int rank = 0;  // 1-based

  friend bool operator==(const ScoredChunk&, const ScoredChunk&) = default;
};

/// Lowercases, splits on non-alphanumeric characters and at camelCase
/// boundaries ("ownedAttribute" -> "owned", "attribute"), drops empties.
std::vector<std::string> tokenize(std::string_view text);

struct ChunkScore {
  Chunk chunk;
  double score = 0.0;
};

/// Okapi BM25 over the given chunks with the non-negative "+1 inside ln"
/// idf: score(D) = sum over distinct query terms t of
///   idf(t) * tf(t,D) * (k1 + 1) / (tf(t,D) + k1 * (1 - b + b * dl/avgdl))
/// with idf(t) = ln((N - df(t) + 0.5) / (df(t) + 0.5) + 1). Every chunk is
/// scored, zeros included. Chunks are tokenized with tokenize().
std::vector<ChunkScore> bm25_scores(const std::vector<std::string>& query_tokens,
                                    const std::vector<Chunk>& chunks,
                                    const BM25Params& params = {});

enum class Scorer { Bm25, Dense, Sparse };

Scorer scorer_from_string(std::string_view s);

struct RetrieverContext {
  BM25Params bm25{};
  DenseProvider* dense = nullptr;           // required for Scorer::Dense
  SparseEncoderProvider* sparse = nullptr;  // required for Scorer::Sparse
};

/// Scores exactly the chunks of the query's meta-model, sorts by descending
/// score (ties broken by ascending chunk index) and truncates to
/// min(k, candidate count). k = 0 returns the empty list.
std::vector<ScoredChunk> retrieve_top_k(const RetrievalQuery& query, const KnowledgeBase& kb,
                                        Scorer scorer, const RetrieverContext& ctx);

}  // namespace oclrag
