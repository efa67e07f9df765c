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

#include "oclrag/retrieval.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <set>
#include <unordered_map>

namespace oclrag {

namespace {

bool is_alnum(char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0; }
bool is_upper(char c) { return std::isupper(static_cast<unsigned char>(c)) != 0; }
bool is_lower(char c) { return std::islower(static_cast<unsigned char>(c)) != 0; }
bool is_digit(char c) { return std::isdigit(static_cast<unsigned char>(c)) != 0; }

char to_lower(char c) {
  return static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
}

// Splits one alphanumeric run at camelCase boundaries: before an upper that
// follows a lower or digit, and before the last upper of an acronym run
// ("HTTPServer" -> "HTTP", "Server").
void split_camel(std::string_view run, std::vector<std::string>& out) {
  std::size_t start = 0;
  for (std::size_t i = 1; i < run.size(); ++i) {
    const bool lower_to_upper = (is_lower(run[i - 1]) || is_digit(run[i - 1])) && is_upper(run[i]);
    const bool acronym_end =
        i + 1 < run.size() && is_upper(run[i]) && is_upper(run[i - 1]) && is_lower(run[i + 1]);
    if (lower_to_upper || acronym_end) {
      out.emplace_back(run.substr(start, i - start));
      start = i;
    }
  }
  out.emplace_back(run.substr(start));
}

}  // namespace

RetrieverId retriever_from_string(std::string_view s) {
  if (s == "bm25") return RetrieverId::Bm25;
  if (s == "dense") return RetrieverId::Dense;
  if (s == "sparse") return RetrieverId::Sparse;
  if (s == "pathocl-jaccard") return RetrieverId::PathoclJaccard;
  if (s == "pathocl-cosine") return RetrieverId::PathoclCosine;
  if (s == "none") return RetrieverId::None;
  raise(ErrorCode::InvalidArgument, "unknown retriever '" + std::string(s) + "'");
}

Scorer scorer_from_string(std::string_view s) {
  if (s == "bm25") return Scorer::Bm25;
  if (s == "dense") return Scorer::Dense;
  if (s == "sparse") return Scorer::Sparse;
  raise(ErrorCode::InvalidArgument, "unknown scorer '" + std::string(s) + "'");
}

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::size_t pos = 0;
  while (pos < text.size()) {
    while (pos < text.size() && !is_alnum(text[pos])) ++pos;
    std::size_t start = pos;
    while (pos < text.size() && is_alnum(text[pos])) ++pos;
    if (pos > start) split_camel(text.substr(start, pos - start), tokens);
  }
  for (std::string& tok : tokens) {
    for (char& c : tok) c = to_lower(c);
  }
  return tokens;
}

std::vector<ChunkScore> bm25_scores(const std::vector<std::string>& query_tokens,
                                    const std::vector<Chunk>& chunks,
                                    const BM25Params& params) {
  if (chunks.empty()) {
    raise(ErrorCode::EmptyCorpus, "BM25 needs at least one chunk to score");
  }

  std::vector<std::unordered_map<std::string, int>> tf(chunks.size());
  std::vector<double> dl(chunks.size(), 0.0);
  double total_len = 0.0;
  for (std::size_t i = 0; i < chunks.size(); ++i) {
    const std::vector<std::string> tokens = tokenize(chunks[i].text);
    dl[i] = static_cast<double>(tokens.size());
    total_len += dl[i];
    for (const std::string& tok : tokens) ++tf[i][tok];
  }
  const double n = static_cast<double>(chunks.size());
  const double avgdl = total_len / n;

  const std::set<std::string> terms(query_tokens.begin(), query_tokens.end());
  std::unordered_map<std::string, double> idf;
  for (const std::string& term : terms) {
    double df = 0.0;
    for (const auto& doc : tf) df += doc.count(term) ? 1.0 : 0.0;
    idf.emplace(term, std::log((n - df + 0.5) / (df + 0.5) + 1.0));
  }

  std::vector<ChunkScore> scores;
  scores.reserve(chunks.size());
  for (std::size_t i = 0; i < chunks.size(); ++i) {
    double score = 0.0;
    for (const std::string& term : terms) {
      auto it = tf[i].find(term);
      if (it == tf[i].end()) continue;
      const double f = static_cast<double>(it->second);
      const double len_norm = (avgdl > 0.0) ? dl[i] / avgdl : 0.0;
      score += idf.at(term) * f * (params.k1 + 1.0) /
               (f + params.k1 * (1.0 - params.b + params.b * len_norm));
    }
    scores.push_back(ChunkScore{chunks[i], score});
  }
  return scores;
}

std::vector<ScoredChunk> retrieve_top_k(const RetrievalQuery& query, const KnowledgeBase& kb,
                                        Scorer scorer, const RetrieverContext& ctx) {
  const std::vector<Chunk>& candidates = kb.chunks_for(query.model_name);
  if (query.k <= 0) return {};

  std::vector<ChunkScore> scored;
  switch (scorer) {
    case Scorer::Bm25:
      scored = bm25_scores(tokenize(query.nl_spec), candidates, ctx.bm25);
      break;
    case Scorer::Dense: {
      if (ctx.dense == nullptr) {
        raise(ErrorCode::InvalidConfig, "dense scorer needs a dense provider");
      }
      std::vector<std::string> texts;
      texts.reserve(candidates.size() + 1);
      texts.push_back(query.nl_spec);
      for (const Chunk& c : candidates) texts.push_back(c.text);
      const std::vector<DenseVector> vectors = embed_dense(*ctx.dense, texts);
      scored.reserve(candidates.size());
      for (std::size_t i = 0; i < candidates.size(); ++i) {
        scored.push_back(ChunkScore{candidates[i], cosine_similarity(vectors[0], vectors[i + 1])});
      }
      break;
    }
    case Scorer::Sparse: {
      if (ctx.sparse == nullptr) {
        raise(ErrorCode::InvalidConfig, "sparse scorer needs a sparse encoder provider");
      }
      std::vector<std::string> corpus_texts;
      corpus_texts.reserve(candidates.size());
      for (const Chunk& c : candidates) corpus_texts.push_back(c.text);
      auto encoder = ctx.sparse->encoder_for(corpus_texts);
      std::vector<std::string> texts = corpus_texts;
      texts.push_back(query.nl_spec);
      const std::vector<SparseVector> vectors = encode_sparse(*encoder, texts);
      const SparseVector& query_vec = vectors.back();
      scored.reserve(candidates.size());
      for (std::size_t i = 0; i < candidates.size(); ++i) {
        scored.push_back(ChunkScore{candidates[i], sparse_dot(query_vec, vectors[i])});
      }
      break;
    }
  }

  std::stable_sort(scored.begin(), scored.end(), [](const ChunkScore& a, const ChunkScore& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.chunk.index < b.chunk.index;
  });

  const std::size_t take = std::min<std::size_t>(static_cast<std::size_t>(query.k), scored.size());
  std::vector<ScoredChunk> top;
  top.reserve(take);
  for (std::size_t i = 0; i < take; ++i) {
    top.push_back(ScoredChunk{scored[i].chunk, scored[i].score, static_cast<int>(i) + 1});
  }
  return top;
}

}  // namespace oclrag
