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

#include "oclrag/pathocl.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "oclrag/retrieval.hpp"

namespace oclrag {

namespace {

bool is_ident_start(char c) {
  return std::isalpha(static_cast<unsigned char>(c)) != 0 || c == '_';
}

bool is_ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) != 0 || c == '_';
}

std::string to_lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

// Strips one trailing 's' so "cars" and "car" compare equal.
std::string fold_plural(const std::string& lower) {
  if (lower.size() > 1 && lower.back() == 's') return lower.substr(0, lower.size() - 1);
  return lower;
}

std::vector<std::string> split_spaces(std::string_view text) {
  std::vector<std::string> tokens;
  std::istringstream in{std::string(text)};
  std::string tok;
  while (in >> tok) tokens.push_back(tok);
  return tokens;
}

// First maximal identifier run within the token, if any.
std::optional<std::string> first_identifier(std::string_view token) {
  for (std::size_t i = 0; i < token.size(); ++i) {
    if (!is_ident_start(token[i])) continue;
    std::size_t end = i;
    while (end < token.size() && is_ident_char(token[end])) ++end;
    return std::string(token.substr(i, end - i));
  }
  return std::nullopt;
}

bool is_arrow_token(std::string_view token) {
  if (token.find("--") == std::string_view::npos &&
      token.find("->") == std::string_view::npos &&
      token.find("<-") == std::string_view::npos) {
    return false;
  }
  return token.find_first_not_of("-<>*o|.") == std::string_view::npos;
}

bool token_has_letters(std::string_view token) {
  return std::any_of(token.begin(), token.end(),
                     [](char c) { return std::isalpha(static_cast<unsigned char>(c)) != 0; });
}

}  // namespace

PathMeasure path_measure_from_string(std::string_view s) {
  if (s == "jaccard") return PathMeasure::Jaccard;
  if (s == "cosine") return PathMeasure::Cosine;
  raise(ErrorCode::InvalidArgument, "unknown path measure '" + std::string(s) + "'");
}

bool ModelGraph::has_edge(const std::string& source, const std::string& target) const {
  auto it = edges.lower_bound(GraphEdge{source, target, ""});
  return it != edges.end() && it->source == source && it->target == target;
}

EdgeDirection classify_arrow(std::string_view arrow) {
  if (arrow.empty()) return EdgeDirection::Both;
  const char head = arrow.back();
  const char tail = arrow.front();
  if (head == '>' && tail == '<') return EdgeDirection::Both;
  if (head == '>') return EdgeDirection::SourceToTarget;
  if (tail == '<') return EdgeDirection::TargetToSource;
  // Composition / aggregation diamonds sit on the whole's side.
  if (tail == '*' || tail == 'o') return EdgeDirection::SourceToTarget;
  if (head == '*' || head == 'o') return EdgeDirection::TargetToSource;
  return EdgeDirection::Both;
}

std::optional<std::string> class_name_of(const Chunk& chunk) {
  if (chunk.kind != ChunkKind::Class) return std::nullopt;
  std::string_view rest(chunk.text);
  if (rest.substr(0, 5) == "class") rest.remove_prefix(5);
  return first_identifier(rest);
}

std::vector<GraphEdge> association_edges(const Chunk& chunk, const ArrowClassifier& classify) {
  if (chunk.kind != ChunkKind::Association) return {};

  std::vector<std::string> tokens = split_spaces(chunk.text);
  // tokens[0] is the "association" keyword itself.
  std::size_t arrow_pos = 0;
  for (std::size_t i = 1; i < tokens.size(); ++i) {
    if (is_arrow_token(tokens[i])) {
      arrow_pos = i;
      break;
    }
  }
  if (arrow_pos == 0) return {};

  std::optional<std::string> source;
  std::size_t source_pos = 0;
  for (std::size_t i = arrow_pos; i-- > 1;) {
    if (auto ident = first_identifier(tokens[i]); ident && token_has_letters(*ident)) {
      source = ident;
      source_pos = i;
      break;
    }
  }
  std::optional<std::string> target;
  std::size_t target_pos = 0;
  for (std::size_t i = arrow_pos + 1; i < tokens.size(); ++i) {
    if (auto ident = first_identifier(tokens[i]); ident && token_has_letters(*ident)) {
      target = ident;
      target_pos = i;
      break;
    }
  }
  if (!source || !target) return {};

  std::string label;
  for (std::size_t i = 1; i < tokens.size(); ++i) {
    if (i == arrow_pos || i == source_pos || i == target_pos) continue;
    if (!token_has_letters(tokens[i])) continue;  // multiplicities, colons, quotes
    auto ident = first_identifier(tokens[i]);
    if (!ident) continue;
    if (!label.empty()) label.push_back(' ');
    label.append(*ident);
  }

  std::vector<GraphEdge> result;
  switch (classify(tokens[arrow_pos])) {
    case EdgeDirection::SourceToTarget:
      result.push_back(GraphEdge{*source, *target, label});
      break;
    case EdgeDirection::TargetToSource:
      result.push_back(GraphEdge{*target, *source, label});
      break;
    case EdgeDirection::Both:
      result.push_back(GraphEdge{*source, *target, label});
      result.push_back(GraphEdge{*target, *source, label});
      break;
  }
  return result;
}

ModelGraph build_graph(const std::vector<Chunk>& chunks, const ArrowClassifier& classify) {
  ModelGraph graph;
  for (const Chunk& chunk : chunks) {
    if (auto name = class_name_of(chunk)) graph.nodes.insert(*name);
  }

  std::set<std::string> dangling;
  for (const Chunk& chunk : chunks) {
    for (GraphEdge& edge : association_edges(chunk, classify)) {
      if (!graph.nodes.contains(edge.source)) dangling.insert(edge.source);
      if (!graph.nodes.contains(edge.target)) dangling.insert(edge.target);
      if (dangling.empty()) graph.edges.insert(std::move(edge));
    }
  }
  if (!dangling.empty()) {
    std::string names;
    for (const std::string& n : dangling) {
      if (!names.empty()) names += ", ";
      names += n;
    }
    raise(ErrorCode::DanglingAssociation, "associations reference unknown classes: " + names);
  }
  return graph;
}

ModelGraph build_graph(const RawMetaModel& model, const ArrowClassifier& classify) {
  return build_graph(chunk_metamodel(model), classify);
}

PathEnumeration enumerate_simple_paths(const ModelGraph& graph, const PathBudget& budget) {
  if (budget.max_path_len < 1 || budget.max_paths < 1) {
    raise(ErrorCode::InvalidArgument, "path budget fields must be at least 1");
  }

  std::map<std::string, std::vector<std::string>> adjacency;
  for (const GraphEdge& edge : graph.edges) {
    auto& targets = adjacency[edge.source];
    if (std::find(targets.begin(), targets.end(), edge.target) == targets.end()) {
      targets.push_back(edge.target);  // set-ordered edges keep this sorted
    }
  }

  PathEnumeration result;
  std::vector<std::string> path;
  std::unordered_set<std::string> on_path;

  const std::function<bool(const std::string&)> visit = [&](const std::string& node) -> bool {
    path.push_back(node);
    on_path.insert(node);
    result.paths.push_back(path);
    bool keep_going = static_cast<long>(result.paths.size()) < budget.max_paths;
    if (!keep_going) result.truncated = true;

    if (keep_going && static_cast<int>(path.size()) < budget.max_path_len) {
      if (auto it = adjacency.find(node); it != adjacency.end()) {
        for (const std::string& next : it->second) {
          if (on_path.contains(next)) continue;
          if (!visit(next)) {
            keep_going = false;
            break;
          }
        }
      }
    }
    on_path.erase(node);
    path.pop_back();
    return keep_going;
  };

  for (const std::string& start : graph.nodes) {
    if (!visit(start)) break;
  }
  return result;
}

std::set<std::string> extract_elements(std::string_view nl_spec, const ModelGraph& graph) {
  // vocabulary: folded form -> lowercased original form
  std::map<std::string, std::string> vocabulary;
  auto add_vocab = [&](const std::string& term) {
    const std::string lower = to_lower(term);
    vocabulary.emplace(fold_plural(lower), lower);
    vocabulary.emplace(lower, lower);
  };
  for (const std::string& node : graph.nodes) add_vocab(node);
  for (const GraphEdge& edge : graph.edges) {
    for (const std::string& tok : tokenize(edge.label)) add_vocab(tok);
  }

  std::set<std::string> elements;
  for (const std::string& token : tokenize(nl_spec)) {
    if (auto it = vocabulary.find(token); it != vocabulary.end()) {
      elements.insert(it->second);
    } else if (auto folded = vocabulary.find(fold_plural(token)); folded != vocabulary.end()) {
      elements.insert(folded->second);
    }
  }
  return elements;
}

double jaccard_similarity(const std::set<std::string>& a, const std::set<std::string>& b) {
  if (a.empty() && b.empty()) return 0.0;
  std::size_t intersection = 0;
  for (const std::string& x : a) intersection += b.contains(x) ? 1 : 0;
  const std::size_t union_size = a.size() + b.size() - intersection;
  return static_cast<double>(intersection) / static_cast<double>(union_size);
}

std::vector<PathCandidate> rank_paths(const std::vector<std::vector<std::string>>& paths,
                                      const std::set<std::string>& elements, PathMeasure measure,
                                      int k, DenseProvider* provider) {
  if (paths.empty()) {
    raise(ErrorCode::InvalidArgument, "rank_paths needs at least one path");
  }
  if (k <= 0) return {};

  auto join = [](const std::vector<std::string>& parts) {
    std::string joined;
    for (const std::string& p : parts) {
      if (!joined.empty()) joined.push_back(' ');
      joined.append(p);
    }
    return joined;
  };

  std::vector<PathCandidate> candidates;
  candidates.reserve(paths.size());
  for (const auto& path : paths) {
    candidates.push_back(PathCandidate{path, 0.0, join(path)});
  }

  if (measure == PathMeasure::Jaccard) {
    for (PathCandidate& c : candidates) {
      std::set<std::string> node_set;
      for (const std::string& node : c.node_sequence) node_set.insert(to_lower(node));
      c.score = jaccard_similarity(node_set, elements);
    }
  } else {
    if (provider == nullptr) {
      raise(ErrorCode::InvalidConfig, "cosine path ranking needs a dense provider");
    }
    std::vector<std::string> texts;
    texts.reserve(candidates.size() + 1);
    std::string element_text;
    for (const std::string& e : elements) {
      if (!element_text.empty()) element_text.push_back(' ');
      element_text.append(e);
    }
    texts.push_back(element_text);
    for (const PathCandidate& c : candidates) texts.push_back(c.context_text);
    const std::vector<DenseVector> vectors = embed_dense(*provider, texts);
    for (std::size_t i = 0; i < candidates.size(); ++i) {
      const DenseVector& query = vectors[0];
      const DenseVector& path_vec = vectors[i + 1];
      double score = 0.0;
      // An empty element set embeds to the zero vector; score it 0.
      try {
        score = cosine_similarity(query, path_vec);
      } catch (const Error& e) {
        if (e.code() != ErrorCode::ZeroVector) throw;
      }
      candidates[i].score = score;
    }
  }

  std::stable_sort(candidates.begin(), candidates.end(),
                   [](const PathCandidate& a, const PathCandidate& b) {
                     if (a.score != b.score) return a.score > b.score;
                     if (a.node_sequence.size() != b.node_sequence.size()) {
                       return a.node_sequence.size() < b.node_sequence.size();
                     }
                     return a.node_sequence < b.node_sequence;
                   });
  if (candidates.size() > static_cast<std::size_t>(k)) {
    candidates.resize(static_cast<std::size_t>(k));
  }
  return candidates;
}

std::vector<Chunk> path_context_chunks(const std::vector<PathCandidate>& candidates,
                                       const std::vector<Chunk>& model_chunks) {
  std::unordered_map<std::string, const Chunk*> class_chunks;
  for (const Chunk& chunk : model_chunks) {
    if (auto name = class_name_of(chunk)) class_chunks.try_emplace(*name, &chunk);
  }
  // (source, target) -> association chunks providing that directed edge
  std::map<std::pair<std::string, std::string>, std::vector<const Chunk*>> edge_chunks;
  for (const Chunk& chunk : model_chunks) {
    for (const GraphEdge& edge : association_edges(chunk)) {
      edge_chunks[{edge.source, edge.target}].push_back(&chunk);
    }
  }

  std::vector<Chunk> context;
  std::unordered_set<const Chunk*> emitted;
  auto emit = [&](const Chunk* chunk) {
    if (chunk != nullptr && emitted.insert(chunk).second) context.push_back(*chunk);
  };

  for (const PathCandidate& candidate : candidates) {
    const auto& nodes = candidate.node_sequence;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      if (i > 0) {
        if (auto it = edge_chunks.find({nodes[i - 1], nodes[i]}); it != edge_chunks.end()) {
          for (const Chunk* chunk : it->second) emit(chunk);
        }
      }
      if (auto it = class_chunks.find(nodes[i]); it != class_chunks.end()) emit(it->second);
    }
  }
  return context;
}

std::string paths_to_context(const std::vector<PathCandidate>& candidates,
                             const std::vector<Chunk>& model_chunks) {
  std::string text;
  for (const Chunk& chunk : path_context_chunks(candidates, model_chunks)) {
    if (!text.empty()) text.push_back(' ');
    text.append(chunk.text);
  }
  return text;
}

std::string graph_to_edge_list(const ModelGraph& graph) {
  std::string out;
  for (const GraphEdge& edge : graph.edges) {
    out += edge.source + '\t' + edge.label + '\t' + edge.target + '\n';
  }
  return out;
}

}  // namespace oclrag
