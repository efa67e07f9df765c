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

#include <compare>
#include <functional>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "oclrag/chunker.hpp"
#include "oclrag/vectorizers.hpp"

namespace oclrag {

struct GraphEdge {
  std::string source;
  std::string target;
  std::string label;

  friend auto operator<=>(const GraphEdge&, const GraphEdge&) = default;
};

/// Directed class graph of a meta-model: one node per class, one edge per
/// directed association reading. Enums never become nodes.
struct ModelGraph {
  std::set<std::string> nodes;
  std::set<GraphEdge> edges;

  bool has_edge(const std::string& source, const std::string& target) const;

  friend bool operator==(const ModelGraph&, const ModelGraph&) = default;
};

/// Hard caps on simple-path enumeration; the brute-force path count grows
/// factorially with the class count, so both caps default small.
struct PathBudget {
  int max_path_len = 6;     // node count per path
  long max_paths = 10000;   // global emission cap
};

struct PathCandidate {
  std::vector<std::string> node_sequence;
  double score = 0.0;
  std::string context_text;  // space-joined node names

  friend bool operator==(const PathCandidate&, const PathCandidate&) = default;
};

enum class PathMeasure { Jaccard, Cosine };

PathMeasure path_measure_from_string(std::string_view s);

enum class EdgeDirection { SourceToTarget, TargetToSource, Both };

/// Maps a PlantUML arrow to edge direction(s): ">"-headed arrows point
/// source to target, "<"-headed the reverse, composition and aggregation
/// markers ("*", "o") point whole to part, and a bare "--" or anything
/// unrecognized reads as bidirectional.
EdgeDirection classify_arrow(std::string_view arrow);

using ArrowClassifier = std::function<EdgeDirection(std::string_view)>;

/// First identifier after the "class" keyword, or nullopt for other kinds.
std::optional<std::string> class_name_of(const Chunk& chunk);

/// Directed edges read from one association chunk (two for bidirectional
/// arrows). The label is the association's name text: identifier tokens
/// left over once the endpoints and the arrow are removed.
std::vector<GraphEdge> association_edges(const Chunk& chunk,
                                         const ArrowClassifier& classify = classify_arrow);

/// Builds the class graph from a model's chunks. Throws DanglingAssociation
/// when an association names a class that has no Class chunk.
ModelGraph build_graph(const std::vector<Chunk>& chunks,
                       const ArrowClassifier& classify = classify_arrow);
ModelGraph build_graph(const RawMetaModel& model,
                       const ArrowClassifier& classify = classify_arrow);

struct PathEnumeration {
  std::vector<std::vector<std::string>> paths;
  bool truncated = false;
};

/// All simple paths of up to budget.max_path_len nodes, single-node paths
/// included. Start nodes and neighbors are visited in lexicographic order,
/// so the emission sequence is deterministic and prefix-stable: raising
/// max_paths only appends. Stops with truncated=true once max_paths is hit.
PathEnumeration enumerate_simple_paths(const ModelGraph& graph, const PathBudget& budget = {});

/// Specification tokens that match a node name or an edge-label token of
/// the graph, case-insensitively and with trailing-"s" plural folding.
/// Returns the matched vocabulary forms, lowercased.
std::set<std::string> extract_elements(std::string_view nl_spec, const ModelGraph& graph);

/// |a ∩ b| / |a ∪ b|; 0 when both sets are empty.
double jaccard_similarity(const std::set<std::string>& a, const std::set<std::string>& b);

/// Scores every path against the extracted elements (jaccard on lowercased
/// node-name sets, or cosine of dense embeddings of the space-joined names)
/// and keeps the top k. Ties go to higher score, then shorter path, then
/// lexicographically smaller node sequence.
std::vector<PathCandidate> rank_paths(const std::vector<std::vector<std::string>>& paths,
                                      const std::set<std::string>& elements, PathMeasure measure,
                                      int k, DenseProvider* provider = nullptr);

/// The chunks a candidate list pulls into the prompt: for each path in rank
/// order, the Class chunk of every node plus the Association chunks
/// covering consecutive steps, each chunk emitted once.
std::vector<Chunk> path_context_chunks(const std::vector<PathCandidate>& candidates,
                                       const std::vector<Chunk>& model_chunks);

/// path_context_chunks joined with single spaces.
std::string paths_to_context(const std::vector<PathCandidate>& candidates,
                             const std::vector<Chunk>& model_chunks);

/// Debug export, one "source<TAB>label<TAB>target" line per edge.
std::string graph_to_edge_list(const ModelGraph& graph);

}  // namespace oclrag
