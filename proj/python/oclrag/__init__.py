# Copyright 2026 the oclrag authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Retrieval-augmented OCL constraint generation toolkit."""

from ._oclrag import (  # noqa: F401
    PROMPT_TEMPLATE,
    AggregateStats,
    Chunk,
    ChunkKind,
    DatasetRecord,
    EvalRecord,
    KnowledgeBase,
    ModelGraph,
    OclragError,
    ScoredChunk,
    __version__,
    aggregate_stats,
    bm25_scores,
    build_graph,
    build_kb,
    build_prompt,
    chunk_metamodel,
    cosine_similarity,
    embed_dense,
    encode_sparse,
    enumerate_simple_paths,
    euclidean_distance,
    extract_elements,
    jaccard_similarity,
    load_kb,
    normalize_text,
    parse_dataset,
    persist_kb,
    retrieve_top_k,
    score_pair,
    sparse_dot,
    tokenize,
)
