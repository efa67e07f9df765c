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

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "oclrag/chunker.hpp"

namespace oclrag {

/// One dataset sample: a reference OCL rule, its natural-language
/// specification, and the meta-model it constrains.
struct DatasetRecord {
  std::string sample_id;
  std::string ocl_rule;
  std::string nl_spec;
  std::string model_name;
  std::string plantuml_text;

  friend bool operator==(const DatasetRecord&, const DatasetRecord&) = default;
};

struct KbProvenance {
  std::string dataset_id;
  std::string built_at;  // ISO 8601 UTC

  friend bool operator==(const KbProvenance&, const KbProvenance&) = default;
};

/// The retrievable corpus: per meta-model, the ordered list of its chunks.
/// Within a model, chunk texts are unique and indices run 0..n-1.
struct KnowledgeBase {
  std::map<std::string, std::vector<Chunk>> models;
  KbProvenance provenance;

  bool contains(const std::string& model_name) const {
    return models.find(model_name) != models.end();
  }

  /// Throws UnknownModel when the model is absent.
  const std::vector<Chunk>& chunks_for(const std::string& model_name) const;

  std::size_t chunk_count(const std::string& model_name) const {
    return chunks_for(model_name).size();
  }

  /// Sum of per-model chunk counts (per-model uniqueness).
  std::size_t total_chunks() const;

  /// Number of distinct chunk texts across all models.
  std::size_t globally_unique_chunks() const;

  friend bool operator==(const KnowledgeBase&, const KnowledgeBase&) = default;
};

/// Reads a line-delimited dataset file. Each line is a JSON object with keys
/// "ocl", "spec", "model", "plantuml" and an optional "id"; a missing id is
/// synthesized as the 0-based line number. Ingestion aborts on the first bad
/// line (MalformedRecord) so sample indices stay stable.
std::vector<DatasetRecord> parse_dataset(const std::filesystem::path& path);

/// Builds the knowledge base from dataset records. Each model name appears
/// once; a later record with the same name but different PlantUML raises
/// InconsistentModel. Duplicate chunk texts within a model are dropped
/// (first occurrence wins) and the survivors are re-indexed.
KnowledgeBase build_kb(const std::vector<DatasetRecord>& records,
                       const std::string& dataset_id = "");

enum class CountFilter { Above, Below };

/// Keeps records whose model has strictly more (Above) or strictly fewer
/// (Below) chunks than the threshold. Order is preserved.
std::vector<DatasetRecord> filter_by_chunk_count(const std::vector<DatasetRecord>& records,
                                                 const KnowledgeBase& kb, int threshold,
                                                 CountFilter mode);

/// Uniform sample of n records without replacement, deterministic for a
/// fixed seed, returned in original dataset order. Throws SampleTooLarge
/// when n exceeds the number of records.
std::vector<DatasetRecord> sample_records(const std::vector<DatasetRecord>& records,
                                          std::size_t n, std::uint64_t seed);

/// Writes the knowledge base as line-delimited JSON: one provenance header
/// line followed by one {model, index, kind, text} record per chunk. UTF-8.
void persist_kb(const KnowledgeBase& kb, const std::filesystem::path& path);

/// Inverse of persist_kb; load_kb(persist_kb(kb)) == kb. Throws
/// CorruptKbFile on truncated or malformed input.
KnowledgeBase load_kb(const std::filesystem::path& path);

}  // namespace oclrag
