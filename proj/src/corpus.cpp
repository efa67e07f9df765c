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

#include "oclrag/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <random>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

#include "internal/time.hpp"

namespace oclrag {

namespace {

using nlohmann::json;

std::string require_string_field(const json& obj, const char* key, std::size_t line_no) {
  auto it = obj.find(key);
  if (it == obj.end() || !it->is_string() || it->get<std::string>().empty()) {
    raise(ErrorCode::MalformedRecord,
          "line " + std::to_string(line_no) + ": missing or empty '" + key + "' field");
  }
  return it->get<std::string>();
}

}  // namespace

const std::vector<Chunk>& KnowledgeBase::chunks_for(const std::string& model_name) const {
  auto it = models.find(model_name);
  if (it == models.end()) {
    raise(ErrorCode::UnknownModel, "no meta-model named '" + model_name + "'");
  }
  return it->second;
}

std::size_t KnowledgeBase::total_chunks() const {
  std::size_t n = 0;
  for (const auto& [_, chunks] : models) n += chunks.size();
  return n;
}

std::size_t KnowledgeBase::globally_unique_chunks() const {
  std::unordered_set<std::string> texts;
  for (const auto& [_, chunks] : models) {
    for (const Chunk& c : chunks) texts.insert(c.text);
  }
  return texts.size();
}

std::vector<DatasetRecord> parse_dataset(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    raise(ErrorCode::IoFailure, "cannot open dataset file '" + path.string() + "'");
  }

  std::vector<DatasetRecord> records;
  std::unordered_set<std::string> seen_ids;
  std::string line;
  std::size_t line_no = 0;  // 0-based, also the synthesized id
  for (; std::getline(in, line); ++line_no) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json obj = json::parse(line, nullptr, false);
    if (obj.is_discarded() || !obj.is_object()) {
      raise(ErrorCode::MalformedRecord, "line " + std::to_string(line_no) + ": not a JSON object");
    }
    DatasetRecord rec;
    rec.ocl_rule = require_string_field(obj, "ocl", line_no);
    rec.nl_spec = require_string_field(obj, "spec", line_no);
    rec.model_name = require_string_field(obj, "model", line_no);
    rec.plantuml_text = require_string_field(obj, "plantuml", line_no);
    if (auto it = obj.find("id"); it != obj.end() && !it->is_null()) {
      if (it->is_string()) {
        rec.sample_id = it->get<std::string>();
      } else if (it->is_number_integer()) {
        rec.sample_id = std::to_string(it->get<std::int64_t>());
      } else {
        raise(ErrorCode::MalformedRecord,
              "line " + std::to_string(line_no) + ": 'id' must be a string or integer");
      }
    } else {
      rec.sample_id = std::to_string(line_no);
    }
    if (!seen_ids.insert(rec.sample_id).second) {
      raise(ErrorCode::MalformedRecord,
            "line " + std::to_string(line_no) + ": duplicate sample id '" + rec.sample_id + "'");
    }
    records.push_back(std::move(rec));
  }
  return records;
}

KnowledgeBase build_kb(const std::vector<DatasetRecord>& records, const std::string& dataset_id) {
  if (records.empty()) {
    raise(ErrorCode::EmptyRecordSet, "cannot build a knowledge base from zero records");
  }

  KnowledgeBase kb;
  kb.provenance.dataset_id = dataset_id;
  kb.provenance.built_at = internal::utc_now_iso8601();

  std::unordered_map<std::string, const std::string*> first_text;
  for (const DatasetRecord& rec : records) {
    auto [it, inserted] = first_text.try_emplace(rec.model_name, &rec.plantuml_text);
    if (!inserted) {
      if (*it->second != rec.plantuml_text) {
        raise(ErrorCode::InconsistentModel,
              "meta-model '" + rec.model_name + "' appears with differing PlantUML text");
      }
      continue;
    }

    std::vector<Chunk> chunks = chunk_metamodel(RawMetaModel{rec.model_name, rec.plantuml_text});
    std::vector<Chunk> unique;
    std::unordered_set<std::string> seen_texts;
    for (Chunk& c : chunks) {
      if (!seen_texts.insert(c.text).second) continue;
      c.index = static_cast<int>(unique.size());
      unique.push_back(std::move(c));
    }
    kb.models.emplace(rec.model_name, std::move(unique));
  }
  return kb;
}

std::vector<DatasetRecord> filter_by_chunk_count(const std::vector<DatasetRecord>& records,
                                                 const KnowledgeBase& kb, int threshold,
                                                 CountFilter mode) {
  std::vector<DatasetRecord> kept;
  for (const DatasetRecord& rec : records) {
    const auto count = static_cast<long>(kb.chunk_count(rec.model_name));
    const bool keep = (mode == CountFilter::Above) ? count > threshold : count < threshold;
    if (keep) kept.push_back(rec);
  }
  return kept;
}

std::vector<DatasetRecord> sample_records(const std::vector<DatasetRecord>& records,
                                          std::size_t n, std::uint64_t seed) {
  if (n > records.size()) {
    raise(ErrorCode::SampleTooLarge, "requested " + std::to_string(n) + " of " +
                                         std::to_string(records.size()) + " records");
  }

  // Partial Fisher-Yates with explicit modulo draws: uniform_int_distribution
  // is implementation-defined, this keeps samples identical across platforms.
  std::mt19937_64 gen(seed);
  std::vector<std::size_t> indices(records.size());
  for (std::size_t i = 0; i < indices.size(); ++i) indices[i] = i;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(gen() % (indices.size() - i));
    std::swap(indices[i], indices[j]);
  }
  indices.resize(n);
  std::sort(indices.begin(), indices.end());

  std::vector<DatasetRecord> sampled;
  sampled.reserve(n);
  for (std::size_t idx : indices) sampled.push_back(records[idx]);
  return sampled;
}

void persist_kb(const KnowledgeBase& kb, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) {
    raise(ErrorCode::IoFailure, "cannot write knowledge base file '" + path.string() + "'");
  }
  json header = {{"dataset", kb.provenance.dataset_id}, {"built_at", kb.provenance.built_at}};
  out << header.dump() << '\n';
  for (const auto& [model, chunks] : kb.models) {
    for (const Chunk& c : chunks) {
      json entry = {{"model", c.model_name},
                    {"index", c.index},
                    {"kind", std::string(to_string(c.kind))},
                    {"text", c.text}};
      out << entry.dump() << '\n';
    }
  }
  if (!out.good()) {
    raise(ErrorCode::IoFailure, "write failed for '" + path.string() + "'");
  }
}

KnowledgeBase load_kb(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    raise(ErrorCode::IoFailure, "cannot open knowledge base file '" + path.string() + "'");
  }

  KnowledgeBase kb;
  std::string line;
  if (!std::getline(in, line)) {
    raise(ErrorCode::CorruptKbFile, "empty knowledge base file");
  }
  json header = json::parse(line, nullptr, false);
  if (header.is_discarded() || !header.is_object() || !header.contains("dataset") ||
      !header.contains("built_at")) {
    raise(ErrorCode::CorruptKbFile, "missing provenance header");
  }
  kb.provenance.dataset_id = header["dataset"].get<std::string>();
  kb.provenance.built_at = header["built_at"].get<std::string>();

  std::size_t line_no = 1;
  for (; std::getline(in, line); ++line_no) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json obj = json::parse(line, nullptr, false);
    if (obj.is_discarded() || !obj.is_object() || !obj.contains("model") ||
        !obj.contains("index") || !obj.contains("kind") || !obj.contains("text")) {
      raise(ErrorCode::CorruptKbFile, "bad chunk record at line " + std::to_string(line_no));
    }
    if (!obj["model"].is_string() || !obj["index"].is_number_integer() ||
        !obj["kind"].is_string() || !obj["text"].is_string()) {
      raise(ErrorCode::CorruptKbFile, "bad chunk record at line " + std::to_string(line_no));
    }
    const std::string kind = obj["kind"].get<std::string>();
    if (kind != "class" && kind != "enum" && kind != "association") {
      raise(ErrorCode::CorruptKbFile,
            "unknown chunk kind '" + kind + "' at line " + std::to_string(line_no));
    }
    Chunk c;
    c.model_name = obj["model"].get<std::string>();
    c.index = obj["index"].get<int>();
    c.kind = chunk_kind_from_string(kind);
    c.text = obj["text"].get<std::string>();
    auto& chunks = kb.models[c.model_name];
    if (c.index != static_cast<int>(chunks.size())) {
      raise(ErrorCode::CorruptKbFile, "non-contiguous chunk indices for model '" + c.model_name +
                                          "' at line " + std::to_string(line_no));
    }
    chunks.push_back(std::move(c));
  }
  return kb;
}

}  // namespace oclrag
