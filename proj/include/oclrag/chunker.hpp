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

#include "oclrag/error.hpp"

namespace oclrag {

/// A meta-model as it arrives from the dataset: a unique name plus the raw
/// PlantUML text, which may still carry tabs and decorative line breaks.
struct RawMetaModel {
  std::string name;
  std::string plantuml_text;
};

enum class ChunkKind { Class, Enum, Association };

constexpr std::string_view to_string(ChunkKind kind) {
  switch (kind) {
    case ChunkKind::Class: return "class";
    case ChunkKind::Enum: return "enum";
    case ChunkKind::Association: return "association";
  }
  return "class";
}

ChunkKind chunk_kind_from_string(std::string_view s);

/// One atomic declaration cut out of a meta-model. The text is normalized:
/// single spaces only, starts with its declaration keyword.
struct Chunk {
  std::string model_name;
  int index = 0;
  ChunkKind kind = ChunkKind::Class;
  std::string text;

  friend bool operator==(const Chunk&, const Chunk&) = default;
};

/// Replaces tabs and line breaks with spaces, collapses whitespace runs to a
/// single space and trims both ends. Idempotent.
std::string normalize_text(std::string_view raw);

/// Splits a meta-model into chunks, one per declaration. A chunk starts at
/// every standalone "class" / "enum" / "association" token of the normalized
/// text and runs until the next one. Text before the first keyword (e.g.
/// "@startuml") is dropped. Keywords are matched case-sensitively; matching
/// is purely lexical, brace nesting is not tracked.
///
/// Throws NoDeclarationsFound when no declaration keyword occurs.
std::vector<Chunk> chunk_metamodel(const RawMetaModel& model);

}  // namespace oclrag
