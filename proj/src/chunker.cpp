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

#include "oclrag/chunker.hpp"

#include <cctype>

namespace oclrag {

namespace {

bool is_space(char c) {
  return std::isspace(static_cast<unsigned char>(c)) != 0;
}

bool is_declaration_keyword(std::string_view token) {
  return token == "class" || token == "enum" || token == "association";
}

ChunkKind kind_of_keyword(std::string_view token) {
  if (token == "enum") return ChunkKind::Enum;
  if (token == "association") return ChunkKind::Association;
  return ChunkKind::Class;
}

std::vector<std::string_view> split_spaces(std::string_view text) {
  std::vector<std::string_view> tokens;
  std::size_t pos = 0;
  while (pos < text.size()) {
    while (pos < text.size() && text[pos] == ' ') ++pos;
    std::size_t start = pos;
    while (pos < text.size() && text[pos] != ' ') ++pos;
    if (pos > start) tokens.push_back(text.substr(start, pos - start));
  }
  return tokens;
}

}  // namespace

ChunkKind chunk_kind_from_string(std::string_view s) {
  if (s == "class") return ChunkKind::Class;
  if (s == "enum") return ChunkKind::Enum;
  if (s == "association") return ChunkKind::Association;
  raise(ErrorCode::InvalidArgument, "unknown chunk kind '" + std::string(s) + "'");
}

std::string normalize_text(std::string_view raw) {
  std::string out;
  out.reserve(raw.size());
  bool pending_space = false;
  for (char c : raw) {
    if (is_space(c)) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) {
      out.push_back(' ');
      pending_space = false;
    }
    out.push_back(c);
  }
  return out;
}

std::vector<Chunk> chunk_metamodel(const RawMetaModel& model) {
  const std::string normalized = normalize_text(model.plantuml_text);
  std::vector<std::string_view> tokens = split_spaces(normalized);

  // "@startuml", "@enduml" and friends are diagram directives, not
  // meta-model content; drop them wherever they appear.
  std::erase_if(tokens, [](std::string_view t) { return t.front() == '@'; });

  std::vector<std::size_t> starts;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (is_declaration_keyword(tokens[i])) starts.push_back(i);
  }
  if (starts.empty()) {
    raise(ErrorCode::NoDeclarationsFound,
          "meta-model '" + model.name + "' contains no class/enum/association declaration");
  }

  std::vector<Chunk> chunks;
  chunks.reserve(starts.size());
  for (std::size_t c = 0; c < starts.size(); ++c) {
    const std::size_t begin = starts[c];
    const std::size_t end = (c + 1 < starts.size()) ? starts[c + 1] : tokens.size();
    std::string text;
    for (std::size_t i = begin; i < end; ++i) {
      if (i > begin) text.push_back(' ');
      text.append(tokens[i]);
    }
    chunks.push_back(Chunk{model.name, static_cast<int>(c), kind_of_keyword(tokens[begin]),
                           std::move(text)});
  }
  return chunks;
}

}  // namespace oclrag
