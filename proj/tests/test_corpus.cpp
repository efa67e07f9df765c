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

#include <doctest.h>

#include <fstream>

#include "oclrag/corpus.hpp"
#include "support/fixtures.hpp"

using namespace oclrag;
using oclrag::testing::TempDir;

TEST_SUITE_BEGIN("corpus");

TEST_CASE("parse_dataset keeps well-formed records in file order") {
  TempDir dir("parse");
  const auto path = dir.file("data.jsonl");
  {
    std::ofstream out(path);
    out << R"({"ocl":"inv a","spec":"spec a","model":"m1","plantuml":"class A {}"})" << "\n";
    out << R"({"id":"x7","ocl":"inv b","spec":"spec b","model":"m2","plantuml":"class B {}"})"
        << "\n";
  }
  const auto records = parse_dataset(path);
  REQUIRE(records.size() == 2);
  CHECK(records[0].sample_id == "0");  // synthesized from the line number
  CHECK(records[0].ocl_rule == "inv a");
  CHECK(records[1].sample_id == "x7");
  CHECK(records[1].model_name == "m2");
}

TEST_CASE("parse_dataset fails fast on a malformed record") {
  TempDir dir("parse-bad");
  const auto path = dir.file("data.jsonl");
  {
    std::ofstream out(path);
    out << R"({"ocl":"inv a","spec":"spec a","model":"m1","plantuml":"class A {}"})" << "\n";
    out << R"({"spec":"missing ocl","model":"m2","plantuml":"class B {}"})" << "\n";
  }
  try {
    parse_dataset(path);
    FAIL("expected MalformedRecord");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::MalformedRecord);
    CHECK(std::string(e.what()).find("line 1") != std::string::npos);
    CHECK(std::string(e.what()).find("ocl") != std::string::npos);
  }
}

TEST_CASE("parse_dataset rejects duplicate sample ids") {
  TempDir dir("parse-dup");
  const auto path = dir.file("data.jsonl");
  {
    std::ofstream out(path);
    out << R"({"id":"same","ocl":"a","spec":"b","model":"m","plantuml":"class A {}"})" << "\n";
    out << R"({"id":"same","ocl":"c","spec":"d","model":"n","plantuml":"class B {}"})" << "\n";
  }
  CHECK_THROWS_AS(parse_dataset(path), Error);
}

TEST_CASE("build_kb dedups by model name and keeps the first text") {
  std::vector<DatasetRecord> records = {
      {"a", "o1", "s1", "m", "class A {}"},
      {"b", "o2", "s2", "m", "class A {}"},
  };
  const KnowledgeBase kb = build_kb(records);
  CHECK(kb.models.size() == 1);
  CHECK(kb.chunk_count("m") == 1);
}

TEST_CASE("build_kb raises on conflicting PlantUML for one model name") {
  std::vector<DatasetRecord> records = {
      {"a", "o1", "s1", "m", "class A {}"},
      {"b", "o2", "s2", "m", "class B {}"},
  };
  try {
    build_kb(records);
    FAIL("expected InconsistentModel");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::InconsistentModel);
  }
}

TEST_CASE("build_kb drops repeated chunk texts within a model and re-indexes") {
  const KnowledgeBase kb =
      build_kb({{"a", "o", "s", "m", "class A {} class A {} class B {}"}});
  const auto& chunks = kb.chunks_for("m");
  REQUIRE(chunks.size() == 2);
  CHECK(chunks[0].text == "class A {}");
  CHECK(chunks[1].text == "class B {}");
  CHECK(chunks[0].index == 0);
  CHECK(chunks[1].index == 1);
}

TEST_CASE("build_kb is idempotent over record duplication") {
  auto records = testing::fixture_records();
  const KnowledgeBase once = build_kb(records, "d");
  records.push_back(records.front());
  const KnowledgeBase twice = build_kb(records, "d");
  CHECK(once.models == twice.models);
}

TEST_CASE("chunk-count filters use strict inequalities") {
  const auto records = testing::fixture_records();
  const KnowledgeBase kb = build_kb(records);

  // library=3, vehicles=5, shop=5, university=6, zoo=5 chunks.
  auto above4 = filter_by_chunk_count(records, kb, 4, CountFilter::Above);
  CHECK(above4.size() == 4);
  auto above5 = filter_by_chunk_count(records, kb, 5, CountFilter::Above);
  CHECK(above5.size() == 1);  // only university (6) is strictly above 5

  auto below5 = filter_by_chunk_count(records, kb, 5, CountFilter::Below);
  CHECK(below5.size() == 1);  // only library (3)
  auto below6 = filter_by_chunk_count(records, kb, 6, CountFilter::Below);
  CHECK(below6.size() == 4);

  auto vacuous = filter_by_chunk_count(records, kb, 0, CountFilter::Above);
  CHECK(vacuous.size() == records.size());

  // Above and Below at the same threshold never overlap.
  for (int t : {0, 3, 5, 6, 100}) {
    const auto above = filter_by_chunk_count(records, kb, t, CountFilter::Above);
    const auto below = filter_by_chunk_count(records, kb, t, CountFilter::Below);
    for (const auto& a : above) {
      for (const auto& b : below) CHECK(a.sample_id != b.sample_id);
    }
  }
}

TEST_CASE("sample_records is deterministic, ordered and a subsequence") {
  const auto records = testing::fixture_records();

  CHECK(sample_records(records, records.size(), 3) == records);

  const auto s1 = sample_records(records, 3, 42);
  const auto s2 = sample_records(records, 3, 42);
  CHECK(s1 == s2);
  REQUIRE(s1.size() == 3);

  // subsequence of the input, in original order
  std::size_t cursor = 0;
  for (const auto& rec : s1) {
    while (cursor < records.size() && !(records[cursor] == rec)) ++cursor;
    CHECK(cursor < records.size());
    ++cursor;
  }

  CHECK_THROWS_AS(sample_records(records, records.size() + 1, 1), Error);
}

TEST_CASE("different seeds eventually pick different subsets") {
  const auto records = testing::fixture_records();
  bool differs = false;
  const auto base = sample_records(records, 2, 0);
  for (std::uint64_t seed = 1; seed < 20 && !differs; ++seed) {
    differs = !(sample_records(records, 2, seed) == base);
  }
  CHECK(differs);
}

TEST_CASE("knowledge base round-trips through its file format") {
  TempDir dir("kb");
  const KnowledgeBase kb = build_kb(testing::fixture_records(), "fixture-dataset");
  const auto path = dir.file("kb.jsonl");
  persist_kb(kb, path);
  const KnowledgeBase loaded = load_kb(path);
  CHECK(loaded == kb);

  // one line per chunk plus the provenance header
  std::ifstream in(path);
  std::size_t lines = 0;
  std::string line;
  while (std::getline(in, line)) ++lines;
  CHECK(lines == kb.total_chunks() + 1);
}

TEST_CASE("a truncated kb file raises CorruptKbFile") {
  TempDir dir("kb-bad");
  const KnowledgeBase kb = build_kb(testing::fixture_records(), "d");
  const auto path = dir.file("kb.jsonl");
  persist_kb(kb, path);

  std::ifstream in(path);
  std::string all((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  in.close();
  const auto cut = dir.file("cut.jsonl");
  std::ofstream out(cut);
  out << all.substr(0, all.size() / 2);
  out.close();

  try {
    load_kb(cut);
    FAIL("expected CorruptKbFile");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::CorruptKbFile);
  }
}

TEST_CASE("build_kb surfaces unchunkable models") {
  try {
    build_kb({{"a", "o", "s", "m", "no declarations at all"}});
    FAIL("expected NoDeclarationsFound");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NoDeclarationsFound);
  }
}

TEST_CASE("unique-chunk accounting distinguishes per-model and global") {
  // Two models sharing one identical chunk text.
  const KnowledgeBase kb = build_kb({
      {"a", "o", "s", "m1", "class Shared {} class OnlyOne {}"},
      {"b", "o", "s", "m2", "class Shared {} class OnlyTwo {}"},
  });
  CHECK(kb.total_chunks() == 4);
  CHECK(kb.globally_unique_chunks() == 3);
}

TEST_SUITE_END();
