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

#include <unistd.h>

#include <atomic>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include "oclrag/corpus.hpp"

namespace oclrag::testing {

struct FixtureModel {
  std::string name;
  std::string plantuml;
  int expected_chunks;  // hand-counted declaration keywords
};

// Ten small meta-models in the dataset's PlantUML style, with deliberate
// tab/newline noise and keyword-lookalike identifiers.
inline std::vector<FixtureModel> fixture_models() {
  return {
      {"library",
       "@startuml\nclass Book {\n\ttitle : String\n}\nclass Member {\n name : String\n}\n"
       "association Book -- Member\n@enduml",
       3},
      {"vehicles",
       "class Car {} class Engine {} class Wheel {} association Car *-- Engine "
       "association Car o-- Wheel",
       5},
      {"palette", "enum Color { RED GREEN BLUE }\nclass Palette {\n\tcolors\n}", 2},
      {"shop",
       "@startuml class Order {\n total : Real\n} class Item {} class Customer {} "
       "association Customer --> Order : places association Order *-- Item @enduml",
       5},
      {"lonely", "class Lonely { id : Integer }", 1},
      {"university",
       "class Student {} class Course {} class Professor {} enum Grade { A B C } "
       "association Student -- Course association Professor --> Course : teaches",
       6},
      {"zoo",
       "class Animal {} class Cage {} association Cage *-- Animal : holds class Keeper {} "
       "association Keeper --> Cage : cleans",
       5},
      {"net", "class Node {} class Link {} association Node --> Link association Link --> Node",
       4},
      {"docs",
       "class Document {\n\ttext : String\n} class Page {} class Author {} "
       "association Document *-- Page association Author --> Document : writes class Tag {} "
       "association Document -- Tag",
       7},
      {"tricky", "class Subclass {} class classifiers {} association Subclass -- classifiers", 3},
  };
}

inline std::vector<DatasetRecord> fixture_records() {
  std::vector<DatasetRecord> records;
  const auto models = fixture_models();
  auto model_text = [&](const std::string& name) {
    for (const auto& m : models) {
      if (m.name == name) return m.plantuml;
    }
    return std::string{};
  };
  records.push_back({"s0", "context Book inv: self.title.size() > 0",
                     "every book has a non-empty title", "library", model_text("library")});
  records.push_back({"s1", "context Car inv: self.wheel->size() = 4", "every car has four wheels",
                     "vehicles", model_text("vehicles")});
  records.push_back({"s2", "context Order inv: self.total >= 0",
                     "an order total is never negative", "shop", model_text("shop")});
  records.push_back({"s3", "context Student inv: self.course->notEmpty()",
                     "each student takes at least one course", "university",
                     model_text("university")});
  records.push_back({"s4", "context Keeper inv: self.cage->size() <= 5",
                     "a keeper cleans at most five cages", "zoo", model_text("zoo")});
  return records;
}

// Unique scratch directory under the build tree's temp space.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static std::atomic<unsigned> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("oclrag-" + tag + "-" + std::to_string(::getpid()) + "-" +
             std::to_string(counter.fetch_add(1)));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path file(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline std::filesystem::path write_dataset_file(const TempDir& dir,
                                                const std::vector<DatasetRecord>& records,
                                                const std::string& name = "dataset.jsonl") {
  const auto path = dir.file(name);
  std::ofstream out(path);
  for (const DatasetRecord& r : records) {
    // Hand-rolled JSON keeps this writer independent of the parser under test.
    auto escape = [](const std::string& s) {
      std::string escaped;
      for (char c : s) {
        switch (c) {
          case '"': escaped += "\\\""; break;
          case '\\': escaped += "\\\\"; break;
          case '\n': escaped += "\\n"; break;
          case '\t': escaped += "\\t"; break;
          default: escaped += c;
        }
      }
      return escaped;
    };
    out << "{\"id\":\"" << escape(r.sample_id) << "\",\"ocl\":\"" << escape(r.ocl_rule)
        << "\",\"spec\":\"" << escape(r.nl_spec) << "\",\"model\":\"" << escape(r.model_name)
        << "\",\"plantuml\":\"" << escape(r.plantuml_text) << "\"}\n";
  }
  return path;
}

// Deterministic junk strings over a whitespace-heavy alphabet.
inline std::string random_noisy_string(std::mt19937_64& gen, std::size_t max_len = 60) {
  static const std::string alphabet =
      "abcdefgh XYZ\t\n\r  {}:;.->*o_0123456789\n\tclass enum association ";
  const std::size_t len = gen() % (max_len + 1);
  std::string s;
  s.reserve(len);
  for (std::size_t i = 0; i < len; ++i) s.push_back(alphabet[gen() % alphabet.size()]);
  return s;
}

}  // namespace oclrag::testing
