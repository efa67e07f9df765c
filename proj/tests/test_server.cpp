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
#include <httplib.h>
#include <json.hpp>

#include "oclrag/server.hpp"
#include "support/fixtures.hpp"

using namespace oclrag;
using nlohmann::json;
using oclrag::testing::TempDir;

namespace {

struct RunningServer {
  explicit RunningServer(const ExperimentConfig& config) : server(config) {
    port = server.start_async();
  }
  json post(const std::string& path, const json& body, int* status = nullptr) {
    httplib::Client client("127.0.0.1", port);
    auto res = client.Post(path, body.dump(), "application/json");
    REQUIRE(res);
    if (status != nullptr) *status = res->status;
    return json::parse(res->body);
  }

  ApiServer server;
  int port = 0;
};

ExperimentConfig service_config(const TempDir& dir) {
  ExperimentConfig config;
  config.dataset_path =
      write_dataset_file(dir, oclrag::testing::fixture_records()).string();
  config.llm.kind = LlmSpec::Kind::EchoMock;
  config.dense_provider.dim = 64;
  config.eval_provider.dim = 64;
  return config;
}

}  // namespace

TEST_SUITE_BEGIN("server");

TEST_CASE("health reports the model count") {
  TempDir dir("srv-health");
  RunningServer running(service_config(dir));
  httplib::Client client("127.0.0.1", running.port);
  auto res = client.Get("/health");
  REQUIRE(res);
  CHECK(res->status == 200);
  const json body = json::parse(res->body);
  CHECK(body["status"] == "ok");
  CHECK(body["models"] == 5);
}

TEST_CASE("retrieve returns scored chunks; k = 0 passes the baseline through") {
  TempDir dir("srv-retrieve");
  RunningServer running(service_config(dir));

  const json empty = running.post(
      "/retrieve", {{"model", "library"}, {"spec", "book titles"}, {"retriever", "bm25"}, {"k", 0}});
  CHECK(empty["chunks"].empty());

  const json top = running.post(
      "/retrieve", {{"model", "library"}, {"spec", "book titles"}, {"retriever", "bm25"}, {"k", 2}});
  REQUIRE(top["chunks"].size() == 2);
  CHECK(top["chunks"][0]["rank"] == 1);
  CHECK(top["chunks"][0]["text"].get<std::string>().find("Book") != std::string::npos);
}

TEST_CASE("generate answers with ocl, chunks and the prompt") {
  TempDir dir("srv-generate");
  RunningServer running(service_config(dir));

  const json body = running.post(
      "/generate",
      {{"model", "library"}, {"spec", "every book has a title"}, {"retriever", "bm25"}, {"k", 1}});
  REQUIRE(body.contains("ocl"));
  REQUIRE(body["chunks"].size() == 1);
  // echo-mock: the generated text is the retrieved context
  CHECK(body["ocl"] == body["chunks"][0]);
  CHECK(body["prompt"].get<std::string>().find("every book has a title") != std::string::npos);
}

TEST_CASE("unknown models map to a client-error payload, service stays up") {
  TempDir dir("srv-errors");
  RunningServer running(service_config(dir));

  int status = 0;
  const json error = running.post(
      "/generate", {{"model", "no-such"}, {"spec", "x"}, {"retriever", "bm25"}, {"k", 1}},
      &status);
  CHECK(status == 400);
  CHECK(error["error"] == "UnknownModel");
  CHECK(error.contains("detail"));

  // malformed body is also a client error
  httplib::Client client("127.0.0.1", running.port);
  auto res = client.Post("/retrieve", "not json", "application/json");
  REQUIRE(res);
  CHECK(res->status == 400);

  // and the service still answers
  auto health = client.Get("/health");
  REQUIRE(health);
  CHECK(health->status == 200);
}

TEST_CASE("pathocl retrievers work over the wire") {
  TempDir dir("srv-path");
  RunningServer running(service_config(dir));
  const json body = running.post(
      "/retrieve",
      {{"model", "zoo"}, {"spec", "keepers clean cages"}, {"retriever", "pathocl-jaccard"}, {"k", 1}});
  CHECK(!body["chunks"].empty());
}

TEST_SUITE_END();
