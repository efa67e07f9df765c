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

#include "oclrag/server.hpp"

#include <httplib.h>
#include <json.hpp>

namespace oclrag {

namespace {

using nlohmann::json;

// 4xx for caller mistakes, 502 for broken upstreams, 500 otherwise.
int status_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::UnknownModel:
    case ErrorCode::EmptySpecification:
    case ErrorCode::InvalidArgument:
    case ErrorCode::InvalidConfig:
    case ErrorCode::EmptyText:
      return 400;
    case ErrorCode::ProviderUnavailable:
    case ErrorCode::ClientUnavailable:
    case ErrorCode::ClientTimeout:
      return 502;
    default:
      return 500;
  }
}

void reply_error(httplib::Response& res, ErrorCode code, const std::string& detail) {
  res.status = status_for(code);
  res.set_content(json{{"error", std::string(to_string(code))}, {"detail", detail}}.dump(),
                  "application/json");
}

struct ParsedRequest {
  std::string model;
  std::string spec;
  RetrieverId retriever = RetrieverId::None;
  int k = 0;
};

ParsedRequest parse_request(const std::string& body) {
  json obj = json::parse(body, nullptr, false);
  if (obj.is_discarded() || !obj.is_object()) {
    raise(ErrorCode::InvalidArgument, "request body must be a JSON object");
  }
  ParsedRequest req;
  if (!obj.contains("model") || !obj["model"].is_string()) {
    raise(ErrorCode::InvalidArgument, "missing string field 'model'");
  }
  if (!obj.contains("spec") || !obj["spec"].is_string()) {
    raise(ErrorCode::InvalidArgument, "missing string field 'spec'");
  }
  req.model = obj["model"].get<std::string>();
  req.spec = obj["spec"].get<std::string>();
  req.retriever = retriever_from_string(obj.value("retriever", "none"));
  req.k = obj.value("k", 0);
  if (req.k < 0) raise(ErrorCode::InvalidArgument, "'k' must be non-negative");
  return req;
}

json chunks_to_json(const std::vector<ScoredChunk>& chunks) {
  json arr = json::array();
  for (const ScoredChunk& sc : chunks) {
    arr.push_back(json{{"rank", sc.rank},
                       {"score", sc.score},
                       {"index", sc.chunk.index},
                       {"kind", std::string(to_string(sc.chunk.kind))},
                       {"text", sc.chunk.text}});
  }
  return arr;
}

}  // namespace

struct ApiServer::Impl {
  KnowledgeBase kb;
  std::shared_ptr<DenseProvider> dense;
  std::unique_ptr<SparseEncoderProvider> sparse;
  std::unique_ptr<LlmClient> llm;
  GenerationConfig generation;
  PathBudget budget;
  RetrieverContext ctx;
  httplib::Server server;
  std::thread worker;

  explicit Impl(const ExperimentConfig& config) {
    if (!config.kb_path.empty() && std::filesystem::exists(config.kb_path)) {
      kb = load_kb(config.kb_path);
    } else if (!config.dataset_path.empty()) {
      kb = build_kb(parse_dataset(config.dataset_path), config.dataset_path);
    } else {
      raise(ErrorCode::InvalidConfig, "the service needs a knowledge base or a dataset");
    }
    dense = make_dense_provider(config.dense_provider);
    sparse = make_sparse_provider(config.sparse_provider);
    llm = make_llm_client(config.llm);
    generation = config.generation;
    budget = config.path_budget;
    ctx.bm25 = config.bm25;
    ctx.dense = dense.get();
    ctx.sparse = sparse.get();
    wire_routes();
  }

  void wire_routes() {
    server.Get("/health", [this](const httplib::Request&, httplib::Response& res) {
      res.set_content(json{{"status", "ok"}, {"models", kb.models.size()}}.dump(),
                      "application/json");
    });

    server.Post("/retrieve", [this](const httplib::Request& req, httplib::Response& res) {
      handle(res, [&]() -> json {
        const ParsedRequest parsed = parse_request(req.body);
        const RetrievedContext retrieved = retrieve_context(
            parsed.spec, parsed.model, parsed.retriever, parsed.k, kb, ctx, budget);
        return json{{"chunks", chunks_to_json(retrieved.chunks)}};
      });
    });

    server.Post("/generate", [this](const httplib::Request& req, httplib::Response& res) {
      handle(res, [&]() -> json {
        const ParsedRequest parsed = parse_request(req.body);
        const RetrievedContext retrieved = retrieve_context(
            parsed.spec, parsed.model, parsed.retriever, parsed.k, kb, ctx, budget);
        const PromptSpec prompt = build_prompt(retrieved.context_text, parsed.spec);
        const GenerationRecord record = generate_ocl(prompt, *llm, generation);
        json chunk_texts = json::array();
        for (const ScoredChunk& sc : retrieved.chunks) chunk_texts.push_back(sc.chunk.text);
        return json{{"ocl", record.output_ocl},
                    {"chunks", chunk_texts},
                    {"prompt", record.prompt}};
      });
    });
  }

  static void handle(httplib::Response& res, const std::function<json()>& body) {
    try {
      res.set_content(body().dump(), "application/json");
    } catch (const Error& e) {
      reply_error(res, e.code(), e.what());
    } catch (const std::exception& e) {
      reply_error(res, ErrorCode::InvalidArgument, e.what());
    }
  }
};

ApiServer::ApiServer(const ExperimentConfig& config) : impl_(std::make_unique<Impl>(config)) {}

ApiServer::~ApiServer() { stop(); }

void ApiServer::serve(int port) {
  if (!impl_->server.listen("0.0.0.0", port)) {
    raise(ErrorCode::IoFailure, "cannot listen on port " + std::to_string(port));
  }
}

int ApiServer::start_async(int port) {
  int bound = port;
  if (port == 0) {
    bound = impl_->server.bind_to_any_port("127.0.0.1");
    if (bound < 0) raise(ErrorCode::IoFailure, "cannot bind an ephemeral port");
  } else if (!impl_->server.bind_to_port("127.0.0.1", port)) {
    raise(ErrorCode::IoFailure, "cannot bind port " + std::to_string(port));
  }
  impl_->worker = std::thread([this]() { impl_->server.listen_after_bind(); });
  impl_->server.wait_until_ready();
  return bound;
}

void ApiServer::stop() {
  if (!impl_) return;
  impl_->server.stop();
  if (impl_->worker.joinable()) impl_->worker.join();
}

void serve_api(const ExperimentConfig& config, int port) {
  ApiServer server(config);
  server.serve(port);
}

}  // namespace oclrag
