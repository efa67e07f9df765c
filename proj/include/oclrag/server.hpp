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

#include <memory>
#include <thread>

#include "oclrag/harness.hpp"

namespace oclrag {

/// Stateless HTTP front end over one immutable knowledge base:
///   GET  /health    -> {status, models}
///   POST /retrieve  {model, spec, retriever, k} -> {chunks: [...]}
///   POST /generate  {model, spec, retriever, k} -> {ocl, chunks, prompt}
/// Request failures answer {error, detail} without taking the service down.
class ApiServer {
 public:
  /// Builds the KB and the providers/client the config names.
  explicit ApiServer(const ExperimentConfig& config);
  ~ApiServer();

  ApiServer(const ApiServer&) = delete;
  ApiServer& operator=(const ApiServer&) = delete;

  /// Blocks serving on the port. Throws IoFailure when binding fails.
  void serve(int port);

  /// Binds an ephemeral (or fixed) port and serves on a background thread;
  /// returns the bound port. For tests and embedding.
  int start_async(int port = 0);
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Convenience wrapper mirroring the CLI subcommand: build and serve until
/// the process is stopped.
void serve_api(const ExperimentConfig& config, int port);

}  // namespace oclrag
