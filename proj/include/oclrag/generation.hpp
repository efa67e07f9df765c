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

#include <chrono>
#include <cstdint>
#include <map>
#include <mutex>
#include <string>
#include <string_view>

#include "oclrag/retrieval.hpp"

namespace oclrag {

/// The generation prompt. The two placeholders are the only variable parts.
inline constexpr std::string_view kPromptTemplate =
    "You are given a meta-model with information about classes, associations and their "
    "attributes.\n"
    "You are also given a natural language specification.\n"
    "Your task is to generate an OCL (Object Constraint Language) constraint for this "
    "specification and based on the meta-model.\n"
    "Do not provide any explanations or additional text.\n"
    "The meta-model information is: {retrieved chunks}\n"
    "The natural language specification is: {specification}";

inline constexpr std::string_view kContextPlaceholder = "{retrieved chunks}";
inline constexpr std::string_view kSpecPlaceholder = "{specification}";

struct PromptSpec {
  std::string context_text;
  std::string nl_spec;
  std::string rendered;
};

/// Renders the template with the two placeholders substituted. An empty
/// context is legal (the no-retrieval baseline) and leaves the meta-model
/// sentence's slot empty; an empty specification is an error.
PromptSpec build_prompt(std::string_view context_text, std::string_view nl_spec);

/// Decoding is always greedy; only the output length cap and the system
/// message are configurable.
struct GenerationConfig {
  int max_output_tokens = 1024;
  std::string system_role_text;
};

struct LlmRequest {
  std::string system;
  std::string prompt;
  int max_tokens = 1024;
  bool greedy = true;
};

struct LlmResponse {
  std::string text;
  bool truncated = false;  // output hit the length cap
};

class LlmClient {
 public:
  virtual ~LlmClient() = default;
  virtual std::string id() const = 0;
  virtual LlmResponse complete(const LlmRequest& request) = 0;
};

struct GenerationRecord {
  std::string sample_id;
  RetrieverId retriever_id = RetrieverId::None;
  int k = 0;
  std::string prompt;
  std::string output_ocl;
  std::int64_t latency_ms = 0;
  bool truncated = false;
};

/// Sends the rendered prompt (plus the configured system text) to the
/// client and records the whitespace-trimmed completion. Provenance fields
/// (sample, retriever, k) are the caller's to fill.
GenerationRecord generate_ocl(const PromptSpec& prompt, LlmClient& client,
                              const GenerationConfig& config);

/// Test double that echoes the retrieved context back, making end-to-end
/// output depend on retrieval alone. The baseline prompt carries no
/// context, so there it echoes the specification instead, keeping the
/// output non-empty for downstream scoring.
class EchoMockClient final : public LlmClient {
 public:
  std::string id() const override { return "echo-mock"; }
  LlmResponse complete(const LlmRequest& request) override;
};

/// Test double with canned completions keyed by the prompt's specification
/// slot; unknown specifications get the fallback text.
class CannedMockClient final : public LlmClient {
 public:
  explicit CannedMockClient(std::map<std::string, std::string> canned,
                            std::string fallback = "context Thing inv: true");

  std::string id() const override { return "canned-mock"; }
  LlmResponse complete(const LlmRequest& request) override;

 private:
  std::map<std::string, std::string> canned_;
  std::string fallback_;
};

/// Completion endpoint over the wire: POST {system, prompt, max_tokens,
/// greedy} and expect {text, truncated}. Transport failures raise
/// ClientUnavailable, or ClientTimeout once the budget has elapsed. An
/// optional minimum interval between calls throttles shared endpoints.
class RemoteLlmClient final : public LlmClient {
 public:
  RemoteLlmClient(RemoteEndpoint endpoint, int min_interval_ms = 0);

  std::string id() const override;
  LlmResponse complete(const LlmRequest& request) override;

 private:
  RemoteEndpoint endpoint_;
  int min_interval_ms_;
  std::mutex throttle_mutex_;
  std::chrono::steady_clock::time_point last_call_{};
};

/// Extracts the text of the prompt slot between the meta-model and
/// specification sentences; used by mocks and by anything that needs to
/// invert build_prompt.
std::string context_slot_of(std::string_view rendered_prompt);
std::string spec_slot_of(std::string_view rendered_prompt);

}  // namespace oclrag
