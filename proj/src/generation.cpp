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

#include "oclrag/generation.hpp"

#include <cctype>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "internal/http.hpp"

namespace oclrag {

namespace {

using nlohmann::json;

constexpr std::string_view kContextMarker = "The meta-model information is: ";
constexpr std::string_view kSpecMarker = "\nThe natural language specification is: ";

std::string trim(std::string_view s) {
  std::size_t begin = 0;
  std::size_t end = s.size();
  while (begin < end && std::isspace(static_cast<unsigned char>(s[begin]))) ++begin;
  while (end > begin && std::isspace(static_cast<unsigned char>(s[end - 1]))) --end;
  return std::string(s.substr(begin, end - begin));
}

void replace_once(std::string& text, std::string_view placeholder, std::string_view value) {
  const std::size_t pos = text.find(placeholder);
  text.replace(pos, placeholder.size(), value);
}

}  // namespace

PromptSpec build_prompt(std::string_view context_text, std::string_view nl_spec) {
  if (nl_spec.empty()) {
    raise(ErrorCode::EmptySpecification, "the natural language specification must be non-empty");
  }
  PromptSpec spec;
  spec.context_text = std::string(context_text);
  spec.nl_spec = std::string(nl_spec);
  spec.rendered = std::string(kPromptTemplate);
  replace_once(spec.rendered, kContextPlaceholder, context_text);
  replace_once(spec.rendered, kSpecPlaceholder, nl_spec);
  return spec;
}

GenerationRecord generate_ocl(const PromptSpec& prompt, LlmClient& client,
                              const GenerationConfig& config) {
  LlmRequest request;
  request.system = config.system_role_text;
  request.prompt = prompt.rendered;
  request.max_tokens = config.max_output_tokens;
  request.greedy = true;

  const auto start = std::chrono::steady_clock::now();
  const LlmResponse response = client.complete(request);
  const auto elapsed = std::chrono::steady_clock::now() - start;

  GenerationRecord record;
  record.prompt = prompt.rendered;
  record.output_ocl = trim(response.text);
  record.truncated = response.truncated;
  record.latency_ms = std::chrono::duration_cast<std::chrono::milliseconds>(elapsed).count();
  return record;
}

std::string context_slot_of(std::string_view rendered_prompt) {
  const std::size_t begin = rendered_prompt.find(kContextMarker);
  const std::size_t end = rendered_prompt.find(kSpecMarker);
  if (begin == std::string_view::npos || end == std::string_view::npos || end < begin) {
    return std::string(rendered_prompt);
  }
  const std::size_t slot = begin + kContextMarker.size();
  return std::string(rendered_prompt.substr(slot, end - slot));
}

std::string spec_slot_of(std::string_view rendered_prompt) {
  const std::size_t pos = rendered_prompt.find(kSpecMarker);
  if (pos == std::string_view::npos) return std::string(rendered_prompt);
  return std::string(rendered_prompt.substr(pos + kSpecMarker.size()));
}

LlmResponse EchoMockClient::complete(const LlmRequest& request) {
  const std::string context = context_slot_of(request.prompt);
  if (!context.empty()) return LlmResponse{context, false};
  return LlmResponse{spec_slot_of(request.prompt), false};
}

CannedMockClient::CannedMockClient(std::map<std::string, std::string> canned,
                                   std::string fallback)
    : canned_(std::move(canned)), fallback_(std::move(fallback)) {}

LlmResponse CannedMockClient::complete(const LlmRequest& request) {
  const std::string spec = spec_slot_of(request.prompt);
  if (auto it = canned_.find(spec); it != canned_.end()) {
    return LlmResponse{it->second, false};
  }
  return LlmResponse{fallback_, false};
}

RemoteLlmClient::RemoteLlmClient(RemoteEndpoint endpoint, int min_interval_ms)
    : endpoint_(std::move(endpoint)), min_interval_ms_(min_interval_ms) {
  internal::parse_http_url(endpoint_.url);
}

std::string RemoteLlmClient::id() const { return "llm-remote-" + endpoint_.url; }

LlmResponse RemoteLlmClient::complete(const LlmRequest& request) {
  if (min_interval_ms_ > 0) {
    std::lock_guard<std::mutex> lock(throttle_mutex_);
    const auto now = std::chrono::steady_clock::now();
    const auto next_allowed = last_call_ + std::chrono::milliseconds(min_interval_ms_);
    if (last_call_.time_since_epoch().count() != 0 && now < next_allowed) {
      std::this_thread::sleep_until(next_allowed);
    }
    last_call_ = std::chrono::steady_clock::now();
  }

  const internal::ParsedUrl url = internal::parse_http_url(endpoint_.url);
  httplib::Client client(url.base);
  client.set_connection_timeout(endpoint_.timeout_ms / 1000, (endpoint_.timeout_ms % 1000) * 1000);
  client.set_read_timeout(endpoint_.timeout_ms / 1000, (endpoint_.timeout_ms % 1000) * 1000);
  httplib::Headers headers;
  if (!endpoint_.auth_token.empty()) {
    headers.emplace("Authorization", "Bearer " + endpoint_.auth_token);
  }

  const json body = {{"system", request.system},
                     {"prompt", request.prompt},
                     {"max_tokens", request.max_tokens},
                     {"greedy", request.greedy}};

  const auto start = std::chrono::steady_clock::now();
  auto res = client.Post(url.path, headers, body.dump(), "application/json");
  if (!res) {
    const auto elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(
                             std::chrono::steady_clock::now() - start)
                             .count();
    if (res.error() == httplib::Error::ConnectionTimeout || elapsed >= endpoint_.timeout_ms) {
      raise(ErrorCode::ClientTimeout, "LLM call exceeded the " +
                                          std::to_string(endpoint_.timeout_ms) + " ms budget");
    }
    raise(ErrorCode::ClientUnavailable,
          "POST " + endpoint_.url + " failed: " + httplib::to_string(res.error()));
  }
  if (res->status != 200) {
    raise(ErrorCode::ClientUnavailable,
          "POST " + endpoint_.url + " returned status " + std::to_string(res->status));
  }
  json parsed = json::parse(res->body, nullptr, false);
  if (parsed.is_discarded() || !parsed.is_object() || !parsed.contains("text")) {
    raise(ErrorCode::ClientUnavailable, "malformed completion payload from " + endpoint_.url);
  }
  return LlmResponse{parsed["text"].get<std::string>(), parsed.value("truncated", false)};
}

}  // namespace oclrag
