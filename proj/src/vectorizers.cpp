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

#include "oclrag/vectorizers.hpp"

#include <cmath>
#include <fstream>

#include <httplib.h>
#include <json.hpp>

#include "internal/http.hpp"
#include "oclrag/retrieval.hpp"

namespace oclrag {

namespace {

using nlohmann::json;

void check_same_dim(const DenseVector& u, const DenseVector& v) {
  if (u.size() != v.size()) {
    raise(ErrorCode::DimensionMismatch, "vector dims differ: " + std::to_string(u.size()) +
                                            " vs " + std::to_string(v.size()));
  }
}

double l2_norm(const DenseVector& v) {
  double sum = 0.0;
  for (double x : v) sum += x * x;
  return std::sqrt(sum);
}

json post_json(const RemoteEndpoint& endpoint, const json& body) {
  const internal::ParsedUrl url = internal::parse_http_url(endpoint.url);
  httplib::Client client(url.base);
  client.set_connection_timeout(endpoint.timeout_ms / 1000, (endpoint.timeout_ms % 1000) * 1000);
  client.set_read_timeout(endpoint.timeout_ms / 1000, (endpoint.timeout_ms % 1000) * 1000);
  httplib::Headers headers;
  if (!endpoint.auth_token.empty()) {
    headers.emplace("Authorization", "Bearer " + endpoint.auth_token);
  }
  auto res = client.Post(url.path, headers, body.dump(), "application/json");
  if (!res) {
    raise(ErrorCode::ProviderUnavailable,
          "POST " + endpoint.url + " failed: " + httplib::to_string(res.error()));
  }
  if (res->status != 200) {
    raise(ErrorCode::ProviderUnavailable,
          "POST " + endpoint.url + " returned status " + std::to_string(res->status));
  }
  json parsed = json::parse(res->body, nullptr, false);
  if (parsed.is_discarded()) {
    raise(ErrorCode::ProviderUnavailable, "POST " + endpoint.url + " returned invalid JSON");
  }
  return parsed;
}

const json& response_vectors(const json& response, const std::string& url, std::size_t expected) {
  auto it = response.find("vectors");
  if (it == response.end() || !it->is_array()) {
    raise(ErrorCode::ProviderUnavailable, "response from " + url + " has no 'vectors' array");
  }
  if (it->size() != expected) {
    raise(ErrorCode::ProviderUnavailable,
          "response from " + url + " has " + std::to_string(it->size()) + " vectors, expected " +
              std::to_string(expected));
  }
  return *it;
}

}  // namespace

double cosine_similarity(const DenseVector& u, const DenseVector& v) {
  check_same_dim(u, v);
  const double nu = l2_norm(u);
  const double nv = l2_norm(v);
  if (nu == 0.0 || nv == 0.0) {
    raise(ErrorCode::ZeroVector, "cosine similarity of a zero vector is undefined");
  }
  double dot = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) dot += u[i] * v[i];
  return dot / (nu * nv);
}

double euclidean_distance(const DenseVector& u, const DenseVector& v) {
  check_same_dim(u, v);
  double sum = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double d = u[i] - v[i];
    sum += d * d;
  }
  return std::sqrt(sum);
}

double sparse_dot(const SparseVector& a, const SparseVector& b) {
  // Both maps are ordered; walk them in lockstep.
  double sum = 0.0;
  auto ia = a.begin();
  auto ib = b.begin();
  while (ia != a.end() && ib != b.end()) {
    if (ia->first < ib->first) {
      ++ia;
    } else if (ib->first < ia->first) {
      ++ib;
    } else {
      sum += ia->second * ib->second;
      ++ia;
      ++ib;
    }
  }
  return sum;
}

std::vector<DenseVector> embed_dense(DenseProvider& provider,
                                     const std::vector<std::string>& texts) {
  if (texts.empty()) {
    raise(ErrorCode::InvalidArgument, "embed_dense requires at least one text");
  }
  std::vector<DenseVector> vectors = provider.embed(texts);
  if (vectors.size() != texts.size()) {
    raise(ErrorCode::ProviderUnavailable,
          "provider '" + provider.id() + "' returned " + std::to_string(vectors.size()) +
              " vectors for " + std::to_string(texts.size()) + " texts");
  }
  for (const DenseVector& v : vectors) {
    if (v.size() != provider.dim()) {
      raise(ErrorCode::DimensionMismatch,
            "provider '" + provider.id() + "' returned dim " + std::to_string(v.size()) +
                ", expected " + std::to_string(provider.dim()));
    }
    for (double x : v) {
      if (!std::isfinite(x)) {
        raise(ErrorCode::ProviderUnavailable,
              "provider '" + provider.id() + "' returned a non-finite component");
      }
    }
  }
  return vectors;
}

HashingDenseEmbedder::HashingDenseEmbedder(std::size_t dim) : dim_(dim) {
  if (dim_ == 0) raise(ErrorCode::InvalidConfig, "embedding dim must be positive");
}

std::string HashingDenseEmbedder::id() const {
  return "dense-hash-" + std::to_string(dim_);
}

std::vector<DenseVector> HashingDenseEmbedder::embed(const std::vector<std::string>& texts) {
  std::vector<DenseVector> out;
  out.reserve(texts.size());
  for (const std::string& text : texts) {
    DenseVector vec(dim_, 0.0);
    const std::vector<std::string> tokens = tokenize(text);
    auto add_feature = [&](const std::string& feature) {
      const std::uint64_t h = fnv1a64(feature);
      const double sign = (h & 1u) ? 1.0 : -1.0;
      vec[(h >> 1) % dim_] += sign;
    };
    for (std::size_t i = 0; i < tokens.size(); ++i) {
      add_feature(tokens[i]);
      if (i + 1 < tokens.size()) add_feature(tokens[i] + " " + tokens[i + 1]);
    }
    const double norm = l2_norm(vec);
    if (norm > 0.0) {
      for (double& x : vec) x /= norm;
    }
    out.push_back(std::move(vec));
  }
  return out;
}

std::vector<SparseVector> encode_sparse(SparseEncoder& encoder,
                                        const std::vector<std::string>& texts) {
  if (texts.empty()) {
    raise(ErrorCode::InvalidArgument, "encode_sparse requires at least one text");
  }
  return encoder.encode(texts);
}

void TfidfSparseEncoder::fit(const std::vector<std::string>& corpus_docs) {
  df_.clear();
  corpus_size_ = corpus_docs.size();
  for (const std::string& doc : corpus_docs) {
    std::map<std::string, int> seen;
    for (const std::string& tok : tokenize(doc)) seen[tok] = 1;
    for (const auto& [tok, _] : seen) ++df_[tok];
  }
  fitted_ = true;
}

std::string TfidfSparseEncoder::id() const {
  return "sparse-tfidf-" + std::to_string(corpus_size_);
}

std::vector<SparseVector> TfidfSparseEncoder::encode(const std::vector<std::string>& texts) {
  if (!fitted_) {
    raise(ErrorCode::EncoderNotFitted, "fit() must run before encode()");
  }
  std::vector<SparseVector> out;
  out.reserve(texts.size());
  const double n = static_cast<double>(corpus_size_);
  for (const std::string& text : texts) {
    std::map<std::string, int> tf;
    for (const std::string& tok : tokenize(text)) ++tf[tok];
    SparseVector vec;
    for (const auto& [tok, count] : tf) {
      auto it = df_.find(tok);
      if (it == df_.end()) continue;  // unknown to the fitting corpus
      const double df = static_cast<double>(it->second);
      const double idf = std::log((n - df + 0.5) / (df + 0.5) + 1.0);
      const double weight = static_cast<double>(count) * idf;
      if (weight > 0.0) vec.emplace(tok, weight);
    }
    out.push_back(std::move(vec));
  }
  return out;
}

std::shared_ptr<SparseEncoder> SurrogateSparseProvider::encoder_for(
    const std::vector<std::string>& corpus_texts) {
  auto encoder = std::make_shared<TfidfSparseEncoder>();
  encoder->fit(corpus_texts);
  return encoder;
}

RemoteDenseProvider::RemoteDenseProvider(RemoteEndpoint endpoint, std::size_t dim)
    : endpoint_(std::move(endpoint)), dim_(dim) {
  internal::parse_http_url(endpoint_.url);  // fail fast on a bad URL
  if (dim_ == 0) raise(ErrorCode::InvalidConfig, "embedding dim must be positive");
}

std::string RemoteDenseProvider::id() const {
  return "dense-remote-" + endpoint_.url;
}

std::vector<DenseVector> RemoteDenseProvider::embed(const std::vector<std::string>& texts) {
  const json response = post_json(endpoint_, json{{"texts", texts}});
  const json& rows = response_vectors(response, endpoint_.url, texts.size());
  std::vector<DenseVector> out;
  out.reserve(rows.size());
  for (const json& row : rows) {
    if (!row.is_array()) {
      raise(ErrorCode::ProviderUnavailable, "dense vector rows must be arrays");
    }
    if (row.size() != dim_) {
      raise(ErrorCode::DimensionMismatch, "remote returned dim " + std::to_string(row.size()) +
                                              ", expected " + std::to_string(dim_));
    }
    DenseVector vec;
    vec.reserve(row.size());
    for (const json& x : row) vec.push_back(x.get<double>());
    out.push_back(std::move(vec));
  }
  return out;
}

RemoteSparseEncoder::RemoteSparseEncoder(RemoteEndpoint endpoint)
    : endpoint_(std::move(endpoint)) {
  internal::parse_http_url(endpoint_.url);
}

std::string RemoteSparseEncoder::id() const {
  return "sparse-remote-" + endpoint_.url;
}

std::vector<SparseVector> RemoteSparseEncoder::encode(const std::vector<std::string>& texts) {
  const json response = post_json(endpoint_, json{{"texts", texts}});
  const json& rows = response_vectors(response, endpoint_.url, texts.size());
  std::vector<SparseVector> out;
  out.reserve(rows.size());
  for (const json& row : rows) {
    if (!row.is_object()) {
      raise(ErrorCode::ProviderUnavailable, "sparse vector rows must be objects");
    }
    SparseVector vec;
    for (const auto& [term, weight] : row.items()) {
      const double w = weight.get<double>();
      if (w > 0.0 && std::isfinite(w)) vec.emplace(term, w);
    }
    out.push_back(std::move(vec));
  }
  return out;
}

RemoteSparseProvider::RemoteSparseProvider(RemoteEndpoint endpoint)
    : encoder_(std::make_shared<RemoteSparseEncoder>(std::move(endpoint))) {}

std::string RemoteSparseProvider::id() const { return encoder_->id(); }

std::shared_ptr<SparseEncoder> RemoteSparseProvider::encoder_for(
    const std::vector<std::string>& /*corpus_texts*/) {
  return encoder_;
}

CachingDenseProvider::CachingDenseProvider(std::shared_ptr<DenseProvider> inner,
                                           std::filesystem::path cache_file)
    : inner_(std::move(inner)), cache_file_(std::move(cache_file)) {
  if (cache_file_.empty()) return;
  std::ifstream in(cache_file_);
  if (!in) return;  // no cache yet; the file appears on first write
  std::string line;
  while (std::getline(in, line)) {
    nlohmann::json obj = nlohmann::json::parse(line, nullptr, false);
    if (obj.is_discarded() || !obj.is_object()) continue;
    if (obj.value("provider", "") != inner_->id()) continue;
    DenseVector vec = obj.value("vector", DenseVector{});
    if (vec.size() != inner_->dim()) continue;
    cache_.emplace(obj.value("text", ""), std::move(vec));
  }
}

std::vector<DenseVector> CachingDenseProvider::embed(const std::vector<std::string>& texts) {
  std::vector<DenseVector> out(texts.size());
  std::vector<std::size_t> missing;
  {
    std::lock_guard<std::mutex> lock(mutex_);
    for (std::size_t i = 0; i < texts.size(); ++i) {
      auto it = cache_.find(texts[i]);
      if (it != cache_.end()) {
        out[i] = it->second;
        ++hits_;
      } else {
        missing.push_back(i);
      }
    }
  }
  if (missing.empty()) return out;

  std::vector<std::string> to_embed;
  to_embed.reserve(missing.size());
  for (std::size_t i : missing) to_embed.push_back(texts[i]);
  std::vector<DenseVector> fresh = inner_->embed(to_embed);
  if (fresh.size() != to_embed.size()) {
    raise(ErrorCode::ProviderUnavailable, "provider '" + inner_->id() + "' returned " +
                                              std::to_string(fresh.size()) + " vectors for " +
                                              std::to_string(to_embed.size()) + " texts");
  }

  std::lock_guard<std::mutex> lock(mutex_);
  misses_ += missing.size();
  std::ofstream append;
  if (!cache_file_.empty()) append.open(cache_file_, std::ios::app);
  for (std::size_t j = 0; j < missing.size(); ++j) {
    out[missing[j]] = fresh[j];
    auto [it, inserted] = cache_.emplace(texts[missing[j]], std::move(fresh[j]));
    if (inserted && append.is_open()) {
      nlohmann::json obj = {
          {"provider", inner_->id()}, {"text", it->first}, {"vector", it->second}};
      append << obj.dump() << '\n';
    }
  }
  return out;
}

}  // namespace oclrag
