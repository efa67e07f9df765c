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

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "oclrag/error.hpp"

namespace oclrag {

using DenseVector = std::vector<double>;

/// Term -> weight map; entries are strictly positive by construction.
using SparseVector = std::map<std::string, double>;

/// 64-bit FNV-1a. Stable across platforms, unlike std::hash.
constexpr std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

/// dot(u,v) / (|u||v|). Throws DimensionMismatch on unequal dims and
/// ZeroVector when either vector has zero norm.
double cosine_similarity(const DenseVector& u, const DenseVector& v);

/// sqrt(sum((u_i - v_i)^2)). Throws DimensionMismatch on unequal dims.
double euclidean_distance(const DenseVector& u, const DenseVector& v);

/// Sum over shared terms of a(t) * b(t).
double sparse_dot(const SparseVector& a, const SparseVector& b);

class DenseProvider {
 public:
  virtual ~DenseProvider() = default;
  virtual std::string id() const = 0;
  virtual std::size_t dim() const = 0;
  /// One vector per text, same order. Deterministic per provider instance.
  virtual std::vector<DenseVector> embed(const std::vector<std::string>& texts) = 0;
};

/// Validating front door for dense embedding: rejects empty input lists and
/// enforces the provider's advertised dimension (DimensionMismatch).
std::vector<DenseVector> embed_dense(DenseProvider& provider,
                                     const std::vector<std::string>& texts);

/// Deterministic stand-in for a neural sentence encoder: token unigrams and
/// bigrams are feature-hashed into a fixed-width vector with signed hashing
/// and tf weights, then L2-normalized.
class HashingDenseEmbedder final : public DenseProvider {
 public:
  explicit HashingDenseEmbedder(std::size_t dim = 256);

  std::string id() const override;
  std::size_t dim() const override { return dim_; }
  std::vector<DenseVector> embed(const std::vector<std::string>& texts) override;

 private:
  std::size_t dim_;
};

class SparseEncoder {
 public:
  virtual ~SparseEncoder() = default;
  virtual std::string id() const = 0;
  /// One sparse vector per text, same order. Deterministic per instance.
  virtual std::vector<SparseVector> encode(const std::vector<std::string>& texts) = 0;
};

/// Validating front door for sparse encoding; rejects empty input lists.
std::vector<SparseVector> encode_sparse(SparseEncoder& encoder,
                                        const std::vector<std::string>& texts);

/// Corpus-fitted tf-idf encoder, the desk-scale surrogate for a learned
/// sparse encoder. Weight of term t in document D is
/// tf(t,D) * ln((N - df(t) + 0.5) / (df(t) + 0.5) + 1) over the fitting
/// corpus; non-positive weights are dropped. Immutable once fitted.
class TfidfSparseEncoder final : public SparseEncoder {
 public:
  TfidfSparseEncoder() = default;

  void fit(const std::vector<std::string>& corpus_docs);
  bool fitted() const { return fitted_; }

  std::string id() const override;
  /// Throws EncoderNotFitted before fit() has run.
  std::vector<SparseVector> encode(const std::vector<std::string>& texts) override;

 private:
  std::unordered_map<std::string, std::size_t> df_;
  std::size_t corpus_size_ = 0;
  bool fitted_ = false;
};

/// Hands out a sparse encoder scoped to one candidate corpus. The surrogate
/// fits tf-idf statistics on it; remote encoders ignore it.
class SparseEncoderProvider {
 public:
  virtual ~SparseEncoderProvider() = default;
  virtual std::string id() const = 0;
  virtual std::shared_ptr<SparseEncoder> encoder_for(
      const std::vector<std::string>& corpus_texts) = 0;
};

class SurrogateSparseProvider final : public SparseEncoderProvider {
 public:
  std::string id() const override { return "sparse-tfidf-surrogate"; }
  std::shared_ptr<SparseEncoder> encoder_for(
      const std::vector<std::string>& corpus_texts) override;
};

struct RemoteEndpoint {
  std::string url;
  std::string auth_token;
  int timeout_ms = 30000;
};

/// Dense embeddings over the wire: POST {"texts": [...]} to the endpoint,
/// expect {"vectors": [[...], ...]}. Vectors are passed through unmodified;
/// a row of the wrong width raises DimensionMismatch, transport failures
/// raise ProviderUnavailable.
class RemoteDenseProvider final : public DenseProvider {
 public:
  RemoteDenseProvider(RemoteEndpoint endpoint, std::size_t dim);

  std::string id() const override;
  std::size_t dim() const override { return dim_; }
  std::vector<DenseVector> embed(const std::vector<std::string>& texts) override;

 private:
  RemoteEndpoint endpoint_;
  std::size_t dim_;
};

/// Sparse encodings over the wire: POST {"texts": [...]}, expect
/// {"vectors": [{term: weight, ...}, ...]}. Non-positive weights are dropped
/// on ingest to keep the SparseVector invariant.
class RemoteSparseEncoder final : public SparseEncoder {
 public:
  explicit RemoteSparseEncoder(RemoteEndpoint endpoint);

  std::string id() const override;
  std::vector<SparseVector> encode(const std::vector<std::string>& texts) override;

 private:
  RemoteEndpoint endpoint_;
};

class RemoteSparseProvider final : public SparseEncoderProvider {
 public:
  explicit RemoteSparseProvider(RemoteEndpoint endpoint);

  std::string id() const override;
  std::shared_ptr<SparseEncoder> encoder_for(
      const std::vector<std::string>& corpus_texts) override;

 private:
  std::shared_ptr<RemoteSparseEncoder> encoder_;
};

/// Memoizes dense embeddings keyed by (provider id, exact text). With a
/// cache file the map is loaded up front and appended on every miss, so
/// repeated runs skip the provider entirely. Thread-safe.
class CachingDenseProvider final : public DenseProvider {
 public:
  explicit CachingDenseProvider(std::shared_ptr<DenseProvider> inner,
                                std::filesystem::path cache_file = {});

  std::string id() const override { return inner_->id(); }
  std::size_t dim() const override { return inner_->dim(); }
  std::vector<DenseVector> embed(const std::vector<std::string>& texts) override;

  std::size_t hits() const { return hits_; }
  std::size_t misses() const { return misses_; }

 private:
  std::shared_ptr<DenseProvider> inner_;
  std::filesystem::path cache_file_;
  std::unordered_map<std::string, DenseVector> cache_;
  std::mutex mutex_;
  std::size_t hits_ = 0;
  std::size_t misses_ = 0;
};

}  // namespace oclrag
