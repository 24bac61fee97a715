/*
 * Copyright (c) 2026, The coordet Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "coordet/datamodel.hpp"
#include "coordet/graph.hpp"

namespace coordet {

/// Dense row-per-entity table with unique row ids and a fixed width.
class EmbeddingMatrix {
 public:
  EmbeddingMatrix() = default;
  /// Zero-initialized.
  EmbeddingMatrix(std::vector<std::string> row_ids, std::size_t dim);
  /// Throws DimensionMismatch if values.size() != rows*dim, InvalidArgument on
  /// duplicate ids or non-finite values.
  EmbeddingMatrix(std::vector<std::string> row_ids, std::size_t dim, std::vector<double> values);

  std::size_t rows() const noexcept { return row_ids_.size(); }
  std::size_t dim() const noexcept { return dim_; }
  const std::vector<std::string>& row_ids() const noexcept { return row_ids_; }
  const std::vector<double>& values() const noexcept { return values_; }

  std::span<const double> row(std::size_t i) const { return {values_.data() + i * dim_, dim_}; }
  std::span<double> row(std::size_t i) { return {values_.data() + i * dim_, dim_}; }
  double operator()(std::size_t r, std::size_t c) const { return values_[r * dim_ + c]; }
  double& operator()(std::size_t r, std::size_t c) { return values_[r * dim_ + c]; }

  std::optional<std::size_t> index_of(std::string_view id) const;
  bool contains(std::string_view id) const { return index_of(id).has_value(); }

  /// Rows reordered (or sub-selected) to `ids`. Throws MissingRows.
  EmbeddingMatrix select(std::span<const std::string> ids) const;
  bool all_finite() const noexcept;

  friend bool operator==(const EmbeddingMatrix& a, const EmbeddingMatrix& b) {
    return a.dim_ == b.dim_ && a.row_ids_ == b.row_ids_ && a.values_ == b.values_;
  }

 private:
  void build_index();

  std::vector<std::string> row_ids_;
  std::size_t dim_ = 0;
  std::vector<double> values_;
  std::unordered_map<std::string, std::size_t> index_;
};

double dot(std::span<const double> a, std::span<const double> b) noexcept;
double squared_distance(std::span<const double> a, std::span<const double> b) noexcept;
/// Zero when either vector is zero.
double cosine_similarity(std::span<const double> a, std::span<const double> b) noexcept;

/// Text table: header `dim=<d> count=<n>`, then `id v1 ... vd` per row.
/// Values are written in shortest round-trip form, so read(write(m)) == m.
void write_embeddings(const EmbeddingMatrix& m, const std::filesystem::path& path);
EmbeddingMatrix read_embeddings(const std::filesystem::path& path);

struct SgnsConfig {
  std::size_t dim = 64;
  std::size_t window = 5;
  std::size_t negatives = 5;
  std::size_t epochs = 5;
  double learning_rate = 0.025;
  std::uint64_t seed = 42;
  /// 1 = deterministic single-threaded training. More threads use lock-free
  /// concurrent updates and are not reproducible run to run.
  std::size_t threads = 1;

  void validate() const;
};

struct TokenCorpus {
  std::vector<std::string> vocabulary;
  std::vector<std::vector<std::uint32_t>> sequences;
};

TokenCorpus to_token_corpus(const WalkCorpus& walks);

struct SgnsModel {
  EmbeddingMatrix vectors;          // input vectors, one row per vocabulary token
  std::vector<double> epoch_loss;   // mean negative-sampling loss per epoch
};

/// Skip-gram with negative sampling. Throws DegenerateVocabulary when fewer
/// than two distinct tokens occur in the corpus.
SgnsModel train_sgns(const TokenCorpus& corpus, const SgnsConfig& cfg);

/// Lowercase (ASCII), drop URLs, split on Unicode whitespace. Hashtags and
/// other punctuation are kept as part of their token.
std::vector<std::string> tokenize(std::string_view text);

struct PvDbowModel {
  EmbeddingMatrix documents;  // one row per post id; empty-text posts are zero
  EmbeddingMatrix words;      // one row per vocabulary word
  std::vector<double> epoch_loss;
};

/// Paragraph vectors, distributed bag of words: each post's vector is trained
/// to predict the post's words, with interleaved skip-gram word training so
/// that word vectors live in the same space.
PvDbowModel pv_dbow(const Dataset& ds, const SgnsConfig& cfg);

/// Reads sentence vectors produced outside this library, either the text
/// table (optionally `format=binary` in the header, then per row the id, a
/// space and dim little-endian float32 values) or JSON-lines `{id, vector}`.
/// Rows come back in `expected_ids` order. Throws MissingRows or
/// DimensionMismatch.
EmbeddingMatrix load_external_embeddings(const std::filesystem::path& path,
                                         std::span<const std::string> expected_ids);

struct PcaResult {
  EmbeddingMatrix reduced;
  std::vector<double> mean;
  /// target_dim x dim, row-major; rows past `rank` are zero.
  std::vector<double> components;
  std::vector<double> explained_variance;
  std::vector<double> explained_variance_ratio;
  /// Number of components with non-negligible variance.
  std::size_t rank = 0;
  /// Components padded with zeros because the data has lower rank.
  std::size_t padded = 0;
};

/// Centers and projects onto the top target_dim principal directions.
/// Requires target_dim <= min(rows, dim).
PcaResult pca_reduce(const EmbeddingMatrix& m, std::size_t target_dim);

/// Like pca_reduce, but when target_dim exceeds min(rows, dim) reduces to that
/// bound and zero-pads to target_dim.
EmbeddingMatrix reduce_to_width(const EmbeddingMatrix& m, std::size_t target_dim);

/// Scales each row to unit length; zero rows stay zero.
EmbeddingMatrix l2_normalize_rows(const EmbeddingMatrix& m);

/// Reduces both inputs to target_dim, L2-normalizes each half row-wise and
/// concatenates (text first). Rows follow `text`'s order. Throws RowMismatch
/// if the id sets differ.
EmbeddingMatrix concat_align(const EmbeddingMatrix& text, const EmbeddingMatrix& network, std::size_t target_dim);

/// Single-modality counterpart of concat_align: reduce, then normalize.
EmbeddingMatrix align_single(const EmbeddingMatrix& m, std::size_t target_dim);

}  // namespace coordet
