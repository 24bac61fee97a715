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
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "coordet/cluster.hpp"
#include "coordet/datamodel.hpp"
#include "coordet/embed.hpp"
#include "coordet/error.hpp"
#include "coordet/eval.hpp"
#include "coordet/graph.hpp"

namespace coordet {

enum class TextRoute { pvdbow, external };
enum class NetworkRoute { none, n2v, mp2v };

std::string_view to_string(TextRoute r) noexcept;
std::string_view to_string(NetworkRoute r) noexcept;

/// One row of the ablation table, e.g. "BERTopic+PostTime+N2V".
struct MethodConfig {
  TextRoute text = TextRoute::pvdbow;
  NetworkRoute network = NetworkRoute::none;
  bool temporal = false;

  std::string name() const;
  /// Inverse of name(); throws Config on anything else.
  static MethodConfig parse(std::string_view name);
  /// The twelve rows in table order: network-major, then text, then time.
  static std::vector<MethodConfig> table2_grid();

  friend bool operator==(const MethodConfig&, const MethodConfig&) = default;
};

/// Flat key-value configuration; see `to_entries()` for the key list and
/// defaults.
struct PipelineConfig {
  std::filesystem::path posts;
  std::filesystem::path videos;
  std::filesystem::path channels;
  /// Sentence vectors for the external text route.
  std::filesystem::path external_vectors;
  std::filesystem::path output_dir = "coordet-out";

  MethodConfig method{TextRoute::pvdbow, NetworkRoute::n2v, true};
  IngestConfig ingest;

  SgnsConfig text_sgns;
  WalkConfig walks;
  std::string metapaths = MetaPathSet::defaults().to_string();
  SgnsConfig node_sgns{.dim = 128};
  std::size_t align_dim = 64;

  /// 0 picks ceil(sqrt(N / 2)).
  std::size_t kmeans_k = 0;
  std::size_t kmeans_max_iterations = 300;
  HdbscanParams hdbscan;
  TemporalParams temporal;

  std::size_t topic_candidates = 30;
  std::size_t topic_top_n = 10;
  double mmr_lambda = 0.5;
  std::size_t channels_top_n = 10;

  std::uint64_t seed = 42;
  std::size_t threads = 1;
  /// Reuse embeddings from <output_dir>/cache.
  bool cache = true;

  /// Every key with its current value, in documentation order.
  std::vector<std::pair<std::string, std::string>> to_entries() const;
  /// Sets one key; throws Config for unknown keys or unparsable values.
  void set(std::string_view key, std::string_view value);
  /// Reads `key = value` lines; '#' starts a comment.
  static PipelineConfig load(const std::filesystem::path& path);
  std::string to_text() const;
  /// SHA-256 over the entries that influence results (everything except
  /// output_dir and cache).
  std::string hash() const;
  /// Throws Config on inconsistent settings.
  void validate() const;
};

/// Raised when a pipeline stage fails; keeps the original kind.
class StageError : public Error {
 public:
  StageError(std::string stage, const Error& cause);
  const std::string& stage() const noexcept { return stage_; }

 private:
  std::string stage_;
};

/// Hex SHA-256 digest.
std::string sha256_hex(std::string_view data);
std::string sha256_file(const std::filesystem::path& path);

/// Digest of every record field of a dataset, independent of file layout.
std::string dataset_fingerprint(const Dataset& ds);

/// Lazily computes and memoizes the embeddings one dataset needs across
/// several method variants. With a cache directory, matrices are also stored
/// on disk keyed by the dataset fingerprint and the relevant settings.
class EmbeddingStore {
 public:
  EmbeddingStore(const Dataset& ds, const PipelineConfig& cfg, std::optional<std::filesystem::path> cache_dir);

  const HeteroGraph& graph();
  const PvDbowModel& pvdbow();
  /// Post rows of the chosen text route.
  const EmbeddingMatrix& text(TextRoute route);
  /// Post rows of the chosen network route (not valid for `none`).
  const EmbeddingMatrix& network(NetworkRoute route);
  /// Aligned features the semantic clustering runs on.
  EmbeddingMatrix features(TextRoute text, NetworkRoute network);

 private:
  const Dataset& ds_;
  const PipelineConfig& cfg_;
  std::optional<std::filesystem::path> cache_dir_;
  std::string fingerprint_;
  std::optional<HeteroGraph> graph_;
  std::optional<PvDbowModel> pvdbow_;
  std::map<int, EmbeddingMatrix> text_;
  std::map<int, EmbeddingMatrix> network_;
};

struct SemanticResult {
  ClusterAssignment assignment;
  /// k used by k-means; 0 for density clustering.
  std::size_t k = 0;
};

/// K-means for the PV-DBOW route, HDBSCAN for the external route.
SemanticResult semantic_clustering(const EmbeddingMatrix& features, TextRoute text, const PipelineConfig& cfg);

struct StageRecord {
  std::string name;
  std::filesystem::path artifact;  // relative to output_dir
  std::string sha256;
  double seconds = 0.0;
};

struct RunManifest {
  std::string config_hash;
  std::uint64_t seed = 0;
  std::string method;
  std::vector<StageRecord> stages;
  EvaluationReport report;
};

/// ingest -> graph -> embed -> semantic -> temporal (+ drop singletons) ->
/// topics -> evaluate. Artifacts go to cfg.output_dir together with
/// manifest.json (byte-stable) and timings.json. Failures surface as
/// StageError; artifacts of completed stages stay on disk.
RunManifest run_pipeline(const PipelineConfig& cfg);

struct AblationResult {
  std::vector<EvaluationReport> rows;
  /// Population std of factuality over every labeled post; NaN if undefined.
  double dataset_std = 0.0;
};

/// Runs every method of `grid` on one dataset, sharing embeddings. A failing
/// row records its error and the others continue.
AblationResult run_ablation(const Dataset& ds, const std::vector<MethodConfig>& grid, const PipelineConfig& cfg,
                            EmbeddingStore* store = nullptr);

struct SweepRow {
  double epsilon = 0.0;
  double fact_avg = 0.0;
  double fact_median = 0.0;
  double fact_prop0 = 0.0;
  std::size_t clusters_kept = 0;
  std::size_t posts_kept = 0;
};

/// Temporal stage re-run for each epsilon over one semantic clustering.
/// `variant` must include the temporal stage.
std::vector<SweepRow> epsilon_sweep(const Dataset& ds, const MethodConfig& variant,
                                    const std::vector<double>& epsilons, const PipelineConfig& cfg,
                                    EmbeddingStore* store = nullptr);

/// `epsilon,fact_avg,fact_median,fact_prop0,clusters_kept,posts_kept`
void write_epsilon_sweep(const std::vector<SweepRow>& rows, const std::filesystem::path& path);

}  // namespace coordet
