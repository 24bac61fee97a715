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
#include <vector>

#include "coordet/cluster.hpp"
#include "coordet/datamodel.hpp"
#include "coordet/embed.hpp"

namespace coordet {

/// Points are scored exactly up to this many non-noise rows; larger inputs
/// are scored on a seeded uniform sample of kSilhouetteSample rows.
inline constexpr std::size_t kSilhouetteExactLimit = 50000;
inline constexpr std::size_t kSilhouetteSample = 10000;

/// Mean silhouette over non-noise points, Euclidean distances on `m` (rows
/// matched by id). Points in singleton clusters score 0. Throws
/// TooFewClusters with fewer than two clusters.
double silhouette(const EmbeddingMatrix& m, const ClusterAssignment& a, std::uint64_t seed = 42);

/// Exact per-row silhouette aligned with `a`; noise rows are NaN.
std::vector<double> silhouette_samples(const EmbeddingMatrix& m, const ClusterAssignment& a);

struct FactualityStats {
  double avg = 0.0;
  double median = 0.0;
  /// Population std of the per-cluster stds.
  double std = 0.0;
  /// Share of qualifying clusters whose labeled members all have one score.
  double prop0 = 0.0;
  std::size_t qualifying = 0;
  /// Clusters of size >= 2 with fewer than two labeled members.
  std::size_t insufficient_labels = 0;
  /// (cluster label, population std) for each qualifying cluster.
  std::vector<std::pair<int, double>> per_cluster;
};

/// Per-cluster population std of member factuality over clusters with at
/// least two posts and two labeled posts. Throws NoQualifyingClusters.
FactualityStats factuality_stats(const ClusterAssignment& a, const Dataset& ds);

/// Width of a bucket in the time-gap histogram.
inline constexpr UtcSeconds kGapBucketSeconds = 10;

struct ClusterDistributions {
  std::size_t clusters = 0;
  std::size_t posts = 0;
  std::size_t max_size = 0;
  double mean_size = 0.0;
  /// cluster size -> number of clusters
  std::map<std::size_t, std::size_t> size_histogram;
  /// lower edge of a 10 s bucket -> clusters whose largest time gap falls in it
  std::map<UtcSeconds, std::size_t> gap_histogram;
  /// platform tag -> member posts
  std::map<std::string, std::size_t> platform_posts;
};

ClusterDistributions cluster_distributions(const ClusterAssignment& a, const Dataset& ds);

struct ChannelCount {
  std::string channel_id;
  std::string name;
  std::optional<int> factuality;
  std::size_t posts = 0;
};

struct ChannelFrequency {
  /// Most linked first; ties by channel id.
  std::vector<ChannelCount> top;
  /// Member posts that reach a channel.
  std::size_t posts_with_channel = 0;
  /// Share of posts_with_channel whose channel has factuality 0.
  double fraction_factuality0 = 0.0;
  /// Same, restricted to posts whose channel carries a score.
  double fraction_factuality0_labeled = 0.0;
};

ChannelFrequency channel_frequency(const ClusterAssignment& a, const Dataset& ds, std::size_t top_n);

/// One row of the ablation table plus the analyses behind it.
struct EvaluationReport {
  std::string method_name;
  /// NaN when undefined (fewer than two kept clusters).
  double silhouette = 0.0;
  /// NaN when no cluster qualifies.
  double fact_avg = 0.0;
  double fact_median = 0.0;
  double fact_std = 0.0;
  double fact_prop0 = 0.0;
  std::size_t clusters_total = 0;
  std::size_t clusters_kept = 0;
  std::size_t posts_kept = 0;
  /// Clusters used for the factuality columns.
  std::size_t clusters_qualifying = 0;
  /// k used by k-means, 0 for density clustering.
  std::size_t k = 0;
  /// Temporal clusters mixing semantic clusters; always 0 for a correct run.
  std::size_t cross_base_merges = 0;
  ClusterDistributions distributions;
  ChannelFrequency channels;
  /// Non-empty when the row failed; the metrics are then NaN.
  std::string error;
};

/// `total` is the semantic or temporal assignment before singletons are
/// dropped; `features` are the pre-temporal embeddings.
EvaluationReport evaluate(const std::string& method_name, const EmbeddingMatrix& features,
                          const ClusterAssignment& total, const Dataset& ds, std::uint64_t seed,
                          std::size_t channel_top_n = 10);

void write_report_json(const EvaluationReport& r, const std::filesystem::path& path);

/// `Methods,Silhouette,Avg,Median,Std,∝0`, one line per report.
void write_table2(const std::vector<EvaluationReport>& rows, const std::filesystem::path& path);
/// `method,size,clusters`
void write_fig3_sizes(const std::vector<EvaluationReport>& rows, const std::filesystem::path& path);
/// `method,gap_seconds,clusters`
void write_fig3_gaps(const std::vector<EvaluationReport>& rows, const std::filesystem::path& path);
/// `method,rank,channel_id,name,factuality,posts`
void write_table3(const std::vector<EvaluationReport>& rows, const std::filesystem::path& path);

}  // namespace coordet
