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
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "coordet/datamodel.hpp"
#include "coordet/embed.hpp"

namespace coordet {

inline constexpr int kNoise = -1;

enum class ClusterStage { semantic, temporal };

std::string_view to_string(ClusterStage stage) noexcept;

/// post -> label, with kNoise for unclustered posts. Non-noise labels are
/// contiguous from 0.
struct ClusterAssignment {
  std::vector<std::string> post_ids;
  std::vector<int> labels;
  ClusterStage stage = ClusterStage::semantic;

  std::size_t size() const noexcept { return labels.size(); }
  /// Number of non-noise clusters (max label + 1).
  std::size_t cluster_count() const noexcept;
  std::vector<std::size_t> cluster_sizes() const;
  /// Row indices per cluster, ascending.
  std::vector<std::vector<std::size_t>> members() const;
  std::size_t noise_count() const noexcept;
  /// Throws InvalidArgument when labels are not contiguous or sizes differ.
  void validate() const;

  friend bool operator==(const ClusterAssignment&, const ClusterAssignment&) = default;
};

/// Relabels clusters in order of first appearance and drops gaps.
ClusterAssignment compact_labels(ClusterAssignment a);

/// CSV `post_id,label,stage`.
void write_assignment(const ClusterAssignment& a, const std::filesystem::path& path);
ClusterAssignment read_assignment(const std::filesystem::path& path);

// ---------------------------------------------------------------- k-means

struct KMeansOptions {
  std::size_t max_iterations = 300;
  std::size_t threads = 1;
};

struct KMeansResult {
  ClusterAssignment assignment;
  std::vector<double> centroids;  // k x dim, row-major
  double inertia = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
  /// Inertia after each assignment step.
  std::vector<double> inertia_history;
};

/// ceil(sqrt(n / 2)), at least 1.
std::size_t default_k(std::size_t n) noexcept;

/// k-means++ seeding; returns the chosen row indices in pick order.
std::vector<std::size_t> kmeanspp_seed(const EmbeddingMatrix& m, std::size_t k, std::uint64_t seed);

/// Lloyd iterations from k-means++ seeds until the assignment is a fixed point
/// or max_iterations. An emptied cluster takes over the point farthest from
/// its centroid. Throws KTooLarge when k exceeds the row count.
KMeansResult kmeans(const EmbeddingMatrix& m, std::size_t k, std::uint64_t seed, const KMeansOptions& options = {});

// ---------------------------------------------------------------- HDBSCAN

struct HdbscanParams {
  std::size_t min_cluster_size = 2;
  /// Core distance is the distance to the min_samples-th nearest other point.
  std::size_t min_samples = 1;
  std::size_t threads = 1;
};

struct MstEdge {
  std::uint32_t a = 0;
  std::uint32_t b = 0;
  double weight = 0.0;
};

/// One row of the condensed tree. Children below `point_count` are points,
/// the rest are clusters; the root cluster is `point_count`.
struct CondensedEntry {
  std::size_t parent = 0;
  std::size_t child = 0;
  double lambda = 0.0;
  std::size_t child_size = 0;
};

struct HdbscanResult {
  ClusterAssignment assignment;
  std::vector<double> core_distances;
  std::vector<MstEdge> mst;  // in order of increasing weight
  std::vector<CondensedEntry> condensed;
  std::size_t point_count = 0;
  std::size_t cluster_count = 0;          // condensed clusters including the root
  std::vector<double> stability;          // indexed by cluster - point_count
  std::vector<std::size_t> selected;      // cluster ids, ascending
};

/// Distances below this are clamped before taking lambda = 1 / distance, so
/// exact duplicates get a large but finite density.
inline constexpr double kMinLinkDistance = 1e-12;

/// Mutual-reachability MST, single-linkage hierarchy, condensation at
/// min_cluster_size and excess-of-mass selection (root not selectable).
/// Merges at the same distance are condensed as one multi-way split.
HdbscanResult hdbscan(const EmbeddingMatrix& m, const HdbscanParams& params);

ClusterAssignment hdbscan_simplified(const EmbeddingMatrix& m, std::size_t min_cluster_size,
                                     std::size_t min_samples);

/// Labels induced by a selection of condensed clusters: a point takes the
/// label of the selected cluster it (or a descendant it fell from) belongs to.
std::vector<int> labels_for_selection(const HdbscanResult& tree, const std::vector<std::size_t>& selected);

// ---------------------------------------------------------------- temporal

struct TemporalParams {
  double epsilon_seconds = 52.0;
  std::size_t min_pts = 2;

  void validate() const;
};

/// 1-D DBSCAN on published_time within each base cluster. Every resulting
/// group, including DBSCAN noise as singletons, gets a fresh label; labels
/// follow base label order, then earliest timestamp. Base noise stays noise.
/// Border points join the nearest core in time (earlier one on a tie).
ClusterAssignment temporal_subdivide(const ClusterAssignment& base, const Dataset& ds, const TemporalParams& params);

/// Size-1 clusters become noise; the remaining labels are compacted in order.
ClusterAssignment drop_singletons(const ClusterAssignment& a);

/// Number of fine clusters whose members carry more than one coarse label or
/// a coarse noise label. Zero means `fine` refines `coarse`.
std::size_t cross_base_merges(const ClusterAssignment& fine, const ClusterAssignment& coarse);

}  // namespace coordet
