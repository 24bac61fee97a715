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

// Slow, direct reimplementations used as test oracles. None of these share
// code with the library beyond the data types.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "coordet/cluster.hpp"
#include "coordet/datamodel.hpp"
#include "coordet/embed.hpp"

namespace coordet::testing {

using Points = std::vector<std::vector<double>>;

EmbeddingMatrix to_matrix(const Points& pts, const std::string& prefix = "p");

/// Labels renumbered by first appearance (noise stays -1), so two partitions
/// compare equal iff they group the same rows.
std::vector<int> canonical(const std::vector<int>& labels);

// ---- HDBSCAN

/// Full mutual-reachability matrix; core distance is the min_samples-th
/// nearest other point.
std::vector<std::vector<double>> mutual_reachability(const Points& pts, std::size_t min_samples);

/// Total weight of a minimum spanning tree (Kruskal over all pairs).
double kruskal_mst_weight(const std::vector<std::vector<double>>& w);

struct OracleCluster {
  std::optional<std::size_t> parent;  // empty for the root
  double birth = 0.0;                 // lambda at which it appeared
  double stability = 0.0;
  std::vector<std::size_t> points;    // points whose last cluster this was
};

/// Condensed tree built top-down from connected components of the
/// mutual-reachability graph at each distinct level.
std::vector<OracleCluster> condensed_by_components(const Points& pts, std::size_t min_cluster_size,
                                                   std::size_t min_samples);

/// Labels from the best selection found by enumerating every set of non-root
/// clusters that covers each root-to-leaf path exactly once. Ties go to the
/// selection with fewer clusters.
std::vector<int> hdbscan_exhaustive(const Points& pts, std::size_t min_cluster_size, std::size_t min_samples);

// ---- temporal DBSCAN

/// Quadratic DBSCAN within each base cluster following the library's
/// documented policy (border -> nearest core, earlier on a tie; noise ->
/// singleton; groups ordered by base, first time, first row).
std::vector<int> temporal_bruteforce(const std::vector<int>& base, const std::vector<std::int64_t>& time,
                                     double epsilon, std::size_t min_pts);

// ---- k-means

struct LloydOracle {
  std::vector<int> labels;
  double inertia = 0.0;
};

/// Plain Lloyd iterations from the given seed rows.
LloydOracle lloyd(const Points& pts, const std::vector<std::size_t>& seeds, std::size_t max_iterations);

// ---- evaluation

/// Mean silhouette straight from the definition; noise rows skipped,
/// singletons score 0.
double silhouette_bruteforce(const Points& pts, const std::vector<int>& labels);
std::vector<double> silhouette_points_bruteforce(const Points& pts, const std::vector<int>& labels);

/// Population std, computing the mean first.
double two_pass_std(const std::vector<double>& xs);

struct PairCounts {
  std::uint64_t both = 0;
  std::uint64_t predicted = 0;
  std::uint64_t truth = 0;
};

/// Every unordered pair inspected directly. `truth` uses -1 for background.
PairCounts count_pairs(const std::vector<int>& predicted, const std::vector<int>& truth);

// ---- PCA

/// Eigenvalues (descending) and unit eigenvectors (as rows) of a symmetric
/// matrix by cyclic Jacobi rotations.
void jacobi_eigen(std::vector<std::vector<double>> a, std::vector<double>& values,
                  std::vector<std::vector<double>>& vectors);

}  // namespace coordet::testing
