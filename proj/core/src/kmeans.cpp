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

#include <algorithm>
#include <cmath>
#include <limits>
#include <thread>

#include "coordet/cluster.hpp"
#include "coordet/error.hpp"
#include "coordet/rng.hpp"

namespace coordet {

std::size_t default_k(std::size_t n) noexcept {
  const auto k = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(n) / 2.0)));
  return std::max<std::size_t>(1, k);
}

std::vector<std::size_t> kmeanspp_seed(const EmbeddingMatrix& m, std::size_t k, std::uint64_t seed) {
  const std::size_t n = m.rows();
  if (k == 0) throw Error(ErrorKind::InvalidArgument, "k must be positive");
  if (k > n) throw Error(ErrorKind::KTooLarge, "k=" + std::to_string(k) + " exceeds " + std::to_string(n) + " rows");
  Rng rng(derive_seed(seed, 0x6b6d7070ULL));
  std::vector<std::size_t> picks;
  picks.push_back(rng.below(n));
  std::vector<double> d2(n);
  std::vector<bool> chosen(n, false);
  chosen[picks[0]] = true;
  for (std::size_t i = 0; i < n; ++i) d2[i] = squared_distance(m.row(i), m.row(picks[0]));
  while (picks.size() < k) {
    double total = 0.0;
    for (double v : d2) total += v;
    std::size_t next = n;
    if (total > 0.0) {
      const double r = rng.uniform() * total;
      double acc = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        acc += d2[i];
        if (d2[i] > 0.0 && acc > r) {
          next = i;
          break;
        }
      }
      // Rounding can leave r at the very end of the mass.
      if (next == n)
        for (std::size_t i = n; i-- > 0;)
          if (d2[i] > 0.0) {
            next = i;
            break;
          }
    } else {
      for (std::size_t i = 0; i < n; ++i)
        if (!chosen[i]) {
          next = i;
          break;
        }
    }
    picks.push_back(next);
    chosen[next] = true;
    for (std::size_t i = 0; i < n; ++i) d2[i] = std::min(d2[i], squared_distance(m.row(i), m.row(next)));
  }
  return picks;
}

namespace {

/// Nearest centroid per row (lowest index on ties); returns inertia.
double assign(const EmbeddingMatrix& m, const std::vector<double>& centroids, std::size_t k, std::size_t threads,
              std::vector<int>& labels, std::vector<double>& cost) {
  const std::size_t n = m.rows();
  const std::size_t dim = m.dim();
  auto work = [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      double best = std::numeric_limits<double>::infinity();
      int arg = 0;
      for (std::size_t c = 0; c < k; ++c) {
        const double d = squared_distance(m.row(i), {centroids.data() + c * dim, dim});
        if (d < best) {
          best = d;
          arg = static_cast<int>(c);
        }
      }
      labels[i] = arg;
      cost[i] = best;
    }
  };
  threads = std::max<std::size_t>(1, std::min(threads, n));
  if (threads == 1) {
    work(0, n);
  } else {
    std::vector<std::jthread> pool;
    const std::size_t block = (n + threads - 1) / threads;
    for (std::size_t t = 0; t < threads; ++t)
      pool.emplace_back(work, t * block, std::min(n, (t + 1) * block));
  }
  double inertia = 0.0;
  for (double c : cost) inertia += c;
  return inertia;
}

}  // namespace

KMeansResult kmeans(const EmbeddingMatrix& m, std::size_t k, std::uint64_t seed, const KMeansOptions& options) {
  const std::size_t n = m.rows();
  const std::size_t dim = m.dim();
  const auto seeds = kmeanspp_seed(m, k, seed);

  KMeansResult result;
  result.centroids.resize(k * dim);
  for (std::size_t c = 0; c < k; ++c) {
    const auto r = m.row(seeds[c]);
    std::copy(r.begin(), r.end(), result.centroids.begin() + static_cast<std::ptrdiff_t>(c * dim));
  }

  std::vector<int> labels(n, -1), previous;
  std::vector<double> cost(n, 0.0);
  std::vector<std::size_t> counts(k);
  for (std::size_t iter = 0; iter < options.max_iterations; ++iter) {
    const double inertia = assign(m, result.centroids, k, options.threads, labels, cost);
    result.inertia_history.push_back(inertia);
    result.iterations = iter + 1;
    if (labels == previous) {
      result.converged = true;
      break;
    }
    previous = labels;

    std::fill(result.centroids.begin(), result.centroids.end(), 0.0);
    std::fill(counts.begin(), counts.end(), 0);
    for (std::size_t i = 0; i < n; ++i) {
      const auto c = static_cast<std::size_t>(labels[i]);
      ++counts[c];
      const auto r = m.row(i);
      for (std::size_t d = 0; d < dim; ++d) result.centroids[c * dim + d] += r[d];
    }
    for (std::size_t c = 0; c < k; ++c) {
      if (counts[c] == 0) continue;
      for (std::size_t d = 0; d < dim; ++d) result.centroids[c * dim + d] /= static_cast<double>(counts[c]);
    }
    for (std::size_t c = 0; c < k; ++c) {
      if (counts[c] != 0) continue;
      // Re-seed the empty cluster at the worst-served point.
      std::size_t far = 0;
      for (std::size_t i = 1; i < n; ++i)
        if (cost[i] > cost[far]) far = i;
      const auto r = m.row(far);
      std::copy(r.begin(), r.end(), result.centroids.begin() + static_cast<std::ptrdiff_t>(c * dim));
      cost[far] = 0.0;
    }
  }

  result.inertia = 0.0;
  for (double c : cost) result.inertia += c;
  // Duplicate rows can leave a cluster empty at the end; drop it so labels
  // stay contiguous and aligned with the centroid rows.
  std::vector<int> remap(k, -1);
  std::vector<double> kept;
  int next = 0;
  for (std::size_t c = 0; c < k; ++c) {
    if (std::find(labels.begin(), labels.end(), static_cast<int>(c)) == labels.end()) continue;
    remap[c] = next++;
    kept.insert(kept.end(), result.centroids.begin() + static_cast<std::ptrdiff_t>(c * dim),
                result.centroids.begin() + static_cast<std::ptrdiff_t>((c + 1) * dim));
  }
  for (int& l : labels) l = remap[static_cast<std::size_t>(l)];
  result.centroids = std::move(kept);
  result.assignment.post_ids = m.row_ids();
  result.assignment.labels = std::move(labels);
  result.assignment.stage = ClusterStage::semantic;
  return result;
}

}  // namespace coordet
