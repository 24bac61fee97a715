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
#include <numeric>
#include <thread>

#include "coordet/cluster.hpp"
#include "coordet/error.hpp"

namespace coordet {

namespace {

template <class Fn>
void for_blocks(std::size_t n, std::size_t threads, Fn&& fn) {
  threads = std::max<std::size_t>(1, std::min(threads, n));
  if (threads == 1) {
    fn(std::size_t{0}, n);
    return;
  }
  std::vector<std::jthread> pool;
  const std::size_t block = (n + threads - 1) / threads;
  for (std::size_t t = 0; t < threads; ++t) {
    const std::size_t begin = t * block;
    if (begin >= n) break;
    pool.emplace_back([&fn, begin, end = std::min(n, begin + block)] { fn(begin, end); });
  }
}

double distance(const EmbeddingMatrix& m, std::size_t i, std::size_t j) {
  return std::sqrt(squared_distance(m.row(i), m.row(j)));
}

std::vector<double> core_distances(const EmbeddingMatrix& m, std::size_t min_samples, std::size_t threads) {
  const std::size_t n = m.rows();
  std::vector<double> core(n, 0.0);
  if (n < 2 || min_samples == 0) return core;
  const std::size_t k = std::min(min_samples, n - 1);
  for_blocks(n, threads, [&](std::size_t begin, std::size_t end) {
    std::vector<double> d;
    d.reserve(n - 1);
    for (std::size_t i = begin; i < end; ++i) {
      d.clear();
      for (std::size_t j = 0; j < n; ++j)
        if (j != i) d.push_back(distance(m, i, j));
      std::nth_element(d.begin(), d.begin() + static_cast<std::ptrdiff_t>(k - 1), d.end());
      core[i] = d[k - 1];
    }
  });
  return core;
}

/// Prim's algorithm on the implicit complete mutual-reachability graph.
std::vector<MstEdge> mutual_reachability_mst(const EmbeddingMatrix& m, const std::vector<double>& core) {
  const std::size_t n = m.rows();
  std::vector<MstEdge> edges;
  if (n < 2) return edges;
  edges.reserve(n - 1);
  std::vector<bool> in_tree(n, false);
  std::vector<double> best(n, std::numeric_limits<double>::infinity());
  std::vector<std::uint32_t> from(n, 0);
  std::size_t current = 0;
  in_tree[0] = true;
  for (std::size_t added = 1; added < n; ++added) {
    std::size_t next = n;
    double next_w = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < n; ++j) {
      if (in_tree[j]) continue;
      const double w = std::max({core[current], core[j], distance(m, current, j)});
      if (w < best[j]) {
        best[j] = w;
        from[j] = static_cast<std::uint32_t>(current);
      }
      if (best[j] < next_w) {
        next_w = best[j];
        next = j;
      }
    }
    in_tree[next] = true;
    edges.push_back({from[next], static_cast<std::uint32_t>(next), next_w});
    current = next;
  }
  std::stable_sort(edges.begin(), edges.end(), [](const MstEdge& a, const MstEdge& b) { return a.weight < b.weight; });
  return edges;
}

struct Dendrogram {
  // Node ids: points 0..n-1, merges n..2n-2 (root is the last).
  std::vector<std::size_t> left, right, size;
  std::vector<double> height;
};

Dendrogram single_linkage(std::size_t n, const std::vector<MstEdge>& mst) {
  Dendrogram tree;
  const std::size_t total = 2 * n - 1;
  tree.left.assign(total, 0);
  tree.right.assign(total, 0);
  tree.size.assign(total, 1);
  tree.height.assign(total, 0.0);
  std::vector<std::size_t> parent(total);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  };
  std::size_t next = n;
  for (const auto& e : mst) {
    const std::size_t a = find(e.a);
    const std::size_t b = find(e.b);
    tree.left[next] = a;
    tree.right[next] = b;
    tree.size[next] = tree.size[a] + tree.size[b];
    tree.height[next] = e.weight;
    parent[a] = parent[b] = next;
    ++next;
  }
  return tree;
}

double lambda_of(double dist) { return 1.0 / std::max(dist, kMinLinkDistance); }

void collect_leaves(const Dendrogram& tree, std::size_t n, std::size_t node, std::vector<std::size_t>& out) {
  std::vector<std::size_t> stack{node};
  while (!stack.empty()) {
    const std::size_t x = stack.back();
    stack.pop_back();
    if (x < n) {
      out.push_back(x);
    } else {
      stack.push_back(tree.right[x]);
      stack.push_back(tree.left[x]);
    }
  }
}

}  // namespace

HdbscanResult hdbscan(const EmbeddingMatrix& m, const HdbscanParams& params) {
  if (params.min_cluster_size < 1) throw Error(ErrorKind::InvalidArgument, "min_cluster_size must be positive");
  if (params.min_samples < 1) throw Error(ErrorKind::InvalidArgument, "min_samples must be positive");
  const std::size_t n = m.rows();
  HdbscanResult result;
  result.point_count = n;
  result.assignment.post_ids = m.row_ids();
  result.assignment.labels.assign(n, kNoise);
  result.assignment.stage = ClusterStage::semantic;
  result.cluster_count = n ? 1 : 0;
  result.stability.assign(result.cluster_count, 0.0);
  if (n < 2 || n < params.min_cluster_size) {
    result.core_distances.assign(n, 0.0);
    return result;
  }

  result.core_distances = core_distances(m, params.min_samples, params.threads);
  result.mst = mutual_reachability_mst(m, result.core_distances);
  const Dendrogram tree = single_linkage(n, result.mst);
  const std::size_t mcs = params.min_cluster_size;

  // Condense top-down: `label[node]` is the condensed cluster a dendrogram
  // node currently belongs to.
  std::vector<std::size_t> label(2 * n - 1, 0);
  const std::size_t root = 2 * n - 2;
  label[root] = n;
  std::size_t next_cluster = n + 1;
  std::vector<std::size_t> queue{root};
  std::vector<std::size_t> leaves;
  std::vector<std::size_t> parts, stack;
  for (std::size_t qi = 0; qi < queue.size(); ++qi) {
    const std::size_t node = queue[qi];
    if (node < n) continue;
    // Merges at the same height form one level: split into all of them at once.
    parts.clear();
    stack.assign({tree.right[node], tree.left[node]});
    while (!stack.empty()) {
      const std::size_t x = stack.back();
      stack.pop_back();
      if (x >= n && tree.height[x] == tree.height[node]) {
        stack.push_back(tree.right[x]);
        stack.push_back(tree.left[x]);
      } else {
        parts.push_back(x);
      }
    }
    const double lam = lambda_of(tree.height[node]);
    const std::size_t parent = label[node];
    const auto big = static_cast<std::size_t>(
        std::count_if(parts.begin(), parts.end(), [&](std::size_t x) { return tree.size[x] >= mcs; }));
    for (std::size_t part : parts) {
      if (tree.size[part] < mcs) {
        leaves.clear();
        collect_leaves(tree, n, part, leaves);
        for (std::size_t p : leaves) result.condensed.push_back({parent, p, lam, 1});
      } else if (big >= 2) {
        label[part] = next_cluster++;
        result.condensed.push_back({parent, label[part], lam, tree.size[part]});
        queue.push_back(part);
      } else {
        label[part] = parent;
        if (part < n)
          result.condensed.push_back({parent, part, lam, 1});
        else
          queue.push_back(part);
      }
    }
  }

  result.cluster_count = next_cluster - n;
  const std::size_t clusters = result.cluster_count;
  std::vector<double> birth(clusters, 0.0);
  std::vector<std::vector<std::size_t>> children(clusters);
  std::vector<std::size_t> cluster_parent(clusters, 0);
  for (const auto& e : result.condensed) {
    if (e.child >= n) {
      birth[e.child - n] = e.lambda;
      children[e.parent - n].push_back(e.child);
      cluster_parent[e.child - n] = e.parent;
    }
  }
  result.stability.assign(clusters, 0.0);
  for (const auto& e : result.condensed)
    result.stability[e.parent - n] += (e.lambda - birth[e.parent - n]) * static_cast<double>(e.child_size);

  // Excess of mass, bottom-up. Cluster ids grow with depth, so a reverse sweep
  // visits children before parents. The root is never selected.
  std::vector<double> best = result.stability;
  std::vector<bool> is_selected(clusters, false);
  for (std::size_t c = clusters; c-- > 1;) {
    double subtree = 0.0;
    for (std::size_t ch : children[c]) subtree += best[ch - n];
    if (children[c].empty() || best[c] >= subtree) {
      is_selected[c] = true;
      std::vector<std::size_t> stack(children[c]);
      while (!stack.empty()) {
        const std::size_t x = stack.back();
        stack.pop_back();
        is_selected[x - n] = false;
        stack.insert(stack.end(), children[x - n].begin(), children[x - n].end());
      }
    } else {
      best[c] = subtree;
    }
  }
  for (std::size_t c = 1; c < clusters; ++c)
    if (is_selected[c]) result.selected.push_back(n + c);

  result.assignment.labels = labels_for_selection(result, result.selected);
  return result;
}

std::vector<int> labels_for_selection(const HdbscanResult& tree, const std::vector<std::size_t>& selected) {
  const std::size_t n = tree.point_count;
  std::vector<std::size_t> cluster_parent(tree.cluster_count, 0);
  for (const auto& e : tree.condensed)
    if (e.child >= n) cluster_parent[e.child - n] = e.parent;
  std::vector<int> selection_label(tree.cluster_count, kNoise);
  std::vector<std::size_t> sorted = selected;
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t i = 0; i < sorted.size(); ++i) selection_label[sorted[i] - n] = static_cast<int>(i);

  std::vector<int> labels(n, kNoise);
  for (const auto& e : tree.condensed) {
    if (e.child >= n) continue;
    // Climb to the nearest selected ancestor (inclusive).
    std::size_t c = e.parent;
    while (true) {
      if (selection_label[c - n] != kNoise) {
        labels[e.child] = selection_label[c - n];
        break;
      }
      if (c == n) break;
      c = cluster_parent[c - n];
    }
  }
  return labels;
}

ClusterAssignment hdbscan_simplified(const EmbeddingMatrix& m, std::size_t min_cluster_size, std::size_t min_samples) {
  return hdbscan(m, {min_cluster_size, min_samples, 1}).assignment;
}

}  // namespace coordet
