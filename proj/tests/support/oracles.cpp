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

#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <numeric>
#include <set>
#include <tuple>

namespace coordet::testing {

namespace {

double euclid(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += (a[k] - b[k]) * (a[k] - b[k]);
  return std::sqrt(s);
}

struct UnionFind {
  std::vector<std::size_t> parent;
  explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  std::size_t find(std::size_t x) { return parent[x] == x ? x : parent[x] = find(parent[x]); }
  bool join(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    parent[a] = b;
    return true;
  }
};

}  // namespace

EmbeddingMatrix to_matrix(const Points& pts, const std::string& prefix) {
  std::vector<std::string> ids;
  std::vector<double> values;
  const std::size_t dim = pts.empty() ? 0 : pts[0].size();
  for (std::size_t i = 0; i < pts.size(); ++i) {
    ids.push_back(prefix + std::to_string(i));
    values.insert(values.end(), pts[i].begin(), pts[i].end());
  }
  return EmbeddingMatrix(std::move(ids), dim, std::move(values));
}

std::vector<int> canonical(const std::vector<int>& labels) {
  std::map<int, int> seen;
  std::vector<int> out;
  for (int l : labels) {
    if (l < 0) {
      out.push_back(-1);
      continue;
    }
    auto [it, inserted] = seen.try_emplace(l, static_cast<int>(seen.size()));
    out.push_back(it->second);
  }
  return out;
}

std::vector<std::vector<double>> mutual_reachability(const Points& pts, std::size_t min_samples) {
  const std::size_t n = pts.size();
  std::vector<std::vector<double>> d(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) d[i][j] = euclid(pts[i], pts[j]);
  std::vector<double> core(n, 0.0);
  for (std::size_t i = 0; i < n && n > 1; ++i) {
    std::vector<double> others;
    for (std::size_t j = 0; j < n; ++j)
      if (j != i) others.push_back(d[i][j]);
    std::sort(others.begin(), others.end());
    core[i] = others[std::min(min_samples, n - 1) - 1];
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (i != j) d[i][j] = std::max({d[i][j], core[i], core[j]});
  return d;
}

double kruskal_mst_weight(const std::vector<std::vector<double>>& w) {
  const std::size_t n = w.size();
  std::vector<std::tuple<double, std::size_t, std::size_t>> edges;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) edges.emplace_back(w[i][j], i, j);
  std::sort(edges.begin(), edges.end());
  UnionFind uf(n);
  double total = 0.0;
  for (const auto& [weight, a, b] : edges)
    if (uf.join(a, b)) total += weight;
  return total;
}

std::vector<OracleCluster> condensed_by_components(const Points& pts, std::size_t min_cluster_size,
                                                   std::size_t min_samples) {
  const std::size_t n = pts.size();
  const auto w = mutual_reachability(pts, min_samples);
  std::vector<OracleCluster> clusters(1);
  if (n < 2) {
    for (std::size_t i = 0; i < n; ++i) clusters[0].points.push_back(i);
    return clusters;
  }
  // Components of `set` using edges strictly lighter than `level`.
  auto components = [&](const std::vector<std::size_t>& set, double level) {
    UnionFind uf(n);
    for (std::size_t a : set)
      for (std::size_t b : set)
        if (a < b && w[a][b] < level) uf.join(a, b);
    std::map<std::size_t, std::vector<std::size_t>> by_root;
    for (std::size_t a : set) by_root[uf.find(a)].push_back(a);
    std::vector<std::vector<std::size_t>> out;
    for (auto& [root, members] : by_root) out.push_back(std::move(members));
    return out;
  };
  // Smallest level at which `set` is connected.
  auto connect_level = [&](const std::vector<std::size_t>& set) {
    std::set<double> levels;
    for (std::size_t a : set)
      for (std::size_t b : set)
        if (a < b) levels.insert(w[a][b]);
    for (double l : levels)
      if (components(set, std::nextafter(l, std::numeric_limits<double>::infinity())).size() == 1) return l;
    return *levels.rbegin();
  };

  std::vector<std::pair<std::size_t, std::vector<std::size_t>>> work;
  std::vector<std::size_t> all(n);
  std::iota(all.begin(), all.end(), 0);
  work.emplace_back(0, all);
  while (!work.empty()) {
    auto [c, set] = std::move(work.back());
    work.pop_back();
    while (true) {
      const double level = connect_level(set);
      const double lambda = 1.0 / std::max(level, 1e-12);
      const auto comps = components(set, level);
      std::vector<std::vector<std::size_t>> big;
      for (const auto& comp : comps) {
        if (comp.size() >= min_cluster_size) {
          big.push_back(comp);
          continue;
        }
        for (std::size_t p : comp) {
          clusters[c].points.push_back(p);
          clusters[c].stability += lambda - clusters[c].birth;
        }
      }
      if (big.size() == 1 && big[0].size() >= 2) {
        set = big[0];
        continue;
      }
      if (big.size() == 1) {
        clusters[c].points.push_back(big[0][0]);
        clusters[c].stability += lambda - clusters[c].birth;
        break;
      }
      for (auto& comp : big) {
        clusters[c].stability += (lambda - clusters[c].birth) * static_cast<double>(comp.size());
        OracleCluster child;
        child.parent = c;
        child.birth = lambda;
        clusters.push_back(child);
        work.emplace_back(clusters.size() - 1, std::move(comp));
      }
      break;
    }
  }
  return clusters;
}

std::vector<int> hdbscan_exhaustive(const Points& pts, std::size_t min_cluster_size, std::size_t min_samples) {
  const auto clusters = condensed_by_components(pts, min_cluster_size, min_samples);
  const std::size_t m = clusters.size() - 1;  // selectable: 1..m
  std::vector<bool> has_child(clusters.size(), false);
  for (const auto& c : clusters)
    if (c.parent) has_child[*c.parent] = true;
  auto ancestors_or_self = [&](std::size_t c) {
    std::vector<std::size_t> chain;
    for (std::optional<std::size_t> x = c; x && *x != 0; x = clusters[*x].parent) chain.push_back(*x);
    return chain;
  };

  std::uint64_t best_mask = 0;
  double best_score = -1.0;
  int best_count = 0;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << m); ++mask) {
    bool valid = true;
    for (std::size_t c = 1; c <= m && valid; ++c) {
      if (has_child[c]) continue;
      int hits = 0;
      for (std::size_t a : ancestors_or_self(c)) hits += (mask >> (a - 1)) & 1;
      valid = hits == 1;
    }
    if (!valid) continue;
    double score = 0.0;
    int count = 0;
    for (std::size_t c = 1; c <= m; ++c)
      if ((mask >> (c - 1)) & 1) {
        score += clusters[c].stability;
        ++count;
      }
    const double tol = 1e-12 * std::max(1.0, std::abs(score));
    if (score > best_score + tol || (std::abs(score - best_score) <= tol && count < best_count)) {
      best_score = score;
      best_mask = mask;
      best_count = count;
    }
  }

  std::vector<int> labels(pts.size(), -1);
  for (std::size_t c = 0; c < clusters.size(); ++c)
    for (std::size_t p : clusters[c].points)
      for (std::size_t a : ancestors_or_self(c))
        if ((best_mask >> (a - 1)) & 1) {
          labels[p] = static_cast<int>(a);
          break;
        }
  return labels;
}

std::vector<int> temporal_bruteforce(const std::vector<int>& base, const std::vector<std::int64_t>& time,
                                     double epsilon, std::size_t min_pts) {
  const std::size_t n = base.size();
  auto close = [&](std::size_t i, std::size_t j) {
    return std::abs(static_cast<double>(time[i]) - static_cast<double>(time[j])) <= epsilon;
  };
  std::vector<std::vector<std::size_t>> groups;
  std::vector<int> group_base;
  const int clusters = base.empty() ? 0 : *std::max_element(base.begin(), base.end()) + 1;
  for (int c = 0; c < clusters; ++c) {
    std::vector<std::size_t> rows;
    for (std::size_t i = 0; i < n; ++i)
      if (base[i] == c) rows.push_back(i);
    std::vector<bool> core(n, false);
    for (std::size_t i : rows) {
      std::size_t count = 0;
      for (std::size_t j : rows) count += close(i, j);
      core[i] = count >= min_pts;
    }
    UnionFind uf(n);
    for (std::size_t i : rows)
      for (std::size_t j : rows)
        if (core[i] && core[j] && close(i, j)) uf.join(i, j);
    std::map<std::size_t, std::vector<std::size_t>> comp;
    for (std::size_t i : rows) {
      if (core[i]) {
        comp[uf.find(i)].push_back(i);
        continue;
      }
      std::optional<std::size_t> best;
      for (std::size_t j : rows) {
        if (!core[j] || !close(i, j)) continue;
        const auto dj = std::abs(time[i] - time[j]);
        if (!best || dj < std::abs(time[i] - time[*best]) ||
            (dj == std::abs(time[i] - time[*best]) && time[j] < time[*best]))
          best = j;
      }
      if (best)
        comp[uf.find(*best)].push_back(i);
      else
        comp[n + i].push_back(i);
    }
    for (auto& [root, members] : comp) {
      groups.push_back(members);
      group_base.push_back(c);
    }
  }
  auto key = [&](std::size_t g) {
    const auto& rows = groups[g];
    std::size_t first = rows[0];
    for (std::size_t r : rows)
      if (std::tie(time[r], r) < std::tie(time[first], first)) first = r;
    return std::make_tuple(group_base[g], time[first], first);
  };
  std::vector<std::size_t> order(groups.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return key(a) < key(b); });
  std::vector<int> labels(n, -1);
  for (std::size_t k = 0; k < order.size(); ++k)
    for (std::size_t r : groups[order[k]]) labels[r] = static_cast<int>(k);
  return labels;
}

LloydOracle lloyd(const Points& pts, const std::vector<std::size_t>& seeds, std::size_t max_iterations) {
  const std::size_t n = pts.size();
  const std::size_t k = seeds.size();
  const std::size_t dim = pts[0].size();
  std::vector<std::vector<double>> centers;
  for (std::size_t s : seeds) centers.push_back(pts[s]);
  std::vector<int> labels, previous;
  std::vector<double> cost(n);
  for (std::size_t iter = 0; iter < max_iterations; ++iter) {
    labels.assign(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t c = 0; c < k; ++c) {
        double d2 = 0.0;
        for (std::size_t t = 0; t < dim; ++t) d2 += (pts[i][t] - centers[c][t]) * (pts[i][t] - centers[c][t]);
        if (d2 < best) {
          best = d2;
          labels[i] = static_cast<int>(c);
        }
      }
      cost[i] = best;
    }
    if (labels == previous) break;
    previous = labels;
    std::vector<std::size_t> count(k, 0);
    for (auto& c : centers) std::fill(c.begin(), c.end(), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      const auto c = static_cast<std::size_t>(labels[i]);
      ++count[c];
      for (std::size_t t = 0; t < dim; ++t) centers[c][t] += pts[i][t];
    }
    for (std::size_t c = 0; c < k; ++c)
      if (count[c])
        for (double& v : centers[c]) v /= static_cast<double>(count[c]);
    for (std::size_t c = 0; c < k; ++c) {
      if (count[c]) continue;
      const auto far = static_cast<std::size_t>(std::max_element(cost.begin(), cost.end()) - cost.begin());
      centers[c] = pts[far];
      cost[far] = 0.0;
    }
  }
  LloydOracle out;
  out.labels = labels;
  for (double c : cost) out.inertia += c;
  return out;
}

std::vector<double> silhouette_points_bruteforce(const Points& pts, const std::vector<int>& labels) {
  std::vector<double> out(pts.size(), std::numeric_limits<double>::quiet_NaN());
  std::set<int> clusters;
  for (int l : labels)
    if (l >= 0) clusters.insert(l);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (labels[i] < 0) continue;
    std::map<int, std::pair<double, int>> acc;  // cluster -> (sum, count)
    for (std::size_t j = 0; j < pts.size(); ++j) {
      if (j == i || labels[j] < 0) continue;
      acc[labels[j]].first += euclid(pts[i], pts[j]);
      acc[labels[j]].second += 1;
    }
    if (!acc.count(labels[i])) {
      out[i] = 0.0;
      continue;
    }
    const double a = acc[labels[i]].first / acc[labels[i]].second;
    double b = std::numeric_limits<double>::infinity();
    for (const auto& [c, sc] : acc)
      if (c != labels[i]) b = std::min(b, sc.first / sc.second);
    out[i] = std::max(a, b) > 0 ? (b - a) / std::max(a, b) : 0.0;
  }
  return out;
}

double silhouette_bruteforce(const Points& pts, const std::vector<int>& labels) {
  const auto s = silhouette_points_bruteforce(pts, labels);
  double total = 0.0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < s.size(); ++i)
    if (labels[i] >= 0) {
      total += s[i];
      ++count;
    }
  return total / static_cast<double>(count);
}

double two_pass_std(const std::vector<double>& xs) {
  double mean = 0.0;
  for (double x : xs) mean += x;
  mean /= static_cast<double>(xs.size());
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / static_cast<double>(xs.size()));
}

PairCounts count_pairs(const std::vector<int>& predicted, const std::vector<int>& truth) {
  PairCounts out;
  for (std::size_t i = 0; i < predicted.size(); ++i)
    for (std::size_t j = i + 1; j < predicted.size(); ++j) {
      const bool p = predicted[i] >= 0 && predicted[i] == predicted[j];
      const bool t = truth[i] >= 0 && truth[i] == truth[j];
      out.predicted += p;
      out.truth += t;
      out.both += p && t;
    }
  return out;
}

void jacobi_eigen(std::vector<std::vector<double>> a, std::vector<double>& values,
                  std::vector<std::vector<double>>& vectors) {
  const std::size_t n = a.size();
  std::vector<std::vector<double>> v(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) v[i][i] = 1.0;
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) off += a[p][q] * a[p][q];
    if (off < 1e-30) break;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) {
        if (std::abs(a[p][q]) < 1e-300) continue;
        const double theta = (a[q][q] - a[p][p]) / (2 * a[p][q]);
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1));
        const double c = 1 / std::sqrt(t * t + 1);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a[k][p], akq = a[k][q];
          a[k][p] = c * akp - s * akq;
          a[k][q] = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a[p][k], aqk = a[q][k];
          a[p][k] = c * apk - s * aqk;
          a[q][k] = s * apk + c * aqk;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double vkp = v[k][p], vkq = v[k][q];
          v[k][p] = c * vkp - s * vkq;
          v[k][q] = s * vkp + c * vkq;
        }
      }
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return a[x][x] > a[y][y]; });
  values.clear();
  vectors.clear();
  for (std::size_t i : order) {
    values.push_back(a[i][i]);
    std::vector<double> col(n);
    for (std::size_t k = 0; k < n; ++k) col[k] = v[k][i];
    vectors.push_back(col);
  }
}

}  // namespace coordet::testing
