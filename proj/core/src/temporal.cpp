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
#include <iterator>
#include <limits>
#include <tuple>

#include "coordet/cluster.hpp"
#include "coordet/error.hpp"

namespace coordet {

void TemporalParams::validate() const {
  if (!(epsilon_seconds > 0.0)) throw Error(ErrorKind::InvalidArgument, "epsilon_seconds must be positive");
  if (min_pts < 2) throw Error(ErrorKind::InvalidArgument, "min_pts must be at least 2");
}

namespace {

struct Group {
  int base = 0;
  UtcSeconds first_time = 0;
  std::size_t first_row = 0;
  std::vector<std::size_t> rows;
};

/// DBSCAN over one base cluster. `rows` must be sorted by (time, row).
void dbscan_1d(const std::vector<std::size_t>& rows, const std::vector<UtcSeconds>& time, int base,
               const TemporalParams& params, std::vector<Group>& out) {
  const std::size_t n = rows.size();
  const double eps = params.epsilon_seconds;
  auto t = [&](std::size_t i) { return static_cast<double>(time[rows[i]]); };

  // Neighbourhood counts with a sliding window; the point counts itself.
  std::vector<bool> core(n, false);
  std::size_t lo = 0, hi = 0;
  for (std::size_t i = 0; i < n; ++i) {
    while (t(i) - t(lo) > eps) ++lo;
    if (hi < i) hi = i;
    while (hi + 1 < n && t(hi + 1) - t(i) <= eps) ++hi;
    core[i] = hi - lo + 1 >= params.min_pts;
  }

  std::vector<std::size_t> cores;
  for (std::size_t i = 0; i < n; ++i)
    if (core[i]) cores.push_back(i);
  std::vector<int> component(n, -1);
  int components = 0;
  for (std::size_t c = 0; c < cores.size(); ++c) {
    if (c == 0 || t(cores[c]) - t(cores[c - 1]) > eps) ++components;
    component[cores[c]] = components - 1;
  }

  std::vector<Group> local(static_cast<std::size_t>(components));
  std::vector<Group> singles;
  for (std::size_t i = 0; i < n; ++i) {
    int comp = component[i];
    if (comp < 0 && !cores.empty()) {
      // Nearest core in time; the earlier one wins a tie.
      auto it = std::lower_bound(cores.begin(), cores.end(), i);
      double best = std::numeric_limits<double>::infinity();
      if (it != cores.begin()) {
        const std::size_t prev = *std::prev(it);
        best = t(i) - t(prev);
        if (best <= eps) comp = component[prev];
      }
      if (it != cores.end()) {
        const double d = t(*it) - t(i);
        if (d <= eps && d < best) comp = component[*it];
      }
    }
    if (comp < 0) {
      singles.push_back({base, time[rows[i]], rows[i], {rows[i]}});
      continue;
    }
    auto& g = local[static_cast<std::size_t>(comp)];
    if (g.rows.empty()) {
      g.base = base;
      g.first_time = time[rows[i]];
      g.first_row = rows[i];
    }
    g.rows.push_back(rows[i]);
  }
  for (auto& g : local) out.push_back(std::move(g));
  for (auto& g : singles) out.push_back(std::move(g));
}

}  // namespace

ClusterAssignment temporal_subdivide(const ClusterAssignment& base, const Dataset& ds, const TemporalParams& params) {
  params.validate();
  base.validate();
  const std::size_t n = base.size();
  std::vector<UtcSeconds> time(n);
  std::vector<std::string> missing;
  for (std::size_t i = 0; i < n; ++i) {
    const auto idx = ds.post_index(base.post_ids[i]);
    if (!idx) {
      missing.push_back(base.post_ids[i]);
      continue;
    }
    time[i] = ds.posts()[*idx].published_time;
  }
  if (!missing.empty()) throw MissingRows(missing);

  std::vector<Group> groups;
  for (std::size_t c = 0; c < base.cluster_count(); ++c) {
    std::vector<std::size_t> rows;
    for (std::size_t i = 0; i < n; ++i)
      if (base.labels[i] == static_cast<int>(c)) rows.push_back(i);
    std::sort(rows.begin(), rows.end(),
              [&](std::size_t a, std::size_t b) { return std::tie(time[a], a) < std::tie(time[b], b); });
    dbscan_1d(rows, time, static_cast<int>(c), params, groups);
  }
  std::sort(groups.begin(), groups.end(), [](const Group& a, const Group& b) {
    return std::tie(a.base, a.first_time, a.first_row) < std::tie(b.base, b.first_time, b.first_row);
  });

  ClusterAssignment out;
  out.post_ids = base.post_ids;
  out.labels.assign(n, kNoise);
  out.stage = ClusterStage::temporal;
  for (std::size_t g = 0; g < groups.size(); ++g)
    for (std::size_t r : groups[g].rows) out.labels[r] = static_cast<int>(g);
  return out;
}

}  // namespace coordet
