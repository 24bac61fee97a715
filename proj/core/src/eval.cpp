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

#include "coordet/eval.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>

#include <nlohmann/json.hpp>

#include "coordet/error.hpp"
#include "coordet/rng.hpp"
#include "coordet/stats.hpp"
#include "csv.hpp"
#include "embedding_io.hpp"

namespace coordet {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::size_t post_row(const Dataset& ds, const std::string& id) {
  const auto idx = ds.post_index(id);
  if (!idx) throw MissingRows({id});
  return *idx;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::Io, "cannot write " + path.string());
  return out;
}

}  // namespace

namespace {

/// Silhouette of every row of `x`; each pair distance is computed once.
std::vector<double> point_scores(const EmbeddingMatrix& x, const std::vector<int>& labels, std::size_t clusters,
                                 const std::vector<std::size_t>& sizes) {
  const std::size_t n = labels.size();
  // sums[i * clusters + c] = total distance from i to the members of c.
  std::vector<double> sums(n * clusters, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const auto ri = x.row(i);
    const auto li = static_cast<std::size_t>(labels[i]);
    for (std::size_t j = i + 1; j < n; ++j) {
      const double d = std::sqrt(squared_distance(ri, x.row(j)));
      sums[i * clusters + static_cast<std::size_t>(labels[j])] += d;
      sums[j * clusters + li] += d;
    }
  }
  std::vector<double> out(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const auto li = static_cast<std::size_t>(labels[i]);
    if (sizes[li] < 2) continue;
    const double ai = sums[i * clusters + li] / static_cast<double>(sizes[li] - 1);
    double bi = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < clusters; ++c)
      if (c != li && sizes[c] > 0) bi = std::min(bi, sums[i * clusters + c] / static_cast<double>(sizes[c]));
    const double denom = std::max(ai, bi);
    if (denom > 0) out[i] = (bi - ai) / denom;
  }
  return out;
}

}  // namespace

double silhouette(const EmbeddingMatrix& m, const ClusterAssignment& a, std::uint64_t seed) {
  a.validate();
  if (a.cluster_count() < 2)
    throw Error(ErrorKind::TooFewClusters, std::to_string(a.cluster_count()) + " cluster(s); silhouette needs 2");
  std::vector<std::string> ids;
  std::vector<int> labels;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a.labels[i] == kNoise) continue;
    ids.push_back(a.post_ids[i]);
    labels.push_back(a.labels[i]);
  }
  if (ids.size() > kSilhouetteExactLimit) {
    std::vector<std::size_t> order(ids.size());
    std::iota(order.begin(), order.end(), 0);
    Rng rng(derive_seed(seed, 0x73696c68ULL));
    for (std::size_t i = 0; i < kSilhouetteSample; ++i) std::swap(order[i], order[i + rng.below(order.size() - i)]);
    order.resize(kSilhouetteSample);
    std::sort(order.begin(), order.end());
    std::vector<std::string> sub_ids;
    std::vector<int> sub_labels;
    for (std::size_t i : order) {
      sub_ids.push_back(std::move(ids[i]));
      sub_labels.push_back(labels[i]);
    }
    ids = std::move(sub_ids);
    labels = std::move(sub_labels);
  }
  const EmbeddingMatrix x = m.select(ids);
  const std::size_t n = ids.size();
  const std::size_t clusters = static_cast<std::size_t>(*std::max_element(labels.begin(), labels.end())) + 1;
  std::vector<std::size_t> sizes(clusters, 0);
  for (int l : labels) ++sizes[static_cast<std::size_t>(l)];
  if (std::count_if(sizes.begin(), sizes.end(), [](std::size_t s) { return s > 0; }) < 2)
    throw Error(ErrorKind::TooFewClusters, "sampled rows cover fewer than 2 clusters");

  const std::vector<double> per_point = point_scores(x, labels, clusters, sizes);
  double total = 0.0;
  for (double v : per_point) total += v;
  return total / static_cast<double>(n);
}

std::vector<double> silhouette_samples(const EmbeddingMatrix& m, const ClusterAssignment& a) {
  a.validate();
  if (a.cluster_count() < 2)
    throw Error(ErrorKind::TooFewClusters, std::to_string(a.cluster_count()) + " cluster(s); silhouette needs 2");
  std::vector<std::string> ids;
  std::vector<int> labels;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a.labels[i] == kNoise) continue;
    ids.push_back(a.post_ids[i]);
    labels.push_back(a.labels[i]);
  }
  const std::size_t clusters = a.cluster_count();
  std::vector<std::size_t> sizes(clusters, 0);
  for (int l : labels) ++sizes[static_cast<std::size_t>(l)];
  const std::vector<double> scores = point_scores(m.select(ids), labels, clusters, sizes);
  std::vector<double> out(a.size(), std::numeric_limits<double>::quiet_NaN());
  for (std::size_t i = 0, k = 0; i < a.size(); ++i)
    if (a.labels[i] != kNoise) out[i] = scores[k++];
  return out;
}

FactualityStats factuality_stats(const ClusterAssignment& a, const Dataset& ds) {
  a.validate();
  FactualityStats out;
  std::size_t zeros = 0;
  const auto members = a.members();
  for (std::size_t c = 0; c < members.size(); ++c) {
    if (members[c].size() < 2) continue;
    std::vector<double> scores;
    for (std::size_t r : members[c])
      if (const auto f = ds.factuality_of(ds.post(post_row(ds, a.post_ids[r])))) scores.push_back(*f);
    if (scores.size() < 2) {
      ++out.insufficient_labels;
      continue;
    }
    const auto [lo, hi] = std::minmax_element(scores.begin(), scores.end());
    const double sd = *lo == *hi ? 0.0 : population_std(scores);
    if (sd == 0.0) ++zeros;
    out.per_cluster.emplace_back(static_cast<int>(c), sd);
  }
  out.qualifying = out.per_cluster.size();
  if (out.qualifying == 0)
    throw Error(ErrorKind::NoQualifyingClusters, "no cluster has at least 2 posts with 2 factuality labels (" +
                                                     std::to_string(out.insufficient_labels) +
                                                     " lack labels)");
  std::vector<double> stds;
  for (const auto& [label, sd] : out.per_cluster) stds.push_back(sd);
  out.avg = mean(stds);
  out.median = median(stds);
  out.std = population_std(stds);
  out.prop0 = static_cast<double>(zeros) / static_cast<double>(out.qualifying);
  return out;
}

ClusterDistributions cluster_distributions(const ClusterAssignment& a, const Dataset& ds) {
  a.validate();
  ClusterDistributions out;
  for (const auto& rows : a.members()) {
    if (rows.empty()) continue;
    ++out.clusters;
    out.posts += rows.size();
    out.max_size = std::max(out.max_size, rows.size());
    ++out.size_histogram[rows.size()];
    UtcSeconds lo = std::numeric_limits<UtcSeconds>::max();
    UtcSeconds hi = std::numeric_limits<UtcSeconds>::min();
    for (std::size_t r : rows) {
      const auto& post = ds.post(post_row(ds, a.post_ids[r]));
      lo = std::min(lo, post.published_time);
      hi = std::max(hi, post.published_time);
      ++out.platform_posts[post.platform.to_string()];
    }
    ++out.gap_histogram[(hi - lo) / kGapBucketSeconds * kGapBucketSeconds];
  }
  out.mean_size = out.clusters ? static_cast<double>(out.posts) / static_cast<double>(out.clusters) : 0.0;
  return out;
}

ChannelFrequency channel_frequency(const ClusterAssignment& a, const Dataset& ds, std::size_t top_n) {
  a.validate();
  ChannelFrequency out;
  std::map<std::string, ChannelCount> counts;
  std::size_t zero = 0;
  std::size_t labeled = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a.labels[i] == kNoise) continue;
    const ChannelRecord* ch = ds.channel_of(ds.post(post_row(ds, a.post_ids[i])));
    if (!ch) continue;
    ++out.posts_with_channel;
    if (ch->factuality) {
      ++labeled;
      if (*ch->factuality == 0) ++zero;
    }
    auto& entry = counts[ch->channel_id];
    if (entry.posts == 0) entry = {ch->channel_id, ch->name, ch->factuality, 0};
    ++entry.posts;
  }
  for (auto& [id, entry] : counts) out.top.push_back(std::move(entry));
  std::stable_sort(out.top.begin(), out.top.end(),
                   [](const ChannelCount& x, const ChannelCount& y) { return x.posts > y.posts; });
  if (out.top.size() > top_n) out.top.resize(top_n);
  out.fraction_factuality0 =
      out.posts_with_channel ? static_cast<double>(zero) / static_cast<double>(out.posts_with_channel) : 0.0;
  out.fraction_factuality0_labeled = labeled ? static_cast<double>(zero) / static_cast<double>(labeled) : 0.0;
  return out;
}

EvaluationReport evaluate(const std::string& method_name, const EmbeddingMatrix& features,
                          const ClusterAssignment& total, const Dataset& ds, std::uint64_t seed,
                          std::size_t channel_top_n) {
  EvaluationReport r;
  r.method_name = method_name;
  r.clusters_total = total.cluster_count();
  const ClusterAssignment kept = drop_singletons(total);
  r.clusters_kept = kept.cluster_count();
  r.posts_kept = kept.size() - kept.noise_count();
  try {
    r.silhouette = silhouette(features, kept, seed);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::TooFewClusters) throw;
    r.silhouette = kNaN;
  }
  try {
    const FactualityStats f = factuality_stats(kept, ds);
    r.fact_avg = f.avg;
    r.fact_median = f.median;
    r.fact_std = f.std;
    r.fact_prop0 = f.prop0;
    r.clusters_qualifying = f.qualifying;
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::NoQualifyingClusters) throw;
    r.fact_avg = r.fact_median = r.fact_std = r.fact_prop0 = kNaN;
  }
  r.distributions = cluster_distributions(kept, ds);
  r.channels = channel_frequency(kept, ds, channel_top_n);
  return r;
}

void write_report_json(const EvaluationReport& r, const std::filesystem::path& path) {
  using json = nlohmann::ordered_json;
  json doc;
  doc["method"] = r.method_name;
  if (!r.error.empty()) doc["error"] = r.error;
  doc["silhouette"] = r.silhouette;
  doc["factuality_std"] = {{"avg", r.fact_avg}, {"median", r.fact_median}, {"std", r.fact_std}, {"prop0", r.fact_prop0}};
  doc["clusters_total"] = r.clusters_total;
  doc["clusters_kept"] = r.clusters_kept;
  doc["clusters_qualifying"] = r.clusters_qualifying;
  doc["posts_kept"] = r.posts_kept;
  if (r.k) doc["k"] = r.k;
  doc["cross_base_merges"] = r.cross_base_merges;
  const auto& d = r.distributions;
  json sizes = json::object(), gaps = json::object(), platforms = json::object();
  for (const auto& [s, c] : d.size_histogram) sizes[std::to_string(s)] = c;
  for (const auto& [g, c] : d.gap_histogram) gaps[std::to_string(g)] = c;
  for (const auto& [p, c] : d.platform_posts) platforms[p] = c;
  doc["distributions"] = {{"clusters", d.clusters}, {"posts", d.posts},       {"mean_size", d.mean_size},
                          {"max_size", d.max_size}, {"sizes", sizes},          {"max_gap_seconds", gaps},
                          {"platform_posts", platforms}};
  json top = json::array();
  for (const auto& c : r.channels.top) {
    json row = {{"channel_id", c.channel_id}, {"name", c.name}, {"factuality", nullptr}, {"posts", c.posts}};
    if (c.factuality) row["factuality"] = *c.factuality;
    top.push_back(std::move(row));
  }
  doc["channels"] = {{"posts_with_channel", r.channels.posts_with_channel},
                     {"fraction_factuality0", r.channels.fraction_factuality0},
                     {"fraction_factuality0_labeled", r.channels.fraction_factuality0_labeled},
                     {"top", std::move(top)}};
  auto out = open_out(path);
  out << doc.dump(2) << '\n';
}

void write_table2(const std::vector<EvaluationReport>& rows, const std::filesystem::path& path) {
  auto out = open_out(path);
  detail::write_csv_row(out, {"Methods", "Silhouette", "Avg", "Median", "Std", "\xE2\x88\x9D" "0"});
  for (const auto& r : rows)
    detail::write_csv_row(out, {r.method_name, detail::format_double(r.silhouette), detail::format_double(r.fact_avg),
                                detail::format_double(r.fact_median), detail::format_double(r.fact_std),
                                detail::format_double(r.fact_prop0)});
}

void write_fig3_sizes(const std::vector<EvaluationReport>& rows, const std::filesystem::path& path) {
  auto out = open_out(path);
  detail::write_csv_row(out, {"method", "size", "clusters"});
  for (const auto& r : rows)
    for (const auto& [s, c] : r.distributions.size_histogram)
      detail::write_csv_row(out, {r.method_name, std::to_string(s), std::to_string(c)});
}

void write_fig3_gaps(const std::vector<EvaluationReport>& rows, const std::filesystem::path& path) {
  auto out = open_out(path);
  detail::write_csv_row(out, {"method", "gap_seconds", "clusters"});
  for (const auto& r : rows)
    for (const auto& [g, c] : r.distributions.gap_histogram)
      detail::write_csv_row(out, {r.method_name, std::to_string(g), std::to_string(c)});
}

void write_table3(const std::vector<EvaluationReport>& rows, const std::filesystem::path& path) {
  auto out = open_out(path);
  detail::write_csv_row(out, {"method", "rank", "channel_id", "name", "factuality", "posts"});
  for (const auto& r : rows)
    for (std::size_t i = 0; i < r.channels.top.size(); ++i) {
      const auto& c = r.channels.top[i];
      detail::write_csv_row(out, {r.method_name, std::to_string(i + 1), c.channel_id, c.name,
                                  c.factuality ? std::to_string(*c.factuality) : "", std::to_string(c.posts)});
    }
}

}  // namespace coordet
