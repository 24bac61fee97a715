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

#include <benchmark/benchmark.h>

#include <map>
#include <random>

#include "coordet/cluster.hpp"
#include "coordet/embed.hpp"
#include "coordet/eval.hpp"
#include "coordet/graph.hpp"
#include "coordet/synth.hpp"

namespace {

using namespace coordet;

const SyntheticData& corpus(std::size_t background) {
  static std::map<std::size_t, SyntheticData> cache;
  auto it = cache.find(background);
  if (it == cache.end()) {
    CampaignSpec spec;
    spec.background_posts = background;
    it = cache.emplace(background, generate(spec)).first;
  }
  return it->second;
}

EmbeddingMatrix blobs(std::size_t n, std::size_t dim) {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> normal;
  std::vector<std::string> ids;
  std::vector<double> values;
  for (std::size_t i = 0; i < n; ++i) {
    ids.push_back("p" + std::to_string(i));
    for (std::size_t d = 0; d < dim; ++d) values.push_back(normal(rng) + static_cast<double>(i % 8) * 4.0);
  }
  return {std::move(ids), dim, std::move(values)};
}

ClusterAssignment labels_mod(const EmbeddingMatrix& m, int k) {
  ClusterAssignment a;
  a.post_ids = m.row_ids();
  for (std::size_t i = 0; i < m.rows(); ++i) a.labels.push_back(static_cast<int>(i % k));
  return a;
}

void BM_Node2VecWalks(benchmark::State& state) {
  const HeteroGraph g = build_graph(corpus(static_cast<std::size_t>(state.range(0))).dataset);
  WalkConfig cfg;
  cfg.walks_per_node = 2;
  cfg.walk_length = 40;
  for (auto _ : state) benchmark::DoNotOptimize(node2vec_walks(g, cfg));
  state.SetItemsProcessed(state.iterations() * g.node_count() * cfg.walks_per_node * cfg.walk_length);
}
BENCHMARK(BM_Node2VecWalks)->Arg(1000)->Arg(5000)->Unit(benchmark::kMillisecond);

void BM_MetaPathWalks(benchmark::State& state) {
  const HeteroGraph g = build_graph(corpus(static_cast<std::size_t>(state.range(0))).dataset);
  WalkConfig cfg;
  cfg.walks_per_node = 2;
  cfg.walk_length = 40;
  const MetaPathSet paths = MetaPathSet::defaults();
  for (auto _ : state) benchmark::DoNotOptimize(metapath_walks(g, paths, cfg));
}
BENCHMARK(BM_MetaPathWalks)->Arg(1000)->Arg(5000)->Unit(benchmark::kMillisecond);

void BM_Sgns(benchmark::State& state) {
  const HeteroGraph g = build_graph(corpus(1000).dataset);
  WalkConfig wc;
  wc.walks_per_node = 2;
  wc.walk_length = 40;
  const TokenCorpus tokens = to_token_corpus(node2vec_walks(g, wc));
  SgnsConfig cfg;
  cfg.dim = static_cast<std::size_t>(state.range(0));
  cfg.epochs = 1;
  for (auto _ : state) benchmark::DoNotOptimize(train_sgns(tokens, cfg));
}
BENCHMARK(BM_Sgns)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

void BM_Hdbscan(benchmark::State& state) {
  const EmbeddingMatrix m = blobs(static_cast<std::size_t>(state.range(0)), 16);
  for (auto _ : state) benchmark::DoNotOptimize(hdbscan(m, {5, 5, 1}));
}
BENCHMARK(BM_Hdbscan)->Arg(500)->Arg(2000)->Unit(benchmark::kMillisecond);

void BM_KMeans(benchmark::State& state) {
  const EmbeddingMatrix m = blobs(static_cast<std::size_t>(state.range(0)), 16);
  for (auto _ : state) benchmark::DoNotOptimize(kmeans(m, default_k(m.rows()), 42));
}
BENCHMARK(BM_KMeans)->Arg(2000)->Arg(8000)->Unit(benchmark::kMillisecond);

void BM_Silhouette(benchmark::State& state) {
  const EmbeddingMatrix m = blobs(static_cast<std::size_t>(state.range(0)), 64);
  const ClusterAssignment a = labels_mod(m, 8);
  for (auto _ : state) benchmark::DoNotOptimize(silhouette(m, a));
}
BENCHMARK(BM_Silhouette)->Arg(1000)->Arg(4000)->Unit(benchmark::kMillisecond);

void BM_Temporal(benchmark::State& state) {
  const Dataset& ds = corpus(static_cast<std::size_t>(state.range(0))).dataset;
  ClusterAssignment base;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    base.post_ids.push_back(ds.post(i).post_id);
    base.labels.push_back(static_cast<int>(i % 50));
  }
  for (auto _ : state) benchmark::DoNotOptimize(temporal_subdivide(base, ds, {}));
}
BENCHMARK(BM_Temporal)->Arg(5000)->Arg(20000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
