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

#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <iterator>
#include <limits>
#include <map>
#include <set>

#include "coordet/error.hpp"
#include "coordet/pipeline.hpp"
#include "coordet/synth.hpp"
#include "coordet/topics.hpp"
#include "fixtures.hpp"

namespace coordet {
namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

TEST(MethodConfig, NamesRoundTripInTableOrder) {
  const std::vector<std::string> expected{
      "Doc2Vec",           "Doc2Vec+PostTime",           "BERTopic",           "BERTopic+PostTime",
      "Doc2Vec+N2V",       "Doc2Vec+PostTime+N2V",       "BERTopic+N2V",       "BERTopic+PostTime+N2V",
      "Doc2Vec+MP2V",      "Doc2Vec+PostTime+MP2V",      "BERTopic+MP2V",      "BERTopic+PostTime+MP2V"};
  const auto grid = MethodConfig::table2_grid();
  ASSERT_EQ(grid.size(), 12u);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    EXPECT_EQ(grid[i].name(), expected[i]);
    EXPECT_EQ(MethodConfig::parse(expected[i]), grid[i]);
  }
  EXPECT_THROW(MethodConfig::parse("Doc2Vec+N2V+PostTime"), Error);
}

TEST(PipelineConfig, SetLoadAndText) {
  PipelineConfig cfg;
  cfg.set("temporal.epsilon", "30");
  cfg.set("text", "external");
  EXPECT_EQ(cfg.temporal.epsilon_seconds, 30.0);
  EXPECT_EQ(cfg.method.text, TextRoute::external);
  EXPECT_THROW(cfg.set("no.such.key", "1"), Error);
  EXPECT_THROW(cfg.set("kmeans.k", "many"), Error);

  const auto path = testing::scratch_dir("cfg") / "run.conf";
  std::ofstream(path) << cfg.to_text() << "# trailing comment\n";
  const PipelineConfig back = PipelineConfig::load(path);
  EXPECT_EQ(back.to_entries(), cfg.to_entries());
  EXPECT_EQ(back.hash(), cfg.hash());
}

TEST(PipelineConfig, HashTracksEveryResultField) {
  const std::map<std::string, std::string> changes{
      {"posts", "elsewhere.jsonl"}, {"videos", "elsewhere.jsonl"}, {"channels", "elsewhere.csv"},
      {"external_vectors", "v.emb"}, {"text", "external"}, {"network", "mp2v"}, {"temporal", "false"},
      {"seed", "7"}, {"threads", "3"}, {"ingest.strict", "true"}, {"ingest.action", "reply"},
      {"ingest.window_begin", "2021-01-01T00:00:00Z"}, {"ingest.window_end", "2022-01-01T00:00:00Z"},
      {"text.dim", "33"}, {"text.window", "3"}, {"text.negatives", "7"}, {"text.epochs", "9"},
      {"text.learning_rate", "0.0375"}, {"walks.per_node", "3"}, {"walks.length", "11"}, {"walks.p", "0.5"},
      {"walks.q", "2"}, {"walks.metapaths", "video,channel,video"}, {"node.dim", "17"}, {"node.window", "4"},
      {"node.negatives", "3"}, {"node.epochs", "2"}, {"node.learning_rate", "0.0125"}, {"align.dim", "12"},
      {"kmeans.k", "4"}, {"kmeans.max_iterations", "10"}, {"hdbscan.min_cluster_size", "9"},
      {"hdbscan.min_samples", "9"}, {"temporal.epsilon", "12.5"}, {"temporal.min_pts", "5"},
      {"topics.candidates", "11"}, {"topics.top_n", "4"}, {"topics.mmr_lambda", "0.25"},
      {"report.channels_top_n", "3"}};
  const PipelineConfig base;
  for (const auto& [key, value] : base.to_entries()) {
    PipelineConfig cfg = base;
    if (key == "output_dir" || key == "cache") {
      cfg.set(key, key == "cache" ? (base.cache ? "false" : "true") : "other-dir");
      EXPECT_EQ(cfg.hash(), base.hash()) << key;
      continue;
    }
    const auto it = changes.find(key);
    ASSERT_NE(it, changes.end()) << "no alternative for " << key;
    ASSERT_NE(it->second, value) << key;
    cfg.set(key, it->second);
    EXPECT_NE(cfg.hash(), base.hash()) << key;
    cfg.set(key, value);
    EXPECT_EQ(cfg.hash(), base.hash()) << key;
  }
}

TEST(PipelineConfig, ValidateRejectsBadSettings) {
  PipelineConfig cfg;
  cfg.align_dim = 0;
  EXPECT_THROW(cfg.validate(), Error);
  cfg = {};
  cfg.mmr_lambda = 1.5;
  EXPECT_THROW(cfg.validate(), Error);
  cfg = {};
  cfg.temporal.min_pts = 1;
  EXPECT_THROW(cfg.validate(), Error);
}

TEST(Sha256, KnownDigests) {
  EXPECT_EQ(sha256_hex(""), "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  EXPECT_EQ(sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

// Small synthetic corpus and fast settings shared by the pipeline tests.
class SmallRun : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    dir_ = new std::filesystem::path(testing::scratch_dir("pipeline_data"));
    CampaignSpec spec;
    spec.n_campaigns = 4;
    spec.posts_min = 6;
    spec.posts_max = 8;
    spec.background_posts = 120;
    const SyntheticData d = generate(spec);
    write_dataset(d.dataset, *dir_);
    write_binary_vectors(synthetic_sentence_vectors(d.dataset, 24), *dir_ / "vectors.emb");
    ds_ = new Dataset(d.dataset);
  }
  static void TearDownTestSuite() {
    delete ds_;
    delete dir_;
  }

  static PipelineConfig config(const std::string& out) {
    PipelineConfig cfg;
    cfg.posts = *dir_ / "posts.jsonl";
    cfg.videos = *dir_ / "videos.jsonl";
    cfg.channels = *dir_ / "channels.csv";
    cfg.external_vectors = *dir_ / "vectors.emb";
    cfg.output_dir = testing::scratch_dir(out);
    cfg.cache = false;
    for (const auto& [k, v] : std::vector<std::pair<std::string, std::string>>{
             {"text.dim", "16"}, {"text.epochs", "5"}, {"walks.per_node", "2"}, {"walks.length", "10"},
             {"node.dim", "16"}, {"node.epochs", "1"}, {"align.dim", "12"}, {"hdbscan.min_cluster_size", "3"},
             {"hdbscan.min_samples", "3"}})
      cfg.set(k, v);
    return cfg;
  }

  static std::filesystem::path* dir_;
  static Dataset* ds_;
};

std::filesystem::path* SmallRun::dir_ = nullptr;
Dataset* SmallRun::ds_ = nullptr;

TEST_F(SmallRun, RunWritesStageArtifactsAndStableManifest) {
  const PipelineConfig a = config("run_a");
  const RunManifest m = run_pipeline(a);
  const std::vector<std::string> names{"ingest", "graph", "embed", "semantic", "temporal", "topics", "evaluate"};
  ASSERT_EQ(m.stages.size(), names.size());
  for (std::size_t i = 0; i < names.size(); ++i) {
    EXPECT_EQ(m.stages[i].name, names[i]);
    EXPECT_EQ(m.stages[i].sha256, sha256_file(a.output_dir / m.stages[i].artifact));
  }
  EXPECT_EQ(m.config_hash, a.hash());
  EXPECT_EQ(m.report.cross_base_merges, 0u);

  // Artifacts parse back.
  const EmbeddingMatrix features = read_embeddings(a.output_dir / "features.emb");
  EXPECT_EQ(features.rows(), ds_->size());
  const ClusterAssignment semantic = read_assignment(a.output_dir / "semantic.csv");
  const ClusterAssignment kept = read_assignment(a.output_dir / "clusters.csv");
  const ClusterAssignment total = read_assignment(a.output_dir / "clusters_total.csv");
  EXPECT_EQ(semantic.size(), ds_->size());
  EXPECT_EQ(kept.labels, drop_singletons(total).labels);
  EXPECT_EQ(cross_base_merges(total, semantic), 0u);
  EXPECT_EQ(read_topics(a.output_dir / "topics.json").size(), semantic.cluster_count());

  PipelineConfig b = config("run_b");
  run_pipeline(b);
  EXPECT_EQ(slurp(a.output_dir / "manifest.json"), slurp(b.output_dir / "manifest.json"));
  for (const auto& s : m.stages)
    EXPECT_EQ(slurp(a.output_dir / s.artifact), slurp(b.output_dir / s.artifact)) << s.name;
}

TEST_F(SmallRun, CacheDoesNotChangeResults) {
  PipelineConfig cfg = config("run_cached");
  cfg.cache = true;
  const RunManifest first = run_pipeline(cfg);
  const RunManifest second = run_pipeline(cfg);
  ASSERT_EQ(first.stages.size(), second.stages.size());
  for (std::size_t i = 0; i < first.stages.size(); ++i) EXPECT_EQ(first.stages[i].sha256, second.stages[i].sha256);
  const RunManifest fresh = run_pipeline(config("run_uncached"));
  for (std::size_t i = 0; i < first.stages.size(); ++i) EXPECT_EQ(first.stages[i].sha256, fresh.stages[i].sha256);
}

TEST_F(SmallRun, StageErrorNamesTheStage) {
  PipelineConfig cfg = config("run_fail");
  cfg.posts = *dir_ / "missing.jsonl";
  try {
    run_pipeline(cfg);
    FAIL();
  } catch (const StageError& e) {
    EXPECT_EQ(e.stage(), "ingest");
  }
  EXPECT_NE(slurp(cfg.output_dir / "manifest.json").find("\"failed_stage\""), std::string::npos);

  cfg = config("run_fail_vectors");
  cfg.method = MethodConfig::parse("BERTopic");
  cfg.external_vectors = *dir_ / "missing.emb";
  try {
    run_pipeline(cfg);
    FAIL();
  } catch (const StageError& e) {
    EXPECT_EQ(e.stage(), "embed");
  }
}

TEST_F(SmallRun, AblationRowsFollowGrid) {
  const PipelineConfig cfg = config("ablation");
  EXPECT_TRUE(run_ablation(*ds_, {}, cfg).rows.empty());
  const auto grid = MethodConfig::table2_grid();
  const AblationResult r = run_ablation(*ds_, grid, cfg);
  ASSERT_EQ(r.rows.size(), 12u);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    EXPECT_EQ(r.rows[i].method_name, grid[i].name());
    EXPECT_TRUE(r.rows[i].error.empty()) << r.rows[i].error;
    EXPECT_EQ(r.rows[i].cross_base_merges, 0u);
  }
  EXPECT_NEAR(r.dataset_std, dataset_factuality_std(*ds_), 1e-15);
}

TEST_F(SmallRun, EpsilonSweep) {
  PipelineConfig cfg = config("sweep");
  const MethodConfig variant = MethodConfig::parse("Doc2Vec+PostTime+N2V");
  const std::vector<double> eps{10, 30, 60, 90, 120, std::numeric_limits<double>::infinity()};
  const auto rows = epsilon_sweep(*ds_, variant, eps, cfg);
  ASSERT_EQ(rows.size(), eps.size());
  for (std::size_t i = 0; i < eps.size(); ++i) EXPECT_EQ(rows[i].epsilon, eps[i]);
  // Clusters only grow with epsilon, so kept posts cannot shrink.
  for (std::size_t i = 1; i < rows.size(); ++i) EXPECT_GE(rows[i].posts_kept, rows[i - 1].posts_kept);

  // With an unbounded window and min_pts 2 the temporal stage keeps every
  // semantic cluster of two or more posts.
  EmbeddingStore store(*ds_, cfg, std::nullopt);
  const SemanticResult semantic = semantic_clustering(store.features(variant.text, variant.network), variant.text, cfg);
  const ClusterAssignment pre = drop_singletons(semantic.assignment);
  EXPECT_EQ(rows.back().clusters_kept, pre.cluster_count());
  EXPECT_EQ(rows.back().posts_kept, pre.size() - pre.noise_count());

  EXPECT_THROW(epsilon_sweep(*ds_, MethodConfig::parse("Doc2Vec+N2V"), eps, cfg), Error);
}

}  // namespace
}  // namespace coordet
