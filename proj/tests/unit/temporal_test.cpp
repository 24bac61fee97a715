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
#include <limits>
#include <random>

#include "coordet/cluster.hpp"
#include "coordet/error.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

namespace coordet {
namespace {

ClusterAssignment assignment_for(const Dataset& ds, std::vector<int> labels) {
  ClusterAssignment a;
  for (const auto& p : ds.posts()) a.post_ids.push_back(p.post_id);
  a.labels = std::move(labels);
  return a;
}

TEST(Temporal, ChainedBurstAndSingleton) {
  const Dataset ds = testing::timed_dataset({0, 30, 60, 500});
  const ClusterAssignment t = temporal_subdivide(assignment_for(ds, {0, 0, 0, 0}), ds, {52, 2});
  EXPECT_EQ(t.labels, (std::vector<int>{0, 0, 0, 1}));
  EXPECT_EQ(t.stage, ClusterStage::temporal);
  EXPECT_EQ(drop_singletons(t).labels, (std::vector<int>{0, 0, 0, -1}));
}

TEST(Temporal, ChainingSpansSixMinutes) {
  std::vector<std::int64_t> times;
  for (int i = 0; i <= 7; ++i) times.push_back(50 * i);
  const Dataset ds = testing::timed_dataset(times);
  const ClusterAssignment t = temporal_subdivide(assignment_for(ds, std::vector<int>(8, 0)), ds, {52, 2});
  EXPECT_EQ(t.cluster_count(), 1u);
}

TEST(Temporal, SinglePostBaseCluster) {
  const Dataset ds = testing::timed_dataset({100, 0, 5});
  const ClusterAssignment t = temporal_subdivide(assignment_for(ds, {0, 1, 1}), ds, {52, 2});
  EXPECT_EQ(t.labels, (std::vector<int>{0, 1, 1}));
}

TEST(Temporal, BaseNoiseStaysNoise) {
  const Dataset ds = testing::timed_dataset({0, 1, 2});
  const ClusterAssignment t = temporal_subdivide(assignment_for(ds, {-1, 0, 0}), ds, {52, 2});
  EXPECT_EQ(t.labels, (std::vector<int>{-1, 0, 0}));
}

TEST(Temporal, BorderJoinsNearestCoreEarlierOnTie) {
  // 51 is a border point exactly 48 s from a core on either side.
  const Dataset ds = testing::timed_dataset({0, 1, 2, 3, 51, 99, 100, 101, 102});
  const ClusterAssignment t = temporal_subdivide(assignment_for(ds, std::vector<int>(9, 0)), ds, {48, 4});
  EXPECT_EQ(t.labels, (std::vector<int>{0, 0, 0, 0, 0, 1, 1, 1, 1}));
}

TEST(Temporal, InfiniteEpsilonRestoresBase) {
  const Dataset ds = testing::timed_dataset({0, 1000, 99999, 5, 7});
  const ClusterAssignment base = assignment_for(ds, {0, 0, 0, 1, 1});
  const ClusterAssignment t =
      temporal_subdivide(base, ds, {std::numeric_limits<double>::infinity(), 2});
  EXPECT_EQ(t.labels, base.labels);
}

TEST(Temporal, ParamsValidated) {
  EXPECT_THROW((TemporalParams{0, 2}.validate()), Error);
  EXPECT_THROW((TemporalParams{52, 1}.validate()), Error);
  EXPECT_NO_THROW((TemporalParams{52, 2}.validate()));
}

TEST(Temporal, MissingPostsReported) {
  const Dataset ds = testing::timed_dataset({0, 1});
  ClusterAssignment a = assignment_for(ds, {0, 0});
  a.post_ids[1] = "ghost";
  EXPECT_THROW(temporal_subdivide(a, ds, {52, 2}), MissingRows);
}

TEST(Temporal, MatchesBruteForceAndRefines) {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = 1 + rng() % 12;
    std::vector<std::int64_t> times;
    std::vector<int> base;
    const int clusters = 1 + static_cast<int>(rng() % 3);
    for (std::size_t i = 0; i < n; ++i) {
      times.push_back(static_cast<std::int64_t>(rng() % 200));
      base.push_back(static_cast<int>(rng() % (clusters + 1)) - 1);
    }
    const Dataset ds = testing::timed_dataset(times);
    const ClusterAssignment b = compact_labels(assignment_for(ds, base));
    const double eps = 5.0 + static_cast<double>(rng() % 60);
    const std::size_t min_pts = 2 + rng() % 3;
    const ClusterAssignment t = temporal_subdivide(b, ds, {eps, min_pts});
    EXPECT_EQ(t.labels, testing::temporal_bruteforce(b.labels, times, eps, min_pts)) << "trial " << trial;
    EXPECT_EQ(cross_base_merges(t, b), 0u);
    // Every member of a multi-post group has a neighbour within eps.
    const auto members = t.members();
    for (const auto& m : members) {
      if (m.size() < 2) continue;
      for (std::size_t i : m) {
        bool near = false;
        for (std::size_t j : m) near |= i != j && std::abs(times[i] - times[j]) <= eps;
        EXPECT_TRUE(near);
      }
    }
  }
}

TEST(DropSingletons, Examples) {
  ClusterAssignment a;
  a.post_ids = {"a", "b", "c"};
  a.labels = {0, 0, 1};
  EXPECT_EQ(drop_singletons(a).labels, (std::vector<int>{0, 0, -1}));
  a.labels = {0, 1, 2};
  EXPECT_EQ(drop_singletons(a).labels, (std::vector<int>{-1, -1, -1}));
  a.labels = {1, 0, 1};
  EXPECT_EQ(drop_singletons(a).labels, (std::vector<int>{0, -1, 0}));
}

TEST(Assignment, ValidationAndCsvRoundTrip) {
  ClusterAssignment a;
  a.post_ids = {"a", "b", "c"};
  a.labels = {0, 2, -1};
  EXPECT_THROW(a.validate(), Error);
  a.labels = {1, 0, -1};
  a.stage = ClusterStage::temporal;
  const auto path = testing::scratch_dir("assignment") / "a.csv";
  write_assignment(a, path);
  EXPECT_EQ(read_assignment(path), a);
}

TEST(CrossBaseMerges, DetectsMixing) {
  ClusterAssignment coarse, fine;
  coarse.post_ids = fine.post_ids = {"a", "b", "c"};
  coarse.labels = {0, 1, -1};
  fine.labels = {0, 0, 1};
  EXPECT_EQ(cross_base_merges(fine, coarse), 2u);
}

}  // namespace
}  // namespace coordet
