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

#include <random>

#include "coordet/cluster.hpp"
#include "coordet/error.hpp"
#include "oracles.hpp"

namespace coordet {
namespace {

using testing::Points;

Points blobs(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, 0.1);
  Points pts;
  for (int i = 0; i < 50; ++i) pts.push_back({noise(rng), noise(rng)});
  for (int i = 0; i < 50; ++i) pts.push_back({10 + noise(rng), 10 + noise(rng)});
  return pts;
}

TEST(KMeans, DefaultK) {
  EXPECT_EQ(default_k(0), 1u);
  EXPECT_EQ(default_k(2), 1u);
  EXPECT_EQ(default_k(16941), 93u);
  EXPECT_EQ(default_k(200), 10u);
}

TEST(KMeans, SingleClusterIsTheMean) {
  const Points pts{{0, 0}, {2, 0}, {4, 3}, {2, 1}};
  const KMeansResult r = kmeans(testing::to_matrix(pts), 1, 1);
  EXPECT_NEAR(r.centroids[0], 2.0, 1e-12);
  EXPECT_NEAR(r.centroids[1], 1.0, 1e-12);
  // Sum of squared deviations from the mean.
  EXPECT_NEAR(r.inertia, 4 + 1 + 0 + 1 + 4 + 4 + 0 + 0, 1e-12);
}

TEST(KMeans, DistinctRowsZeroInertia) {
  const Points pts{{0, 0}, {1, 5}, {3, 3}, {7, 1}, {2, 2}};
  const KMeansResult r = kmeans(testing::to_matrix(pts), 5, 3);
  EXPECT_EQ(r.inertia, 0.0);
  EXPECT_EQ(r.assignment.cluster_count(), 5u);
}

TEST(KMeans, TwoBlobsMatchMembershipAndLloydOracle) {
  const Points pts = blobs(17);
  const EmbeddingMatrix m = testing::to_matrix(pts);
  const KMeansResult r = kmeans(m, 2, 42);
  for (int i = 1; i < 100; ++i) EXPECT_EQ(r.assignment.labels[i] == r.assignment.labels[0], i < 50);
  const auto oracle = testing::lloyd(pts, kmeanspp_seed(m, 2, 42), 300);
  EXPECT_NEAR(r.inertia, oracle.inertia, 1e-9);
  EXPECT_TRUE(r.converged);
}

TEST(KMeans, InertiaNonIncreasing) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0, 1);
  Points pts;
  for (int i = 0; i < 300; ++i) pts.push_back({u(rng), u(rng), u(rng)});
  const KMeansResult r = kmeans(testing::to_matrix(pts), 8, 5);
  for (std::size_t i = 1; i < r.inertia_history.size(); ++i)
    EXPECT_LE(r.inertia_history[i], r.inertia_history[i - 1] + 1e-12);
}

TEST(KMeans, KTooLargeAndDeterminism) {
  const Points pts{{0}, {1}, {2}};
  try {
    kmeans(testing::to_matrix(pts), 4, 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::KTooLarge);
  }
  const EmbeddingMatrix m = testing::to_matrix(blobs(2));
  EXPECT_EQ(kmeans(m, 3, 9).assignment, kmeans(m, 3, 9).assignment);
  KMeansOptions threaded;
  threaded.threads = 4;
  EXPECT_EQ(kmeans(m, 3, 9, threaded).assignment, kmeans(m, 3, 9).assignment);
}

TEST(KMeans, DuplicateRowsKeepLabelsContiguous) {
  const Points pts{{0}, {0}, {0}, {0}, {5}};
  const KMeansResult r = kmeans(testing::to_matrix(pts), 3, 1);
  EXPECT_NO_THROW(r.assignment.validate());
  EXPECT_EQ(r.centroids.size(), r.assignment.cluster_count());
}

TEST(KMeans, RandomFixturesMatchLloydOracle) {
  std::mt19937_64 rng(123);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int trial = 0; trial < 60; ++trial) {
    const std::size_t n = 3 + rng() % 10;
    const std::size_t k = 1 + rng() % std::min<std::size_t>(n, 4);
    Points pts;
    for (std::size_t i = 0; i < n; ++i) pts.push_back({u(rng), u(rng)});
    const EmbeddingMatrix m = testing::to_matrix(pts);
    const KMeansResult r = kmeans(m, k, trial);
    const auto oracle = testing::lloyd(pts, kmeanspp_seed(m, k, trial), 300);
    EXPECT_NEAR(r.inertia, oracle.inertia, 1e-9) << "trial " << trial;
    EXPECT_EQ(testing::canonical(r.assignment.labels), testing::canonical(oracle.labels)) << "trial " << trial;
  }
}

}  // namespace
}  // namespace coordet
