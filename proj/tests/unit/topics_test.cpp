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

#include <algorithm>
#include <cmath>
#include <random>

#include "coordet/error.hpp"
#include "coordet/topics.hpp"
#include "fixtures.hpp"

namespace coordet {
namespace {

struct Corpus {
  Dataset ds;
  ClusterAssignment a;
};

Corpus corpus(const std::vector<std::pair<std::string, int>>& docs) {
  std::vector<testing::PostSpec> specs;
  Corpus c;
  for (std::size_t i = 0; i < docs.size(); ++i) {
    testing::PostSpec s;
    s.id = "d" + std::to_string(i);
    s.text = docs[i].first;
    specs.push_back(s);
    c.a.post_ids.push_back(s.id);
    c.a.labels.push_back(docs[i].second);
  }
  c.ds = testing::make_dataset(specs);
  return c;
}

double weight_of(const std::vector<TopicTerm>& terms, const std::string& t) {
  for (const auto& x : terms)
    if (x.term == t) return x.weight;
  return -1;
}

TEST(Ctfidf, HandEvaluatedWeight) {
  const Corpus c = corpus({{"white helmets helmets", 0}, {"russia today", 1}});
  const TopicModel m = ctfidf(c.a, c.ds, 10);
  EXPECT_NEAR(m.average_words, 2.5, 1e-12);
  EXPECT_NEAR(weight_of(m.topics[0], "helmets"), 2 * std::log(2.25), 1e-12);
  EXPECT_NEAR(weight_of(m.topics[0], "white"), std::log(3.5), 1e-12);
  EXPECT_EQ(m.topics[0][0].term, "helmets");
}

TEST(Ctfidf, UniformTermSameWeightEverywhere) {
  const Corpus c = corpus({{"news alpha", 0}, {"news beta beta", 1}, {"news gamma", 2}});
  const TopicModel m = ctfidf(c.a, c.ds, 10);
  const double w = weight_of(m.topics[0], "news");
  EXPECT_GT(w, 0);
  EXPECT_EQ(weight_of(m.topics[1], "news"), w);
  EXPECT_EQ(weight_of(m.topics[2], "news"), w);
}

TEST(Ctfidf, SingleClassRanksByTf) {
  // A = 6; W = tf * ln(1 + 6 / tf) is increasing in tf.
  const Corpus c = corpus({{"x x x y y z", 0}});
  const TopicModel m = ctfidf(c.a, c.ds, 3);
  ASSERT_EQ(m.topics[0].size(), 3u);
  EXPECT_EQ(m.topics[0][0].term, "x");
  EXPECT_EQ(m.topics[0][1].term, "y");
  EXPECT_EQ(m.topics[0][2].term, "z");
  EXPECT_NEAR(m.topics[0][0].weight, 3 * std::log(3.0), 1e-12);
  EXPECT_NEAR(m.topics[0][1].weight, 2 * std::log(4.0), 1e-12);
  EXPECT_NEAR(m.topics[0][2].weight, std::log(7.0), 1e-12);
}

TEST(Ctfidf, NoiseExcludedAndStoredTablesReproduceWeights) {
  const Corpus c = corpus({{"apple banana apple", 0},
                           {"banana cherry", 0},
                           {"cherry durian elder", 1},
                           {"fig fig fig", -1},
                           {"elder apple", 1}});
  const TopicModel m = ctfidf(c.a, c.ds, 10);
  EXPECT_EQ(std::count(m.vocabulary.begin(), m.vocabulary.end(), "fig"), 0);
  ASSERT_EQ(m.topics.size(), 2u);
  for (std::size_t k = 0; k < 2; ++k) {
    for (const auto& t : m.topics[k]) {
      const auto idx = static_cast<std::uint32_t>(
          std::find(m.vocabulary.begin(), m.vocabulary.end(), t.term) - m.vocabulary.begin());
      EXPECT_NEAR(m.weight(k, idx), t.weight, 1e-9);
      EXPECT_GE(t.weight, 0.0);
    }
    for (std::size_t i = 1; i < m.topics[k].size(); ++i)
      EXPECT_GE(m.topics[k][i - 1].weight, m.topics[k][i].weight);
  }
}

TEST(Ctfidf, Errors) {
  const Corpus empty = corpus({{"", 0}, {"", 0}});
  try {
    ctfidf(empty.a, empty.ds, 5);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::EmptyVocabulary);
  }
  const Corpus c = corpus({{"a b", 0}});
  EXPECT_THROW(ctfidf(c.a, c.ds, 0), Error);
}

EmbeddingMatrix vectors(const std::vector<std::pair<std::string, std::vector<double>>>& rows) {
  std::vector<std::string> ids;
  std::vector<double> values;
  for (const auto& [id, v] : rows) {
    ids.push_back(id);
    values.insert(values.end(), v.begin(), v.end());
  }
  return EmbeddingMatrix(ids, rows[0].second.size(), values);
}

TEST(Mmr, LambdaOneKeepsRelevanceOrder) {
  const std::vector<TopicTerm> cands{{"a", 5}, {"b", 4}, {"c", 3}, {"d", 1}};
  const EmbeddingMatrix v = vectors({{"a", {1, 0}}, {"b", {1, 0}}, {"c", {0, 1}}, {"d", {1, 1}}});
  EXPECT_EQ(mmr_rerank(cands, v, 1.0, 4), cands);
}

TEST(Mmr, SuppressesDuplicates) {
  const std::vector<TopicTerm> cands{{"a", 5}, {"a2", 4.9}, {"c", 3}};
  const EmbeddingMatrix v = vectors({{"a", {1, 0}}, {"a2", {1, 0}}, {"c", {0, 1}}});
  const auto out = mmr_rerank(cands, v, 0.5, 3);
  ASSERT_EQ(out.size(), 3u);
  EXPECT_EQ(out[0].term, "a");
  EXPECT_EQ(out[1].term, "c");
  EXPECT_THROW(mmr_rerank(cands, v, 1.5, 3), Error);
}

TEST(Mmr, GreedyTraceMatchesStepwiseBruteForce) {
  std::mt19937_64 rng(12);
  std::normal_distribution<double> normal;
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<TopicTerm> cands;
    std::vector<std::pair<std::string, std::vector<double>>> rows;
    for (int i = 0; i < 5; ++i) {
      cands.push_back({"t" + std::to_string(i), 10.0 - i - 0.5 * (rng() % 2)});
      rows.push_back({"t" + std::to_string(i), {normal(rng), normal(rng), normal(rng)}});
    }
    const EmbeddingMatrix v = vectors(rows);
    const double lambda = 0.3 + 0.1 * (trial % 5);
    const auto out = mmr_rerank(cands, v, lambda, 5);

    double max_w = 0;
    for (const auto& c : cands) max_w = std::max(max_w, c.weight);
    std::vector<bool> used(5, false);
    std::vector<std::size_t> picked;
    for (int step = 0; step < 5; ++step) {
      std::size_t best = 5;
      double best_score = -1e300;
      for (std::size_t i = 0; i < 5; ++i) {
        if (used[i]) continue;
        double sim = 0.0;
        bool any = false;
        for (std::size_t j : picked) {
          const double s = cosine_similarity(v.row(i), v.row(j));
          sim = any ? std::max(sim, s) : s;
          any = true;
        }
        const double score = lambda * cands[i].weight / max_w - (1 - lambda) * sim;
        if (score > best_score) {
          best_score = score;
          best = i;
        }
      }
      used[best] = true;
      picked.push_back(best);
      ASSERT_EQ(out[step].term, cands[best].term) << "trial " << trial << " step " << step;
    }
  }
}

TEST(Mmr, SubsetAndMissingVectors) {
  const std::vector<TopicTerm> cands{{"a", 3}, {"zz", 2}, {"b", 1}};
  const EmbeddingMatrix v = vectors({{"a", {1, 0}}, {"b", {1, 0}}});
  const auto out = mmr_rerank(cands, v, 0.5, 2);
  ASSERT_EQ(out.size(), 2u);
  EXPECT_EQ(out[0].term, "a");
  EXPECT_EQ(out[1].term, "zz");
  EXPECT_EQ(mmr_rerank(cands, v, 0.5, 10).size(), 3u);
}

TEST(TopicsIo, RoundTrip) {
  const std::vector<std::vector<TopicTerm>> topics{{{"a", 1.5}, {"b", 0.25}}, {}, {{"c", 3}}};
  const auto path = testing::scratch_dir("topics") / "t.json";
  write_topics(topics, path);
  EXPECT_EQ(read_topics(path), topics);
}

}  // namespace
}  // namespace coordet
