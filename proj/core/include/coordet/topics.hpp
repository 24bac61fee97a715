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

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "coordet/cluster.hpp"
#include "coordet/datamodel.hpp"
#include "coordet/embed.hpp"

namespace coordet {

struct TopicTerm {
  std::string term;
  double weight = 0.0;

  friend bool operator==(const TopicTerm&, const TopicTerm&) = default;
};

/// Class-based TF-IDF over the non-noise clusters of an assignment.
/// W(t, c) = tf(t, c) * ln(1 + A / f(t)) with f(t) the term's frequency over
/// all classes and A the average number of words per class.
struct TopicModel {
  /// Ranked terms per cluster label, weight descending, then term ascending.
  std::vector<std::vector<TopicTerm>> topics;
  std::vector<std::string> vocabulary;
  /// Sparse per-class counts: (term index, count), sorted by term index.
  std::vector<std::vector<std::pair<std::uint32_t, std::uint64_t>>> class_tf;
  /// f(t), indexed like vocabulary.
  std::vector<std::uint64_t> term_frequency;
  double average_words = 0.0;

  /// W recomputed from the stored tables; 0 when the term is absent from the class.
  double weight(std::size_t cluster, std::uint32_t term) const;
};

/// Throws EmptyVocabulary when the clustered posts contain no tokens.
TopicModel ctfidf(const ClusterAssignment& a, const Dataset& ds, std::size_t top_n);

/// Maximal marginal relevance: greedily picks the candidate maximizing
/// lambda * relevance - (1 - lambda) * max cosine to the already picked terms.
/// Relevance is the candidate weight divided by the largest weight. Terms
/// without a vector count as orthogonal to everything. Ties go to the earlier
/// candidate.
std::vector<TopicTerm> mmr_rerank(const std::vector<TopicTerm>& candidates, const EmbeddingMatrix& term_vectors,
                                  double lambda, std::size_t top_n);

/// JSON object: cluster label -> [{term, weight}].
void write_topics(const std::vector<std::vector<TopicTerm>>& topics, const std::filesystem::path& path);
std::vector<std::vector<TopicTerm>> read_topics(const std::filesystem::path& path);

}  // namespace coordet
