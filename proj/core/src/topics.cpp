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

#include "coordet/topics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <unordered_map>

#include <nlohmann/json.hpp>

#include "coordet/error.hpp"

namespace coordet {

double TopicModel::weight(std::size_t cluster, std::uint32_t term) const {
  const auto& row = class_tf.at(cluster);
  auto it = std::lower_bound(row.begin(), row.end(), std::make_pair(term, std::uint64_t{0}),
                             [](const auto& x, const auto& y) { return x.first < y.first; });
  if (it == row.end() || it->first != term) return 0.0;
  const auto tf = static_cast<double>(it->second);
  return tf * std::log(1.0 + average_words / static_cast<double>(term_frequency.at(term)));
}

TopicModel ctfidf(const ClusterAssignment& a, const Dataset& ds, std::size_t top_n) {
  if (top_n == 0) throw Error(ErrorKind::InvalidArgument, "top_n must be positive");
  a.validate();
  const std::size_t classes = a.cluster_count();
  TopicModel model;
  std::unordered_map<std::string, std::uint32_t> index;
  std::vector<std::unordered_map<std::uint32_t, std::uint64_t>> counts(classes);
  std::vector<std::string> missing;
  std::uint64_t total_words = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a.labels[i] == kNoise) continue;
    const auto idx = ds.post_index(a.post_ids[i]);
    if (!idx) {
      missing.push_back(a.post_ids[i]);
      continue;
    }
    for (auto& token : tokenize(ds.post(*idx).text)) {
      auto [it, inserted] = index.try_emplace(token, static_cast<std::uint32_t>(model.vocabulary.size()));
      if (inserted) {
        model.vocabulary.push_back(std::move(token));
        model.term_frequency.push_back(0);
      }
      ++counts[static_cast<std::size_t>(a.labels[i])][it->second];
      ++model.term_frequency[it->second];
      ++total_words;
    }
  }
  if (!missing.empty()) throw MissingRows(missing);
  if (model.vocabulary.empty())
    throw Error(ErrorKind::EmptyVocabulary, "clustered posts contain no tokens (" + std::to_string(classes) +
                                                " clusters)");

  model.average_words = static_cast<double>(total_words) / static_cast<double>(classes);
  model.class_tf.resize(classes);
  model.topics.resize(classes);
  for (std::size_t c = 0; c < classes; ++c) {
    auto& row = model.class_tf[c];
    row.assign(counts[c].begin(), counts[c].end());
    std::sort(row.begin(), row.end());
    std::vector<TopicTerm> ranked;
    ranked.reserve(row.size());
    for (const auto& [term, tf] : row) ranked.push_back({model.vocabulary[term], model.weight(c, term)});
    const std::size_t keep = std::min(top_n, ranked.size());
    std::partial_sort(ranked.begin(), ranked.begin() + static_cast<std::ptrdiff_t>(keep), ranked.end(),
                      [](const TopicTerm& x, const TopicTerm& y) {
                        return x.weight != y.weight ? x.weight > y.weight : x.term < y.term;
                      });
    ranked.resize(keep);
    model.topics[c] = std::move(ranked);
  }
  return model;
}

std::vector<TopicTerm> mmr_rerank(const std::vector<TopicTerm>& candidates, const EmbeddingMatrix& term_vectors,
                                  double lambda, std::size_t top_n) {
  if (!(lambda >= 0.0 && lambda <= 1.0)) throw Error(ErrorKind::InvalidArgument, "mmr lambda must lie in [0, 1]");
  const std::size_t n = candidates.size();
  double max_weight = 0.0;
  for (const auto& c : candidates) max_weight = std::max(max_weight, c.weight);
  std::vector<std::optional<std::size_t>> rows(n);
  for (std::size_t i = 0; i < n; ++i) rows[i] = term_vectors.index_of(candidates[i].term);

  auto similarity = [&](std::size_t i, std::size_t j) {
    if (!rows[i] || !rows[j]) return 0.0;
    return cosine_similarity(term_vectors.row(*rows[i]), term_vectors.row(*rows[j]));
  };

  std::vector<TopicTerm> picked;
  std::vector<std::size_t> picked_idx;
  std::vector<bool> used(n, false);
  // Best similarity to the picked set so far, per candidate.
  std::vector<double> max_sim(n, -std::numeric_limits<double>::infinity());
  while (picked.size() < std::min(top_n, n)) {
    std::size_t best = n;
    double best_score = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
      if (used[i]) continue;
      const double relevance = max_weight > 0 ? candidates[i].weight / max_weight : 0.0;
      const double diversity = picked_idx.empty() ? 0.0 : max_sim[i];
      const double score = lambda * relevance - (1.0 - lambda) * diversity;
      if (score > best_score) {
        best_score = score;
        best = i;
      }
    }
    used[best] = true;
    picked_idx.push_back(best);
    picked.push_back(candidates[best]);
    for (std::size_t i = 0; i < n; ++i)
      if (!used[i]) max_sim[i] = std::max(max_sim[i], similarity(i, best));
  }
  return picked;
}

void write_topics(const std::vector<std::vector<TopicTerm>>& topics, const std::filesystem::path& path) {
  nlohmann::ordered_json doc = nlohmann::ordered_json::object();
  for (std::size_t c = 0; c < topics.size(); ++c) {
    auto list = nlohmann::ordered_json::array();
    for (const auto& t : topics[c]) list.push_back({{"term", t.term}, {"weight", t.weight}});
    doc[std::to_string(c)] = std::move(list);
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::Io, "cannot write " + path.string());
  out << doc.dump(2) << '\n';
}

std::vector<std::vector<TopicTerm>> read_topics(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot read " + path.string());
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw MalformedRecord(path.string(), 0, e.what());
  }
  std::vector<std::vector<TopicTerm>> topics(doc.size());
  for (const auto& [key, list] : doc.items()) {
    std::size_t c = 0;
    try {
      c = std::stoul(key);
    } catch (const std::exception&) {
      throw MalformedRecord(path.string(), 0, "cluster key '" + key + "' is not a label");
    }
    if (c >= topics.size()) throw MalformedRecord(path.string(), 0, "cluster labels are not contiguous");
    for (const auto& t : list) topics[c].push_back({t.at("term").get<std::string>(), t.at("weight").get<double>()});
  }
  return topics;
}

}  // namespace coordet
