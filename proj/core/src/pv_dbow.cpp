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
#include <unordered_map>

#include "coordet/embed.hpp"
#include "coordet/error.hpp"
#include "sgns_kernel.hpp"

namespace coordet {

namespace {

/// Byte length of a Unicode whitespace sequence starting at s[i], or 0.
std::size_t whitespace_at(std::string_view s, std::size_t i) {
  const auto c = static_cast<unsigned char>(s[i]);
  if (c == ' ' || (c >= '\t' && c <= '\r')) return 1;
  auto byte = [&](std::size_t k) { return i + k < s.size() ? static_cast<unsigned char>(s[i + k]) : 0; };
  if (c == 0xC2 && (byte(1) == 0x85 || byte(1) == 0xA0)) return 2;  // NEL, NBSP
  if (c == 0xE1 && byte(1) == 0x9A && byte(2) == 0x80) return 3;   // ogham space
  if (c == 0xE2 && byte(1) == 0x80 && ((byte(2) >= 0x80 && byte(2) <= 0x8A) || byte(2) == 0xA8 ||
                                       byte(2) == 0xA9 || byte(2) == 0xAF))
    return 3;
  if (c == 0xE2 && byte(1) == 0x81 && byte(2) == 0x9F) return 3;  // medium math space
  if (c == 0xE3 && byte(1) == 0x80 && byte(2) == 0x80) return 3;  // ideographic space
  return 0;
}

bool is_url(std::string_view token) {
  return token.starts_with("http://") || token.starts_with("https://") || token.starts_with("www.");
}

}  // namespace

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::string current;
  auto flush = [&] {
    if (!current.empty() && !is_url(current)) tokens.push_back(current);
    current.clear();
  };
  for (std::size_t i = 0; i < text.size();) {
    if (const std::size_t ws = whitespace_at(text, i)) {
      flush();
      i += ws;
      continue;
    }
    const auto c = static_cast<unsigned char>(text[i]);
    current += (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : static_cast<char>(c);
    ++i;
  }
  flush();
  return tokens;
}

PvDbowModel pv_dbow(const Dataset& ds, const SgnsConfig& cfg) {
  cfg.validate();
  std::vector<std::string> words;
  std::unordered_map<std::string, std::uint32_t> word_index;
  std::vector<std::vector<std::uint32_t>> docs;
  docs.reserve(ds.size());
  std::size_t total_tokens = 0;
  for (const auto& post : ds.posts()) {
    std::vector<std::uint32_t> ids;
    for (auto& token : tokenize(post.text)) {
      auto [it, inserted] = word_index.try_emplace(token, static_cast<std::uint32_t>(words.size()));
      if (inserted) words.push_back(std::move(token));
      ids.push_back(it->second);
    }
    total_tokens += ids.size();
    docs.push_back(std::move(ids));
  }
  if (words.size() < 2)
    throw Error(ErrorKind::DegenerateVocabulary,
                "post texts contain " + std::to_string(words.size()) + " distinct tokens; need at least 2");

  std::vector<std::uint64_t> counts(words.size(), 0);
  for (const auto& d : docs)
    for (auto w : d) ++counts[w];
  detail::NegativeTable table(counts);

  // Input rows: documents first, then words. Output rows: words.
  const auto doc_rows = static_cast<std::uint32_t>(docs.size());
  detail::SgnsKernel kernel(docs.size() + words.size(), words.size(), cfg.dim, cfg.seed);
  const double planned = static_cast<double>(total_tokens) * static_cast<double>(cfg.epochs);
  std::vector<std::size_t> offset(docs.size() + 1, 0);
  for (std::size_t d = 0; d < docs.size(); ++d) offset[d + 1] = offset[d] + docs[d].size();

  PvDbowModel model;
  detail::run_epochs(
      docs.size(), cfg.threads, cfg.epochs, cfg.seed,
      [&](std::size_t epoch, std::size_t d, Rng& rng, double& loss, std::size_t& pairs) {
        thread_local std::vector<float> grad;
        const auto& doc = docs[d];
        for (std::size_t i = 0; i < doc.size(); ++i) {
          const double progress =
              (static_cast<double>(epoch) * static_cast<double>(total_tokens) + static_cast<double>(offset[d] + i)) /
              planned;
          const double lr = cfg.learning_rate * std::max(1e-4, 1.0 - progress);
          loss += kernel.update(static_cast<std::uint32_t>(d), doc[i], cfg.negatives, table, lr, rng, grad);
          ++pairs;
          const std::size_t reach = cfg.window - rng.below(cfg.window);
          const std::size_t lo = i >= reach ? i - reach : 0;
          const std::size_t hi = std::min(doc.size() - 1, i + reach);
          for (std::size_t j = lo; j <= hi; ++j) {
            if (j == i) continue;
            loss += kernel.update(doc_rows + doc[i], doc[j], cfg.negatives, table, lr, rng, grad);
            ++pairs;
          }
        }
      },
      model.epoch_loss);

  std::vector<double> all = kernel.take_input();
  std::vector<double> doc_values(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(docs.size() * cfg.dim));
  std::vector<double> word_values(all.begin() + static_cast<std::ptrdiff_t>(docs.size() * cfg.dim), all.end());
  for (std::size_t d = 0; d < docs.size(); ++d)
    if (docs[d].empty()) std::fill_n(doc_values.begin() + static_cast<std::ptrdiff_t>(d * cfg.dim), cfg.dim, 0.0);

  std::vector<std::string> post_ids;
  post_ids.reserve(ds.size());
  for (const auto& p : ds.posts()) post_ids.push_back(p.post_id);
  model.documents = EmbeddingMatrix(std::move(post_ids), cfg.dim, std::move(doc_values));
  model.words = EmbeddingMatrix(std::move(words), cfg.dim, std::move(word_values));
  return model;
}

}  // namespace coordet
