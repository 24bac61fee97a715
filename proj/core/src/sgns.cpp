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
#include <thread>

#include "coordet/embed.hpp"
#include "coordet/error.hpp"
#include "coordet/rng.hpp"
#include "sgns_kernel.hpp"

namespace coordet {

void SgnsConfig::validate() const {
  if (dim < 2) throw Error(ErrorKind::InvalidArgument, "sgns dim must be at least 2");
  if (window < 1) throw Error(ErrorKind::InvalidArgument, "sgns window must be at least 1");
  if (negatives < 1) throw Error(ErrorKind::InvalidArgument, "sgns negatives must be at least 1");
  if (epochs < 1) throw Error(ErrorKind::InvalidArgument, "sgns epochs must be at least 1");
  if (!(learning_rate > 0.0)) throw Error(ErrorKind::InvalidArgument, "sgns learning_rate must be positive");
}

TokenCorpus to_token_corpus(const WalkCorpus& walks) {
  TokenCorpus corpus;
  corpus.vocabulary = walks.vocabulary;
  corpus.sequences.reserve(walks.walks.size());
  for (const auto& w : walks.walks) corpus.sequences.emplace_back(w.begin(), w.end());
  return corpus;
}

namespace detail {

namespace {

float dot4(const float* a, const float* b, std::size_t n) {
  // Four partial sums so the compiler can vectorize without reassociation flags.
  float s0 = 0, s1 = 0, s2 = 0, s3 = 0;
  std::size_t k = 0;
  for (; k + 4 <= n; k += 4) {
    s0 += a[k] * b[k];
    s1 += a[k + 1] * b[k + 1];
    s2 += a[k + 2] * b[k + 2];
    s3 += a[k + 3] * b[k + 3];
  }
  for (; k < n; ++k) s0 += a[k] * b[k];
  return (s0 + s1) + (s2 + s3);
}

}  // namespace

NegativeTable::NegativeTable(std::span<const std::uint64_t> counts) {
  double total = 0.0;
  for (auto c : counts) total += std::pow(static_cast<double>(c), 0.75);
  std::size_t nonzero = 0;
  for (auto c : counts) nonzero += c > 0;
  const std::size_t size = std::clamp<std::size_t>(100 * nonzero, 100'000, 10'000'000);
  table_.reserve(size);
  double cumulative = 0.0;
  for (std::size_t w = 0; w < counts.size(); ++w) {
    if (counts[w] == 0) continue;
    cumulative += std::pow(static_cast<double>(counts[w]), 0.75) / total;
    const auto until = static_cast<std::size_t>(std::llround(cumulative * static_cast<double>(size)));
    while (table_.size() < until && table_.size() < size) table_.push_back(static_cast<std::uint32_t>(w));
  }
  while (table_.size() < size) table_.push_back(table_.back());
}

SgnsKernel::SgnsKernel(std::size_t input_rows, std::size_t output_rows, std::size_t dim, std::uint64_t seed)
    : dim_(dim), input_(input_rows * dim), output_(output_rows * dim, 0.0) {
  Rng rng(derive_seed(seed, 0x696e6974ULL));
  for (float& v : input_) v = static_cast<float>((rng.uniform() - 0.5) / static_cast<double>(dim));
}

double SgnsKernel::update(std::uint32_t in_row, std::uint32_t out_row, std::size_t negatives,
                          const NegativeTable& table, double lr, Rng& rng, std::vector<float>& grad) {
  float* in = input_.data() + static_cast<std::size_t>(in_row) * dim_;
  grad.assign(dim_, 0.0f);
  double loss = 0.0;
  for (std::size_t d = 0; d <= negatives; ++d) {
    std::uint32_t target = out_row;
    double label = 1.0;
    if (d > 0) {
      target = table.sample(rng);
      if (target == out_row) continue;
      label = 0.0;
    }
    float* out = output_.data() + static_cast<std::size_t>(target) * dim_;
    const double f = dot4(in, out, dim_);
    // sigmoid and the log-loss share one exponential: with e = exp(-|f|),
    // -log sigmoid(+-f) = log1p(e) + max(-+f, 0).
    const double e = std::exp(-std::abs(f));
    const double sig = f >= 0 ? 1.0 / (1.0 + e) : e / (1.0 + e);
    loss += std::log1p(e) + (label > 0 ? std::max(-f, 0.0) : std::max(f, 0.0));
    const auto g = static_cast<float>((label - sig) * lr);
    for (std::size_t k = 0; k < dim_; ++k) grad[k] += g * out[k];
    for (std::size_t k = 0; k < dim_; ++k) out[k] += g * in[k];
  }
  for (std::size_t k = 0; k < dim_; ++k) in[k] += grad[k];
  return loss;
}

void run_epochs(std::size_t sequence_count, std::size_t threads, std::size_t epochs, std::uint64_t seed,
                const EpochBody& body, std::vector<double>& epoch_loss) {
  threads = std::max<std::size_t>(1, std::min(threads, sequence_count));
  for (std::size_t epoch = 0; epoch < epochs; ++epoch) {
    std::vector<double> loss(threads, 0.0);
    std::vector<std::size_t> pairs(threads, 0);
    const std::size_t block = (sequence_count + threads - 1) / threads;
    auto work = [&](std::size_t t) {
      Rng rng(derive_seed(seed, epoch, t));
      const std::size_t begin = t * block;
      const std::size_t end = std::min(sequence_count, begin + block);
      for (std::size_t s = begin; s < end; ++s) body(epoch, s, rng, loss[t], pairs[t]);
    };
    if (threads == 1) {
      work(0);
    } else {
      std::vector<std::jthread> pool;
      for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(work, t);
    }
    double total_loss = 0.0;
    std::size_t total_pairs = 0;
    for (std::size_t t = 0; t < threads; ++t) {
      total_loss += loss[t];
      total_pairs += pairs[t];
    }
    epoch_loss.push_back(total_pairs ? total_loss / static_cast<double>(total_pairs) : 0.0);
  }
}

}  // namespace detail

SgnsModel train_sgns(const TokenCorpus& corpus, const SgnsConfig& cfg) {
  cfg.validate();
  const std::size_t vocab = corpus.vocabulary.size();
  std::vector<std::uint64_t> counts(vocab, 0);
  std::size_t total_tokens = 0;
  for (const auto& seq : corpus.sequences) {
    for (auto t : seq) {
      if (t >= vocab) throw Error(ErrorKind::InvalidArgument, "token id outside vocabulary");
      ++counts[t];
    }
    total_tokens += seq.size();
  }
  const auto distinct = static_cast<std::size_t>(std::count_if(counts.begin(), counts.end(), [](auto c) { return c > 0; }));
  if (vocab < 2 || distinct < 2)
    throw Error(ErrorKind::DegenerateVocabulary,
                "corpus has " + std::to_string(distinct) + " distinct tokens; need at least 2");

  detail::NegativeTable table(counts);
  detail::SgnsKernel kernel(vocab, vocab, cfg.dim, cfg.seed);
  const double planned = static_cast<double>(total_tokens) * static_cast<double>(cfg.epochs);

  // Token offsets let each sequence compute its own learning rate without
  // shared counters, so thread count does not change the schedule.
  std::vector<std::size_t> offset(corpus.sequences.size() + 1, 0);
  for (std::size_t s = 0; s < corpus.sequences.size(); ++s)
    offset[s + 1] = offset[s] + corpus.sequences[s].size();

  SgnsModel model;
  detail::run_epochs(
      corpus.sequences.size(), cfg.threads, cfg.epochs, cfg.seed,
      [&](std::size_t epoch, std::size_t s, Rng& rng, double& loss, std::size_t& pairs) {
        thread_local std::vector<float> local_grad;
        const auto& seq = corpus.sequences[s];
        for (std::size_t i = 0; i < seq.size(); ++i) {
          const double progress =
              (static_cast<double>(epoch) * static_cast<double>(total_tokens) + static_cast<double>(offset[s] + i)) /
              planned;
          const double lr = cfg.learning_rate * std::max(1e-4, 1.0 - progress);
          const std::size_t reach = cfg.window - rng.below(cfg.window);
          const std::size_t lo = i >= reach ? i - reach : 0;
          const std::size_t hi = std::min(seq.size() - 1, i + reach);
          for (std::size_t j = lo; j <= hi; ++j) {
            if (j == i) continue;
            loss += kernel.update(seq[i], seq[j], cfg.negatives, table, lr, rng, local_grad);
            ++pairs;
          }
        }
      },
      model.epoch_loss);

  model.vectors = EmbeddingMatrix(corpus.vocabulary, cfg.dim, kernel.take_input());
  return model;
}

}  // namespace coordet
