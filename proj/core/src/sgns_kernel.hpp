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

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "coordet/rng.hpp"

namespace coordet::detail {

/// Unigram^0.75 sampling table.
class NegativeTable {
 public:
  explicit NegativeTable(std::span<const std::uint64_t> counts);
  std::uint32_t sample(Rng& rng) const { return table_[rng.below(table_.size())]; }

 private:
  std::vector<std::uint32_t> table_;
};

/// Input/output weight tables and the negative-sampling update shared by
/// node skip-gram and PV-DBOW. Weights are float32; results are widened to
/// double on the way out.
class SgnsKernel {
 public:
  SgnsKernel(std::size_t input_rows, std::size_t output_rows, std::size_t dim, std::uint64_t seed);

  /// One positive pair plus `negatives` sampled negatives. Returns the pair's loss.
  double update(std::uint32_t in_row, std::uint32_t out_row, std::size_t negatives, const NegativeTable& table,
                double lr, Rng& rng, std::vector<float>& grad);

  std::vector<double> take_input() const { return {input_.begin(), input_.end()}; }

 private:
  std::size_t dim_;
  std::vector<float> input_;
  std::vector<float> output_;
};

using EpochBody = std::function<void(std::size_t epoch, std::size_t sequence, Rng& rng, double& loss, std::size_t& pairs)>;

/// Runs `body` over every sequence for each epoch, sequences split across
/// threads in contiguous blocks, and records the mean pair loss per epoch.
void run_epochs(std::size_t sequence_count, std::size_t threads, std::size_t epochs, std::uint64_t seed,
                const EpochBody& body, std::vector<double>& epoch_loss);

}  // namespace coordet::detail
