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

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "coordet/cluster.hpp"
#include "coordet/datamodel.hpp"
#include "coordet/embed.hpp"

namespace coordet {

/// Knobs for a synthetic multi-platform dataset with planted campaigns.
/// A campaign is one text template mutated per post, posted inside a short
/// burst, linking videos from channels that all share one factuality score.
struct CampaignSpec {
  std::size_t n_campaigns = 20;
  std::size_t posts_min = 8;
  std::size_t posts_max = 15;
  double burst_width_seconds = 40.0;
  double text_mutation_rate = 0.15;
  /// twitter, facebook, reddit shares; must sum to 1.
  std::array<double, 3> platform_mix{15314.0 / 16941.0, 1146.0 / 16941.0, 481.0 / 16941.0};
  /// Relative weights over 0..5 from which each campaign draws its one score.
  std::array<double, 6> campaign_score_mix{0.6, 0.2, 0.05, 0.05, 0.05, 0.05};
  /// Relative weights of channel scores among labeled background posts.
  std::array<double, 6> background_score_mix{7273.0, 1888.0, 128.0, 452.0, 8.0, 8.0};
  /// Share of background posts linking an unscored channel.
  double background_unlabeled = 1.0 - 9757.0 / 16941.0;
  /// Probability that a post links a video already used by its campaign (or
  /// channel, for background posts) instead of a new one.
  double video_reuse_prob = 0.8;
  std::size_t background_posts = 5000;
  /// If set, background_posts becomes total_posts minus the campaign posts.
  std::optional<std::size_t> total_posts;
  double background_time_span_seconds = 365.0 * 86400.0;
  std::size_t template_length = 12;
  std::size_t channels_per_score = 3;
  std::size_t unlabeled_channels = 6;
  /// Draw campaign accounts from one shared pool instead of one per campaign.
  bool reuse_users_across_campaigns = false;
  std::uint64_t seed = 42;

  /// Throws InvalidArgument on out-of-range fields.
  void validate() const;

  /// 2,000 posts with platform shares 15,314 : 1,146 : 481 and a handful of small
  /// campaigns.
  static CampaignSpec reference_shaped();
};

/// post id -> campaign index; posts absent from the map are background.
struct GroundTruth {
  std::map<std::string, std::size_t> campaign_of;

  std::optional<std::size_t> campaign(const std::string& post_id) const;
};

struct SyntheticData {
  Dataset dataset;
  GroundTruth truth;
};

SyntheticData generate(const CampaignSpec& spec);

/// CSV `post_id,campaign_id` covering every post; background has an empty id.
void write_ground_truth(const Dataset& ds, const GroundTruth& gt, const std::filesystem::path& path);
GroundTruth read_ground_truth(const std::filesystem::path& path);

/// Stand-in for an external sentence encoder: each token maps to a fixed
/// pseudo-random Gaussian direction (hashed), a post is the normalized sum
/// of its token directions plus a little seeded noise. Similar texts land
/// close together, which is all the pipeline asks of the encoder.
EmbeddingMatrix synthetic_sentence_vectors(const Dataset& ds, std::size_t dim = 384, std::uint64_t seed = 42);

/// External-vector table with `format=binary` rows (float32).
void write_binary_vectors(const EmbeddingMatrix& m, const std::filesystem::path& path);

struct DetectionScore {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::uint64_t true_positive_pairs = 0;
  std::uint64_t predicted_pairs = 0;
  std::uint64_t true_pairs = 0;
  /// No predicted pairs; precision reported as 0.
  bool precision_undefined = false;
  /// No true pairs; recall reported as 0.
  bool recall_undefined = false;
};

/// Pairwise agreement over the posts of `a`: a pair is predicted when both
/// posts share a non-noise label and true when both share a campaign.
DetectionScore score_detection(const ClusterAssignment& a, const GroundTruth& gt);

}  // namespace coordet
