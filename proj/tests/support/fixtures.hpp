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
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "coordet/datamodel.hpp"

namespace coordet::testing {

struct PostSpec {
  std::string id;
  std::int64_t time = 0;
  /// Factuality of the linked channel; nullopt links an unscored channel.
  std::optional<int> score;
  std::string text = "some words";
  std::string user = "u0";
  PlatformKind platform = PlatformKind::twitter;
  /// When empty the post links its own video.
  std::string video;
  bool no_video = false;
};

/// Channels `c0`..`c5` (by score) and `cu` (unscored) appear when linked; videos are named
/// after the post unless given.
Dataset make_dataset(const std::vector<PostSpec>& specs);

/// Posts `p0..` at the given times, each linked to a channel of the given
/// score (nullopt for unlabeled).
Dataset timed_dataset(const std::vector<std::int64_t>& times, const std::vector<std::optional<int>>& scores = {});

/// 16,941 posts with platform counts 15,314 / 1,146 / 481, 667 videos over 283
/// channels and 9,757 labeled posts (7,273 at 0, 1,888 at 1, 128 at 2, 452 at
/// 3, 8 at 4, 8 at 5).
Dataset reference_dataset();

/// Fresh empty directory under the system temp dir.
std::filesystem::path scratch_dir(const std::string& name);

}  // namespace coordet::testing
