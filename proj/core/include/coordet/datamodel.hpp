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
#include <string_view>
#include <unordered_map>
#include <vector>

namespace coordet {

/// Seconds since the Unix epoch, UTC. Sub-second precision is truncated at ingest.
using UtcSeconds = std::int64_t;

enum class PlatformKind { twitter, facebook, reddit, other };

struct Platform {
  PlatformKind kind = PlatformKind::other;
  std::string tag;  // only meaningful for `other`

  static Platform parse(std::string_view text);
  std::string to_string() const;
  friend bool operator==(const Platform&, const Platform&) = default;
};

enum class ActionType { post, reply };

std::string_view to_string(ActionType action) noexcept;
std::optional<ActionType> parse_action_type(std::string_view text) noexcept;

/// Parses ISO-8601 `YYYY-MM-DD[T ]HH:MM:SS[.fff][Z|+hh:mm|-hh:mm]`.
/// A missing zone designator is read as UTC.
std::optional<UtcSeconds> parse_iso8601(std::string_view text) noexcept;
/// Formats as `YYYY-MM-DDTHH:MM:SSZ`.
std::string format_iso8601(UtcSeconds t);

struct PostRecord {
  std::string post_id;
  std::string user_id;
  Platform platform;
  UtcSeconds published_time = 0;
  std::string text;
  ActionType action_type = ActionType::post;
  std::optional<std::string> video_id;

  bool has_text() const noexcept;
  friend bool operator==(const PostRecord&, const PostRecord&) = default;
};

struct VideoRecord {
  std::string video_id;
  std::string title;
  std::string channel_id;
  std::optional<UtcSeconds> published_time;
  std::optional<std::string> captions;
  friend bool operator==(const VideoRecord&, const VideoRecord&) = default;
};

struct ChannelRecord {
  std::string channel_id;
  std::string name;
  std::optional<int> factuality;  // 0 (very low) .. 5 (very high)
  friend bool operator==(const ChannelRecord&, const ChannelRecord&) = default;
};

struct IngestConfig {
  /// Abort on the first malformed record or dangling reference instead of
  /// quarantining it.
  bool strict = false;
  /// Keep only posts of this action type.
  std::optional<ActionType> action_filter;
  /// Inclusive collection window; posts outside it are quarantined.
  std::optional<UtcSeconds> window_begin;
  std::optional<UtcSeconds> window_end;
};

/// Counts of records skipped during lenient ingestion.
struct IngestReport {
  std::size_t malformed_posts = 0;
  std::size_t bad_timestamps = 0;
  std::size_t duplicate_posts = 0;
  std::size_t out_of_window = 0;
  std::size_t filtered_by_action = 0;
  std::size_t dangling_video_refs = 0;
  std::size_t malformed_videos = 0;
  std::size_t dangling_channel_refs = 0;
  std::size_t malformed_channels = 0;
  std::size_t empty_text_posts = 0;

  std::size_t total_quarantined() const noexcept;
  friend bool operator==(const IngestReport&, const IngestReport&) = default;
};

/// Referentially closed, immutable collection of posts, videos and channels.
class Dataset {
 public:
  Dataset() = default;
  /// Validates uniqueness and references; throws on violation.
  Dataset(std::vector<PostRecord> posts, std::vector<VideoRecord> videos,
          std::vector<ChannelRecord> channels, IngestReport report = {});

  const std::vector<PostRecord>& posts() const noexcept { return posts_; }
  const std::map<std::string, VideoRecord>& videos() const noexcept { return videos_; }
  const std::map<std::string, ChannelRecord>& channels() const noexcept { return channels_; }
  const IngestReport& report() const noexcept { return report_; }

  std::size_t size() const noexcept { return posts_.size(); }
  std::optional<std::size_t> post_index(std::string_view post_id) const;
  const PostRecord& post(std::size_t i) const { return posts_.at(i); }

  /// Channel reached through the post's video, if any.
  const ChannelRecord* channel_of(const PostRecord& post) const;
  /// Factuality via post -> video -> channel.
  std::optional<int> factuality_of(const PostRecord& post) const;

 private:
  std::vector<PostRecord> posts_;
  std::map<std::string, VideoRecord> videos_;
  std::map<std::string, ChannelRecord> channels_;
  std::unordered_map<std::string, std::size_t> post_index_;
  IngestReport report_;
};

/// Reads the three dataset files (posts JSON-lines, videos JSON-lines,
/// channels CSV). Lenient mode quarantines bad records and counts them in
/// `Dataset::report()`; strict mode throws MalformedRecord / DanglingReference.
Dataset ingest(const std::filesystem::path& posts_path, const std::filesystem::path& videos_path,
               const std::filesystem::path& channels_path, const IngestConfig& config = {});

/// Writes the same three formats `ingest` reads.
void write_posts(const Dataset& ds, const std::filesystem::path& path);
void write_videos(const Dataset& ds, const std::filesystem::path& path);
void write_channels(const Dataset& ds, const std::filesystem::path& path);
void write_dataset(const Dataset& ds, const std::filesystem::path& dir);

struct LabeledStats {
  std::vector<std::optional<int>> per_post;  // aligned with Dataset::posts()
  std::array<std::size_t, 6> count_by_score{};
  std::size_t labeled = 0;
  std::size_t unlabeled = 0;

  double fraction_labeled() const noexcept;
  /// Share of labeled posts at `score`.
  double fraction_at(int score) const noexcept;
};

LabeledStats join_factuality(const Dataset& ds);

/// Population standard deviation of the factuality of all labeled posts.
/// Throws InsufficientLabels with fewer than two labeled posts.
double dataset_factuality_std(const Dataset& ds);

}  // namespace coordet
