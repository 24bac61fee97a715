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

#include "fixtures.hpp"

#include <map>

namespace coordet::testing {

Dataset make_dataset(const std::vector<PostSpec>& specs) {
  std::vector<PostRecord> posts;
  std::map<std::string, VideoRecord> videos;
  std::map<std::string, ChannelRecord> used;
  for (const auto& spec : specs) {
    PostRecord p;
    p.post_id = spec.id;
    p.user_id = spec.user;
    p.platform.kind = spec.platform;
    p.published_time = spec.time;
    p.text = spec.text;
    if (!spec.no_video) {
      const std::string vid = spec.video.empty() ? "v_" + spec.id : spec.video;
      const std::string channel = spec.score ? "c" + std::to_string(*spec.score) : "cu";
      used.emplace(channel, ChannelRecord{channel, spec.score ? "channel " + std::to_string(*spec.score) : "unscored",
                                          spec.score});
      VideoRecord v;
      v.video_id = vid;
      v.title = "video " + vid;
      v.channel_id = channel;
      videos.emplace(vid, v);
      p.video_id = vid;
    }
    posts.push_back(std::move(p));
  }
  std::vector<VideoRecord> video_list;
  for (auto& [id, v] : videos) video_list.push_back(v);
  std::vector<ChannelRecord> channels;
  for (auto& [id, c] : used) channels.push_back(c);
  return Dataset(std::move(posts), std::move(video_list), std::move(channels));
}

Dataset timed_dataset(const std::vector<std::int64_t>& times, const std::vector<std::optional<int>>& scores) {
  std::vector<PostSpec> specs;
  for (std::size_t i = 0; i < times.size(); ++i) {
    PostSpec s;
    s.id = "p" + std::to_string(i);
    s.time = times[i];
    s.score = i < scores.size() ? scores[i] : std::optional<int>(0);
    specs.push_back(s);
  }
  return make_dataset(specs);
}

Dataset reference_dataset() {
  constexpr std::size_t kPosts = 16941, kVideos = 667, kChannels = 283;
  // Scored channels first: one per score 0..5, the rest unscored.
  std::vector<ChannelRecord> channels;
  for (std::size_t c = 0; c < kChannels; ++c) {
    std::optional<int> f;
    if (c < 6) f = static_cast<int>(c);
    channels.push_back({"ch" + std::to_string(c), "channel " + std::to_string(c), f});
  }
  // Videos 0..5 sit on the scored channels; the others spread over the rest.
  std::vector<VideoRecord> videos;
  for (std::size_t v = 0; v < kVideos; ++v) {
    const std::size_t c = v < 6 ? v : 6 + (v - 6) % (kChannels - 6);
    VideoRecord rec;
    rec.video_id = "vid" + std::to_string(v);
    rec.title = "title";
    rec.channel_id = "ch" + std::to_string(c);
    videos.push_back(rec);
  }
  const std::size_t by_score[6] = {7273, 1888, 128, 452, 8, 8};
  std::vector<std::size_t> video_of;
  for (std::size_t s = 0; s < 6; ++s) video_of.insert(video_of.end(), by_score[s], s);
  for (std::size_t v = 6; video_of.size() < kPosts; ++v) video_of.push_back(6 + (v - 6) % (kVideos - 6));

  std::vector<PostRecord> posts;
  for (std::size_t i = 0; i < kPosts; ++i) {
    PostRecord p;
    p.post_id = "post" + std::to_string(i);
    p.user_id = "user" + std::to_string(i % 4000);
    p.platform.kind = i < 15314 ? PlatformKind::twitter : i < 15314 + 1146 ? PlatformKind::facebook
                                                                            : PlatformKind::reddit;
    p.published_time = 1523000000 + static_cast<std::int64_t>(i) * 60;
    p.text = "post text " + std::to_string(i % 97);
    p.video_id = "vid" + std::to_string(video_of[i]);
    posts.push_back(std::move(p));
  }
  return Dataset(std::move(posts), std::move(videos), std::move(channels));
}

std::filesystem::path scratch_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("coordet-test-" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace coordet::testing
