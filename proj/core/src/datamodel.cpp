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

#include "coordet/datamodel.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <fstream>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "coordet/error.hpp"
#include "coordet/stats.hpp"
#include "csv.hpp"

namespace coordet {

using nlohmann::json;
using nlohmann::ordered_json;

Platform Platform::parse(std::string_view text) {
  std::string lower(text);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lower == "twitter") return {PlatformKind::twitter, {}};
  if (lower == "facebook") return {PlatformKind::facebook, {}};
  if (lower == "reddit") return {PlatformKind::reddit, {}};
  return {PlatformKind::other, std::string(text)};
}

std::string Platform::to_string() const {
  switch (kind) {
    case PlatformKind::twitter: return "twitter";
    case PlatformKind::facebook: return "facebook";
    case PlatformKind::reddit: return "reddit";
    case PlatformKind::other: return tag.empty() ? "other" : tag;
  }
  return tag;
}

std::string_view to_string(ActionType action) noexcept {
  return action == ActionType::post ? "post" : "reply";
}

std::optional<ActionType> parse_action_type(std::string_view text) noexcept {
  if (text == "post") return ActionType::post;
  if (text == "reply") return ActionType::reply;
  return std::nullopt;
}

namespace {

bool read_digits(std::string_view s, std::size_t pos, std::size_t n, int& out) {
  if (pos + n > s.size()) return false;
  for (std::size_t i = pos; i < pos + n; ++i)
    if (s[i] < '0' || s[i] > '9') return false;
  return std::from_chars(s.data() + pos, s.data() + pos + n, out).ec == std::errc{};
}

}  // namespace

std::optional<UtcSeconds> parse_iso8601(std::string_view s) noexcept {
  using namespace std::chrono;
  int y, mo, d, h, mi, se;
  if (s.size() < 19) return std::nullopt;
  if (!read_digits(s, 0, 4, y) || s[4] != '-' || !read_digits(s, 5, 2, mo) || s[7] != '-' ||
      !read_digits(s, 8, 2, d) || (s[10] != 'T' && s[10] != ' ' && s[10] != 't') ||
      !read_digits(s, 11, 2, h) || s[13] != ':' || !read_digits(s, 14, 2, mi) || s[16] != ':' ||
      !read_digits(s, 17, 2, se))
    return std::nullopt;
  const year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)}, day{static_cast<unsigned>(d)}};
  if (!ymd.ok() || h > 23 || mi > 59 || se > 60) return std::nullopt;

  std::size_t pos = 19;
  if (pos < s.size() && s[pos] == '.') {
    ++pos;
    const std::size_t start = pos;
    while (pos < s.size() && s[pos] >= '0' && s[pos] <= '9') ++pos;
    if (pos == start) return std::nullopt;
  }
  long offset = 0;
  if (pos < s.size()) {
    const char z = s[pos];
    if ((z == 'Z' || z == 'z') && pos + 1 == s.size()) {
      // UTC
    } else if (z == '+' || z == '-') {
      int oh, om = 0;
      if (!read_digits(s, pos + 1, 2, oh)) return std::nullopt;
      std::size_t next = pos + 3;
      if (next < s.size() && s[next] == ':') ++next;
      if (next < s.size()) {
        if (!read_digits(s, next, 2, om) || next + 2 != s.size()) return std::nullopt;
      }
      if (oh > 23 || om > 59) return std::nullopt;
      offset = (z == '+' ? 1 : -1) * (oh * 3600L + om * 60L);
    } else {
      return std::nullopt;
    }
  }
  const auto days_since_epoch = sys_days{ymd}.time_since_epoch().count();
  return static_cast<UtcSeconds>(days_since_epoch) * 86400 + h * 3600 + mi * 60 + se - offset;
}

std::string format_iso8601(UtcSeconds t) {
  using namespace std::chrono;
  const auto day_count = t >= 0 ? t / 86400 : -((-t + 86399) / 86400);
  const UtcSeconds rem = t - day_count * 86400;
  const year_month_day ymd{sys_days{days{day_count}}};
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%02dZ", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                static_cast<int>(rem / 3600), static_cast<int>(rem / 60 % 60), static_cast<int>(rem % 60));
  return buf;
}

bool PostRecord::has_text() const noexcept {
  return std::any_of(text.begin(), text.end(),
                     [](unsigned char c) { return !std::isspace(c); });
}

std::size_t IngestReport::total_quarantined() const noexcept {
  return malformed_posts + bad_timestamps + duplicate_posts + out_of_window + filtered_by_action +
         dangling_video_refs + malformed_videos + dangling_channel_refs + malformed_channels;
}

Dataset::Dataset(std::vector<PostRecord> posts, std::vector<VideoRecord> videos,
                 std::vector<ChannelRecord> channels, IngestReport report)
    : posts_(std::move(posts)), report_(report) {
  for (auto& c : channels) {
    if (c.factuality && (*c.factuality < 0 || *c.factuality > 5))
      throw Error(ErrorKind::InvalidArgument,
                  "channel '" + c.channel_id + "' factuality out of range 0..5");
    const std::string id = c.channel_id;
    if (!channels_.emplace(id, std::move(c)).second)
      throw Error(ErrorKind::InvalidArgument, "duplicate channel_id '" + id + "'");
  }
  for (auto& v : videos) {
    if (v.channel_id.empty())
      throw Error(ErrorKind::InvalidArgument, "video '" + v.video_id + "' has empty channel_id");
    if (!channels_.contains(v.channel_id)) throw DanglingReference("channel", v.channel_id);
    const std::string id = v.video_id;
    if (!videos_.emplace(id, std::move(v)).second)
      throw Error(ErrorKind::InvalidArgument, "duplicate video_id '" + id + "'");
  }
  post_index_.reserve(posts_.size());
  for (std::size_t i = 0; i < posts_.size(); ++i) {
    const auto& p = posts_[i];
    if (p.video_id && !videos_.contains(*p.video_id)) throw DanglingReference("video", *p.video_id);
    if (!post_index_.emplace(p.post_id, i).second)
      throw Error(ErrorKind::InvalidArgument, "duplicate post_id '" + p.post_id + "'");
  }
}

std::optional<std::size_t> Dataset::post_index(std::string_view post_id) const {
  const auto it = post_index_.find(std::string(post_id));
  if (it == post_index_.end()) return std::nullopt;
  return it->second;
}

const ChannelRecord* Dataset::channel_of(const PostRecord& post) const {
  if (!post.video_id) return nullptr;
  const auto v = videos_.find(*post.video_id);
  if (v == videos_.end()) return nullptr;
  const auto c = channels_.find(v->second.channel_id);
  return c == channels_.end() ? nullptr : &c->second;
}

std::optional<int> Dataset::factuality_of(const PostRecord& post) const {
  const ChannelRecord* c = channel_of(post);
  return c ? c->factuality : std::nullopt;
}

namespace {

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open '" + path.string() + "'");
  return in;
}

std::ofstream open_output(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::Io, "cannot write '" + path.string() + "'");
  return out;
}

bool blank(const std::string& line) {
  return std::all_of(line.begin(), line.end(), [](unsigned char c) { return std::isspace(c); });
}

std::string required_string(const json& obj, const char* key) {
  const auto it = obj.find(key);
  if (it == obj.end() || !it->is_string()) throw std::invalid_argument(std::string("missing string field '") + key + "'");
  return it->get<std::string>();
}

std::optional<std::string> optional_string(const json& obj, const char* key) {
  const auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return std::nullopt;
  if (!it->is_string()) throw std::invalid_argument(std::string("field '") + key + "' is not a string");
  auto s = it->get<std::string>();
  if (s.empty()) return std::nullopt;
  return s;
}

std::vector<ChannelRecord> read_channels(const std::filesystem::path& path, const IngestConfig& cfg,
                                         IngestReport& report) {
  auto in = open_input(path);
  const std::string src = path.filename().string();
  std::size_t line_no = 0;
  auto header = detail::read_csv_row(in, line_no);
  std::vector<ChannelRecord> out;
  if (!header) return out;
  if (*header != std::vector<std::string>{"channel_id", "name", "factuality"})
    throw MalformedRecord(src, line_no, "expected header 'channel_id,name,factuality'");
  std::unordered_set<std::string> seen;
  while (auto row = detail::read_csv_row(in, line_no)) {
    if (row->size() == 1 && blank((*row)[0])) continue;
    std::string reason;
    ChannelRecord rec;
    if (row->size() != 3) {
      reason = "expected 3 fields";
    } else {
      rec.channel_id = (*row)[0];
      rec.name = (*row)[1];
      const std::string& f = (*row)[2];
      if (rec.channel_id.empty()) {
        reason = "empty channel_id";
      } else if (!f.empty()) {
        int score = -1;
        const auto r = std::from_chars(f.data(), f.data() + f.size(), score);
        if (r.ec != std::errc{} || r.ptr != f.data() + f.size() || score < 0 || score > 5)
          reason = "factuality must be an integer 0..5";
        else
          rec.factuality = score;
      }
      if (reason.empty() && !seen.insert(rec.channel_id).second) reason = "duplicate channel_id";
    }
    if (!reason.empty()) {
      if (cfg.strict) throw MalformedRecord(src, line_no, reason);
      ++report.malformed_channels;
      continue;
    }
    out.push_back(std::move(rec));
  }
  return out;
}

std::vector<VideoRecord> read_videos(const std::filesystem::path& path, const IngestConfig& cfg,
                                     const std::unordered_set<std::string>& channel_ids,
                                     IngestReport& report) {
  auto in = open_input(path);
  const std::string src = path.filename().string();
  std::vector<VideoRecord> out;
  std::unordered_set<std::string> seen;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (blank(line)) continue;
    VideoRecord rec;
    std::string reason;
    try {
      const json obj = json::parse(line);
      if (!obj.is_object()) throw std::invalid_argument("not a JSON object");
      rec.video_id = required_string(obj, "video_id");
      rec.title = optional_string(obj, "title").value_or("");
      rec.channel_id = required_string(obj, "channel_id");
      if (auto t = optional_string(obj, "published_time")) {
        rec.published_time = parse_iso8601(*t);
        if (!rec.published_time) throw std::invalid_argument("unparseable published_time '" + *t + "'");
      }
      rec.captions = optional_string(obj, "captions");
      if (rec.video_id.empty()) throw std::invalid_argument("empty video_id");
      if (rec.channel_id.empty()) throw std::invalid_argument("empty channel_id");
      if (!seen.insert(rec.video_id).second) throw std::invalid_argument("duplicate video_id");
    } catch (const std::exception& e) {
      reason = e.what();
    }
    if (!reason.empty()) {
      if (cfg.strict) throw MalformedRecord(src, line_no, reason);
      ++report.malformed_videos;
      continue;
    }
    if (!channel_ids.contains(rec.channel_id)) {
      if (cfg.strict) throw DanglingReference("channel", rec.channel_id);
      ++report.dangling_channel_refs;
      seen.erase(rec.video_id);
      continue;
    }
    out.push_back(std::move(rec));
  }
  return out;
}

std::vector<PostRecord> read_posts(const std::filesystem::path& path, const IngestConfig& cfg,
                                   const std::unordered_set<std::string>& video_ids,
                                   IngestReport& report) {
  auto in = open_input(path);
  const std::string src = path.filename().string();
  std::vector<PostRecord> out;
  std::unordered_set<std::string> seen;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (blank(line)) continue;
    PostRecord rec;
    std::string reason;
    bool bad_time = false;
    try {
      const json obj = json::parse(line);
      if (!obj.is_object()) throw std::invalid_argument("not a JSON object");
      rec.post_id = required_string(obj, "post_id");
      rec.user_id = required_string(obj, "user_id");
      rec.platform = Platform::parse(required_string(obj, "platform"));
      const std::string when = required_string(obj, "published_time");
      if (auto t = parse_iso8601(when)) {
        rec.published_time = *t;
      } else {
        bad_time = true;
        throw std::invalid_argument("unparseable published_time '" + when + "'");
      }
      rec.text = optional_string(obj, "text").value_or("");
      const std::string action = required_string(obj, "action_type");
      const auto parsed = parse_action_type(action);
      if (!parsed) throw std::invalid_argument("unknown action_type '" + action + "'");
      rec.action_type = *parsed;
      rec.video_id = optional_string(obj, "video_id");
      if (rec.post_id.empty()) throw std::invalid_argument("empty post_id");
    } catch (const std::exception& e) {
      reason = e.what();
    }
    if (!reason.empty()) {
      if (cfg.strict) throw MalformedRecord(src, line_no, reason);
      ++(bad_time ? report.bad_timestamps : report.malformed_posts);
      continue;
    }
    if (seen.contains(rec.post_id)) {
      if (cfg.strict) throw MalformedRecord(src, line_no, "duplicate post_id '" + rec.post_id + "'");
      ++report.duplicate_posts;
      continue;
    }
    if ((cfg.window_begin && rec.published_time < *cfg.window_begin) ||
        (cfg.window_end && rec.published_time > *cfg.window_end)) {
      if (cfg.strict) throw MalformedRecord(src, line_no, "published_time outside collection window");
      ++report.out_of_window;
      continue;
    }
    if (cfg.action_filter && rec.action_type != *cfg.action_filter) {
      ++report.filtered_by_action;
      continue;
    }
    if (rec.video_id && !video_ids.contains(*rec.video_id)) {
      if (cfg.strict) throw DanglingReference("video", *rec.video_id);
      ++report.dangling_video_refs;
      continue;
    }
    seen.insert(rec.post_id);
    if (!rec.has_text()) ++report.empty_text_posts;
    out.push_back(std::move(rec));
  }
  return out;
}

}  // namespace

Dataset ingest(const std::filesystem::path& posts_path, const std::filesystem::path& videos_path,
               const std::filesystem::path& channels_path, const IngestConfig& config) {
  IngestReport report;
  auto channels = read_channels(channels_path, config, report);
  std::unordered_set<std::string> channel_ids;
  for (const auto& c : channels) channel_ids.insert(c.channel_id);
  auto videos = read_videos(videos_path, config, channel_ids, report);
  std::unordered_set<std::string> video_ids;
  for (const auto& v : videos) video_ids.insert(v.video_id);
  auto posts = read_posts(posts_path, config, video_ids, report);
  return Dataset(std::move(posts), std::move(videos), std::move(channels), report);
}

void write_posts(const Dataset& ds, const std::filesystem::path& path) {
  auto out = open_output(path);
  for (const auto& p : ds.posts()) {
    ordered_json obj;
    obj["post_id"] = p.post_id;
    obj["user_id"] = p.user_id;
    obj["platform"] = p.platform.to_string();
    obj["published_time"] = format_iso8601(p.published_time);
    obj["text"] = p.text;
    obj["action_type"] = std::string(to_string(p.action_type));
    obj["video_id"] = p.video_id ? ordered_json(*p.video_id) : ordered_json(nullptr);
    out << obj.dump() << '\n';
  }
}

void write_videos(const Dataset& ds, const std::filesystem::path& path) {
  auto out = open_output(path);
  for (const auto& [id, v] : ds.videos()) {
    ordered_json obj;
    obj["video_id"] = v.video_id;
    obj["title"] = v.title;
    obj["channel_id"] = v.channel_id;
    obj["published_time"] =
        v.published_time ? ordered_json(format_iso8601(*v.published_time)) : ordered_json(nullptr);
    obj["captions"] = v.captions ? ordered_json(*v.captions) : ordered_json(nullptr);
    out << obj.dump() << '\n';
  }
}

void write_channels(const Dataset& ds, const std::filesystem::path& path) {
  auto out = open_output(path);
  detail::write_csv_row(out, {"channel_id", "name", "factuality"});
  for (const auto& [id, c] : ds.channels())
    detail::write_csv_row(out, {c.channel_id, c.name, c.factuality ? std::to_string(*c.factuality) : ""});
}

void write_dataset(const Dataset& ds, const std::filesystem::path& dir) {
  write_posts(ds, dir / "posts.jsonl");
  write_videos(ds, dir / "videos.jsonl");
  write_channels(ds, dir / "channels.csv");
}

double LabeledStats::fraction_labeled() const noexcept {
  const std::size_t n = labeled + unlabeled;
  return n ? static_cast<double>(labeled) / static_cast<double>(n) : 0.0;
}

double LabeledStats::fraction_at(int score) const noexcept {
  if (score < 0 || score > 5 || labeled == 0) return 0.0;
  return static_cast<double>(count_by_score[static_cast<std::size_t>(score)]) / static_cast<double>(labeled);
}

LabeledStats join_factuality(const Dataset& ds) {
  LabeledStats stats;
  stats.per_post.reserve(ds.size());
  for (const auto& p : ds.posts()) {
    const auto f = ds.factuality_of(p);
    stats.per_post.push_back(f);
    if (f) {
      ++stats.labeled;
      ++stats.count_by_score[static_cast<std::size_t>(*f)];
    } else {
      ++stats.unlabeled;
    }
  }
  return stats;
}

double dataset_factuality_std(const Dataset& ds) {
  std::vector<double> scores;
  for (const auto& p : ds.posts())
    if (const auto f = ds.factuality_of(p)) scores.push_back(*f);
  if (scores.size() < 2)
    throw Error(ErrorKind::InsufficientLabels,
                "need at least 2 labeled posts, have " + std::to_string(scores.size()));
  return population_std(scores);
}

}  // namespace coordet
