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

#include "coordet/synth.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numeric>
#include <unordered_map>

#include "coordet/error.hpp"
#include "coordet/rng.hpp"
#include "csv.hpp"

namespace coordet {

namespace {

// Neutral filler vocabulary for generated posts.
constexpr std::string_view kWords[] = {
    "river",   "window",  "garden",  "market",  "bridge",  "table",   "pencil",  "orange",  "winter",  "summer",
    "cloud",   "stone",   "paper",   "candle",  "forest",  "meadow",  "harbor",  "valley",  "village", "station",
    "ticket",  "letter",  "basket",  "bottle",  "button",  "carpet",  "castle",  "circle",  "copper",  "cotton",
    "desert",  "dinner",  "engine",  "feather", "festival","finger",  "flower",  "fountain","galaxy",  "glass",
    "hammer",  "helmet",  "island",  "jacket",  "kettle",  "ladder",  "lantern", "library", "magnet",  "marble",
    "meadow",  "mirror",  "morning", "needle",  "office",  "orchard", "pillow",  "planet",  "pocket",  "puzzle",
    "rabbit",  "ribbon",  "rocket",  "saddle",  "salad",   "school",  "shadow",  "silver",  "sister",  "spider",
    "spring",  "square",  "stable",  "statue",  "sugar",   "summit",  "sunset",  "tablet",  "teacher", "thunder",
    "tiger",   "tomato",  "tower",   "travel",  "tunnel",  "turtle",  "umbrella","velvet",  "violin",  "wagon",
    "walnut",  "whistle", "wizard",  "yellow",  "anchor",  "apple",   "arrow",   "autumn",  "balcony", "banana",
    "barrel",  "beacon",  "blanket", "breeze",  "brick",   "bucket",  "cabin",   "camera",  "canal",   "canvas",
    "carrot",  "cellar",  "chair",   "cherry",  "chimney", "clock",   "coffee",  "compass", "cookie",  "corner",
    "cradle",  "crystal", "curtain", "dolphin", "drawer",  "eagle",   "elbow",   "falcon",  "fence",   "ferry",
    "field",   "flame",   "garage",  "ginger",  "glove",   "granite", "gravel",  "guitar",  "hallway", "harvest",
    "hedge",   "honey",   "horizon", "insect",  "ivory",   "jungle",  "kitchen", "lemon",   "lizard",  "lobster",
    "meadowlark","melody", "mitten",  "monkey",  "mountain","napkin",  "nest",    "noodle",  "ocean",   "olive",
    "oyster",  "paddle",  "parrot",  "peach",   "pebble",  "pepper",  "piano",   "pigeon",  "pirate",  "plaza",
    "pond",    "potato",  "quarry",  "quilt",   "radio",   "raven",   "reef",    "saucer",  "scarf",   "shovel",
    "signal",  "sketch",  "slipper", "socket",  "sparrow", "spoon",   "stairs",  "stove",   "stream",  "sweater",
    "teapot",  "thimble", "timber",  "toast",   "trumpet", "tulip",   "valley",  "vase",    "walrus",  "wheel",
    "willow",  "wool",    "yarn",    "zebra",   "acorn",   "album",   "attic",   "bakery",  "bamboo",  "beetle",
    "biscuit", "blossom", "boulder", "bracelet","buffalo", "cactus",  "canoe",   "cedar",   "chalk",   "cobweb",
};
constexpr std::size_t kWordCount = std::size(kWords);

std::size_t pick(std::span<const double> weights, Rng& rng) {
  const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  double r = rng.uniform() * total;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (r < weights[i]) return i;
    r -= weights[i];
  }
  // Rounding at the top end: last option with positive weight.
  for (std::size_t i = weights.size(); i-- > 0;)
    if (weights[i] > 0) return i;
  return 0;
}

std::string word(Rng& rng) { return std::string(kWords[rng.below(kWordCount)]); }

std::string join(const std::vector<std::string>& tokens) {
  std::string out;
  for (const auto& t : tokens) {
    if (!out.empty()) out += ' ';
    out += t;
  }
  return out;
}

std::string padded(std::size_t v, int width) {
  std::string s = std::to_string(v);
  if (static_cast<int>(s.size()) < width) s.insert(0, static_cast<std::size_t>(width) - s.size(), '0');
  return s;
}

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

// 2018-04-01T00:00:00Z, start of the simulated collection window.
constexpr UtcSeconds kEpoch = 1522540800;

struct Draft {
  UtcSeconds time = 0;
  std::string user;
  PlatformKind platform = PlatformKind::twitter;
  ActionType action = ActionType::post;
  std::string text;
  std::string video;
  std::optional<std::size_t> campaign;
};

VideoRecord make_video(const std::string& id, const std::string& channel) {
  VideoRecord v;
  v.video_id = id;
  v.channel_id = channel;
  return v;
}

}  // namespace

void CampaignSpec::validate() const {
  auto fail = [](const std::string& what) { throw Error(ErrorKind::InvalidArgument, "campaign spec: " + what); };
  if (posts_min == 0 || posts_min > posts_max) fail("need 1 <= posts_min <= posts_max");
  if (!(burst_width_seconds > 0)) fail("burst_width_seconds must be positive");
  if (!(text_mutation_rate >= 0 && text_mutation_rate <= 1)) fail("text_mutation_rate must lie in [0, 1]");
  if (!(video_reuse_prob >= 0 && video_reuse_prob <= 1)) fail("video_reuse_prob must lie in [0, 1]");
  if (!(background_unlabeled >= 0 && background_unlabeled <= 1)) fail("background_unlabeled must lie in [0, 1]");
  const double mix = platform_mix[0] + platform_mix[1] + platform_mix[2];
  if (std::any_of(platform_mix.begin(), platform_mix.end(), [](double v) { return v < 0; }) ||
      std::abs(mix - 1.0) > 1e-9)
    fail("platform_mix must be non-negative and sum to 1");
  for (const auto* w : {&campaign_score_mix, &background_score_mix})
    if (std::any_of(w->begin(), w->end(), [](double v) { return v < 0; }) ||
        std::accumulate(w->begin(), w->end(), 0.0) <= 0)
      fail("score weights must be non-negative with a positive sum");
  if (!(background_time_span_seconds > burst_width_seconds)) fail("background span must exceed the burst width");
  if (template_length == 0) fail("template_length must be positive");
  if (channels_per_score == 0) fail("channels_per_score must be positive");
  if (background_unlabeled > 0 && unlabeled_channels == 0) fail("unlabeled posts need unlabeled channels");
}

CampaignSpec CampaignSpec::reference_shaped() {
  CampaignSpec s;
  s.n_campaigns = 30;
  s.posts_min = 2;
  s.posts_max = 12;
  s.total_posts = 2000;
  return s;
}

std::optional<std::size_t> GroundTruth::campaign(const std::string& post_id) const {
  const auto it = campaign_of.find(post_id);
  if (it == campaign_of.end()) return std::nullopt;
  return it->second;
}

SyntheticData generate(const CampaignSpec& spec) {
  spec.validate();

  std::vector<ChannelRecord> channels;
  std::array<std::vector<std::string>, 6> by_score;
  std::vector<std::string> unlabeled;
  for (int s = 0; s <= 5; ++s)
    for (std::size_t i = 0; i < spec.channels_per_score; ++i) {
      std::string id = "ch-s" + std::to_string(s) + "-" + std::to_string(i);
      channels.push_back({id, "Channel " + std::to_string(s) + "." + std::to_string(i), s});
      by_score[static_cast<std::size_t>(s)].push_back(std::move(id));
    }
  for (std::size_t i = 0; i < spec.unlabeled_channels; ++i) {
    std::string id = "ch-u-" + std::to_string(i);
    channels.push_back({id, "Unscored " + std::to_string(i), std::nullopt});
    unlabeled.push_back(std::move(id));
  }

  std::vector<VideoRecord> videos;
  std::vector<Draft> drafts;
  const double campaign_window = spec.background_time_span_seconds - spec.burst_width_seconds;

  for (std::size_t c = 0; c < spec.n_campaigns; ++c) {
    Rng rng(derive_seed(spec.seed, 1, c));
    const std::size_t size = spec.posts_min + rng.below(spec.posts_max - spec.posts_min + 1);
    const std::size_t score = pick(spec.campaign_score_mix, rng);
    const auto start = kEpoch + static_cast<UtcSeconds>(rng.uniform() * campaign_window);
    std::vector<std::string> tmpl;
    for (std::size_t i = 0; i < spec.template_length; ++i) tmpl.push_back(word(rng));
    const std::size_t pool = std::max<std::size_t>(2, (size + 2) / 3);
    std::vector<std::string> used_videos;
    for (std::size_t k = 0; k < size; ++k) {
      Draft d;
      d.campaign = c;
      d.time = start + static_cast<UtcSeconds>(std::floor(rng.uniform() * (spec.burst_width_seconds + 1)));
      d.time = std::min(d.time, start + static_cast<UtcSeconds>(spec.burst_width_seconds));
      d.user = spec.reuse_users_across_campaigns ? "uc-" + std::to_string(rng.below(3 * spec.n_campaigns))
                                                 : "uc" + std::to_string(c) + "-" + std::to_string(rng.below(pool));
      d.platform = static_cast<PlatformKind>(pick(spec.platform_mix, rng));
      if (d.platform == PlatformKind::reddit && rng.bernoulli(0.5)) d.action = ActionType::reply;
      std::vector<std::string> tokens;
      for (const auto& t : tmpl) {
        if (rng.uniform() < spec.text_mutation_rate) {
          if (rng.bernoulli(0.5)) {
            tokens.push_back(word(rng));
          } else {
            tokens.push_back(t);
            tokens.push_back(word(rng));
          }
        } else {
          tokens.push_back(t);
        }
      }
      d.text = join(tokens);
      if (!used_videos.empty() && rng.bernoulli(spec.video_reuse_prob)) {
        d.video = used_videos[rng.below(used_videos.size())];
      } else {
        const auto& pool_channels = by_score[score];
        d.video = "v-c" + std::to_string(c) + "-" + std::to_string(used_videos.size());
        videos.push_back(make_video(d.video, pool_channels[rng.below(pool_channels.size())]));
        used_videos.push_back(d.video);
      }
      drafts.push_back(std::move(d));
    }
  }

  const std::size_t campaign_posts = drafts.size();
  std::size_t background = spec.background_posts;
  if (spec.total_posts) {
    if (*spec.total_posts < campaign_posts)
      throw Error(ErrorKind::InvalidArgument, "total_posts is smaller than the campaign posts");
    background = *spec.total_posts - campaign_posts;
  }
  {
    Rng rng(derive_seed(spec.seed, 2));
    const std::size_t users = std::max<std::size_t>(1, background / 3);
    std::map<std::string, std::vector<std::string>> channel_videos;
    for (std::size_t k = 0; k < background; ++k) {
      Draft d;
      d.time = kEpoch + static_cast<UtcSeconds>(rng.uniform() * spec.background_time_span_seconds);
      d.user = "ub" + std::to_string(rng.below(users));
      d.platform = static_cast<PlatformKind>(pick(spec.platform_mix, rng));
      if (d.platform == PlatformKind::reddit && rng.bernoulli(0.5)) d.action = ActionType::reply;
      std::vector<std::string> tokens(6 + rng.below(11));
      for (auto& t : tokens) t = word(rng);
      d.text = join(tokens);
      const std::string& channel = rng.uniform() < spec.background_unlabeled
                                       ? unlabeled[rng.below(unlabeled.size())]
                                       : [&]() -> const std::string& {
                                           const auto& pool = by_score[pick(spec.background_score_mix, rng)];
                                           return pool[rng.below(pool.size())];
                                         }();
      auto& vids = channel_videos[channel];
      if (!vids.empty() && rng.bernoulli(spec.video_reuse_prob)) {
        d.video = vids[rng.below(vids.size())];
      } else {
        d.video = "v-b-" + channel + "-" + std::to_string(vids.size());
        videos.push_back(make_video(d.video, channel));
        vids.push_back(d.video);
      }
      drafts.push_back(std::move(d));
    }
  }

  std::vector<std::size_t> order(drafts.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return drafts[a].time < drafts[b].time; });

  SyntheticData out;
  std::vector<PostRecord> posts;
  posts.reserve(drafts.size());
  for (std::size_t i = 0; i < order.size(); ++i) {
    Draft& d = drafts[order[i]];
    PostRecord p;
    p.post_id = "p" + padded(i + 1, 6);
    p.user_id = std::move(d.user);
    p.platform = {d.platform, {}};
    p.published_time = d.time;
    p.text = std::move(d.text);
    p.action_type = d.action;
    p.video_id = std::move(d.video);
    if (d.campaign) out.truth.campaign_of[p.post_id] = *d.campaign;
    posts.push_back(std::move(p));
  }
  out.dataset = Dataset(std::move(posts), std::move(videos), std::move(channels));
  return out;
}

void write_ground_truth(const Dataset& ds, const GroundTruth& gt, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::Io, "cannot write " + path.string());
  detail::write_csv_row(out, {"post_id", "campaign_id"});
  for (const auto& p : ds.posts()) {
    const auto c = gt.campaign(p.post_id);
    detail::write_csv_row(out, {p.post_id, c ? std::to_string(*c) : std::string()});
  }
}

GroundTruth read_ground_truth(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot read " + path.string());
  std::size_t line = 0;
  const auto header = detail::read_csv_row(in, line);
  if (!header || *header != std::vector<std::string>{"post_id", "campaign_id"})
    throw MalformedRecord(path.string(), 1, "expected header post_id,campaign_id");
  GroundTruth gt;
  while (auto row = detail::read_csv_row(in, line)) {
    if (row->size() != 2) throw MalformedRecord(path.string(), line, "expected 2 fields");
    if ((*row)[1].empty()) continue;
    try {
      std::size_t used = 0;
      const auto c = std::stoull((*row)[1], &used);
      if (used != (*row)[1].size()) throw std::invalid_argument("trailing");
      gt.campaign_of[(*row)[0]] = c;
    } catch (const std::exception&) {
      throw MalformedRecord(path.string(), line, "bad campaign id '" + (*row)[1] + "'");
    }
  }
  return gt;
}

EmbeddingMatrix synthetic_sentence_vectors(const Dataset& ds, std::size_t dim, std::uint64_t seed) {
  if (dim == 0) throw Error(ErrorKind::InvalidArgument, "dim must be positive");
  std::unordered_map<std::string, std::vector<double>> directions;
  auto direction = [&](const std::string& token) -> const std::vector<double>& {
    auto [it, inserted] = directions.try_emplace(token);
    if (inserted) {
      Rng rng(derive_seed(seed, fnv1a(token)));
      it->second.resize(dim);
      for (double& v : it->second) v = rng.normal();
    }
    return it->second;
  };
  constexpr double kNoise = 0.1;
  std::vector<std::string> ids;
  std::vector<double> values(ds.size() * dim, 0.0);
  for (std::size_t i = 0; i < ds.size(); ++i) {
    const auto& post = ds.post(i);
    ids.push_back(post.post_id);
    std::span<double> row(values.data() + i * dim, dim);
    for (const auto& t : tokenize(post.text)) {
      const auto& d = direction(t);
      for (std::size_t k = 0; k < dim; ++k) row[k] += d[k];
    }
    double norm = std::sqrt(dot(row, row));
    if (norm > 0)
      for (double& v : row) v /= norm;
    Rng rng(derive_seed(seed, fnv1a(post.post_id), 1));
    const double scale = kNoise / std::sqrt(static_cast<double>(dim));
    for (double& v : row) v += scale * rng.normal();
    norm = std::sqrt(dot(row, row));
    if (norm > 0)
      for (double& v : row) v /= norm;
  }
  return EmbeddingMatrix(std::move(ids), dim, std::move(values));
}

void write_binary_vectors(const EmbeddingMatrix& m, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::Io, "cannot write " + path.string());
  out << "dim=" << m.dim() << " count=" << m.rows() << " format=binary\n";
  std::vector<char> buf(m.dim() * 4);
  for (std::size_t r = 0; r < m.rows(); ++r) {
    const auto row = m.row(r);
    for (std::size_t k = 0; k < m.dim(); ++k) {
      auto bits = std::bit_cast<std::uint32_t>(static_cast<float>(row[k]));
      for (int b = 0; b < 4; ++b) buf[k * 4 + static_cast<std::size_t>(b)] = static_cast<char>((bits >> (8 * b)) & 0xff);
    }
    out << m.row_ids()[r] << ' ';
    out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
    out << '\n';
  }
}

DetectionScore score_detection(const ClusterAssignment& a, const GroundTruth& gt) {
  auto pairs = [](std::uint64_t n) { return n * (n - 1) / 2; };
  std::map<int, std::uint64_t> cluster_size;
  std::map<std::size_t, std::uint64_t> campaign_size;
  std::map<std::pair<int, std::size_t>, std::uint64_t> both;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const auto c = gt.campaign(a.post_ids[i]);
    if (c) ++campaign_size[*c];
    if (a.labels[i] == kNoise) continue;
    ++cluster_size[a.labels[i]];
    if (c) ++both[{a.labels[i], *c}];
  }
  DetectionScore s;
  for (const auto& [k, n] : cluster_size) s.predicted_pairs += pairs(n);
  for (const auto& [k, n] : campaign_size) s.true_pairs += pairs(n);
  for (const auto& [k, n] : both) s.true_positive_pairs += pairs(n);
  s.precision_undefined = s.predicted_pairs == 0;
  s.recall_undefined = s.true_pairs == 0;
  if (!s.precision_undefined)
    s.precision = static_cast<double>(s.true_positive_pairs) / static_cast<double>(s.predicted_pairs);
  if (!s.recall_undefined) s.recall = static_cast<double>(s.true_positive_pairs) / static_cast<double>(s.true_pairs);
  if (s.precision + s.recall > 0) s.f1 = 2 * s.precision * s.recall / (s.precision + s.recall);
  return s;
}

}  // namespace coordet
