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
#include <charconv>
#include <fstream>
#include <sstream>

#include <openssl/evp.h>

#include "coordet/pipeline.hpp"
#include "embedding_io.hpp"

namespace coordet {

std::string_view to_string(TextRoute r) noexcept { return r == TextRoute::pvdbow ? "pvdbow" : "external"; }

std::string_view to_string(NetworkRoute r) noexcept {
  switch (r) {
    case NetworkRoute::none: return "none";
    case NetworkRoute::n2v: return "n2v";
    case NetworkRoute::mp2v: return "mp2v";
  }
  return "none";
}

std::string MethodConfig::name() const {
  std::string out = text == TextRoute::pvdbow ? "Doc2Vec" : "BERTopic";
  if (temporal) out += "+PostTime";
  if (network == NetworkRoute::n2v) out += "+N2V";
  if (network == NetworkRoute::mp2v) out += "+MP2V";
  return out;
}

MethodConfig MethodConfig::parse(std::string_view name) {
  for (const auto& m : table2_grid())
    if (m.name() == name) return m;
  throw Error(ErrorKind::Config, "unknown method '" + std::string(name) + "'");
}

std::vector<MethodConfig> MethodConfig::table2_grid() {
  std::vector<MethodConfig> grid;
  for (auto net : {NetworkRoute::none, NetworkRoute::n2v, NetworkRoute::mp2v})
    for (auto text : {TextRoute::pvdbow, TextRoute::external})
      for (bool temporal : {false, true}) grid.push_back({text, net, temporal});
  return grid;
}

StageError::StageError(std::string stage, const Error& cause)
    : Error(cause.kind(), "stage '" + stage + "' failed: " + cause.what(), Verbatim{}), stage_(std::move(stage)) {}

// ------------------------------------------------------------------ hashing

namespace {

struct Sha256 {
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  Sha256() {
    if (!ctx || EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr) != 1)
      throw Error(ErrorKind::InvalidArgument, "sha256 unavailable");
  }
  ~Sha256() { EVP_MD_CTX_free(ctx); }
  Sha256(const Sha256&) = delete;
  Sha256& operator=(const Sha256&) = delete;

  void update(std::string_view data) { EVP_DigestUpdate(ctx, data.data(), data.size()); }
  std::string hex() {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_DigestFinal_ex(ctx, digest, &len);
    static constexpr char kHex[] = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < len; ++i) {
      out += kHex[digest[i] >> 4];
      out += kHex[digest[i] & 15];
    }
    return out;
  }
};

}  // namespace

std::string sha256_hex(std::string_view data) {
  Sha256 h;
  h.update(data);
  return h.hex();
}

std::string sha256_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot read " + path.string());
  Sha256 h;
  char buf[1 << 16];
  while (in) {
    in.read(buf, sizeof buf);
    h.update({buf, static_cast<std::size_t>(in.gcount())});
  }
  return h.hex();
}

std::string dataset_fingerprint(const Dataset& ds) {
  Sha256 h;
  auto field = [&](std::string_view s) {
    h.update(std::to_string(s.size()));
    h.update(":");
    h.update(s);
  };
  auto opt = [&](const auto& o) {
    if (o)
      field(*o);
    else
      field("\x01null");
  };
  for (const auto& p : ds.posts()) {
    field(p.post_id);
    field(p.user_id);
    field(p.platform.to_string());
    field(std::to_string(p.published_time));
    field(p.text);
    field(to_string(p.action_type));
    opt(p.video_id);
  }
  h.update("|videos|");
  for (const auto& [id, v] : ds.videos()) {
    field(v.video_id);
    field(v.channel_id);
  }
  h.update("|channels|");
  for (const auto& [id, c] : ds.channels()) {
    field(c.channel_id);
    field(c.name);
    field(c.factuality ? std::to_string(*c.factuality) : "\x01null");
  }
  return h.hex();
}

// ------------------------------------------------------------------- config

namespace {

[[noreturn]] void bad_value(std::string_view key, std::string_view value, std::string_view expected) {
  throw Error(ErrorKind::Config,
              "key '" + std::string(key) + "': '" + std::string(value) + "' is not " + std::string(expected));
}

template <class T>
T parse_uint(std::string_view key, std::string_view value) {
  T out{};
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || ptr != value.data() + value.size() || value.empty())
    bad_value(key, value, "a non-negative integer");
  return out;
}

double parse_real(std::string_view key, std::string_view value) {
  double out = 0.0;
  if (!detail::parse_double(value, out)) bad_value(key, value, "a number");
  return out;
}

bool parse_bool(std::string_view key, std::string_view value) {
  if (value == "true" || value == "1" || value == "yes" || value == "on") return true;
  if (value == "false" || value == "0" || value == "no" || value == "off") return false;
  bad_value(key, value, "a boolean");
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::string fmt(double v) { return detail::format_double(v); }

}  // namespace

std::vector<std::pair<std::string, std::string>> PipelineConfig::to_entries() const {
  auto sz = [](std::size_t v) { return std::to_string(v); };
  auto time = [](const std::optional<UtcSeconds>& t) { return t ? format_iso8601(*t) : std::string(); };
  return {
      {"posts", posts.string()},
      {"videos", videos.string()},
      {"channels", channels.string()},
      {"external_vectors", external_vectors.string()},
      {"output_dir", output_dir.string()},
      {"text", std::string(to_string(method.text))},
      {"network", std::string(to_string(method.network))},
      {"temporal", method.temporal ? "true" : "false"},
      {"seed", std::to_string(seed)},
      {"threads", sz(threads)},
      {"cache", cache ? "true" : "false"},
      {"ingest.strict", ingest.strict ? "true" : "false"},
      {"ingest.action", ingest.action_filter ? std::string(to_string(*ingest.action_filter)) : "all"},
      {"ingest.window_begin", time(ingest.window_begin)},
      {"ingest.window_end", time(ingest.window_end)},
      {"text.dim", sz(text_sgns.dim)},
      {"text.window", sz(text_sgns.window)},
      {"text.negatives", sz(text_sgns.negatives)},
      {"text.epochs", sz(text_sgns.epochs)},
      {"text.learning_rate", fmt(text_sgns.learning_rate)},
      {"walks.per_node", sz(walks.walks_per_node)},
      {"walks.length", sz(walks.walk_length)},
      {"walks.p", fmt(walks.p)},
      {"walks.q", fmt(walks.q)},
      {"walks.metapaths", metapaths},
      {"node.dim", sz(node_sgns.dim)},
      {"node.window", sz(node_sgns.window)},
      {"node.negatives", sz(node_sgns.negatives)},
      {"node.epochs", sz(node_sgns.epochs)},
      {"node.learning_rate", fmt(node_sgns.learning_rate)},
      {"align.dim", sz(align_dim)},
      {"kmeans.k", sz(kmeans_k)},
      {"kmeans.max_iterations", sz(kmeans_max_iterations)},
      {"hdbscan.min_cluster_size", sz(hdbscan.min_cluster_size)},
      {"hdbscan.min_samples", sz(hdbscan.min_samples)},
      {"temporal.epsilon", fmt(temporal.epsilon_seconds)},
      {"temporal.min_pts", sz(temporal.min_pts)},
      {"topics.candidates", sz(topic_candidates)},
      {"topics.top_n", sz(topic_top_n)},
      {"topics.mmr_lambda", fmt(mmr_lambda)},
      {"report.channels_top_n", sz(channels_top_n)},
  };
}

void PipelineConfig::set(std::string_view key, std::string_view value) {
  const std::string v = trim(value);
  auto sz = [&] { return parse_uint<std::size_t>(key, v); };
  auto time = [&]() -> std::optional<UtcSeconds> {
    if (v.empty()) return std::nullopt;
    const auto t = parse_iso8601(v);
    if (!t) bad_value(key, v, "an ISO-8601 timestamp");
    return t;
  };
  if (key == "posts") posts = v;
  else if (key == "videos") videos = v;
  else if (key == "channels") channels = v;
  else if (key == "external_vectors") external_vectors = v;
  else if (key == "output_dir") output_dir = v;
  else if (key == "text") {
    if (v == "pvdbow") method.text = TextRoute::pvdbow;
    else if (v == "external") method.text = TextRoute::external;
    else bad_value(key, v, "pvdbow or external");
  } else if (key == "network") {
    if (v == "none") method.network = NetworkRoute::none;
    else if (v == "n2v") method.network = NetworkRoute::n2v;
    else if (v == "mp2v") method.network = NetworkRoute::mp2v;
    else bad_value(key, v, "none, n2v or mp2v");
  } else if (key == "temporal") method.temporal = parse_bool(key, v);
  else if (key == "method") method = MethodConfig::parse(v);
  else if (key == "seed") seed = parse_uint<std::uint64_t>(key, v);
  else if (key == "threads") threads = sz();
  else if (key == "cache") cache = parse_bool(key, v);
  else if (key == "ingest.strict") ingest.strict = parse_bool(key, v);
  else if (key == "ingest.action") {
    if (v == "all") ingest.action_filter.reset();
    else if (auto a = parse_action_type(v)) ingest.action_filter = *a;
    else bad_value(key, v, "all, post or reply");
  } else if (key == "ingest.window_begin") ingest.window_begin = time();
  else if (key == "ingest.window_end") ingest.window_end = time();
  else if (key == "text.dim") text_sgns.dim = sz();
  else if (key == "text.window") text_sgns.window = sz();
  else if (key == "text.negatives") text_sgns.negatives = sz();
  else if (key == "text.epochs") text_sgns.epochs = sz();
  else if (key == "text.learning_rate") text_sgns.learning_rate = parse_real(key, v);
  else if (key == "walks.per_node") walks.walks_per_node = sz();
  else if (key == "walks.length") walks.walk_length = sz();
  else if (key == "walks.p") walks.p = parse_real(key, v);
  else if (key == "walks.q") walks.q = parse_real(key, v);
  else if (key == "walks.metapaths") metapaths = v;
  else if (key == "node.dim") node_sgns.dim = sz();
  else if (key == "node.window") node_sgns.window = sz();
  else if (key == "node.negatives") node_sgns.negatives = sz();
  else if (key == "node.epochs") node_sgns.epochs = sz();
  else if (key == "node.learning_rate") node_sgns.learning_rate = parse_real(key, v);
  else if (key == "align.dim") align_dim = sz();
  else if (key == "kmeans.k") kmeans_k = sz();
  else if (key == "kmeans.max_iterations") kmeans_max_iterations = sz();
  else if (key == "hdbscan.min_cluster_size") hdbscan.min_cluster_size = sz();
  else if (key == "hdbscan.min_samples") hdbscan.min_samples = sz();
  else if (key == "temporal.epsilon") temporal.epsilon_seconds = parse_real(key, v);
  else if (key == "temporal.min_pts") temporal.min_pts = sz();
  else if (key == "topics.candidates") topic_candidates = sz();
  else if (key == "topics.top_n") topic_top_n = sz();
  else if (key == "topics.mmr_lambda") mmr_lambda = parse_real(key, v);
  else if (key == "report.channels_top_n") channels_top_n = sz();
  else throw Error(ErrorKind::Config, "unknown key '" + std::string(key) + "'");
}

PipelineConfig PipelineConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot read config " + path.string());
  PipelineConfig cfg;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const std::string body = trim(line);
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos)
      throw Error(ErrorKind::Config, path.string() + ":" + std::to_string(line_no) + ": expected key = value");
    cfg.set(trim(std::string_view(body).substr(0, eq)), std::string_view(body).substr(eq + 1));
  }
  return cfg;
}

std::string PipelineConfig::to_text() const {
  std::ostringstream out;
  for (const auto& [k, v] : to_entries()) out << k << " = " << v << '\n';
  return out.str();
}

std::string PipelineConfig::hash() const {
  std::string canonical;
  for (const auto& [k, v] : to_entries()) {
    if (k == "output_dir" || k == "cache") continue;
    canonical += k + '=' + v + '\n';
  }
  return sha256_hex(canonical);
}

void PipelineConfig::validate() const {
  try {
    text_sgns.validate();
    node_sgns.validate();
    walks.validate();
    temporal.validate();
    MetaPathSet::parse(metapaths).validate();
  } catch (const Error& e) {
    throw Error(ErrorKind::Config, e.what());
  }
  if (align_dim == 0) throw Error(ErrorKind::Config, "align.dim must be positive");
  if (hdbscan.min_cluster_size == 0 || hdbscan.min_samples == 0)
    throw Error(ErrorKind::Config, "hdbscan.min_cluster_size and hdbscan.min_samples must be positive");
  if (kmeans_max_iterations == 0) throw Error(ErrorKind::Config, "kmeans.max_iterations must be positive");
  if (topic_candidates == 0 || topic_top_n == 0) throw Error(ErrorKind::Config, "topic counts must be positive");
  if (!(mmr_lambda >= 0.0 && mmr_lambda <= 1.0)) throw Error(ErrorKind::Config, "topics.mmr_lambda must lie in [0, 1]");
  if (threads == 0) throw Error(ErrorKind::Config, "threads must be positive");
}

}  // namespace coordet
