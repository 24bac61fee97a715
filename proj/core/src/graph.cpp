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

#include "coordet/graph.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <thread>

#include "coordet/error.hpp"
#include "coordet/rng.hpp"

namespace coordet {

namespace {

constexpr std::string_view kTypeNames[] = {"user", "post", "video", "channel"};
constexpr std::string_view kTypePrefixes[] = {"u:", "p:", "v:", "c:"};

/// Runs fn(begin, end) over [0, n) split into `threads` contiguous blocks.
template <class Fn>
void parallel_blocks(std::size_t n, std::size_t threads, Fn&& fn) {
  threads = std::max<std::size_t>(1, std::min(threads, n));
  if (threads == 1) {
    fn(std::size_t{0}, n);
    return;
  }
  std::vector<std::jthread> pool;
  const std::size_t block = (n + threads - 1) / threads;
  for (std::size_t t = 0; t < threads; ++t) {
    const std::size_t begin = t * block;
    const std::size_t end = std::min(n, begin + block);
    if (begin >= end) break;
    pool.emplace_back([&fn, begin, end] { fn(begin, end); });
  }
}

}  // namespace

std::string_view to_string(NodeType type) noexcept { return kTypeNames[static_cast<std::size_t>(type)]; }

std::optional<NodeType> parse_node_type(std::string_view text) noexcept {
  for (std::size_t i = 0; i < 4; ++i)
    if (text == kTypeNames[i]) return static_cast<NodeType>(i);
  return std::nullopt;
}

bool edge_allowed(NodeType a, NodeType b) noexcept {
  const int x = static_cast<int>(a);
  const int y = static_cast<int>(b);
  return x - y == 1 || y - x == 1;
}

std::string HeteroGraph::node_id(NodeType type, std::string_view entity_id) {
  std::string out(kTypePrefixes[static_cast<std::size_t>(type)]);
  out += entity_id;
  return out;
}

NodeIndex HeteroGraph::add_node(NodeType type, std::string_view entity_id) {
  std::string id = node_id(type, entity_id);
  if (const auto it = lookup_.find(id); it != lookup_.end()) return it->second;
  const auto index = static_cast<NodeIndex>(ids_.size());
  lookup_.emplace(id, index);
  ids_.push_back(std::move(id));
  types_.push_back(type);
  adjacency_.emplace_back();
  type_index_[static_cast<std::size_t>(type)].push_back(index);
  return index;
}

void HeteroGraph::add_edge(NodeIndex a, NodeIndex b) {
  if (!edge_allowed(types_.at(a), types_.at(b)))
    throw Error(ErrorKind::InvalidArgument, "edge " + ids_[a] + " -- " + ids_[b] + " not allowed by schema");
  adjacency_[a].push_back(b);
  adjacency_[b].push_back(a);
}

void HeteroGraph::finalize() {
  edge_count_ = 0;
  for (auto& adj : adjacency_) {
    std::sort(adj.begin(), adj.end());
    adj.erase(std::unique(adj.begin(), adj.end()), adj.end());
    edge_count_ += adj.size();
  }
  edge_count_ /= 2;
}

bool HeteroGraph::has_edge(NodeIndex a, NodeIndex b) const {
  const auto& adj = adjacency_.at(a);
  return std::binary_search(adj.begin(), adj.end(), b);
}

std::optional<NodeIndex> HeteroGraph::find(std::string_view node_id) const {
  const auto it = lookup_.find(std::string(node_id));
  if (it == lookup_.end()) return std::nullopt;
  return it->second;
}

std::optional<NodeIndex> HeteroGraph::find(NodeType type, std::string_view entity_id) const {
  return find(node_id(type, entity_id));
}

HeteroGraph build_graph(const Dataset& ds) {
  HeteroGraph g;
  for (const auto& p : ds.posts()) g.add_node(NodeType::user, p.user_id);
  for (const auto& p : ds.posts()) g.add_node(NodeType::post, p.post_id);
  for (const auto& [id, v] : ds.videos()) g.add_node(NodeType::video, id);
  for (const auto& [id, c] : ds.channels()) g.add_node(NodeType::channel, id);

  for (const auto& p : ds.posts()) {
    const NodeIndex post = *g.find(NodeType::post, p.post_id);
    g.add_edge(*g.find(NodeType::user, p.user_id), post);
    if (p.video_id) g.add_edge(post, *g.find(NodeType::video, *p.video_id));
  }
  for (const auto& [id, v] : ds.videos())
    g.add_edge(*g.find(NodeType::video, id), *g.find(NodeType::channel, v.channel_id));
  g.finalize();
  return g;
}

void WalkConfig::validate() const {
  if (walks_per_node == 0) throw Error(ErrorKind::InvalidArgument, "walks_per_node must be positive");
  if (walk_length < 2) throw Error(ErrorKind::InvalidArgument, "walk_length must be at least 2");
  if (!(p > 0.0)) throw Error(ErrorKind::InvalidArgument, "p must be positive");
  if (!(q > 0.0)) throw Error(ErrorKind::InvalidArgument, "q must be positive");
}

std::size_t WalkCorpus::token_count() const noexcept {
  std::size_t n = 0;
  for (const auto& w : walks) n += w.size();
  return n;
}

double node2vec_weight(const HeteroGraph& g, NodeIndex previous, NodeIndex candidate, double p, double q) {
  if (candidate == previous) return 1.0 / p;
  if (g.has_edge(previous, candidate)) return 1.0;
  return 1.0 / q;
}

namespace {

std::string describe(const WalkConfig& cfg, std::string_view kind) {
  std::ostringstream os;
  os << "kind=" << kind << " walks_per_node=" << cfg.walks_per_node << " walk_length=" << cfg.walk_length
     << " p=" << cfg.p << " q=" << cfg.q << " seed=" << cfg.seed;
  return os.str();
}

void node2vec_walk(const HeteroGraph& g, NodeIndex start, const WalkConfig& cfg, Rng& rng,
                   std::vector<NodeIndex>& walk, std::vector<double>& weights) {
  walk.clear();
  walk.push_back(start);
  while (walk.size() < cfg.walk_length) {
    const NodeIndex cur = walk.back();
    const auto nbrs = g.neighbors(cur);
    if (nbrs.empty()) break;
    if (walk.size() == 1) {
      walk.push_back(nbrs[rng.below(nbrs.size())]);
      continue;
    }
    const NodeIndex prev = walk[walk.size() - 2];
    weights.resize(nbrs.size());
    double total = 0.0;
    for (std::size_t i = 0; i < nbrs.size(); ++i) {
      weights[i] = node2vec_weight(g, prev, nbrs[i], cfg.p, cfg.q);
      total += weights[i];
    }
    double r = rng.uniform() * total;
    std::size_t pick = nbrs.size() - 1;
    for (std::size_t i = 0; i < nbrs.size(); ++i) {
      r -= weights[i];
      if (r < 0.0) {
        pick = i;
        break;
      }
    }
    walk.push_back(nbrs[pick]);
  }
}

}  // namespace

WalkCorpus node2vec_walks(const HeteroGraph& g, const WalkConfig& cfg) {
  cfg.validate();
  if (g.node_count() == 0) throw Error(ErrorKind::InvalidArgument, "node2vec_walks on an empty graph");
  WalkCorpus corpus;
  corpus.vocabulary = g.ids();
  corpus.header = describe(cfg, "node2vec");
  const std::size_t n = g.node_count();
  corpus.walks.resize(cfg.walks_per_node * n);
  parallel_blocks(n, cfg.threads, [&](std::size_t begin, std::size_t end) {
    std::vector<double> weights;
    for (std::size_t round = 0; round < cfg.walks_per_node; ++round) {
      for (std::size_t node = begin; node < end; ++node) {
        Rng rng(derive_seed(cfg.seed, node, round));
        node2vec_walk(g, static_cast<NodeIndex>(node), cfg, rng, corpus.walks[round * n + node], weights);
      }
    }
  });
  return corpus;
}

std::size_t MetaPath::period() const noexcept {
  if (types.size() >= 2 && types.front() == types.back()) return types.size() - 1;
  return types.size();
}

NodeType MetaPath::type_at(std::size_t step) const { return types.at(step % period()); }

std::string MetaPath::to_string() const {
  std::string out;
  for (std::size_t i = 0; i < types.size(); ++i) {
    if (i) out += ',';
    out += coordet::to_string(types[i]);
  }
  return out;
}

MetaPath MetaPath::parse(std::string_view text) {
  MetaPath path;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t comma = std::min(text.find(',', start), text.size());
    std::string_view token = text.substr(start, comma - start);
    while (!token.empty() && std::isspace(static_cast<unsigned char>(token.front()))) token.remove_prefix(1);
    while (!token.empty() && std::isspace(static_cast<unsigned char>(token.back()))) token.remove_suffix(1);
    const auto type = parse_node_type(token);
    if (!type) throw Error(ErrorKind::InvalidArgument, "unknown node type '" + std::string(token) + "' in meta-path");
    path.types.push_back(*type);
    start = comma + 1;
  }
  return path;
}

MetaPathSet MetaPathSet::defaults() {
  using T = NodeType;
  return {{{{T::user, T::post, T::video, T::post, T::user}},
           {{T::video, T::channel, T::video}},
           {{T::post, T::user, T::post}},
           {{T::channel, T::video, T::channel}}}};
}

MetaPathSet MetaPathSet::parse(std::string_view text) {
  MetaPathSet set;
  std::size_t start = 0;
  while (start < text.size()) {
    const std::size_t semi = std::min(text.find(';', start), text.size());
    const std::string_view part = text.substr(start, semi - start);
    if (part.find_first_not_of(" \t") != std::string_view::npos) set.paths.push_back(MetaPath::parse(part));
    start = semi + 1;
  }
  return set;
}

std::string MetaPathSet::to_string() const {
  std::string out;
  for (std::size_t i = 0; i < paths.size(); ++i) {
    if (i) out += ';';
    out += paths[i].to_string();
  }
  return out;
}

void MetaPathSet::validate() const {
  if (paths.empty()) throw Error(ErrorKind::InvalidArgument, "meta-path set is empty");
  for (const auto& path : paths) {
    if (path.types.size() < 2)
      throw Error(ErrorKind::InvalidArgument, "meta-path '" + path.to_string() + "' shorter than 2");
    const std::size_t period = path.period();
    for (std::size_t i = 0; i < period; ++i) {
      if (!edge_allowed(path.type_at(i), path.type_at(i + 1)))
        throw Error(ErrorKind::InvalidArgument,
                    "meta-path '" + path.to_string() + "' uses a transition the graph schema does not allow");
    }
  }
}

WalkCorpus metapath_walks(const HeteroGraph& g, const MetaPathSet& paths, const WalkConfig& cfg) {
  cfg.validate();
  paths.validate();
  for (const auto& path : paths.paths) {
    if (g.nodes_of(path.types.front()).empty())
      throw Error(ErrorKind::NoAdmissibleStart,
                  "no " + std::string(to_string(path.types.front())) + " nodes to start '" + path.to_string() + "'");
  }
  WalkCorpus corpus;
  corpus.vocabulary = g.ids();
  corpus.header = describe(cfg, "metapath") + " paths=" + paths.to_string();

  for (std::size_t pi = 0; pi < paths.paths.size(); ++pi) {
    const MetaPath& path = paths.paths[pi];
    const auto starts = g.nodes_of(path.types.front());
    const std::size_t offset = corpus.walks.size();
    corpus.walks.resize(offset + cfg.walks_per_node * starts.size());
    const std::uint64_t path_seed = derive_seed(cfg.seed, 0x6d70ULL, pi);
    parallel_blocks(starts.size(), cfg.threads, [&](std::size_t begin, std::size_t end) {
      std::vector<NodeIndex> candidates;
      for (std::size_t round = 0; round < cfg.walks_per_node; ++round) {
        for (std::size_t s = begin; s < end; ++s) {
          Rng rng(derive_seed(path_seed, starts[s], round));
          auto& walk = corpus.walks[offset + round * starts.size() + s];
          walk.push_back(starts[s]);
          for (std::size_t step = 1; step < cfg.walk_length; ++step) {
            const NodeType want = path.type_at(step);
            candidates.clear();
            for (const NodeIndex nb : g.neighbors(walk.back()))
              if (g.type(nb) == want) candidates.push_back(nb);
            if (candidates.empty()) break;
            walk.push_back(candidates[rng.below(candidates.size())]);
          }
        }
      }
    });
  }
  return corpus;
}

void write_walks(const WalkCorpus& corpus, std::ostream& out) {
  out << "# " << corpus.header << '\n';
  for (const auto& walk : corpus.walks) {
    for (std::size_t i = 0; i < walk.size(); ++i) {
      if (i) out << ' ';
      out << corpus.vocabulary[walk[i]];
    }
    out << '\n';
  }
}

void write_walks(const WalkCorpus& corpus, const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::Io, "cannot write '" + path.string() + "'");
  write_walks(corpus, out);
}

WalkCorpus read_walks(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open '" + path.string() + "'");
  WalkCorpus corpus;
  std::unordered_map<std::string, NodeIndex> index;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line[0] == '#') {
      if (corpus.header.empty()) corpus.header = line.size() > 2 ? line.substr(2) : "";
      continue;
    }
    std::istringstream ls(line);
    std::vector<NodeIndex> walk;
    std::string token;
    while (ls >> token) {
      auto [it, inserted] = index.emplace(token, static_cast<NodeIndex>(corpus.vocabulary.size()));
      if (inserted) corpus.vocabulary.push_back(token);
      walk.push_back(it->second);
    }
    if (!walk.empty()) corpus.walks.push_back(std::move(walk));
  }
  return corpus;
}

}  // namespace coordet
