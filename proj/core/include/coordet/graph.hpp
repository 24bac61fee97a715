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

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "coordet/datamodel.hpp"

namespace coordet {

enum class NodeType : std::uint8_t { user, post, video, channel };

std::string_view to_string(NodeType type) noexcept;
std::optional<NodeType> parse_node_type(std::string_view text) noexcept;
/// Whether the multipartite schema allows an edge between the two types.
bool edge_allowed(NodeType a, NodeType b) noexcept;

using NodeIndex = std::uint32_t;

/// Undirected, unweighted user-post-video-channel graph. Node ids are the
/// entity ids prefixed by their type (`u:`, `p:`, `v:`, `c:`) so that ids
/// from different tables never collide. Immutable after construction.
class HeteroGraph {
 public:
  HeteroGraph() = default;

  std::size_t node_count() const noexcept { return ids_.size(); }
  std::size_t edge_count() const noexcept { return edge_count_; }

  const std::string& id(NodeIndex n) const { return ids_.at(n); }
  NodeType type(NodeIndex n) const { return types_.at(n); }
  /// Sorted ascending.
  std::span<const NodeIndex> neighbors(NodeIndex n) const { return adjacency_.at(n); }
  bool has_edge(NodeIndex a, NodeIndex b) const;

  std::optional<NodeIndex> find(std::string_view node_id) const;
  std::optional<NodeIndex> find(NodeType type, std::string_view entity_id) const;
  std::span<const NodeIndex> nodes_of(NodeType type) const {
    return type_index_[static_cast<std::size_t>(type)];
  }
  const std::vector<std::string>& ids() const noexcept { return ids_; }

  static std::string node_id(NodeType type, std::string_view entity_id);

  /// Builder API. `add_edge` rejects pairs the schema does not allow.
  NodeIndex add_node(NodeType type, std::string_view entity_id);
  void add_edge(NodeIndex a, NodeIndex b);
  /// Sorts and dedups adjacency lists. Called by build_graph.
  void finalize();

 private:
  std::vector<std::string> ids_;
  std::vector<NodeType> types_;
  std::vector<std::vector<NodeIndex>> adjacency_;
  std::vector<NodeIndex> type_index_[4];
  std::unordered_map<std::string, NodeIndex> lookup_;
  std::size_t edge_count_ = 0;
};

/// Users in order of first appearance, then posts, videos and channels.
HeteroGraph build_graph(const Dataset& ds);

struct WalkConfig {
  std::size_t walks_per_node = 10;
  std::size_t walk_length = 80;
  double p = 0.25;  // return parameter
  double q = 4.0;   // in-out parameter
  std::uint64_t seed = 42;
  std::size_t threads = 1;

  void validate() const;
};

/// Walks as node-index sequences over a fixed vocabulary of node ids.
struct WalkCorpus {
  std::vector<std::string> vocabulary;
  std::vector<std::vector<NodeIndex>> walks;
  /// Free-form description recorded in the persisted header.
  std::string header;

  std::size_t token_count() const noexcept;
};

/// Unnormalized second-order transition weight for stepping to `candidate`
/// from `current` after arriving from `previous`.
double node2vec_weight(const HeteroGraph& g, NodeIndex previous, NodeIndex candidate, double p, double q);

/// Second-order biased walks: walks_per_node walks from every node, outer loop
/// over rounds. Isolated nodes yield single-node walks.
WalkCorpus node2vec_walks(const HeteroGraph& g, const WalkConfig& cfg);

struct MetaPath {
  std::vector<NodeType> types;

  /// Period of the repeating type pattern: len-1 for closed paths (first ==
  /// last), len otherwise.
  std::size_t period() const noexcept;
  NodeType type_at(std::size_t step) const;
  std::string to_string() const;
  static MetaPath parse(std::string_view text);  // e.g. "user,post,video,post,user"
};

struct MetaPathSet {
  std::vector<MetaPath> paths;

  /// [user, post, video, post, user]; [video, channel, video];
  /// [post, user, post]; [channel, video, channel].
  static MetaPathSet defaults();
  /// Paths separated by ';'.
  static MetaPathSet parse(std::string_view text);
  std::string to_string() const;
  /// Throws InvalidArgument for a path shorter than 2 or a disallowed transition.
  void validate() const;
};

/// Type-constrained uniform walks. For every path, walks_per_node walks start
/// at each node of the path's first type. Dead ends truncate the walk. Throws
/// NoAdmissibleStart when a path's first type has no nodes.
WalkCorpus metapath_walks(const HeteroGraph& g, const MetaPathSet& paths, const WalkConfig& cfg);

void write_walks(const WalkCorpus& corpus, std::ostream& out);
void write_walks(const WalkCorpus& corpus, const std::filesystem::path& path);
/// Vocabulary is rebuilt from first appearance in the file.
WalkCorpus read_walks(const std::filesystem::path& path);

}  // namespace coordet
