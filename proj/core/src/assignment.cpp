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
#include <unordered_map>

#include "coordet/cluster.hpp"
#include "coordet/error.hpp"
#include "csv.hpp"

namespace coordet {

std::string_view to_string(ClusterStage stage) noexcept {
  return stage == ClusterStage::semantic ? "semantic" : "temporal";
}

std::size_t ClusterAssignment::cluster_count() const noexcept {
  int top = -1;
  for (int l : labels) top = std::max(top, l);
  return static_cast<std::size_t>(top + 1);
}

std::vector<std::size_t> ClusterAssignment::cluster_sizes() const {
  std::vector<std::size_t> sizes(cluster_count(), 0);
  for (int l : labels)
    if (l >= 0) ++sizes[static_cast<std::size_t>(l)];
  return sizes;
}

std::vector<std::vector<std::size_t>> ClusterAssignment::members() const {
  std::vector<std::vector<std::size_t>> out(cluster_count());
  for (std::size_t i = 0; i < labels.size(); ++i)
    if (labels[i] >= 0) out[static_cast<std::size_t>(labels[i])].push_back(i);
  return out;
}

std::size_t ClusterAssignment::noise_count() const noexcept {
  return static_cast<std::size_t>(std::count(labels.begin(), labels.end(), kNoise));
}

void ClusterAssignment::validate() const {
  if (post_ids.size() != labels.size())
    throw Error(ErrorKind::InvalidArgument, "assignment has " + std::to_string(post_ids.size()) + " ids but " +
                                                std::to_string(labels.size()) + " labels");
  for (int l : labels)
    if (l < kNoise) throw Error(ErrorKind::InvalidArgument, "label below -1");
  for (std::size_t s : cluster_sizes())
    if (s == 0) throw Error(ErrorKind::InvalidArgument, "cluster labels are not contiguous");
}

ClusterAssignment compact_labels(ClusterAssignment a) {
  std::unordered_map<int, int> remap;
  for (int& l : a.labels) {
    if (l < 0) {
      l = kNoise;
      continue;
    }
    auto [it, inserted] = remap.try_emplace(l, static_cast<int>(remap.size()));
    l = it->second;
  }
  return a;
}

void write_assignment(const ClusterAssignment& a, const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::Io, "cannot write '" + path.string() + "'");
  detail::write_csv_row(out, {"post_id", "label", "stage"});
  const std::string stage(to_string(a.stage));
  for (std::size_t i = 0; i < a.size(); ++i)
    detail::write_csv_row(out, {a.post_ids[i], std::to_string(a.labels[i]), stage});
}

ClusterAssignment read_assignment(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open '" + path.string() + "'");
  const std::string src = path.filename().string();
  std::size_t line_no = 0;
  const auto header = detail::read_csv_row(in, line_no);
  if (!header || *header != std::vector<std::string>{"post_id", "label", "stage"})
    throw MalformedRecord(src, line_no, "expected header 'post_id,label,stage'");
  ClusterAssignment a;
  bool first = true;
  while (auto row = detail::read_csv_row(in, line_no)) {
    if (row->size() == 1 && (*row)[0].empty()) continue;
    if (row->size() != 3) throw MalformedRecord(src, line_no, "expected 3 fields");
    int label = 0;
    const std::string& l = (*row)[1];
    const auto r = std::from_chars(l.data(), l.data() + l.size(), label);
    if (r.ec != std::errc{} || r.ptr != l.data() + l.size()) throw MalformedRecord(src, line_no, "bad label '" + l + "'");
    ClusterStage stage;
    if ((*row)[2] == "semantic") stage = ClusterStage::semantic;
    else if ((*row)[2] == "temporal") stage = ClusterStage::temporal;
    else throw MalformedRecord(src, line_no, "bad stage '" + (*row)[2] + "'");
    if (first) a.stage = stage;
    first = false;
    a.post_ids.push_back((*row)[0]);
    a.labels.push_back(label);
  }
  a.validate();
  return a;
}

std::size_t cross_base_merges(const ClusterAssignment& fine, const ClusterAssignment& coarse) {
  std::unordered_map<std::string, int> coarse_label;
  for (std::size_t i = 0; i < coarse.size(); ++i) coarse_label.emplace(coarse.post_ids[i], coarse.labels[i]);
  std::size_t violations = 0;
  for (const auto& members : fine.members()) {
    std::optional<int> base;
    bool bad = false;
    for (std::size_t i : members) {
      const auto it = coarse_label.find(fine.post_ids[i]);
      const int l = it == coarse_label.end() ? kNoise : it->second;
      if (l == kNoise || (base && *base != l)) bad = true;
      base = l;
    }
    violations += bad;
  }
  return violations;
}

ClusterAssignment drop_singletons(const ClusterAssignment& a) {
  const auto sizes = a.cluster_sizes();
  ClusterAssignment out = a;
  std::vector<int> remap(sizes.size(), kNoise);
  int next = 0;
  for (std::size_t c = 0; c < sizes.size(); ++c)
    if (sizes[c] >= 2) remap[c] = next++;
  for (int& l : out.labels)
    if (l >= 0) l = remap[static_cast<std::size_t>(l)];
  return out;
}

}  // namespace coordet
