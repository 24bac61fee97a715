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

#include <fstream>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "coordet/embed.hpp"
#include "coordet/error.hpp"
#include "embedding_io.hpp"

namespace coordet {

namespace {

bool looks_like_json_lines(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot open '" + path.string() + "'");
  char c;
  while (in.get(c))
    if (!std::isspace(static_cast<unsigned char>(c))) return c == '{';
  return false;
}

detail::EmbeddingTable read_json_lines(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  const std::string src = path.filename().string();
  detail::EmbeddingTable table;
  std::string line;
  std::size_t line_no = 0;
  bool have_dim = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    nlohmann::json obj;
    try {
      obj = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw MalformedRecord(src, line_no, e.what());
    }
    if (!obj.is_object() || !obj.contains("id") || !obj.contains("vector") || !obj["vector"].is_array())
      throw MalformedRecord(src, line_no, "expected {\"id\": ..., \"vector\": [...]}");
    const auto& id = obj["id"];
    std::string id_str = id.is_string() ? id.get<std::string>() : id.dump();
    const auto& vec = obj["vector"];
    if (!have_dim) {
      if (vec.empty()) throw MalformedRecord(src, line_no, "empty vector");
      table.dim = vec.size();
      have_dim = true;
    } else if (vec.size() != table.dim) {
      throw Error(ErrorKind::DimensionMismatch, src + ":" + std::to_string(line_no) + ": row '" + id_str +
                                                    "' has " + std::to_string(vec.size()) + " values, expected " +
                                                    std::to_string(table.dim));
    }
    for (const auto& v : vec) {
      if (!v.is_number()) throw MalformedRecord(src, line_no, "non-numeric vector entry");
      table.values.push_back(v.get<double>());
    }
    table.ids.push_back(std::move(id_str));
  }
  return table;
}

}  // namespace

EmbeddingMatrix load_external_embeddings(const std::filesystem::path& path,
                                         std::span<const std::string> expected_ids) {
  detail::EmbeddingTable table =
      looks_like_json_lines(path) ? read_json_lines(path) : detail::read_embedding_table(path);
  std::unordered_set<std::string> seen;
  for (const auto& id : table.ids)
    if (!seen.insert(id).second)
      throw MalformedRecord(path.filename().string(), 0, "duplicate vector id '" + id + "'");
  EmbeddingMatrix all(std::move(table.ids), table.dim, std::move(table.values));
  return all.select(expected_ids);
}

}  // namespace coordet
