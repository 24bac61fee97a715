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

#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include "coordet/embed.hpp"
#include "coordet/error.hpp"
#include "embedding_io.hpp"

namespace coordet {

EmbeddingMatrix::EmbeddingMatrix(std::vector<std::string> row_ids, std::size_t dim)
    : row_ids_(std::move(row_ids)), dim_(dim), values_(row_ids_.size() * dim, 0.0) {
  build_index();
}

EmbeddingMatrix::EmbeddingMatrix(std::vector<std::string> row_ids, std::size_t dim, std::vector<double> values)
    : row_ids_(std::move(row_ids)), dim_(dim), values_(std::move(values)) {
  if (values_.size() != row_ids_.size() * dim_)
    throw Error(ErrorKind::DimensionMismatch, "expected " + std::to_string(row_ids_.size()) + "x" +
                                                  std::to_string(dim_) + " values, got " +
                                                  std::to_string(values_.size()));
  if (!all_finite()) throw Error(ErrorKind::InvalidArgument, "embedding contains NaN or infinite values");
  build_index();
}

void EmbeddingMatrix::build_index() {
  index_.clear();
  index_.reserve(row_ids_.size());
  for (std::size_t i = 0; i < row_ids_.size(); ++i)
    if (!index_.emplace(row_ids_[i], i).second)
      throw Error(ErrorKind::InvalidArgument, "duplicate embedding row id '" + row_ids_[i] + "'");
}

std::optional<std::size_t> EmbeddingMatrix::index_of(std::string_view id) const {
  const auto it = index_.find(std::string(id));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

EmbeddingMatrix EmbeddingMatrix::select(std::span<const std::string> ids) const {
  std::vector<std::string> missing;
  std::vector<double> values;
  values.reserve(ids.size() * dim_);
  for (const auto& id : ids) {
    const auto i = index_of(id);
    if (!i) {
      missing.push_back(id);
      continue;
    }
    const auto r = row(*i);
    values.insert(values.end(), r.begin(), r.end());
  }
  if (!missing.empty()) throw MissingRows(std::move(missing));
  return EmbeddingMatrix(std::vector<std::string>(ids.begin(), ids.end()), dim_, std::move(values));
}

bool EmbeddingMatrix::all_finite() const noexcept {
  for (double v : values_)
    if (!std::isfinite(v)) return false;
  return true;
}

double dot(std::span<const double> a, std::span<const double> b) noexcept {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double squared_distance(std::span<const double> a, std::span<const double> b) noexcept {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

double cosine_similarity(std::span<const double> a, std::span<const double> b) noexcept {
  const double na = std::sqrt(dot(a, a));
  const double nb = std::sqrt(dot(b, b));
  if (na == 0.0 || nb == 0.0) return 0.0;
  return dot(a, b) / (na * nb);
}

namespace detail {

std::string format_double(double v) {
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

bool parse_double(std::string_view s, double& out) {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  const auto r = std::from_chars(s.data(), s.data() + s.size(), out);
  return r.ec == std::errc{} && r.ptr == s.data() + s.size();
}

EmbeddingTable read_embedding_table(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot open '" + path.string() + "'");
  const std::string src = path.filename().string();
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") != std::string::npos) break;
  }
  EmbeddingTable table;
  if (line.rfind("dim=", 0) != 0) throw MalformedRecord(src, line_no, "expected header 'dim=<d> count=<n>'");

  std::istringstream hs(line);
  std::string field;
  std::optional<std::size_t> dim, count;
  bool binary = false;
  while (hs >> field) {
    const auto eq = field.find('=');
    if (eq == std::string::npos) throw MalformedRecord(src, line_no, "bad header field '" + field + "'");
    const std::string key = field.substr(0, eq);
    const std::string value = field.substr(eq + 1);
    if (key == "format") {
      if (value != "text" && value != "binary") throw MalformedRecord(src, line_no, "unknown format '" + value + "'");
      binary = value == "binary";
      continue;
    }
    std::size_t n = 0;
    const auto r = std::from_chars(value.data(), value.data() + value.size(), n);
    if (r.ec != std::errc{} || r.ptr != value.data() + value.size())
      throw MalformedRecord(src, line_no, "bad header value '" + field + "'");
    if (key == "dim") dim = n;
    else if (key == "count") count = n;
  }
  if (!dim || !count) throw MalformedRecord(src, line_no, "header needs dim and count");
  if (*dim == 0) throw MalformedRecord(src, line_no, "dim must be positive");
  table.dim = *dim;
  table.ids.reserve(*count);
  table.values.reserve(*count * *dim);

  if (binary) {
    for (std::size_t r = 0; r < *count; ++r) {
      std::string id;
      char c;
      while (in.get(c) && c != ' ') id += c;
      if (!in || id.empty()) throw MalformedRecord(src, r + 2, "truncated binary row");
      for (std::size_t k = 0; k < *dim; ++k) {
        unsigned char bytes[4];
        if (!in.read(reinterpret_cast<char*>(bytes), 4))
          throw Error(ErrorKind::DimensionMismatch, "binary row '" + id + "' shorter than dim " + std::to_string(*dim));
        const std::uint32_t bits = std::uint32_t(bytes[0]) | std::uint32_t(bytes[1]) << 8 |
                                   std::uint32_t(bytes[2]) << 16 | std::uint32_t(bytes[3]) << 24;
        float f;
        std::memcpy(&f, &bits, 4);
        table.values.push_back(static_cast<double>(f));
      }
      if (in.peek() == '\n') in.get();
      table.ids.push_back(std::move(id));
    }
    return table;
  }

  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::istringstream ls(line);
    std::string id, token;
    ls >> id;
    std::size_t width = 0;
    while (ls >> token) {
      double v;
      if (!parse_double(token, v)) throw MalformedRecord(src, line_no, "bad number '" + token + "'");
      table.values.push_back(v);
      ++width;
    }
    if (width != *dim)
      throw Error(ErrorKind::DimensionMismatch, src + ":" + std::to_string(line_no) + ": row '" + id + "' has " +
                                                    std::to_string(width) + " values, expected " +
                                                    std::to_string(*dim));
    table.ids.push_back(std::move(id));
  }
  if (table.ids.size() != *count)
    throw MalformedRecord(src, line_no, "header count " + std::to_string(*count) + " but " +
                                            std::to_string(table.ids.size()) + " rows");
  return table;
}

}  // namespace detail

void write_embeddings(const EmbeddingMatrix& m, const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::Io, "cannot write '" + path.string() + "'");
  out << "dim=" << m.dim() << " count=" << m.rows() << '\n';
  for (std::size_t r = 0; r < m.rows(); ++r) {
    out << m.row_ids()[r];
    for (double v : m.row(r)) out << ' ' << detail::format_double(v);
    out << '\n';
  }
}

EmbeddingMatrix read_embeddings(const std::filesystem::path& path) {
  auto table = detail::read_embedding_table(path);
  return EmbeddingMatrix(std::move(table.ids), table.dim, std::move(table.values));
}

}  // namespace coordet
