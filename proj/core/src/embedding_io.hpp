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

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace coordet::detail {

struct EmbeddingTable {
  std::vector<std::string> ids;
  std::size_t dim = 0;
  std::vector<double> values;
};

/// Shortest representation that parses back to the same double.
std::string format_double(double v);
bool parse_double(std::string_view s, double& out);

/// Parses the `dim=<d> count=<n>` table format, text or binary.
EmbeddingTable read_embedding_table(const std::filesystem::path& path);

}  // namespace coordet::detail
