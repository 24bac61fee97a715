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
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace coordet {

enum class ErrorKind {
  InvalidArgument,
  Io,
  MalformedRecord,
  DanglingReference,
  InsufficientLabels,
  NoAdmissibleStart,
  DegenerateVocabulary,
  MissingRows,
  DimensionMismatch,
  RowMismatch,
  KTooLarge,
  TooFewClusters,
  NoQualifyingClusters,
  EmptyVocabulary,
  Config,
};

std::string_view to_string(ErrorKind kind) noexcept;

/// Base of every error raised by the library. `kind()` is stable and is what
/// callers (and the CLI's exit-code mapping) should branch on.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what);
  ErrorKind kind() const noexcept { return kind_; }

 protected:
  struct Verbatim {};
  /// Uses `message` as is, without the kind prefix.
  Error(ErrorKind kind, const std::string& message, Verbatim);

 private:
  ErrorKind kind_;
};

class MalformedRecord : public Error {
 public:
  MalformedRecord(std::string source, std::size_t line, std::string reason);
  const std::string& source() const noexcept { return source_; }
  std::size_t line() const noexcept { return line_; }
  const std::string& reason() const noexcept { return reason_; }

 private:
  std::string source_;
  std::size_t line_;
  std::string reason_;
};

class DanglingReference : public Error {
 public:
  DanglingReference(std::string ref_kind, std::string id);
  const std::string& ref_kind() const noexcept { return ref_kind_; }
  const std::string& id() const noexcept { return id_; }

 private:
  std::string ref_kind_;
  std::string id_;
};

class MissingRows : public Error {
 public:
  explicit MissingRows(std::vector<std::string> ids);
  const std::vector<std::string>& ids() const noexcept { return ids_; }

 private:
  std::vector<std::string> ids_;
};

}  // namespace coordet
