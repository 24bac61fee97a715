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

#include "coordet/error.hpp"

namespace coordet {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::Io: return "Io";
    case ErrorKind::MalformedRecord: return "MalformedRecord";
    case ErrorKind::DanglingReference: return "DanglingReference";
    case ErrorKind::InsufficientLabels: return "InsufficientLabels";
    case ErrorKind::NoAdmissibleStart: return "NoAdmissibleStart";
    case ErrorKind::DegenerateVocabulary: return "DegenerateVocabulary";
    case ErrorKind::MissingRows: return "MissingRows";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::RowMismatch: return "RowMismatch";
    case ErrorKind::KTooLarge: return "KTooLarge";
    case ErrorKind::TooFewClusters: return "TooFewClusters";
    case ErrorKind::NoQualifyingClusters: return "NoQualifyingClusters";
    case ErrorKind::EmptyVocabulary: return "EmptyVocabulary";
    case ErrorKind::Config: return "Config";
  }
  return "Unknown";
}

Error::Error(ErrorKind kind, const std::string& what)
    : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

Error::Error(ErrorKind kind, const std::string& message, Verbatim) : std::runtime_error(message), kind_(kind) {}

MalformedRecord::MalformedRecord(std::string source, std::size_t line, std::string reason)
    : Error(ErrorKind::MalformedRecord, source + ":" + std::to_string(line) + ": " + reason),
      source_(std::move(source)),
      line_(line),
      reason_(std::move(reason)) {}

DanglingReference::DanglingReference(std::string ref_kind, std::string id)
    : Error(ErrorKind::DanglingReference, ref_kind + " '" + id + "' not found"),
      ref_kind_(std::move(ref_kind)),
      id_(std::move(id)) {}

namespace {
std::string join_ids(const std::vector<std::string>& ids) {
  std::string out;
  for (std::size_t i = 0; i < ids.size() && i < 10; ++i) {
    if (i) out += ", ";
    out += ids[i];
  }
  if (ids.size() > 10) out += ", ... (" + std::to_string(ids.size()) + " total)";
  return out;
}
}  // namespace

MissingRows::MissingRows(std::vector<std::string> ids)
    : Error(ErrorKind::MissingRows, "no vector for " + join_ids(ids)), ids_(std::move(ids)) {}

}  // namespace coordet
