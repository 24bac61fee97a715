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

#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "coordet/pipeline.hpp"

namespace coordet::cli {

/// Options shared by every subcommand that touches a dataset or pipeline.
struct CommonOptions {
  std::string config_file;
  std::vector<std::string> sets;  // key=value
  std::string data_dir;
  std::string out_dir;
  std::string method;
  bool no_cache = false;
  bool print_config = false;
};

/// Defaults, then the config file, then --data/--method/--out, then --set.
PipelineConfig resolve_config(const CommonOptions& opts);

Dataset load_dataset(const PipelineConfig& cfg);

void cmd_ingest(const PipelineConfig& cfg, std::ostream& out);

struct GraphOptions {
  std::string walks;  // "", n2v or mp2v
};
void cmd_graph(const PipelineConfig& cfg, const GraphOptions& opts, std::ostream& out);

void cmd_embed(const PipelineConfig& cfg, std::ostream& out);

struct ClusterOptions {
  std::string features;  // defaults to <out>/features.emb
};
void cmd_clusterize(const PipelineConfig& cfg, const ClusterOptions& opts, std::ostream& out);

struct TopicsOptions {
  std::string assignment;  // defaults to <out>/semantic.csv
};
void cmd_topics(const PipelineConfig& cfg, const TopicsOptions& opts, std::ostream& out);

struct EvaluateOptions {
  std::string assignment;  // defaults to <out>/clusters_total.csv
  std::string features;    // defaults to <out>/features.emb
};
void cmd_evaluate(const PipelineConfig& cfg, const EvaluateOptions& opts, std::ostream& out);

struct AblateOptions {
  std::string rows = "all";  // "all" or comma-separated method names
};
void cmd_ablate(const PipelineConfig& cfg, const AblateOptions& opts, std::ostream& out);

struct SweepOptions {
  std::string eps = "10..120:10";
};
/// "a..b[:step]" (step defaults to 10) or a comma-separated list.
std::vector<double> parse_epsilons(const std::string& text);
void cmd_sweep(const PipelineConfig& cfg, const SweepOptions& opts, std::ostream& out);

struct SynthOptions {
  std::string preset = "default";  // default | reference
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> campaigns;
  std::optional<std::size_t> background;
  std::optional<double> burst;
  std::optional<double> mutation;
  std::size_t vector_dim = 384;
  bool no_vectors = false;
};
void cmd_synth(const SynthOptions& opts, const std::string& out_dir, std::ostream& out);

void cmd_run(const PipelineConfig& cfg, std::ostream& out);

struct ScoreOptions {
  std::string assignment;
  std::string truth;
};
void cmd_score(const ScoreOptions& opts, std::ostream& out);

}  // namespace coordet::cli
