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

#include <cstdlib>
#include <functional>
#include <iostream>

#if __has_include(<CLI11.hpp>)
#include <CLI11.hpp>
#else
#include <CLI/CLI.hpp>
#endif

#include "commands.hpp"
#include "coordet/error.hpp"

namespace {

enum Exit { kOk = 0, kUsage = 1, kFailure = 2, kInternal = 3 };

void add_common(CLI::App* cmd, coordet::cli::CommonOptions& o) {
  cmd->add_option("--config", o.config_file, "config file (key = value lines)");
  cmd->add_option("--set", o.sets, "override a config key, key=value (repeatable)");
  cmd->add_option("--data", o.data_dir, "directory with posts.jsonl, videos.jsonl, channels.csv[, vectors.emb]");
  cmd->add_option("--out", o.out_dir, "output directory (default $COORDET_OUTPUT_DIR or coordet-out)");
  cmd->add_option("--method", o.method, "method name, e.g. Doc2Vec+PostTime+N2V");
  cmd->add_flag("--no-cache", o.no_cache, "do not read or write cached embeddings");
  cmd->add_flag("--print-config", o.print_config, "print the resolved config and exit");
}

}  // namespace

int main(int argc, char** argv) {
  using namespace coordet::cli;
  CLI::App app{"coordet: coordinated-campaign detection over posts referencing videos"};
  app.require_subcommand(1);

  CommonOptions common;
  GraphOptions graph_opts;
  ClusterOptions cluster_opts;
  TopicsOptions topics_opts;
  EvaluateOptions eval_opts;
  AblateOptions ablate_opts;
  SweepOptions sweep_opts;
  SynthOptions synth_opts;
  ScoreOptions score_opts;
  std::string synth_out = "synth-data";

  std::function<void(const coordet::PipelineConfig&)> action;
  auto with_config = [&](CLI::App* cmd, std::function<void(const coordet::PipelineConfig&)> fn) {
    add_common(cmd, common);
    cmd->callback([&action, fn] { action = fn; });
  };

  with_config(app.add_subcommand("ingest", "validate and normalize the input dataset"),
              [](const auto& cfg) { cmd_ingest(cfg, std::cout); });
  auto* graph = app.add_subcommand("graph", "build the heterogeneous graph, optionally with walks");
  graph->add_option("--walks", graph_opts.walks, "also write walks: n2v or mp2v")
      ->check(CLI::IsMember({"n2v", "mp2v"}));
  with_config(graph, [&](const auto& cfg) { cmd_graph(cfg, graph_opts, std::cout); });
  with_config(app.add_subcommand("embed", "compute the feature matrix for --method"),
              [](const auto& cfg) { cmd_embed(cfg, std::cout); });
  auto* clusterize = app.add_subcommand("clusterize", "semantic then temporal clustering");
  clusterize->add_option("--features", cluster_opts.features, "feature matrix (default <out>/features.emb)");
  with_config(clusterize, [&](const auto& cfg) { cmd_clusterize(cfg, cluster_opts, std::cout); });
  auto* topics = app.add_subcommand("topics", "c-TF-IDF topics reranked with MMR");
  topics->add_option("--assignment", topics_opts.assignment, "cluster CSV (default <out>/semantic.csv)");
  with_config(topics, [&](const auto& cfg) { cmd_topics(cfg, topics_opts, std::cout); });
  auto* evaluate = app.add_subcommand("evaluate", "silhouette and factuality metrics");
  evaluate->add_option("--assignment", eval_opts.assignment, "cluster CSV (default <out>/clusters_total.csv)");
  evaluate->add_option("--features", eval_opts.features, "feature matrix (default <out>/features.emb)");
  with_config(evaluate, [&](const auto& cfg) { cmd_evaluate(cfg, eval_opts, std::cout); });
  auto* ablate = app.add_subcommand("ablate", "run the method grid and write the comparison tables");
  ablate->add_option("--rows", ablate_opts.rows, "all, or comma-separated method names");
  with_config(ablate, [&](const auto& cfg) { cmd_ablate(cfg, ablate_opts, std::cout); });
  auto* sweep = app.add_subcommand("sweep", "factuality metrics over temporal epsilon values");
  sweep->add_option("--eps", sweep_opts.eps, "a..b[:step] or a comma list of seconds");
  with_config(sweep, [&](const auto& cfg) { cmd_sweep(cfg, sweep_opts, std::cout); });
  with_config(app.add_subcommand("run", "full pipeline with manifest"),
              [](const auto& cfg) { cmd_run(cfg, std::cout); });

  auto* synth = app.add_subcommand("synth", "generate a synthetic dataset with planted campaigns");
  synth->add_option("--preset", synth_opts.preset, "default or reference")->check(CLI::IsMember({"default", "reference"}));
  synth->add_option("--seed", synth_opts.seed);
  synth->add_option("--campaigns", synth_opts.campaigns);
  synth->add_option("--background", synth_opts.background, "background post count");
  synth->add_option("--burst", synth_opts.burst, "campaign burst width in seconds");
  synth->add_option("--mutation", synth_opts.mutation, "per-token mutation rate");
  synth->add_option("--vector-dim", synth_opts.vector_dim);
  synth->add_flag("--no-vectors", synth_opts.no_vectors, "skip vectors.emb");
  synth->add_option("--out", synth_out, "output directory");
  synth->callback([&] { action = [&](const auto&) { cmd_synth(synth_opts, synth_out, std::cout); }; });

  auto* score = app.add_subcommand("score", "pairwise precision and recall against ground truth");
  score->add_option("--assignment", score_opts.assignment)->required();
  score->add_option("--truth", score_opts.truth)->required();
  score->callback([&] { action = [&](const auto&) { cmd_score(score_opts, std::cout); }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    const bool needs_config = !synth->parsed() && !score->parsed();
    coordet::PipelineConfig cfg;
    if (needs_config) {
      cfg = resolve_config(common);
      if (common.print_config) {
        std::cout << cfg.to_text();
        return kOk;
      }
      cfg.validate();
    }
    action(cfg);
    return kOk;
  } catch (const coordet::Error& e) {
    std::cerr << "coordet: " << e.what() << '\n';
    const auto kind = e.kind();
    return kind == coordet::ErrorKind::Config || kind == coordet::ErrorKind::InvalidArgument ? kUsage : kFailure;
  } catch (const std::exception& e) {
    std::cerr << "coordet: internal error: " << e.what() << '\n';
    return kInternal;
  }
}
