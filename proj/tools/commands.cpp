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

#include "commands.hpp"

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <iomanip>

#include "coordet/synth.hpp"
#include "coordet/topics.hpp"

namespace coordet::cli {

namespace fs = std::filesystem;

namespace {

fs::path out_path(const PipelineConfig& cfg, const std::string& name) {
  fs::create_directories(cfg.output_dir);
  return cfg.output_dir / name;
}

fs::path or_default(const std::string& given, const PipelineConfig& cfg, const std::string& name) {
  return given.empty() ? cfg.output_dir / name : fs::path(given);
}

std::string fixed(double v, int digits = 3) {
  if (std::isnan(v)) return "nan";
  std::ostringstream s;
  s << std::fixed << std::setprecision(digits) << v;
  return s.str();
}

std::optional<fs::path> cache_dir(const PipelineConfig& cfg) {
  if (!cfg.cache) return std::nullopt;
  return cfg.output_dir / "cache";
}

}  // namespace

PipelineConfig resolve_config(const CommonOptions& opts) {
  PipelineConfig cfg;
  if (const char* env = std::getenv("COORDET_OUTPUT_DIR"); env && *env) cfg.output_dir = env;
  if (!opts.config_file.empty()) {
    const fs::path default_out = cfg.output_dir;
    cfg = PipelineConfig::load(opts.config_file);
    // The environment default applies unless the file names a directory.
    if (cfg.output_dir == PipelineConfig{}.output_dir) cfg.output_dir = default_out;
  }
  if (!opts.data_dir.empty()) {
    const fs::path d = opts.data_dir;
    cfg.posts = d / "posts.jsonl";
    cfg.videos = d / "videos.jsonl";
    cfg.channels = d / "channels.csv";
    if (cfg.external_vectors.empty() && fs::exists(d / "vectors.emb")) cfg.external_vectors = d / "vectors.emb";
  }
  if (!opts.method.empty()) cfg.method = MethodConfig::parse(opts.method);
  if (!opts.out_dir.empty()) cfg.output_dir = opts.out_dir;
  if (opts.no_cache) cfg.cache = false;
  for (const auto& kv : opts.sets) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw Error(ErrorKind::Config, "--set expects key=value, got '" + kv + "'");
    cfg.set(kv.substr(0, eq), kv.substr(eq + 1));
  }
  return cfg;
}

Dataset load_dataset(const PipelineConfig& cfg) {
  if (cfg.posts.empty() || cfg.videos.empty() || cfg.channels.empty())
    throw Error(ErrorKind::Config, "dataset paths missing; pass --data DIR or set posts/videos/channels");
  return ingest(cfg.posts, cfg.videos, cfg.channels, cfg.ingest);
}

void cmd_ingest(const PipelineConfig& cfg, std::ostream& out) {
  const Dataset ds = load_dataset(cfg);
  const fs::path dir = cfg.output_dir / "dataset";
  write_dataset(ds, dir);
  const LabeledStats labels = join_factuality(ds);
  out << "posts " << ds.size() << ", videos " << ds.videos().size() << ", channels " << ds.channels().size() << '\n';
  out << "labeled posts " << labels.labeled << " (" << fixed(100 * labels.fraction_labeled(), 1) << "%)\n";
  if (labels.labeled >= 2) out << "dataset factuality std " << fixed(dataset_factuality_std(ds), 4) << '\n';
  out << "quarantined " << ds.report().total_quarantined() << '\n';
  out << "wrote " << dir.string() << '\n';
}

void cmd_graph(const PipelineConfig& cfg, const GraphOptions& opts, std::ostream& out) {
  const Dataset ds = load_dataset(cfg);
  const HeteroGraph g = build_graph(ds);
  const fs::path edges = out_path(cfg, "graph.tsv");
  {
    std::ofstream f(edges, std::ios::binary);
    for (NodeIndex a = 0; a < g.node_count(); ++a)
      for (NodeIndex b : g.neighbors(a))
        if (a < b) f << g.id(a) << '\t' << g.id(b) << '\n';
  }
  out << "nodes " << g.node_count() << ", edges " << g.edge_count() << "; wrote " << edges.string() << '\n';
  if (opts.walks.empty()) return;
  WalkConfig wc = cfg.walks;
  wc.seed = cfg.seed;
  wc.threads = cfg.threads;
  WalkCorpus walks;
  if (opts.walks == "n2v")
    walks = node2vec_walks(g, wc);
  else if (opts.walks == "mp2v")
    walks = metapath_walks(g, MetaPathSet::parse(cfg.metapaths), wc);
  else
    throw Error(ErrorKind::Config, "--walks expects n2v or mp2v");
  const fs::path path = out_path(cfg, "walks-" + opts.walks + ".txt");
  write_walks(walks, path);
  out << walks.walks.size() << " walks; wrote " << path.string() << '\n';
}

void cmd_embed(const PipelineConfig& cfg, std::ostream& out) {
  const Dataset ds = load_dataset(cfg);
  EmbeddingStore store(ds, cfg, cache_dir(cfg));
  const EmbeddingMatrix features = store.features(cfg.method.text, cfg.method.network);
  const fs::path path = out_path(cfg, "features.emb");
  write_embeddings(features, path);
  out << cfg.method.name() << ": " << features.rows() << " x " << features.dim() << "; wrote " << path.string()
      << '\n';
}

void cmd_clusterize(const PipelineConfig& cfg, const ClusterOptions& opts, std::ostream& out) {
  const Dataset ds = load_dataset(cfg);
  const EmbeddingMatrix features = read_embeddings(or_default(opts.features, cfg, "features.emb"));
  const SemanticResult semantic = semantic_clustering(features, cfg.method.text, cfg);
  write_assignment(semantic.assignment, out_path(cfg, "semantic.csv"));
  ClusterAssignment total = semantic.assignment;
  if (cfg.method.temporal) {
    total = temporal_subdivide(semantic.assignment, ds, cfg.temporal);
    if (const auto merges = cross_base_merges(total, semantic.assignment))
      throw Error(ErrorKind::InvalidArgument, std::to_string(merges) + " temporal clusters span semantic clusters");
  }
  write_assignment(total, out_path(cfg, "clusters_total.csv"));
  const ClusterAssignment kept = drop_singletons(total);
  write_assignment(kept, out_path(cfg, "clusters.csv"));
  out << "semantic clusters " << semantic.assignment.cluster_count();
  if (semantic.k) out << " (k=" << semantic.k << ")";
  out << ", noise " << semantic.assignment.noise_count() << '\n';
  if (cfg.method.temporal) out << "temporal clusters " << total.cluster_count() << '\n';
  out << "kept clusters " << kept.cluster_count() << " with " << kept.size() - kept.noise_count() << " posts\n";
}

void cmd_topics(const PipelineConfig& cfg, const TopicsOptions& opts, std::ostream& out) {
  const Dataset ds = load_dataset(cfg);
  const ClusterAssignment a = read_assignment(or_default(opts.assignment, cfg, "semantic.csv"));
  const TopicModel model = ctfidf(a, ds, cfg.topic_candidates);
  EmbeddingStore store(ds, cfg, cache_dir(cfg));
  std::vector<std::vector<TopicTerm>> topics;
  for (const auto& candidates : model.topics)
    topics.push_back(mmr_rerank(candidates, store.pvdbow().words, cfg.mmr_lambda, cfg.topic_top_n));
  const fs::path path = out_path(cfg, "topics.json");
  write_topics(topics, path);
  for (std::size_t c = 0; c < topics.size() && c < 10; ++c) {
    out << c << ':';
    for (const auto& t : topics[c]) out << ' ' << t.term;
    out << '\n';
  }
  out << topics.size() << " topics; wrote " << path.string() << '\n';
}

void cmd_evaluate(const PipelineConfig& cfg, const EvaluateOptions& opts, std::ostream& out) {
  const Dataset ds = load_dataset(cfg);
  const ClusterAssignment a = read_assignment(or_default(opts.assignment, cfg, "clusters_total.csv"));
  const EmbeddingMatrix features = read_embeddings(or_default(opts.features, cfg, "features.emb"));
  const EvaluationReport r = evaluate(cfg.method.name(), features, a, ds, cfg.seed, cfg.channels_top_n);
  const fs::path path = out_path(cfg, "report.json");
  write_report_json(r, path);
  out << r.method_name << ": silhouette " << fixed(r.silhouette) << ", factuality std avg " << fixed(r.fact_avg)
      << " median " << fixed(r.fact_median) << " std " << fixed(r.fact_std) << " prop0 " << fixed(r.fact_prop0)
      << '\n';
  out << "kept clusters " << r.clusters_kept << " of " << r.clusters_total << ", posts " << r.posts_kept << '\n';
  out << "wrote " << path.string() << '\n';
}

void cmd_ablate(const PipelineConfig& cfg, const AblateOptions& opts, std::ostream& out) {
  std::vector<MethodConfig> grid;
  if (opts.rows == "all") {
    grid = MethodConfig::table2_grid();
  } else {
    std::stringstream names(opts.rows);
    for (std::string name; std::getline(names, name, ',');)
      if (!name.empty()) grid.push_back(MethodConfig::parse(name));
  }
  const Dataset ds = load_dataset(cfg);
  EmbeddingStore store(ds, cfg, cache_dir(cfg));
  const AblationResult result = run_ablation(ds, grid, cfg, &store);
  write_table2(result.rows, out_path(cfg, "table2.csv"));
  write_fig3_sizes(result.rows, out_path(cfg, "fig3_sizes.csv"));
  write_fig3_gaps(result.rows, out_path(cfg, "fig3_gaps.csv"));
  write_table3(result.rows, out_path(cfg, "table3.csv"));
  const fs::path reports = cfg.output_dir / "reports";
  fs::create_directories(reports);
  for (const auto& r : result.rows) write_report_json(r, reports / (r.method_name + ".json"));

  out << std::left << std::setw(24) << "Methods" << std::right << std::setw(11) << "Silhouette" << std::setw(8)
      << "Avg" << std::setw(8) << "Median" << std::setw(8) << "Std" << std::setw(8) << "prop0" << std::setw(8)
      << "kept" << '\n';
  for (const auto& r : result.rows) {
    out << std::left << std::setw(24) << r.method_name << std::right << std::setw(11) << fixed(r.silhouette, 2)
        << std::setw(8) << fixed(r.fact_avg, 2) << std::setw(8) << fixed(r.fact_median, 2) << std::setw(8)
        << fixed(r.fact_std, 2) << std::setw(8) << fixed(r.fact_prop0, 2) << std::setw(8) << r.clusters_kept;
    if (!r.error.empty()) out << "  error: " << r.error;
    out << '\n';
  }
  out << "dataset factuality std " << fixed(result.dataset_std, 4) << '\n';
  out << "wrote table2.csv, fig3_sizes.csv, fig3_gaps.csv, table3.csv to " << cfg.output_dir.string() << '\n';
}

std::vector<double> parse_epsilons(const std::string& text) {
  auto number = [&](std::string_view s) {
    double v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || !(v > 0))
      throw Error(ErrorKind::Config, "bad epsilon '" + std::string(s) + "' in '" + text + "'");
    return v;
  };
  std::vector<double> out;
  if (const auto dots = text.find(".."); dots != std::string::npos) {
    const std::string_view rest = std::string_view(text).substr(dots + 2);
    const auto colon = rest.find(':');
    const double lo = number(std::string_view(text).substr(0, dots));
    const double hi = number(rest.substr(0, colon));
    const double step = colon == std::string_view::npos ? 10.0 : number(rest.substr(colon + 1));
    if (hi < lo) throw Error(ErrorKind::Config, "epsilon range '" + text + "' is empty");
    for (std::size_t i = 0;; ++i) {
      const double v = lo + static_cast<double>(i) * step;
      if (v > hi + 1e-9) break;
      out.push_back(v);
    }
    return out;
  }
  std::stringstream items(text);
  for (std::string item; std::getline(items, item, ',');)
    if (!item.empty()) out.push_back(number(item));
  if (out.empty()) throw Error(ErrorKind::Config, "no epsilon values given");
  return out;
}

void cmd_sweep(const PipelineConfig& cfg, const SweepOptions& opts, std::ostream& out) {
  const std::vector<double> eps = parse_epsilons(opts.eps);
  MethodConfig variant = cfg.method;
  variant.temporal = true;
  const Dataset ds = load_dataset(cfg);
  EmbeddingStore store(ds, cfg, cache_dir(cfg));
  const auto rows = epsilon_sweep(ds, variant, eps, cfg, &store);
  const fs::path path = out_path(cfg, "epsilon_sweep.csv");
  write_epsilon_sweep(rows, path);
  out << variant.name() << '\n' << std::setw(10) << "epsilon" << std::setw(10) << "fact_avg" << std::setw(10)
      << "kept" << '\n';
  for (const auto& r : rows)
    out << std::setw(10) << r.epsilon << std::setw(10) << fixed(r.fact_avg) << std::setw(10) << r.clusters_kept
        << '\n';
  out << "wrote " << path.string() << '\n';
}

void cmd_synth(const SynthOptions& opts, const std::string& out_dir, std::ostream& out) {
  CampaignSpec spec;
  if (opts.preset == "reference")
    spec = CampaignSpec::reference_shaped();
  else if (opts.preset != "default")
    throw Error(ErrorKind::Config, "unknown preset '" + opts.preset + "' (default or reference)");
  if (opts.seed) spec.seed = *opts.seed;
  if (opts.campaigns) spec.n_campaigns = *opts.campaigns;
  if (opts.background) {
    spec.background_posts = *opts.background;
    spec.total_posts.reset();
  }
  if (opts.burst) spec.burst_width_seconds = *opts.burst;
  if (opts.mutation) spec.text_mutation_rate = *opts.mutation;
  const SyntheticData data = generate(spec);
  const fs::path dir = out_dir;
  write_dataset(data.dataset, dir);
  write_ground_truth(data.dataset, data.truth, dir / "ground_truth.csv");
  if (!opts.no_vectors)
    write_binary_vectors(synthetic_sentence_vectors(data.dataset, opts.vector_dim, spec.seed), dir / "vectors.emb");
  out << "posts " << data.dataset.size() << " (" << data.truth.campaign_of.size() << " in " << spec.n_campaigns
      << " campaigns); wrote " << dir.string() << '\n';
}

void cmd_run(const PipelineConfig& cfg, std::ostream& out) {
  const RunManifest m = run_pipeline(cfg);
  out << m.method << " (config " << m.config_hash.substr(0, 12) << ", seed " << m.seed << ")\n";
  for (const auto& s : m.stages)
    out << "  " << std::left << std::setw(10) << s.name << std::setw(22) << s.artifact.string() << std::right
        << fixed(s.seconds, 2) << " s\n";
  const auto& r = m.report;
  out << "kept clusters " << r.clusters_kept << " with " << r.posts_kept << " posts; silhouette "
      << fixed(r.silhouette) << ", factuality std avg " << fixed(r.fact_avg) << ", prop0 " << fixed(r.fact_prop0)
      << '\n';
  out << "wrote " << cfg.output_dir.string() << '\n';
}

void cmd_score(const ScoreOptions& opts, std::ostream& out) {
  const ClusterAssignment a = read_assignment(opts.assignment);
  const GroundTruth gt = read_ground_truth(opts.truth);
  const DetectionScore s = score_detection(a, gt);
  out << "precision " << fixed(s.precision, 4) << (s.precision_undefined ? " (undefined)" : "") << '\n';
  out << "recall " << fixed(s.recall, 4) << (s.recall_undefined ? " (undefined)" : "") << '\n';
  out << "F1 " << fixed(s.f1, 4) << '\n';
  out << "pairs: true positive " << s.true_positive_pairs << ", predicted " << s.predicted_pairs << ", true "
      << s.true_pairs << '\n';
}

}  // namespace coordet::cli
