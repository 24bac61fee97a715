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

#include "coordet/pipeline.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>

#include <nlohmann/json.hpp>

#include "coordet/topics.hpp"
#include "csv.hpp"
#include "embedding_io.hpp"

namespace coordet {

namespace {

using json = nlohmann::ordered_json;

std::string settings_digest(const PipelineConfig& cfg, std::initializer_list<std::string_view> prefixes) {
  std::string text;
  for (const auto& [k, v] : cfg.to_entries())
    for (auto p : prefixes)
      if (std::string_view(k).starts_with(p)) text += k + '=' + v + '\n';
  text += "seed=" + std::to_string(cfg.seed) + "\nthreads=" + std::to_string(cfg.threads) + '\n';
  return sha256_hex(text).substr(0, 24);
}

void write_json(const json& doc, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::Io, "cannot write " + path.string());
  out << doc.dump(2) << '\n';
}

std::vector<std::string> post_ids(const Dataset& ds) {
  std::vector<std::string> ids;
  ids.reserve(ds.size());
  for (const auto& p : ds.posts()) ids.push_back(p.post_id);
  return ids;
}

}  // namespace

EmbeddingStore::EmbeddingStore(const Dataset& ds, const PipelineConfig& cfg,
                               std::optional<std::filesystem::path> cache_dir)
    : ds_(ds), cfg_(cfg), cache_dir_(std::move(cache_dir)), fingerprint_(dataset_fingerprint(ds)) {
  if (cache_dir_) std::filesystem::create_directories(*cache_dir_);
}

const HeteroGraph& EmbeddingStore::graph() {
  if (!graph_) graph_ = build_graph(ds_);
  return *graph_;
}

const PvDbowModel& EmbeddingStore::pvdbow() {
  if (pvdbow_) return *pvdbow_;
  std::filesystem::path docs_file, words_file;
  if (cache_dir_) {
    const std::string key = fingerprint_.substr(0, 24) + "-" + settings_digest(cfg_, {"text."});
    docs_file = *cache_dir_ / ("pvdbow-docs-" + key + ".emb");
    words_file = *cache_dir_ / ("pvdbow-words-" + key + ".emb");
    if (std::filesystem::exists(docs_file) && std::filesystem::exists(words_file)) {
      pvdbow_ = PvDbowModel{read_embeddings(docs_file), read_embeddings(words_file), {}};
      return *pvdbow_;
    }
  }
  SgnsConfig sg = cfg_.text_sgns;
  sg.seed = cfg_.seed;
  sg.threads = cfg_.threads;
  pvdbow_ = pv_dbow(ds_, sg);
  if (cache_dir_) {
    write_embeddings(pvdbow_->documents, docs_file);
    write_embeddings(pvdbow_->words, words_file);
  }
  return *pvdbow_;
}

const EmbeddingMatrix& EmbeddingStore::text(TextRoute route) {
  const int key = static_cast<int>(route);
  if (auto it = text_.find(key); it != text_.end()) return it->second;
  if (route == TextRoute::pvdbow) return text_[key] = pvdbow().documents;
  if (cfg_.external_vectors.empty())
    throw Error(ErrorKind::Config, "the external text route needs external_vectors");
  const auto ids = post_ids(ds_);
  return text_[key] = load_external_embeddings(cfg_.external_vectors, ids);
}

const EmbeddingMatrix& EmbeddingStore::network(NetworkRoute route) {
  if (route == NetworkRoute::none) throw Error(ErrorKind::InvalidArgument, "no network embedding for route none");
  const int key = static_cast<int>(route);
  if (auto it = network_.find(key); it != network_.end()) return it->second;

  std::filesystem::path file;
  if (cache_dir_) {
    const std::string k = fingerprint_.substr(0, 24) + "-" +
                          settings_digest(cfg_, {"walks.", "node."});
    file = *cache_dir_ / (std::string(to_string(route)) + "-" + k + ".emb");
    if (std::filesystem::exists(file)) return network_[key] = read_embeddings(file);
  }

  WalkConfig wc = cfg_.walks;
  wc.seed = cfg_.seed;
  wc.threads = cfg_.threads;
  const WalkCorpus walks = route == NetworkRoute::n2v
                               ? node2vec_walks(graph(), wc)
                               : metapath_walks(graph(), MetaPathSet::parse(cfg_.metapaths), wc);
  SgnsConfig sg = cfg_.node_sgns;
  sg.seed = cfg_.seed;
  sg.threads = cfg_.threads;
  const SgnsModel model = train_sgns(to_token_corpus(walks), sg);

  // Keep the post rows, keyed by post id. Posts no walk visited stay zero.
  auto ids = post_ids(ds_);
  std::vector<double> values(ids.size() * sg.dim, 0.0);
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (const auto row = model.vectors.index_of(HeteroGraph::node_id(NodeType::post, ids[i]))) {
      const auto src = model.vectors.row(*row);
      std::copy(src.begin(), src.end(), values.begin() + static_cast<std::ptrdiff_t>(i * sg.dim));
    }
  }
  EmbeddingMatrix posts(std::move(ids), sg.dim, std::move(values));
  if (cache_dir_) write_embeddings(posts, file);
  return network_[key] = std::move(posts);
}

EmbeddingMatrix EmbeddingStore::features(TextRoute text_route, NetworkRoute network_route) {
  const EmbeddingMatrix& t = text(text_route);
  if (network_route == NetworkRoute::none) return align_single(t, cfg_.align_dim);
  return concat_align(t, network(network_route), cfg_.align_dim);
}

SemanticResult semantic_clustering(const EmbeddingMatrix& features, TextRoute text, const PipelineConfig& cfg) {
  SemanticResult out;
  if (text == TextRoute::pvdbow) {
    out.k = cfg.kmeans_k ? cfg.kmeans_k : default_k(features.rows());
    out.assignment = kmeans(features, out.k, cfg.seed, {cfg.kmeans_max_iterations, cfg.threads}).assignment;
  } else {
    HdbscanParams p = cfg.hdbscan;
    p.threads = cfg.threads;
    out.assignment = hdbscan(features, p).assignment;
  }
  return out;
}

RunManifest run_pipeline(const PipelineConfig& cfg) {
  cfg.validate();
  const auto& dir = cfg.output_dir;
  std::filesystem::create_directories(dir);

  RunManifest manifest;
  manifest.config_hash = cfg.hash();
  manifest.seed = cfg.seed;
  manifest.method = cfg.method.name();

  auto write_manifest = [&](const std::string& failed_stage) {
    json doc;
    doc["config_hash"] = manifest.config_hash;
    doc["seed"] = manifest.seed;
    doc["method"] = manifest.method;
    json config = json::object();
    for (const auto& [k, v] : cfg.to_entries())
      if (k != "output_dir" && k != "cache") config[k] = v;
    doc["config"] = std::move(config);
    json stages = json::array();
    json timings = json::object();
    for (const auto& s : manifest.stages) {
      stages.push_back({{"stage", s.name}, {"artifact", s.artifact.generic_string()}, {"sha256", s.sha256}});
      timings[s.name] = s.seconds;
    }
    doc["stages"] = std::move(stages);
    if (!failed_stage.empty()) doc["failed_stage"] = failed_stage;
    write_json(doc, dir / "manifest.json");
    write_json(timings, dir / "timings.json");
  };

  auto stage = [&](const std::string& name, const std::filesystem::path& artifact, auto&& body) {
    const auto start = std::chrono::steady_clock::now();
    try {
      body(dir / artifact);
    } catch (const Error& e) {
      write_manifest(name);
      throw StageError(name, e);
    }
    const std::chrono::duration<double> took = std::chrono::steady_clock::now() - start;
    manifest.stages.push_back({name, artifact, sha256_file(dir / artifact), took.count()});
  };

  {
    std::ofstream out(dir / "config.txt", std::ios::binary);
    out << cfg.to_text();
  }

  Dataset ds;
  stage("ingest", "ingest_report.json", [&](const std::filesystem::path& path) {
    ds = ingest(cfg.posts, cfg.videos, cfg.channels, cfg.ingest);
    const auto& r = ds.report();
    const LabeledStats labels = join_factuality(ds);
    json doc;
    doc["posts"] = ds.size();
    doc["videos"] = ds.videos().size();
    doc["channels"] = ds.channels().size();
    doc["labeled_posts"] = labels.labeled;
    doc["unlabeled_posts"] = labels.unlabeled;
    doc["dataset_factuality_std"] = labels.labeled >= 2 ? json(dataset_factuality_std(ds)) : json(nullptr);
    doc["quarantined"] = {{"malformed_posts", r.malformed_posts},
                          {"bad_timestamps", r.bad_timestamps},
                          {"duplicate_posts", r.duplicate_posts},
                          {"out_of_window", r.out_of_window},
                          {"filtered_by_action", r.filtered_by_action},
                          {"dangling_video_refs", r.dangling_video_refs},
                          {"malformed_videos", r.malformed_videos},
                          {"dangling_channel_refs", r.dangling_channel_refs},
                          {"malformed_channels", r.malformed_channels}};
    doc["empty_text_posts"] = r.empty_text_posts;
    write_json(doc, path);
  });

  EmbeddingStore store(ds, cfg, cfg.cache ? std::optional(dir / "cache") : std::nullopt);

  stage("graph", "graph.tsv", [&](const std::filesystem::path& path) {
    const HeteroGraph& g = store.graph();
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorKind::Io, "cannot write " + path.string());
    for (NodeIndex a = 0; a < g.node_count(); ++a)
      for (NodeIndex b : g.neighbors(a))
        if (a < b) out << g.id(a) << '\t' << g.id(b) << '\n';
  });

  EmbeddingMatrix features;
  stage("embed", "features.emb", [&](const std::filesystem::path& path) {
    features = store.features(cfg.method.text, cfg.method.network);
    write_embeddings(features, path);
  });

  SemanticResult semantic;
  stage("semantic", "semantic.csv", [&](const std::filesystem::path& path) {
    semantic = semantic_clustering(features, cfg.method.text, cfg);
    write_assignment(semantic.assignment, path);
  });

  ClusterAssignment total;
  stage("temporal", "clusters.csv", [&](const std::filesystem::path& path) {
    total = cfg.method.temporal ? temporal_subdivide(semantic.assignment, ds, cfg.temporal) : semantic.assignment;
    write_assignment(total, dir / "clusters_total.csv");
    write_assignment(drop_singletons(total), path);
  });

  stage("topics", "topics.json", [&](const std::filesystem::path& path) {
    std::vector<std::vector<TopicTerm>> topics;
    if (semantic.assignment.cluster_count() > 0) {
      const TopicModel model = ctfidf(semantic.assignment, ds, cfg.topic_candidates);
      const EmbeddingMatrix& words = store.pvdbow().words;
      for (const auto& candidates : model.topics)
        topics.push_back(mmr_rerank(candidates, words, cfg.mmr_lambda, cfg.topic_top_n));
    }
    write_topics(topics, path);
  });

  stage("evaluate", "report.json", [&](const std::filesystem::path& path) {
    manifest.report = evaluate(manifest.method, features, total, ds, cfg.seed, cfg.channels_top_n);
    manifest.report.k = semantic.k;
    if (cfg.method.temporal) manifest.report.cross_base_merges = cross_base_merges(total, semantic.assignment);
    write_report_json(manifest.report, path);
  });

  write_manifest("");
  return manifest;
}

AblationResult run_ablation(const Dataset& ds, const std::vector<MethodConfig>& grid, const PipelineConfig& cfg,
                            EmbeddingStore* store) {
  cfg.validate();
  std::optional<EmbeddingStore> own;
  if (!store) store = &own.emplace(ds, cfg, std::nullopt);

  struct Shared {
    EmbeddingMatrix features;
    SemanticResult semantic;
  };
  std::map<std::pair<int, int>, Shared> shared;

  AblationResult result;
  try {
    result.dataset_std = dataset_factuality_std(ds);
  } catch (const Error&) {
    result.dataset_std = std::numeric_limits<double>::quiet_NaN();
  }

  for (const auto& method : grid) {
    EvaluationReport report;
    try {
      const auto key = std::make_pair(static_cast<int>(method.text), static_cast<int>(method.network));
      auto it = shared.find(key);
      if (it == shared.end()) {
        Shared s;
        s.features = store->features(method.text, method.network);
        s.semantic = semantic_clustering(s.features, method.text, cfg);
        it = shared.emplace(key, std::move(s)).first;
      }
      const Shared& s = it->second;
      const ClusterAssignment total =
          method.temporal ? temporal_subdivide(s.semantic.assignment, ds, cfg.temporal) : s.semantic.assignment;
      report = evaluate(method.name(), s.features, total, ds, cfg.seed, cfg.channels_top_n);
      report.k = s.semantic.k;
      if (method.temporal) report.cross_base_merges = cross_base_merges(total, s.semantic.assignment);
    } catch (const Error& e) {
      const double nan = std::numeric_limits<double>::quiet_NaN();
      report = {};
      report.method_name = method.name();
      report.silhouette = report.fact_avg = report.fact_median = report.fact_std = report.fact_prop0 = nan;
      report.error = e.what();
    }
    result.rows.push_back(std::move(report));
  }
  return result;
}

std::vector<SweepRow> epsilon_sweep(const Dataset& ds, const MethodConfig& variant,
                                    const std::vector<double>& epsilons, const PipelineConfig& cfg,
                                    EmbeddingStore* store) {
  if (!variant.temporal)
    throw Error(ErrorKind::InvalidArgument, "epsilon sweep needs a +PostTime variant, got " + variant.name());
  cfg.validate();
  std::optional<EmbeddingStore> own;
  if (!store) store = &own.emplace(ds, cfg, std::nullopt);
  const EmbeddingMatrix features = store->features(variant.text, variant.network);
  const SemanticResult semantic = semantic_clustering(features, variant.text, cfg);

  std::vector<SweepRow> rows;
  for (double eps : epsilons) {
    TemporalParams params = cfg.temporal;
    params.epsilon_seconds = eps;
    const ClusterAssignment kept = drop_singletons(temporal_subdivide(semantic.assignment, ds, params));
    SweepRow row;
    row.epsilon = eps;
    row.clusters_kept = kept.cluster_count();
    row.posts_kept = kept.size() - kept.noise_count();
    try {
      const FactualityStats f = factuality_stats(kept, ds);
      row.fact_avg = f.avg;
      row.fact_median = f.median;
      row.fact_prop0 = f.prop0;
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::NoQualifyingClusters) throw;
      row.fact_avg = row.fact_median = row.fact_prop0 = std::numeric_limits<double>::quiet_NaN();
    }
    rows.push_back(row);
  }
  return rows;
}

void write_epsilon_sweep(const std::vector<SweepRow>& rows, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::Io, "cannot write " + path.string());
  detail::write_csv_row(out, {"epsilon", "fact_avg", "fact_median", "fact_prop0", "clusters_kept", "posts_kept"});
  for (const auto& r : rows)
    detail::write_csv_row(out, {detail::format_double(r.epsilon), detail::format_double(r.fact_avg),
                                detail::format_double(r.fact_median), detail::format_double(r.fact_prop0),
                                std::to_string(r.clusters_kept), std::to_string(r.posts_kept)});
}

}  // namespace coordet
