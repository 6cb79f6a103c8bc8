#pragma once

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "alarmgraph/ahc.hpp"
#include "alarmgraph/config.hpp"
#include "alarmgraph/consensus.hpp"
#include "alarmgraph/graph.hpp"
#include "alarmgraph/ingest.hpp"
#include "alarmgraph/io.hpp"
#include "alarmgraph/kmeans.hpp"
#include "alarmgraph/pca.hpp"
#include "alarmgraph/preprocess.hpp"
#include "alarmgraph/report.hpp"
#include "alarmgraph/skipgram.hpp"
#include "alarmgraph/synth.hpp"
#include "alarmgraph/walks.hpp"

namespace alarmgraph {

namespace files {
inline constexpr const char* cleaned = "cleaned.csv";
inline constexpr const char* vocabulary = "vocab.csv";
inline constexpr const char* sequences = "sequences.txt";
inline constexpr const char* edges = "graph_edges.csv";
inline constexpr const char* nodes = "graph_nodes.csv";
inline constexpr const char* corpus = "corpus.txt";
inline constexpr const char* embeddings = "embeddings.csv";
inline constexpr const char* cosine = "cosine.csv";
inline constexpr const char* consensus_d = "consensus_d.csv";
inline constexpr const char* newick = "dendrogram.nwk";
inline constexpr const char* merges = "merges.csv";
inline constexpr const char* assignments = "assignments.csv";
inline constexpr const char* projection = "projection.csv";
inline constexpr const char* manifest = "manifest.json";
inline constexpr const char* log = "log.csv";
inline constexpr const char* ground_truth = "ground_truth.csv";
inline constexpr const char* scenario_manifest = "scenario.json";
inline constexpr const char* heatmap_svg = "heatmap.svg";
inline constexpr const char* dendrogram_svg = "dendrogram.svg";
inline constexpr const char* scatter_svg = "scatter.svg";
}  // namespace files

inline std::string fnv1a_hex(std::string_view data) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : data) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[24];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw error(errc::io_error, "cannot read '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct StageResult {
  std::string name;
  double ms = 0.0;
  std::vector<std::string> artifacts;
  nlohmann::json details;
};

// Stage seeds are derived from the one config seed so that stages stay
// independent of each other's draw counts.
inline std::uint64_t stage_seed(const PipelineConfig& cfg, std::uint64_t tag) {
  return derive_seed(cfg.seed, tag);
}

namespace stages {

inline StageResult preprocess(const PipelineConfig& cfg, const std::filesystem::path& log_path,
                              const std::filesystem::path& out_dir) {
  StageResult r;
  r.name = "preprocess";

  ParseResult parsed = parse_log_file(log_path.string());
  for (const auto& diag : parsed.diagnostics)
    std::cerr << "warning: " << log_path.string() << ":" << diag.line << ": "
              << diagnostic_name(diag.code) << ": " << diag.message << "\n";

  AlarmLog cleaned = dechatter(parsed.log, cfg.preprocess.chatter_window_s);
  TagVocabulary vocab = build_vocabulary(cleaned);
  Segmentation seg =
      segment(cleaned, vocab, cfg.preprocess.gap_threshold_s, cfg.preprocess.min_len);

  {
    auto f = open_out((out_dir / files::cleaned).string());
    write_canonical_log(f, cleaned);
  }
  {
    auto f = open_out((out_dir / files::vocabulary).string());
    write_vocabulary(f, vocab);
  }
  {
    auto f = open_out((out_dir / files::sequences).string());
    write_sequences(f, seg.sequences, vocab);
  }
  r.artifacts = {files::cleaned, files::vocabulary, files::sequences};
  r.details["events_parsed"] = parsed.log.events.size();
  r.details["parse_diagnostics"] = parsed.diagnostics.size();
  r.details["events_after_dechatter"] = cleaned.events.size();
  r.details["sequences"] = seg.sequences.size();
  r.details["events_dropped_with_short_sequences"] = seg.dropped.size();
  r.details["tags"] = vocab.size();
  return r;
}

inline StageResult graph(const PipelineConfig& cfg, const std::filesystem::path& out_dir) {
  (void)cfg;
  StageResult r;
  r.name = "graph";

  auto vocab_in = open_in((out_dir / files::vocabulary).string());
  TagVocabulary vocab = read_vocabulary(vocab_in);
  auto seq_in = open_in((out_dir / files::sequences).string());
  std::vector<AlarmSequence> sequences = read_sequences(seq_in, vocab);

  PresenceMatrix w = presence_matrix(sequences, vocab);
  CooccurrenceGraph g = build_graph(w);

  {
    auto f = open_out((out_dir / files::edges).string());
    write_edges(f, g, vocab);
  }
  {
    auto f = open_out((out_dir / files::nodes).string());
    write_nodes(f, g, vocab);
  }
  r.artifacts = {files::edges, files::nodes};
  r.details["sequences"] = w.rows;
  r.details["nodes"] = g.nodes;
  r.details["edges"] = g.edges.size();
  r.details["isolated"] = g.nodes - static_cast<int>(g.non_isolated().size());
  return r;
}

inline StageResult embed(const PipelineConfig& cfg, const std::filesystem::path& out_dir) {
  StageResult r;
  r.name = "embed";

  auto vocab_in = open_in((out_dir / files::vocabulary).string());
  TagVocabulary vocab = read_vocabulary(vocab_in);
  auto edges_in = open_in((out_dir / files::edges).string());
  auto nodes_in = open_in((out_dir / files::nodes).string());
  CooccurrenceGraph g = read_graph(edges_in, nodes_in, vocab);

  WalkParams wp = cfg.walk;
  wp.seed = stage_seed(cfg, 0x77616c6bull);
  WalkCorpus corpus = generate_corpus(g, wp);

  if (cfg.emit_corpus) {
    auto f = open_out((out_dir / files::corpus).string());
    for (const auto& walk : corpus.walks) {
      for (std::size_t i = 0; i < walk.size(); ++i)
        f << (i ? " " : "") << vocab.tag_of(walk[i]);
      f << "\n";
    }
    r.artifacts.push_back(files::corpus);
  }

  SkipGramParams sp = cfg.skipgram;
  sp.seed = stage_seed(cfg, 0x7367ull);
  SkipGramResult trained = train_skipgram(corpus, sp);

  std::vector<std::string> labels;
  labels.reserve(trained.embedding.node_ids.size());
  for (int id : trained.embedding.node_ids) labels.push_back(vocab.tag_of(id));

  {
    auto f = open_out((out_dir / files::embeddings).string());
    write_embeddings(f, labels, trained.embedding.vectors);
  }
  {
    auto f = open_out((out_dir / files::cosine).string());
    write_labeled_matrix(f, labels, cosine_similarity_matrix(trained.embedding.vectors));
  }
  r.artifacts.push_back(files::embeddings);
  r.artifacts.push_back(files::cosine);
  r.details["walks"] = corpus.walks.size();
  r.details["embedded_tags"] = labels.size();
  r.details["epoch_loss"] = trained.epoch_loss;
  return r;
}

inline StageResult cluster(const PipelineConfig& cfg, const std::filesystem::path& out_dir) {
  StageResult r;
  r.name = "cluster";

  auto emb_in = open_in((out_dir / files::embeddings).string());
  EmbeddingTable table = read_embeddings(emb_in);
  const Eigen::Index h = table.vectors.rows();
  if (h < 2) throw error(errc::too_few_items, "need at least 2 embedded tags to cluster");

  const std::uint64_t seed = stage_seed(cfg, 0x636c7573ull);
  int chosen_k = 0;
  Eigen::MatrixXd d;
  std::size_t pooled_runs = 0;

  if (cfg.cluster.k_mode == "epsilon") {
    int k_min = std::max(2, cfg.cluster.k_min);
    int k_cap = std::min(cfg.cluster.k_max, static_cast<int>(h));
    if (k_cap < k_min + 1)
      throw error(errc::invalid_config, "cluster.k_range leaves no room for epsilon selection");
    KmaxResult sel = select_kmax(table.vectors, k_min, cfg.cluster.runs, cfg.cluster.eps_tol,
                                 k_cap, seed);
    if (!sel.converged)
      std::cerr << "warning: epsilon k-selection hit the k_range cap without converging\n";
    chosen_k = sel.k_max;
    d = std::move(sel.d);
    pooled_runs = static_cast<std::size_t>(chosen_k - 1) *
                  static_cast<std::size_t>(cfg.cluster.runs);
    r.details["epsilon_converged"] = sel.converged;
    r.details["eps_curve"] = sel.eps_curve;
  } else {
    if (cfg.cluster.k_mode == "elbow") {
      std::vector<int> ks;
      for (int k = cfg.cluster.k_min; k <= std::min(cfg.cluster.k_max, static_cast<int>(h)); ++k)
        ks.push_back(k);
      if (ks.size() < 3)
        throw error(errc::invalid_config,
                    "cluster.k_range too short for the elbow rule; give at least 3 values");
      ElbowResult e = elbow(table.vectors, ks, derive_seed(seed, 0x656c626full));
      chosen_k = *e.suggested_k;
      r.details["elbow_inertia"] = e.inertia;
    } else {
      chosen_k = cfg.cluster.k_fixed;
      if (chosen_k > h)
        throw error(errc::too_few_points,
                    "cluster.k exceeds the number of embedded tags");
    }
    IndicatorMatrix rmat = ensemble(table.vectors, chosen_k, cfg.cluster.runs, seed);
    pooled_runs = static_cast<std::size_t>(cfg.cluster.runs);
    d = consensus(rmat, pooled_runs).d;
  }

  Dendrogram dendro = ahc(d, cfg.cluster.linkage);
  std::vector<int> labels = cut_k(dendro, chosen_k);

  {
    auto f = open_out((out_dir / files::consensus_d).string());
    write_labeled_matrix(f, table.labels, d);
  }
  {
    auto f = open_out((out_dir / files::newick).string());
    f << to_newick(dendro, table.labels) << "\n";
  }
  {
    auto f = open_out((out_dir / files::merges).string());
    f << "left,right,height,size\n";
    for (const auto& m : dendro.merges)
      f << m.left << "," << m.right << "," << format_double(m.height) << "," << m.size << "\n";
  }
  {
    auto f = open_out((out_dir / files::assignments).string());
    f << "tag,cluster\n";
    for (std::size_t i = 0; i < table.labels.size(); ++i)
      f << csv_escape(table.labels[i]) << "," << labels[i] << "\n";
  }
  r.artifacts = {files::consensus_d, files::newick, files::merges, files::assignments};
  r.details["k"] = chosen_k;
  r.details["k_mode"] = cfg.cluster.k_mode;
  r.details["pooled_runs"] = pooled_runs;
  r.details["linkage"] = linkage_name(cfg.cluster.linkage);
  return r;
}

inline StageResult project(const PipelineConfig& cfg, const std::filesystem::path& out_dir) {
  StageResult r;
  r.name = "project";

  auto emb_in = open_in((out_dir / files::embeddings).string());
  EmbeddingTable table = read_embeddings(emb_in);

  std::map<std::string, int> cluster_of;
  {
    auto in = open_in((out_dir / files::assignments).string());
    std::string line;
    getline_norm(in, line);
    while (getline_norm(in, line)) {
      if (trim(line).empty()) continue;
      auto fields = split_delimited(line);
      if (fields.size() != 2) throw error(errc::io_error, "bad assignment row '" + line + "'");
      auto c = parse_int(fields[1]);
      if (!c) throw error(errc::io_error, "bad cluster id '" + fields[1] + "'");
      cluster_of[fields[0]] = static_cast<int>(*c);
    }
  }

  int k = std::min<int>(cfg.pca_k, static_cast<int>(table.vectors.cols()));
  PcaModel model = pca_fit(table.vectors, k);
  Eigen::MatrixXd projected = pca_transform(model, table.vectors);

  {
    auto f = open_out((out_dir / files::projection).string());
    f << "tag";
    for (int j = 0; j < k; ++j) f << ",pc" << (j + 1);
    f << ",cluster\n";
    for (Eigen::Index i = 0; i < projected.rows(); ++i) {
      f << csv_escape(table.labels[static_cast<std::size_t>(i)]);
      for (int j = 0; j < k; ++j) f << "," << format_double(projected(i, j));
      auto it = cluster_of.find(table.labels[static_cast<std::size_t>(i)]);
      f << "," << (it == cluster_of.end() ? 0 : it->second) << "\n";
    }
  }
  r.artifacts = {files::projection};
  r.details["pca_k"] = k;
  std::vector<double> eigs(model.eigenvalues.data(), model.eigenvalues.data() + k);
  r.details["eigenvalues"] = eigs;
  return r;
}

inline StageResult report(const PipelineConfig& cfg, const std::filesystem::path& out_dir) {
  (void)cfg;
  StageResult r;
  r.name = "report";

  {
    auto in = open_in((out_dir / files::cosine).string());
    LabeledMatrix s = read_labeled_matrix(in);
    auto f = open_out((out_dir / files::heatmap_svg).string());
    f << svg_heatmap(s.labels, s.values);
  }
  {
    auto emb_in = open_in((out_dir / files::embeddings).string());
    EmbeddingTable table = read_embeddings(emb_in);
    Dendrogram dendro;
    dendro.leaves = table.labels.size();
    auto in = open_in((out_dir / files::merges).string());
    std::string line;
    getline_norm(in, line);
    while (getline_norm(in, line)) {
      if (trim(line).empty()) continue;
      auto fields = split_delimited(line);
      if (fields.size() != 4) throw error(errc::io_error, "bad merge row '" + line + "'");
      Merge m;
      auto left = parse_int(fields[0]);
      auto right = parse_int(fields[1]);
      auto height = parse_double(fields[2]);
      auto size = parse_int(fields[3]);
      if (!left || !right || !height || !size)
        throw error(errc::io_error, "bad merge row '" + line + "'");
      m.left = static_cast<int>(*left);
      m.right = static_cast<int>(*right);
      m.height = *height;
      m.size = static_cast<int>(*size);
      dendro.merges.push_back(m);
    }
    auto f = open_out((out_dir / files::dendrogram_svg).string());
    f << svg_dendrogram(table.labels, dendro);
  }
  {
    auto in = open_in((out_dir / files::projection).string());
    std::string line;
    if (!getline_norm(in, line)) throw error(errc::io_error, "empty projection file");
    auto header = split_delimited(line);
    if (header.size() < 4) throw error(errc::io_error, "projection needs >= 2 components");
    std::vector<std::string> labels;
    std::vector<int> clusters;
    std::vector<std::pair<double, double>> pts;
    while (getline_norm(in, line)) {
      if (trim(line).empty()) continue;
      auto fields = split_delimited(line);
      if (fields.size() != header.size())
        throw error(errc::io_error, "bad projection row '" + line + "'");
      auto x = parse_double(fields[1]);
      auto y = parse_double(fields[2]);
      auto c = parse_int(fields.back());
      if (!x || !y || !c) throw error(errc::io_error, "bad projection row '" + line + "'");
      labels.push_back(fields[0]);
      pts.emplace_back(*x, *y);
      clusters.push_back(static_cast<int>(*c));
    }
    Eigen::MatrixXd xy(static_cast<Eigen::Index>(pts.size()), 2);
    for (std::size_t i = 0; i < pts.size(); ++i) {
      xy(static_cast<Eigen::Index>(i), 0) = pts[i].first;
      xy(static_cast<Eigen::Index>(i), 1) = pts[i].second;
    }
    auto f = open_out((out_dir / files::scatter_svg).string());
    f << svg_scatter(labels, xy, clusters);
  }
  r.artifacts = {files::heatmap_svg, files::dendrogram_svg, files::scatter_svg};
  return r;
}

}  // namespace stages

/// Full pipeline over one alarm log. Stages run in order, each consuming the
/// previous stage's file artifacts; a manifest with the resolved config, its
/// hash, per-stage timings and the artifact list is written last.
inline nlohmann::json run_pipeline(const PipelineConfig& cfg, const std::string& config_hash,
                                   const std::filesystem::path& log_path,
                                   const std::filesystem::path& out_dir,
                                   const std::vector<std::string>& stage_filter = {}) {
  cfg.validate();
  std::filesystem::create_directories(out_dir);

  std::set<std::string> wanted(stage_filter.begin(), stage_filter.end());
  auto enabled = [&](const std::string& name) {
    return wanted.empty() || wanted.count(name) > 0;
  };
  static const std::set<std::string> known = {"preprocess", "graph",   "embed",
                                              "cluster",    "project", "report"};
  for (const auto& s : wanted)
    if (!known.count(s)) throw error(errc::invalid_config, "unknown stage '" + s + "'");

  nlohmann::json manifest;
  manifest["seed"] = cfg.seed;
  manifest["config"] = nlohmann::json::parse("{}");
  {
    std::istringstream echo(render_config(cfg));
    std::string line;
    while (std::getline(echo, line)) {
      auto eq = line.find('=');
      manifest["config"][trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }
  }
  manifest["config_hash"] = config_hash;
  manifest["log"] = log_path.string();
  manifest["stages"] = nlohmann::json::array();
  manifest["artifacts"] = nlohmann::json::array();

  auto run_stage = [&](const std::string& name, auto&& fn) {
    if (!enabled(name)) return;
    auto t0 = std::chrono::steady_clock::now();
    StageResult r = fn();
    auto t1 = std::chrono::steady_clock::now();
    r.ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
    nlohmann::json s;
    s["name"] = r.name;
    s["ms"] = r.ms;
    s["details"] = r.details;
    manifest["stages"].push_back(s);
    for (const auto& a : r.artifacts) manifest["artifacts"].push_back(a);
  };

  run_stage("preprocess", [&] { return stages::preprocess(cfg, log_path, out_dir); });
  run_stage("graph", [&] { return stages::graph(cfg, out_dir); });
  run_stage("embed", [&] { return stages::embed(cfg, out_dir); });
  run_stage("cluster", [&] { return stages::cluster(cfg, out_dir); });
  run_stage("project", [&] { return stages::project(cfg, out_dir); });
  // Figures are rendered only on request; the default run stops at the data
  // artifacts.
  if (wanted.count("report"))
    run_stage("report", [&] { return stages::report(cfg, out_dir); });

  {
    auto f = open_out((out_dir / files::manifest).string());
    f << manifest.dump(2) << "\n";
  }
  return manifest;
}

/// Parse a scenario description in the same key = value format.
inline ScenarioSpec parse_scenario(std::istream& in) {
  ScenarioSpec spec;
  spec.noise_rate_per_hour = 0.0;
  std::size_t noise_count = 0;
  std::map<int, std::vector<std::string>> groups;
  std::string line;
  std::size_t lineno = 0;

  auto split_tags = [](const std::string& value) {
    std::vector<std::string> tags;
    std::istringstream ss(value);
    std::string tag;
    while (ss >> tag) tags.push_back(normalize_direction(tag));
    return tags;
  };

  while (getline_norm(in, line)) {
    ++lineno;
    std::string stripped = trim(line);
    if (stripped.empty() || stripped[0] == '#') continue;
    auto eq = stripped.find('=');
    if (eq == std::string::npos)
      throw error(errc::invalid_spec, "line " + std::to_string(lineno) + ": expected key = value");
    std::string key = trim(stripped.substr(0, eq));
    std::string value = trim(stripped.substr(eq + 1));

    if (key == "fault.label") spec.fault_label = value;
    else if (key == "fault.interval") spec.fault_interval_s = detail::config_double(key, value);
    else if (key == "fault.group") spec.fault_group = static_cast<int>(detail::config_int(key, value));
    else if (key == "burst_rate") spec.burst_rate_per_hour = detail::config_double(key, value);
    else if (key == "burst_spread") spec.burst_spread_s = detail::config_double(key, value);
    else if (key == "noise.rate") spec.noise_rate_per_hour = detail::config_double(key, value);
    else if (key == "noise.tags") spec.noise_tags = split_tags(value);
    else if (key == "noise.count") noise_count = static_cast<std::size_t>(detail::config_int(key, value));
    else if (key == "chatter") spec.chatter_probability = detail::config_double(key, value);
    else if (key == "total") spec.total_alarms = static_cast<std::size_t>(detail::config_int(key, value));
    else if (key == "seed") spec.seed = static_cast<std::uint64_t>(detail::config_int(key, value));
    else if (key.rfind("group.", 0) == 0) {
      auto idx = parse_int(key.substr(6));
      if (!idx || *idx < 0) throw error(errc::invalid_spec, "bad group key '" + key + "'");
      groups[static_cast<int>(*idx)] = split_tags(value);
    } else {
      throw error(errc::invalid_spec, "unknown scenario key '" + key + "'");
    }
  }

  for (const auto& [idx, tags] : groups) {
    if (idx != static_cast<int>(spec.groups.size()))
      throw error(errc::invalid_spec, "group ids must be contiguous from 0");
    spec.groups.push_back(tags);
  }

  if (noise_count > 0 && spec.noise_tags.empty()) {
    // Deterministically pick unused _HI tags as background noise.
    std::set<std::string> used;
    for (const auto& g : spec.groups) used.insert(g.begin(), g.end());
    for (const auto& base : te_base_tags()) {
      if (spec.noise_tags.size() >= noise_count) break;
      std::string t = base + "_HI";
      if (!used.count(t)) spec.noise_tags.push_back(t);
    }
  }
  return spec;
}

}  // namespace alarmgraph
