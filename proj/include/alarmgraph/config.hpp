#pragma once

#include <cstdint>
#include <fstream>
#include <istream>
#include <map>
#include <sstream>
#include <string>

#include "alarmgraph/ahc.hpp"
#include "alarmgraph/csv.hpp"
#include "alarmgraph/errors.hpp"
#include "alarmgraph/preprocess.hpp"
#include "alarmgraph/skipgram.hpp"
#include "alarmgraph/walks.hpp"

namespace alarmgraph {

struct ClusterConfig {
  std::string k_mode = "elbow";  // "elbow", "epsilon", or "fixed"
  int k_fixed = 0;
  int runs = 100;                // M_runs
  int k_min = 2;
  int k_max = 10;
  Linkage linkage = Linkage::average;
  double eps_tol = 1e-3;
};

/// Every pipeline tunable, with the defaults used when a key is absent.
/// Config files are flat `key = value` lines with dotted section prefixes;
/// '#' starts a comment.
struct PipelineConfig {
  PreprocessConfig preprocess;
  WalkParams walk;
  SkipGramParams skipgram;
  ClusterConfig cluster;
  int pca_k = 2;
  std::uint64_t seed = 1;
  bool emit_corpus = false;

  void validate() const {
    preprocess.validate();
    walk.validate();
    skipgram.validate();
    if (cluster.k_mode == "fixed") {
      if (cluster.k_fixed < 1) throw error(errc::invalid_config, "cluster.k must be >= 1");
    } else if (cluster.k_mode != "elbow" && cluster.k_mode != "epsilon") {
      throw error(errc::invalid_config, "cluster.k must be 'elbow', 'epsilon', or an integer");
    }
    if (cluster.runs < 1) throw error(errc::invalid_config, "cluster.runs must be >= 1");
    if (cluster.k_min < 1 || cluster.k_max < cluster.k_min)
      throw error(errc::invalid_config, "cluster.k_range must be a..b with 1 <= a <= b");
    if (cluster.eps_tol <= 0) throw error(errc::invalid_config, "cluster.eps_tol must be > 0");
    if (pca_k < 1) throw error(errc::invalid_config, "pca.k must be >= 1");
    if (pca_k > skipgram.dims)
      throw error(errc::invalid_config, "pca.k cannot exceed skipgram.dims");
  }
};

namespace detail {

inline double config_double(const std::string& key, const std::string& value) {
  auto v = parse_double(value);
  if (!v) throw error(errc::invalid_config, key + " expects a number, got '" + value + "'");
  return *v;
}

inline long long config_int(const std::string& key, const std::string& value) {
  auto v = parse_int(value);
  if (!v) throw error(errc::invalid_config, key + " expects an integer, got '" + value + "'");
  return *v;
}

inline bool config_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  throw error(errc::invalid_config, key + " expects true or false, got '" + value + "'");
}

}  // namespace detail

/// Parse a config stream. Unknown keys are rejected so typos cannot silently
/// fall back to defaults.
inline PipelineConfig parse_config(std::istream& in) {
  PipelineConfig cfg;
  std::string line;
  std::size_t lineno = 0;
  while (getline_norm(in, line)) {
    ++lineno;
    std::string stripped = trim(line);
    if (stripped.empty() || stripped[0] == '#') continue;
    auto eq = stripped.find('=');
    if (eq == std::string::npos)
      throw error(errc::invalid_config,
                  "line " + std::to_string(lineno) + ": expected key = value");
    std::string key = trim(stripped.substr(0, eq));
    std::string value = trim(stripped.substr(eq + 1));

    if (key == "preprocess.chatter_window") cfg.preprocess.chatter_window_s = detail::config_double(key, value);
    else if (key == "preprocess.gap_threshold") cfg.preprocess.gap_threshold_s = detail::config_double(key, value);
    else if (key == "preprocess.min_len") cfg.preprocess.min_len = static_cast<std::size_t>(detail::config_int(key, value));
    else if (key == "walk.num_walks") cfg.walk.num_walks = static_cast<int>(detail::config_int(key, value));
    else if (key == "walk.length") cfg.walk.walk_length = static_cast<int>(detail::config_int(key, value));
    else if (key == "walk.p") cfg.walk.p = detail::config_double(key, value);
    else if (key == "walk.q") cfg.walk.q = detail::config_double(key, value);
    else if (key == "skipgram.dims") cfg.skipgram.dims = static_cast<int>(detail::config_int(key, value));
    else if (key == "skipgram.window") cfg.skipgram.window = static_cast<int>(detail::config_int(key, value));
    else if (key == "skipgram.negatives") cfg.skipgram.negatives = static_cast<int>(detail::config_int(key, value));
    else if (key == "skipgram.epochs") cfg.skipgram.epochs = static_cast<int>(detail::config_int(key, value));
    else if (key == "skipgram.learning_rate") cfg.skipgram.learning_rate = detail::config_double(key, value);
    else if (key == "cluster.k") {
      if (value == "elbow" || value == "epsilon") {
        cfg.cluster.k_mode = value;
      } else {
        cfg.cluster.k_mode = "fixed";
        cfg.cluster.k_fixed = static_cast<int>(detail::config_int(key, value));
      }
    } else if (key == "cluster.runs") cfg.cluster.runs = static_cast<int>(detail::config_int(key, value));
    else if (key == "cluster.k_range") {
      auto dots = value.find("..");
      if (dots == std::string::npos)
        throw error(errc::invalid_config, "cluster.k_range expects a..b, got '" + value + "'");
      cfg.cluster.k_min = static_cast<int>(detail::config_int(key, trim(value.substr(0, dots))));
      cfg.cluster.k_max = static_cast<int>(detail::config_int(key, trim(value.substr(dots + 2))));
    } else if (key == "cluster.linkage") {
      auto l = parse_linkage(value);
      if (!l) throw error(errc::invalid_config, "unknown cluster.linkage '" + value + "'");
      cfg.cluster.linkage = *l;
    } else if (key == "cluster.eps_tol") cfg.cluster.eps_tol = detail::config_double(key, value);
    else if (key == "pca.k") cfg.pca_k = static_cast<int>(detail::config_int(key, value));
    else if (key == "seed") cfg.seed = static_cast<std::uint64_t>(detail::config_int(key, value));
    else if (key == "emit_corpus") cfg.emit_corpus = detail::config_bool(key, value);
    else throw error(errc::invalid_config, "unknown config key '" + key + "'");
  }
  return cfg;
}

inline PipelineConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw error(errc::io_error, "cannot open config '" + path + "'");
  return parse_config(in);
}

/// Canonical echo of every resolved value, parseable by parse_config.
inline std::string render_config(const PipelineConfig& cfg) {
  std::ostringstream out;
  out << "preprocess.chatter_window = " << format_double(cfg.preprocess.chatter_window_s) << "\n";
  out << "preprocess.gap_threshold = " << format_double(cfg.preprocess.gap_threshold_s) << "\n";
  out << "preprocess.min_len = " << cfg.preprocess.min_len << "\n";
  out << "walk.num_walks = " << cfg.walk.num_walks << "\n";
  out << "walk.length = " << cfg.walk.walk_length << "\n";
  out << "walk.p = " << format_double(cfg.walk.p) << "\n";
  out << "walk.q = " << format_double(cfg.walk.q) << "\n";
  out << "skipgram.dims = " << cfg.skipgram.dims << "\n";
  out << "skipgram.window = " << cfg.skipgram.window << "\n";
  out << "skipgram.negatives = " << cfg.skipgram.negatives << "\n";
  out << "skipgram.epochs = " << cfg.skipgram.epochs << "\n";
  out << "skipgram.learning_rate = " << format_double(cfg.skipgram.learning_rate) << "\n";
  out << "cluster.k = "
      << (cfg.cluster.k_mode == "fixed" ? std::to_string(cfg.cluster.k_fixed) : cfg.cluster.k_mode)
      << "\n";
  out << "cluster.runs = " << cfg.cluster.runs << "\n";
  out << "cluster.k_range = " << cfg.cluster.k_min << ".." << cfg.cluster.k_max << "\n";
  out << "cluster.linkage = " << linkage_name(cfg.cluster.linkage) << "\n";
  out << "cluster.eps_tol = " << format_double(cfg.cluster.eps_tol) << "\n";
  out << "pca.k = " << cfg.pca_k << "\n";
  out << "seed = " << cfg.seed << "\n";
  out << "emit_corpus = " << (cfg.emit_corpus ? "true" : "false") << "\n";
  return out.str();
}

}  // namespace alarmgraph
