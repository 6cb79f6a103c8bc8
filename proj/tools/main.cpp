// alarmgraph CLI: run the correlated-alarm pipeline or its individual stages.
//
// Exit codes: 0 success, 1 config/validation error, 2 stage failure.

#include <CLI11.hpp>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "alarmgraph/alarmgraph.hpp"

namespace fs = std::filesystem;
using namespace alarmgraph;

namespace {

struct CommonOpts {
  std::string config_path;
  std::string out_dir;
  std::optional<long long> seed;
};

PipelineConfig resolve_config(const CommonOpts& opts, std::string* hash_out = nullptr) {
  PipelineConfig cfg;
  std::string raw;
  if (!opts.config_path.empty()) {
    raw = read_file(opts.config_path);
    std::istringstream in(raw);
    cfg = parse_config(in);
  }
  if (opts.seed) cfg.seed = static_cast<std::uint64_t>(*opts.seed);
  cfg.validate();
  if (hash_out) *hash_out = fnv1a_hex(raw);
  return cfg;
}

int run_guarded(const std::function<void()>& body) {
  try {
    body();
    return 0;
  } catch (const error& e) {
    bool config_problem = e.code() == errc::invalid_config || e.code() == errc::invalid_spec ||
                          e.code() == errc::invalid_argument;
    std::cerr << "error: " << e.what() << "\n";
    return config_problem ? 1 : 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}

void add_stage_timing(const char* name, const std::function<StageResult()>& fn) {
  StageResult r = fn();
  std::cerr << name << ": done";
  if (!r.artifacts.empty()) {
    std::cerr << " (";
    for (std::size_t i = 0; i < r.artifacts.size(); ++i)
      std::cerr << (i ? ", " : "") << r.artifacts[i];
    std::cerr << ")";
  }
  std::cerr << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Correlated industrial alarm detection via graph embedding"};
  app.require_subcommand(1);

  CommonOpts opts;
  std::string log_path;
  std::vector<std::string> scenario_paths;
  std::string stages_csv;
  bool emit_corpus = false;

  auto add_common = [&](CLI::App* sub, bool needs_out = true) {
    sub->add_option("--config", opts.config_path, "pipeline config file (key = value)");
    auto* o = sub->add_option("--out", opts.out_dir, "output directory");
    if (needs_out) o->required();
    sub->add_option("--seed", opts.seed, "override the config seed");
  };

  auto* run_cmd = app.add_subcommand("run", "run the full pipeline on an alarm log");
  add_common(run_cmd);
  run_cmd->add_option("--log", log_path, "alarm log file")->required();
  run_cmd->add_option("--stages", stages_csv,
                      "comma-separated subset of preprocess,graph,embed,cluster,project,report");
  run_cmd->add_flag("--emit-corpus", emit_corpus, "also write the walk corpus");

  auto* synth_cmd = app.add_subcommand("synth", "generate a synthetic alarm log");
  add_common(synth_cmd);
  synth_cmd
      ->add_option("--scenario", scenario_paths, "scenario file; repeat to concatenate scenarios")
      ->required();

  auto* pre_cmd = app.add_subcommand("preprocess", "dechatter and segment an alarm log");
  add_common(pre_cmd);
  pre_cmd->add_option("--log", log_path, "alarm log file")->required();

  auto* graph_cmd = app.add_subcommand("graph", "build the co-occurrence graph");
  add_common(graph_cmd);

  auto* embed_cmd = app.add_subcommand("embed", "generate walks and train embeddings");
  add_common(embed_cmd);
  embed_cmd->add_flag("--emit-corpus", emit_corpus, "also write the walk corpus");

  auto* cluster_cmd = app.add_subcommand("cluster", "consensus-cluster the embeddings");
  add_common(cluster_cmd);

  auto* project_cmd = app.add_subcommand("project", "PCA-project the embeddings");
  add_common(project_cmd);

  auto* report_cmd = app.add_subcommand("report", "render heat map, dendrogram and scatter SVGs");
  add_common(report_cmd);

  CLI11_PARSE(app, argc, argv);

  return run_guarded([&] {
    fs::path out(opts.out_dir);

    if (run_cmd->parsed()) {
      std::string hash;
      PipelineConfig cfg = resolve_config(opts, &hash);
      if (emit_corpus) cfg.emit_corpus = true;
      std::vector<std::string> stage_filter;
      if (!stages_csv.empty()) {
        std::istringstream ss(stages_csv);
        std::string item;
        while (std::getline(ss, item, ',')) {
          item = trim(item);
          if (!item.empty()) stage_filter.push_back(item);
        }
      }
      run_pipeline(cfg, hash, log_path, out, stage_filter);
      return;
    }

    if (synth_cmd->parsed()) {
      std::vector<ScenarioSpec> specs;
      for (const auto& path : scenario_paths) {
        auto in = open_in(path);
        ScenarioSpec spec = parse_scenario(in);
        if (opts.seed) spec.seed = static_cast<std::uint64_t>(*opts.seed);
        spec.validate();
        specs.push_back(std::move(spec));
      }
      SynthResult result = specs.size() == 1 ? generate(specs[0]) : generate(specs);
      fs::create_directories(out);
      {
        auto f = open_out((out / files::log).string());
        write_canonical_log(f, result.log);
      }
      {
        std::vector<std::string> noise;
        for (const auto& s : specs) noise.insert(noise.end(), s.noise_tags.begin(), s.noise_tags.end());
        auto f = open_out((out / files::ground_truth).string());
        write_ground_truth(f, result.truth, noise);
      }
      {
        nlohmann::json m;
        m["scenarios"] = nlohmann::json::array();
        for (std::size_t i = 0; i < specs.size(); ++i) {
          const auto& s = specs[i];
          nlohmann::json j;
          j["fault_label"] = s.fault_label;
          if (s.fault_group) j["fault_group"] = *s.fault_group;
          j["fault_interval_s"] = s.fault_interval_s;
          j["groups"] = s.groups;
          j["burst_rate_per_hour"] = s.burst_rate_per_hour;
          j["burst_spread_s"] = s.burst_spread_s;
          j["noise_rate_per_hour"] = s.noise_rate_per_hour;
          j["noise_tags"] = s.noise_tags;
          j["chatter_probability"] = s.chatter_probability;
          j["total_alarms"] = s.total_alarms;
          j["seed"] = s.seed;
          m["scenarios"].push_back(j);
        }
        m["events"] = result.log.events.size();
        m["originals"] = result.stats.originals;
        m["chatter_duplicates"] = result.stats.duplicates;
        auto f = open_out((out / files::scenario_manifest).string());
        f << m.dump(2) << "\n";
      }
      std::cerr << "synth: " << result.log.events.size() << " events ("
                << result.stats.duplicates << " chatter duplicates)\n";
      return;
    }

    PipelineConfig cfg = resolve_config(opts);
    if (emit_corpus) cfg.emit_corpus = true;
    fs::create_directories(out);

    if (pre_cmd->parsed())
      add_stage_timing("preprocess", [&] { return stages::preprocess(cfg, log_path, out); });
    else if (graph_cmd->parsed())
      add_stage_timing("graph", [&] { return stages::graph(cfg, out); });
    else if (embed_cmd->parsed())
      add_stage_timing("embed", [&] { return stages::embed(cfg, out); });
    else if (cluster_cmd->parsed())
      add_stage_timing("cluster", [&] { return stages::cluster(cfg, out); });
    else if (project_cmd->parsed())
      add_stage_timing("project", [&] { return stages::project(cfg, out); });
    else if (report_cmd->parsed())
      add_stage_timing("report", [&] { return stages::report(cfg, out); });
  });
}
