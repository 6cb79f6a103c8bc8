#include <catch2/catch_amalgamated.hpp>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "alarmgraph/pipeline.hpp"
#include "support.hpp"

using namespace alarmgraph;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) { return read_file(p); }

void spit(const fs::path& p, const std::string& content) {
  std::ofstream out(p, std::ios::binary);
  out << content;
}

/// Small planted scenario and a fast config for end-to-end runs.
ScenarioSpec small_scenario() {
  ScenarioSpec spec;
  spec.fault_label = "F11";
  spec.fault_group = 0;
  spec.fault_interval_s = 900;
  spec.groups = {{"RT_HI", "RP_HI", "RCT_HI"}, {"PST_HI", "PSP_HI"}};
  spec.burst_rate_per_hour = 6.0;
  spec.burst_spread_s = 45.0;
  spec.noise_rate_per_hour = 30.0;
  spec.noise_tags = {"CW_HI", "AF_LO"};
  spec.chatter_probability = 0.1;
  spec.total_alarms = 900;
  spec.seed = 11;
  return spec;
}

const char* kFastConfig =
    "walk.num_walks = 5\n"
    "walk.length = 20\n"
    "skipgram.dims = 16\n"
    "skipgram.epochs = 2\n"
    "cluster.k = 3\n"
    "cluster.runs = 20\n"
    "seed = 4\n";

fs::path write_small_log(const fs::path& dir) {
  auto result = generate(small_scenario());
  fs::path log_path = dir / "log.csv";
  std::ofstream out(log_path, std::ios::binary);
  write_canonical_log(out, result.log);
  return log_path;
}

int run_cli(const std::string& args) {
  std::string cmd = std::string(ALARMGRAPH_CLI) + " " + args + " >/dev/null 2>&1";
  int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

}  // namespace

TEST_CASE("config defaults match the documented values") {
  std::istringstream in("");
  auto cfg = parse_config(in);
  CHECK(cfg.preprocess.chatter_window_s == 60.0);
  CHECK(cfg.preprocess.gap_threshold_s == 300.0);
  CHECK(cfg.preprocess.min_len == 5);
  CHECK(cfg.walk.num_walks == 10);
  CHECK(cfg.walk.walk_length == 40);
  CHECK(cfg.walk.p == 1.0);
  CHECK(cfg.walk.q == 1.0);
  CHECK(cfg.skipgram.dims == 128);
  CHECK(cfg.skipgram.window == 5);
  CHECK(cfg.skipgram.negatives == 5);
  CHECK(cfg.skipgram.epochs == 5);
  CHECK(cfg.skipgram.learning_rate == 0.025);
  CHECK(cfg.cluster.k_mode == "elbow");
  CHECK(cfg.cluster.runs == 100);
  CHECK(cfg.cluster.k_min == 2);
  CHECK(cfg.cluster.k_max == 10);
  CHECK(cfg.cluster.linkage == Linkage::average);
  CHECK(cfg.cluster.eps_tol == 1e-3);
  CHECK(cfg.pca_k == 2);
  CHECK_NOTHROW(cfg.validate());
}

TEST_CASE("config parses every key and round-trips through its echo") {
  std::istringstream in(
      "# comment line\n"
      "preprocess.chatter_window = 30\n"
      "preprocess.gap_threshold = 120\n"
      "preprocess.min_len = 3\n"
      "walk.num_walks = 7\n"
      "walk.length = 11\n"
      "walk.p = 0.25\n"
      "walk.q = 4\n"
      "skipgram.dims = 32\n"
      "skipgram.window = 2\n"
      "skipgram.negatives = 3\n"
      "skipgram.epochs = 4\n"
      "skipgram.learning_rate = 0.05\n"
      "cluster.k = epsilon\n"
      "cluster.runs = 50\n"
      "cluster.k_range = 2..8\n"
      "cluster.linkage = complete\n"
      "cluster.eps_tol = 0.01\n"
      "pca.k = 3\n"
      "seed = 99\n"
      "emit_corpus = true\n");
  auto cfg = parse_config(in);
  CHECK(cfg.preprocess.chatter_window_s == 30.0);
  CHECK(cfg.walk.p == 0.25);
  CHECK(cfg.cluster.k_mode == "epsilon");
  CHECK(cfg.cluster.k_max == 8);
  CHECK(cfg.cluster.linkage == Linkage::complete);
  CHECK(cfg.seed == 99);
  CHECK(cfg.emit_corpus);

  std::istringstream echo(render_config(cfg));
  auto back = parse_config(echo);
  CHECK(render_config(back) == render_config(cfg));
}

TEST_CASE("config rejects unknown keys and bad values") {
  std::istringstream bad_key("walk.pee = 1\n");
  CHECK_THROWS_AS(parse_config(bad_key), error);
  std::istringstream bad_value("walk.p = fast\n");
  CHECK_THROWS_AS(parse_config(bad_value), error);
  std::istringstream bad_line("walk.p\n");
  CHECK_THROWS_AS(parse_config(bad_line), error);
}

TEST_CASE("validation names the offending key") {
  std::istringstream in("walk.p = 0\n");
  auto cfg = parse_config(in);
  try {
    cfg.validate();
    FAIL("expected a validation error");
  } catch (const error& e) {
    CHECK(e.code() == errc::invalid_config);
    CHECK(std::string(e.what()).find("walk.p") != std::string::npos);
  }
}

TEST_CASE("fixed-k config accepts integers") {
  std::istringstream in("cluster.k = 4\n");
  auto cfg = parse_config(in);
  CHECK(cfg.cluster.k_mode == "fixed");
  CHECK(cfg.cluster.k_fixed == 4);
}

TEST_CASE("full pipeline writes every artifact and a coherent manifest") {
  testsupport::ScratchDir scratch("pipeline");
  auto log_path = write_small_log(scratch.path());

  std::istringstream in(kFastConfig);
  auto cfg = parse_config(in);
  cfg.emit_corpus = true;
  auto manifest = run_pipeline(cfg, fnv1a_hex(kFastConfig), log_path, scratch.path() / "out");

  for (const char* name :
       {files::cleaned, files::vocabulary, files::sequences, files::edges, files::nodes,
        files::corpus, files::embeddings, files::cosine, files::consensus_d, files::newick,
        files::merges, files::assignments, files::projection, files::manifest}) {
    CAPTURE(name);
    CHECK(fs::exists(scratch.path() / "out" / name));
  }

  CHECK(manifest["config_hash"] == fnv1a_hex(kFastConfig));
  CHECK(manifest["stages"].size() == 5);
  CHECK(manifest["artifacts"].size() >= 10);

  // The manifest on disk parses back to the same structure.
  auto disk = nlohmann::json::parse(slurp(scratch.path() / "out" / files::manifest));
  CHECK(disk["config_hash"] == manifest["config_hash"]);
  CHECK(disk["config"]["cluster.k"] == "3");
  CHECK(disk["config"]["seed"] == "4");
}

TEST_CASE("rerunning with the same config and seed is byte-identical") {
  testsupport::ScratchDir scratch("determinism");
  auto log_path = write_small_log(scratch.path());

  std::istringstream in1(kFastConfig), in2(kFastConfig);
  auto cfg = parse_config(in1);
  run_pipeline(cfg, "h", log_path, scratch.path() / "a");
  auto cfg2 = parse_config(in2);
  run_pipeline(cfg2, "h", log_path, scratch.path() / "b");

  for (const char* name : {files::embeddings, files::consensus_d, files::newick, files::merges,
                           files::cleaned, files::assignments, files::projection}) {
    CAPTURE(name);
    CHECK(slurp(scratch.path() / "a" / name) == slurp(scratch.path() / "b" / name));
  }
}

TEST_CASE("chained stage subcommands equal the one-shot pipeline byte for byte") {
  testsupport::ScratchDir scratch("chain");
  auto log_path = write_small_log(scratch.path());

  std::istringstream in1(kFastConfig), in2(kFastConfig);
  auto cfg = parse_config(in1);
  run_pipeline(cfg, "h", log_path, scratch.path() / "whole");

  auto cfg2 = parse_config(in2);
  fs::path step_dir = scratch.path() / "steps";
  fs::create_directories(step_dir);
  stages::preprocess(cfg2, log_path, step_dir);
  stages::graph(cfg2, step_dir);
  stages::embed(cfg2, step_dir);
  stages::cluster(cfg2, step_dir);
  stages::project(cfg2, step_dir);

  for (const char* name :
       {files::cleaned, files::vocabulary, files::sequences, files::edges, files::nodes,
        files::embeddings, files::cosine, files::consensus_d, files::newick, files::merges,
        files::assignments, files::projection}) {
    CAPTURE(name);
    CHECK(slurp(scratch.path() / "whole" / name) == slurp(step_dir / name));
  }
}

TEST_CASE("stage filtering runs only the requested stages") {
  testsupport::ScratchDir scratch("stagesel");
  auto log_path = write_small_log(scratch.path());
  std::istringstream in(kFastConfig);
  auto cfg = parse_config(in);
  run_pipeline(cfg, "h", log_path, scratch.path() / "out", {"preprocess", "graph"});
  CHECK(fs::exists(scratch.path() / "out" / files::edges));
  CHECK_FALSE(fs::exists(scratch.path() / "out" / files::embeddings));

  CHECK_THROWS_AS(
      run_pipeline(cfg, "h", log_path, scratch.path() / "out2", {"nonsense"}), error);
}

TEST_CASE("missing stage inputs name the expected file") {
  testsupport::ScratchDir scratch("missing");
  std::istringstream in(kFastConfig);
  auto cfg = parse_config(in);
  try {
    stages::graph(cfg, scratch.path());
    FAIL("expected a missing-input error");
  } catch (const error& e) {
    CHECK(e.code() == errc::missing_input);
    CHECK(std::string(e.what()).find("vocab.csv") != std::string::npos);
  }
}

TEST_CASE("cluster stage with fixed k = 1 puts everything in one cluster") {
  testsupport::ScratchDir scratch("konecluster");
  auto log_path = write_small_log(scratch.path());
  std::istringstream in("skipgram.dims = 8\nskipgram.epochs = 1\nwalk.num_walks = 3\nwalk.length = 10\ncluster.k = 1\ncluster.runs = 5\nseed = 2\n");
  auto cfg = parse_config(in);
  run_pipeline(cfg, "h", log_path, scratch.path() / "out");

  std::ifstream assign(scratch.path() / "out" / files::assignments);
  std::string line;
  getline_norm(assign, line);
  int rows = 0;
  while (getline_norm(assign, line)) {
    if (trim(line).empty()) continue;
    auto fields = split_delimited(line);
    REQUIRE(fields.size() == 2);
    CHECK(fields[1] == "0");
    ++rows;
  }
  CHECK(rows >= 2);
}

TEST_CASE("epsilon k-mode produces a pooled consensus matrix") {
  testsupport::ScratchDir scratch("epsmode");
  auto log_path = write_small_log(scratch.path());
  std::istringstream in(
      "walk.num_walks = 5\nwalk.length = 15\nskipgram.dims = 8\nskipgram.epochs = 1\n"
      "cluster.k = epsilon\ncluster.runs = 10\ncluster.k_range = 2..6\nseed = 3\n");
  auto cfg = parse_config(in);
  auto manifest = run_pipeline(cfg, "h", log_path, scratch.path() / "out");
  CHECK(fs::exists(scratch.path() / "out" / files::consensus_d));
  bool found = false;
  for (const auto& s : manifest["stages"])
    if (s["name"] == "cluster") {
      found = true;
      CHECK(s["details"].contains("eps_curve"));
      CHECK(s["details"]["k"].get<int>() >= 2);
    }
  CHECK(found);
}

TEST_CASE("heat map renders one rect per matrix cell, brighter = more similar") {
  std::vector<std::string> labels{"A", "B", "C"};
  Eigen::MatrixXd s(3, 3);
  s << 1.0, 0.5, 0.0,
       0.5, 1.0, 0.25,
       0.0, 0.25, 1.0;
  auto svg = svg_heatmap(labels, s);

  std::size_t rects = 0, pos = 0;
  while ((pos = svg.find("<rect", pos)) != std::string::npos) {
    ++rects;
    pos += 5;
  }
  CHECK(rects == 9);
  // Diagonal cells are the maximum: pure white. The zero cell is pure black.
  CHECK(svg.find("#ffffff") != std::string::npos);
  CHECK(svg.find("#000000") != std::string::npos);
  std::size_t whites = 0;
  pos = 0;
  while ((pos = svg.find("#ffffff", pos)) != std::string::npos) {
    ++whites;
    pos += 7;
  }
  CHECK(whites == 3);
}

TEST_CASE("report stage renders the three figures from artifacts") {
  testsupport::ScratchDir scratch("report");
  auto log_path = write_small_log(scratch.path());
  std::istringstream in(kFastConfig);
  auto cfg = parse_config(in);
  run_pipeline(cfg, "h", log_path, scratch.path() / "out", {});
  stages::report(cfg, scratch.path() / "out");

  for (const char* name : {files::heatmap_svg, files::dendrogram_svg, files::scatter_svg}) {
    CAPTURE(name);
    auto body = slurp(scratch.path() / "out" / name);
    CHECK(body.find("<svg") == 0);
    CHECK(body.find("</svg>") != std::string::npos);
  }
}

TEST_CASE("cli: happy path synth + run + report exits zero") {
  testsupport::ScratchDir scratch("cli");
  spit(scratch.path() / "scenario.cfg",
       "fault.label = F11\nfault.interval = 900\nfault.group = 0\n"
       "group.0 = RT_HI RP_HI RCT_HI\ngroup.1 = PST_HI PSP_HI\n"
       "burst_rate = 6\nburst_spread = 45\nnoise.rate = 30\nnoise.tags = CW_HI AF_LO\n"
       "chatter = 0.1\ntotal = 900\nseed = 11\n");
  spit(scratch.path() / "pipeline.cfg", kFastConfig);

  std::string out = (scratch.path() / "out").string();
  REQUIRE(run_cli("synth --scenario " + (scratch.path() / "scenario.cfg").string() + " --out " +
                  out) == 0);
  REQUIRE(fs::exists(scratch.path() / "out" / files::log));
  REQUIRE(fs::exists(scratch.path() / "out" / files::ground_truth));
  REQUIRE(fs::exists(scratch.path() / "out" / files::scenario_manifest));

  REQUIRE(run_cli("run --log " + (scratch.path() / "out" / files::log).string() + " --config " +
                  (scratch.path() / "pipeline.cfg").string() + " --out " + out) == 0);
  CHECK(fs::exists(scratch.path() / "out" / files::projection));
  CHECK(fs::exists(scratch.path() / "out" / files::manifest));

  REQUIRE(run_cli("report --out " + out) == 0);
  CHECK(fs::exists(scratch.path() / "out" / files::heatmap_svg));
}

TEST_CASE("cli: invalid config exits 1 and writes no artifacts") {
  testsupport::ScratchDir scratch("cli_bad");
  auto log_path = write_small_log(scratch.path());
  spit(scratch.path() / "bad.cfg", "walk.p = 0\n");
  int code = run_cli("run --log " + log_path.string() + " --config " +
                     (scratch.path() / "bad.cfg").string() + " --out " +
                     (scratch.path() / "out").string());
  CHECK(code == 1);
  CHECK_FALSE(fs::exists(scratch.path() / "out" / files::cleaned));
}

TEST_CASE("cli: stage failure exits 2") {
  testsupport::ScratchDir scratch("cli_stage");
  int code = run_cli("graph --out " + (scratch.path() / "empty").string());
  CHECK(code == 2);
}

TEST_CASE("cli: seed flag overrides the config seed") {
  testsupport::ScratchDir scratch("cli_seed");
  auto log_path = write_small_log(scratch.path());
  spit(scratch.path() / "pipeline.cfg", kFastConfig);

  auto run_with = [&](const std::string& dir, const std::string& extra) {
    REQUIRE(run_cli("run --log " + log_path.string() + " --config " +
                    (scratch.path() / "pipeline.cfg").string() + " --out " +
                    (scratch.path() / dir).string() + extra) == 0);
  };
  run_with("a", " --seed 4");  // same as the config seed
  run_with("b", "");
  run_with("c", " --seed 5");
  CHECK(slurp(scratch.path() / "a" / files::embeddings) ==
        slurp(scratch.path() / "b" / files::embeddings));
  CHECK(slurp(scratch.path() / "a" / files::embeddings) !=
        slurp(scratch.path() / "c" / files::embeddings));
}
