#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "retnet/pipeline.hpp"
#include "retnet/synthgen.hpp"

using namespace retnet;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  auto dir = fs::temp_directory_path() / ("retnet_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::map<std::string, std::string> slurp_tree(const fs::path& root) {
  std::map<std::string, std::string> files;
  for (const auto& entry : fs::recursive_directory_iterator(root)) {
    if (!entry.is_regular_file()) continue;
    std::ifstream in(entry.path(), std::ios::binary);
    std::stringstream buf;
    buf << in.rdbuf();
    files[fs::relative(entry.path(), root).string()] = buf.str();
  }
  return files;
}

PipelineConfig small_run(const fs::path& dir) {
  SynthConfig synth;
  synth.blocks = {{25, 0.4}, {25, 0.1}};
  synth.weeks = 26;
  synth.originals_per_week = 1;
  synth.seed = 21;
  std::ofstream(dir / "events.jsonl") << [&] {
    std::ostringstream s;
    write_events(s, generate_stream(synth).stream, Format::Jsonl);
    return s.str();
  }();

  PipelineConfig cfg;
  cfg.inputs = {(dir / "events.jsonl").string()};
  cfg.window.window_weeks = 8;
  cfg.ensemble.trials = 10;
  cfg.ensemble.base_seed = 5;
  cfg.selection.k = 1;
  cfg.export_edges = true;
  return cfg;
}

}  // namespace

TEST_CASE("two runs produce byte-identical outputs") {
  auto dir = scratch("repeat");
  auto cfg = small_run(dir);
  cfg.out = dir / "a";
  auto first = run_pipeline(cfg);
  cfg.out = dir / "b";
  auto second = run_pipeline(cfg);

  CHECK(first.windows == 19);
  CHECK(first.selected.size() == 3);
  CHECK(first.selected.front() == 0);
  CHECK(first.selected.back() == 18);
  CHECK(first.config_hash == second.config_hash);

  auto a = slurp_tree(dir / "a");
  auto b = slurp_tree(dir / "b");
  CHECK(a == b);
  for (const auto* name : {"manifest.json", "windows.csv", "similarity.csv", "selected.json", "communities.csv",
                           "shares.csv", "influence.csv", "users.csv", "gini.csv", "meta_network.dot",
                           "meta_network.json", "comparison.csv", "odds_ratio.json",
                           "partitions/partition_t000.csv", "edges/edges_t018.csv"}) {
    CHECK_MESSAGE(a.contains(name), name);
  }
  CHECK_FALSE(fs::exists(dir / "a.partial"));

  // rerunning into a previous run's directory is allowed
  cfg.out = dir / "a";
  CHECK_NOTHROW(run_pipeline(cfg));
  fs::remove_all(dir);
}

TEST_CASE("config hash tracks the configuration, not the output path") {
  PipelineConfig a;
  a.inputs = {"x.jsonl"};
  a.out = "one";
  auto b = a;
  b.out = "two";
  CHECK(fnv1a_hex(canonical_config(a)) == fnv1a_hex(canonical_config(b)));
  b.ensemble.base_seed = 1;
  CHECK(fnv1a_hex(canonical_config(a)) != fnv1a_hex(canonical_config(b)));
  CHECK(fnv1a_hex("") == "cbf29ce484222325");
  CHECK(fnv1a_hex("a") == "af63dc4c8601ec8c");
}

TEST_CASE("a failing stage leaves no artifacts") {
  auto dir = scratch("missing");
  PipelineConfig cfg;
  cfg.inputs = {(dir / "does_not_exist.jsonl").string()};
  cfg.out = dir / "out";
  try {
    run_pipeline(cfg);
    FAIL("expected PipelineError");
  } catch (const PipelineError& e) {
    CHECK(e.stage() == "ingest");
    CHECK(std::string(e.what()).rfind("stage ingest: ", 0) == 0);
  }
  CHECK_FALSE(fs::exists(dir / "out"));
  CHECK_FALSE(fs::exists(dir / "out.partial"));
  fs::remove_all(dir);
}

TEST_CASE("foreign output directories are refused") {
  auto dir = scratch("foreign");
  std::ofstream(dir / "keep.txt") << "x";
  PipelineConfig cfg;
  cfg.inputs = {"whatever.jsonl"};
  cfg.out = dir;
  try {
    run_pipeline(cfg);
    FAIL("expected PipelineError");
  } catch (const PipelineError& e) {
    CHECK(e.stage() == "config");
  }
  CHECK(fs::exists(dir / "keep.txt"));
  fs::remove_all(dir);
}

TEST_CASE("stage outputs round trip") {
  auto dir = scratch("stages");
  auto cfg = small_run(dir);
  auto parsed = load_inputs(cfg.inputs, Format::Jsonl, true);
  auto series = snapshot_series(parsed.stream, cfg.window);
  auto parts = detect_communities(series, {3, 0.9, 1});
  write_partitions(dir, parts);
  auto back = read_partitions(dir);
  REQUIRE(back.size() == parts.size());
  for (std::size_t i = 0; i < parts.size(); ++i) {
    CHECK(back[i] == parts[i]);
    CHECK(back[i].t() == static_cast<int>(i));
  }
  auto sel = write_selection(dir, parts, {2});
  CHECK(read_selection(dir / "selected.json") == sel.indices);
  fs::remove_all(dir);
}
