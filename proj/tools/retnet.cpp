// retnet: retweet-network community and hate-speech analysis pipeline.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "retnet/pipeline.hpp"
#include "retnet/synthgen.hpp"

namespace fs = std::filesystem;
using namespace retnet;

namespace {

struct InputOptions {
  std::vector<std::string> inputs;
  std::string format = "jsonl";
  bool strict = false;
};

void add_input_options(CLI::App* cmd, InputOptions& in) {
  cmd->add_option("--input", in.inputs, "Event files (JSON lines or CSV)")->required()->check(CLI::ExistingFile);
  cmd->add_option("--format", in.format, "Input format")->check(CLI::IsMember({"jsonl", "csv"}));
  cmd->add_flag("--strict", in.strict, "Fail on the first malformed line");
}

void add_window_options(CLI::App* cmd, WindowConfig& w) {
  cmd->add_option("--window-weeks", w.window_weeks, "Observation window length")->check(CLI::PositiveNumber);
  cmd->add_option("--slide-weeks", w.slide_weeks, "Shift between consecutive windows")->check(CLI::PositiveNumber);
  cmd->add_option("--half-life-weeks", w.half_life_weeks, "Edge weight half-life")->check(CLI::PositiveNumber);
  cmd->add_option("--stream-start", w.stream_start, "Override stream start (epoch seconds)");
  cmd->add_option("--stream-end", w.stream_end, "Override stream end (epoch seconds)");
}

void add_ensemble_options(CLI::App* cmd, EnsembleConfig& e) {
  cmd->add_option("--trials", e.trials, "Louvain trials per window")->check(CLI::PositiveNumber);
  cmd->add_option("--threshold", e.threshold, "Co-occurrence fraction for consensus")->check(CLI::Range(0.0, 1.0));
  cmd->add_option("--seed", e.base_seed, "Base seed; trial i uses seed + i");
}

ParseResult load(const InputOptions& in) {
  auto r = load_inputs(in.inputs, parse_format(in.format), in.strict);
  if (r.report.total_skipped() > 0) {
    std::cerr << fmt::format("warning: skipped {} of {} lines\n", r.report.total_skipped(), r.report.lines);
  }
  return r;
}

SnapshotSeries build_series(const EventStream& s, const WindowConfig& w) {
  auto series = snapshot_series(s, w);
  if (series.clipped) std::cerr << "warning: stream shorter than one window; using a single clipped window\n";
  return series;
}

std::vector<BlockSpec> parse_blocks(const std::string& spec) {
  std::vector<BlockSpec> blocks;
  std::stringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto colon = item.find(':');
    if (colon == std::string::npos) throw std::invalid_argument("block must be COUNT:HATE_RATE, got " + item);
    blocks.push_back({std::stoul(item.substr(0, colon)), std::stod(item.substr(colon + 1))});
  }
  return blocks;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Retweet network communities, influence and hate-speech reports"};
  app.require_subcommand(1);

  PipelineConfig cfg;
  InputOptions in;
  std::string out_dir;
  std::string partitions_dir;
  std::string selected_file;
  std::string labels;

  auto* run = app.add_subcommand("run", "Full pipeline: ingest, snapshots, communities, selection, reports");
  add_input_options(run, in);
  add_window_options(run, cfg.window);
  add_ensemble_options(run, cfg.ensemble);
  run->add_option("--k", cfg.selection.k, "Intermediate timepoints to select");
  run->add_option("--top-n", cfg.top_n, "Communities shown per timepoint");
  run->add_option("--edge-threshold", cfg.edge_threshold, "Minimum external influence for meta-network edges");
  run->add_option("--labels", labels, "Sidecar CSV t,community_id,name")->check(CLI::ExistingFile);
  run->add_flag("--export-edges", cfg.export_edges, "Write per-window edge lists");
  run->add_option("--out", out_dir, "Output directory")->required();

  auto* snap = app.add_subcommand("snapshot", "Build windowed retweet networks");
  add_input_options(snap, in);
  add_window_options(snap, cfg.window);
  snap->add_option("--out", out_dir, "Output directory")->required();

  auto* comm = app.add_subcommand("communities", "Ensemble Louvain partitions per window");
  add_input_options(comm, in);
  add_window_options(comm, cfg.window);
  add_ensemble_options(comm, cfg.ensemble);
  comm->add_option("--out", out_dir, "Output directory")->required();

  auto* sel = app.add_subcommand("select", "Select maximally different timepoints");
  sel->add_option("--partitions", partitions_dir, "Directory with partition_t*.csv")->required();
  sel->add_option("--k", cfg.selection.k, "Intermediate timepoints to select");
  sel->add_option("--out", out_dir, "Output directory")->required();

  auto* rep = app.add_subcommand("report", "Community shares, influence and meta-network reports");
  add_input_options(rep, in);
  add_window_options(rep, cfg.window);
  rep->add_option("--partitions", partitions_dir, "Directory with partition_t*.csv")->required();
  rep->add_option("--selected", selected_file, "JSON list of timepoints (default: <partitions>/selected.json)");
  rep->add_option("--top-n", cfg.top_n, "Communities shown per timepoint");
  rep->add_option("--edge-threshold", cfg.edge_threshold, "Minimum external influence for meta-network edges");
  rep->add_option("--labels", labels, "Sidecar CSV t,community_id,name")->check(CLI::ExistingFile);
  rep->add_option("--out", out_dir, "Output directory")->required();

  SynthConfig synth;
  std::string blocks = "50:0.5,50:0.1";
  std::string synth_out;
  std::string truth_out;
  std::string synth_format = "jsonl";
  auto* gen = app.add_subcommand("synth", "Generate a synthetic labeled retweet stream");
  gen->add_option("--blocks", blocks, "Comma-separated COUNT:HATE_RATE per block");
  gen->add_option("--p-in", synth.p_in, "Weekly retweet probability within a block");
  gen->add_option("--p-out", synth.p_out, "Weekly retweet probability between blocks");
  gen->add_option("--weeks", synth.weeks, "Duration in weeks");
  gen->add_option("--originals-per-week", synth.originals_per_week, "Originals per user per week");
  gen->add_option("--seed", synth.seed, "Generator seed");
  gen->add_option("--start", synth.start, "First timestamp (epoch seconds)");
  gen->add_option("--format", synth_format, "Output format")->check(CLI::IsMember({"jsonl", "csv"}));
  gen->add_option("--out", synth_out, "Event output file")->required();
  gen->add_option("--truth", truth_out, "Ground-truth sidecar CSV");

  CLI11_PARSE(app, argc, argv);

  try {
    if (!labels.empty()) cfg.labels_path = labels;

    if (*run) {
      cfg.inputs = in.inputs;
      cfg.format = parse_format(in.format);
      cfg.strict = in.strict;
      cfg.out = out_dir;
      const auto summary = run_pipeline(cfg);
      std::cout << fmt::format("{} events, {} windows, selected {}\n", summary.events, summary.windows,
                               fmt::join(summary.selected, ","));
      return 0;
    }

    if (*gen) {
      synth.blocks = parse_blocks(blocks);
      const auto result = generate_stream(synth);
      std::ofstream out(synth_out, std::ios::binary);
      if (!out) throw std::runtime_error("cannot write " + synth_out);
      write_events(out, result.stream, parse_format(synth_format));
      if (!truth_out.empty()) {
        std::ofstream truth(truth_out, std::ios::binary);
        if (!truth) throw std::runtime_error("cannot write " + truth_out);
        write_truth(truth, result);
      }
      std::cout << fmt::format("{} events, {} users\n", result.stream.events.size(), result.users.size());
      return 0;
    }

    fs::create_directories(out_dir);

    if (*sel) {
      const auto partitions = read_partitions(partitions_dir);
      const auto s = write_selection(out_dir, partitions, cfg.selection);
      std::vector<int> ts;
      for (auto i : s.indices) ts.push_back(partitions[i].t());
      std::cout << fmt::format("selected {}\n", fmt::join(ts, ","));
      return 0;
    }

    const auto parsed = load(in);
    const auto series = build_series(parsed.stream, cfg.window);

    if (*snap) {
      write_windows(out_dir, series, true);
      std::cout << fmt::format("{} windows\n", series.networks.size());
      return 0;
    }
    if (*comm) {
      write_partitions(out_dir, detect_communities(series, cfg.ensemble));
      std::cout << fmt::format("{} partitions\n", series.networks.size());
      return 0;
    }
    if (*rep) {
      const auto partitions = read_partitions(partitions_dir);
      const fs::path selection_path =
          selected_file.empty() ? fs::path(partitions_dir) / "selected.json" : fs::path(selected_file);
      cfg.inputs = in.inputs;
      write_reports(out_dir, parsed.stream, series, partitions, read_selection(selection_path), cfg);
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "retnet: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
