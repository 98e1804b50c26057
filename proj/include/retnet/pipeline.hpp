#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "retnet/community.hpp"
#include "retnet/evolution.hpp"
#include "retnet/ingest.hpp"
#include "retnet/report.hpp"
#include "retnet/snapshot.hpp"

namespace retnet {

class PipelineError : public std::runtime_error {
 public:
  PipelineError(std::string stage, const std::string& cause)
      : std::runtime_error("stage " + stage + ": " + cause), stage_(std::move(stage)) {}
  const std::string& stage() const { return stage_; }

 private:
  std::string stage_;
};

struct PipelineConfig {
  std::vector<std::string> inputs;
  Format format = Format::Jsonl;
  bool strict = false;
  WindowConfig window;
  EnsembleConfig ensemble;
  SelectionConfig selection;
  std::size_t top_n = 7;
  double edge_threshold = 0.0;
  double confidence = 0.99;
  std::optional<std::string> labels_path;
  bool export_edges = false;
  std::filesystem::path out;
};

struct RunSummary {
  std::size_t events = 0;
  std::size_t windows = 0;
  std::vector<std::size_t> selected;
  std::string config_hash;
};

// 64-bit FNV-1a, hex encoded.
std::string fnv1a_hex(std::string_view data);

// Canonical JSON of the run configuration (output path excluded).
std::string canonical_config(const PipelineConfig& cfg);

ParseResult load_inputs(const std::vector<std::string>& inputs, Format format, bool strict);

// Stage writers shared by `run` and the individual subcommands. Each writes
// into `dir`, which must exist.
void write_windows(const std::filesystem::path& dir, const SnapshotSeries& series, bool with_edges);
std::vector<Partition> detect_communities(const SnapshotSeries& series, const EnsembleConfig& cfg);
void write_partitions(const std::filesystem::path& dir, const std::vector<Partition>& partitions);
std::vector<Partition> read_partitions(const std::filesystem::path& dir);
Selection write_selection(const std::filesystem::path& dir, const std::vector<Partition>& partitions,
                          const SelectionConfig& cfg);
std::vector<std::size_t> read_selection(const std::filesystem::path& file);
void write_reports(const std::filesystem::path& dir, const EventStream& stream, const SnapshotSeries& series,
                   const std::vector<Partition>& partitions, const std::vector<std::size_t>& selected,
                   const PipelineConfig& cfg);

// Full pipeline. Outputs are staged next to cfg.out and moved into place only on
// success; on failure nothing is left behind and a PipelineError names the stage.
RunSummary run_pipeline(const PipelineConfig& cfg);

}  // namespace retnet
