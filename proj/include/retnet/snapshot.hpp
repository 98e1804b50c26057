#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "retnet/ingest.hpp"

namespace retnet {

struct WindowConfig {
  int window_weeks = 24;
  int slide_weeks = 1;
  double half_life_weeks = 4.0;
  // Default to the stream's own bounds.
  std::optional<Timestamp> stream_start;
  std::optional<Timestamp> stream_end;

  void validate() const;
};

// 0.5^(age / half_life). Throws std::invalid_argument for negative age or non-positive half-life.
double decay_weight(double age_weeks, double half_life_weeks);

// Per-user counts over the originals and retweets that fall inside one window.
struct NodeTally {
  std::size_t originals_posted = 0;
  std::size_t unacceptable_posted = 0;
  std::size_t retweeted_originals = 0;  // posted in-window and retweeted in-window by someone else
  std::size_t unacceptable_retweeted_originals = 0;
  std::size_t retweets_made = 0;
  std::size_t unacceptable_retweets_made = 0;

  friend bool operator==(const NodeTally&, const NodeTally&) = default;
};

struct DirectedEdge {
  std::uint32_t src = 0;  // tweet author
  std::uint32_t dst = 0;  // retweeter
  double weight = 0.0;
};

struct RetweetNetwork {
  int t = 0;
  Timestamp window_begin = 0;  // inclusive lower bound actually applied
  Timestamp window_end = 0;    // inclusive upper bound
  std::vector<std::string> nodes;  // sorted, unique
  std::vector<NodeTally> tallies;  // parallel to nodes
  std::vector<DirectedEdge> edges;  // sorted by (src, dst), weights > 0, no self-loops
  std::size_t retweet_events = 0;  // non-self retweets inside the window

  std::optional<std::uint32_t> index_of(std::string_view user) const;
  double total_weight() const;
};

struct UndirectedEdge {
  std::uint32_t u = 0;  // u < v
  std::uint32_t v = 0;
  double weight = 0.0;
};

struct UndirectedNetwork {
  int t = 0;
  std::vector<std::string> nodes;
  std::vector<UndirectedEdge> edges;  // sorted by (u, v)

  double total_weight() const;
  std::vector<double> degrees() const;
};

// Window end timestamps for a stream spanning [start, end], anchored at start.
// The span is rounded up to whole weeks. A span shorter than one window yields a
// single clipped window ending at the rounded end, with `clipped` set.
struct WindowPlan {
  std::vector<Timestamp> ends;
  Timestamp start = 0;
  bool clipped = false;
};
WindowPlan plan_windows(Timestamp start, Timestamp end, const WindowConfig& cfg);

bool in_window(Timestamp ts, Timestamp t_end, Timestamp stream_start, const WindowConfig& cfg);

RetweetNetwork build_snapshot(const EventStream& s, Timestamp t_end, const WindowConfig& cfg, int t = 0);

struct SnapshotSeries {
  std::vector<RetweetNetwork> networks;
  bool clipped = false;  // stream shorter than one window
};
SnapshotSeries snapshot_series(const EventStream& s, const WindowConfig& cfg);

UndirectedNetwork project_undirected(const RetweetNetwork& g);

// CSV "src,dst,weight"; weights with 9 decimals, rows in (src, dst) order.
void write_edge_list(std::ostream& out, const RetweetNetwork& g);

}  // namespace retnet
