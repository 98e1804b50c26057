#include "retnet/snapshot.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <stdexcept>
#include <unordered_set>

#include <fmt/format.h>

#include "retnet/parallel.hpp"

namespace retnet {

void WindowConfig::validate() const {
  if (window_weeks <= 0) throw std::invalid_argument("window length must be positive");
  if (slide_weeks <= 0) throw std::invalid_argument("slide must be positive");
  if (!(half_life_weeks > 0.0)) throw std::invalid_argument("half-life must be positive");
  if (stream_start && stream_end && *stream_end < *stream_start) {
    throw std::invalid_argument("stream end precedes stream start");
  }
}

double decay_weight(double age_weeks, double half_life_weeks) {
  if (!(age_weeks >= 0.0)) throw std::invalid_argument("negative age: event lies after the window end");
  if (!(half_life_weeks > 0.0)) throw std::invalid_argument("half-life must be positive");
  return std::exp2(-age_weeks / half_life_weeks);
}

std::optional<std::uint32_t> RetweetNetwork::index_of(std::string_view user) const {
  auto it = std::lower_bound(nodes.begin(), nodes.end(), user);
  if (it == nodes.end() || *it != user) return std::nullopt;
  return static_cast<std::uint32_t>(it - nodes.begin());
}

double RetweetNetwork::total_weight() const {
  double sum = 0.0;
  for (const auto& e : edges) sum += e.weight;
  return sum;
}

double UndirectedNetwork::total_weight() const {
  double sum = 0.0;
  for (const auto& e : edges) sum += e.weight;
  return sum;
}

std::vector<double> UndirectedNetwork::degrees() const {
  std::vector<double> deg(nodes.size(), 0.0);
  for (const auto& e : edges) {
    deg[e.u] += e.weight;
    deg[e.v] += e.weight;
  }
  return deg;
}

WindowPlan plan_windows(Timestamp start, Timestamp end, const WindowConfig& cfg) {
  cfg.validate();
  if (end < start) throw std::invalid_argument("stream end precedes stream start");
  const Timestamp length = Timestamp{cfg.window_weeks} * kSecondsPerWeek;
  const Timestamp slide = Timestamp{cfg.slide_weeks} * kSecondsPerWeek;
  const Timestamp weeks = (end - start + kSecondsPerWeek - 1) / kSecondsPerWeek;
  const Timestamp span = weeks * kSecondsPerWeek;

  WindowPlan plan;
  plan.start = start;
  if (span < length) {
    plan.clipped = true;
    plan.ends.push_back(start + span);
    return plan;
  }
  const Timestamp count = (span - length) / slide + 1;
  plan.ends.reserve(static_cast<std::size_t>(count));
  for (Timestamp i = 0; i < count; ++i) plan.ends.push_back(start + length + i * slide);
  return plan;
}

bool in_window(Timestamp ts, Timestamp t_end, Timestamp stream_start, const WindowConfig& cfg) {
  if (ts > t_end) return false;
  const Timestamp lower = t_end - Timestamp{cfg.window_weeks} * kSecondsPerWeek;
  if (lower <= stream_start) return ts >= stream_start;
  return ts > lower;
}

RetweetNetwork build_snapshot(const EventStream& s, Timestamp t_end, const WindowConfig& cfg, int t) {
  cfg.validate();
  const Timestamp stream_start = cfg.stream_start.value_or(s.start);
  const Timestamp lower = t_end - Timestamp{cfg.window_weeks} * kSecondsPerWeek;
  const Timestamp first_ts = lower <= stream_start ? stream_start : lower + 1;

  auto by_ts = [](const TweetEvent& e, Timestamp v) { return e.timestamp < v; };
  auto begin = std::lower_bound(s.events.begin(), s.events.end(), first_ts, by_ts);
  auto end = std::lower_bound(begin, s.events.end(), t_end + 1, by_ts);

  RetweetNetwork g;
  g.t = t;
  g.window_begin = first_ts;
  g.window_end = t_end;

  std::set<std::string_view> users;
  std::unordered_set<std::string_view> retweeted_ids;
  for (auto it = begin; it != end; ++it) {
    if (it->is_retweet()) {
      if (it->is_self_retweet()) continue;
      users.insert(it->author_id);
      users.insert(it->retweet_of->original_author_id);
      retweeted_ids.insert(it->retweet_of->original_tweet_id);
    } else {
      users.insert(it->author_id);
    }
  }
  g.nodes.assign(users.begin(), users.end());
  g.tallies.assign(g.nodes.size(), NodeTally{});

  std::map<std::pair<std::uint32_t, std::uint32_t>, double> mass;
  for (auto it = begin; it != end; ++it) {
    if (it->is_retweet()) {
      if (it->is_self_retweet()) continue;
      const auto src = *g.index_of(it->retweet_of->original_author_id);
      const auto dst = *g.index_of(it->author_id);
      const double age = static_cast<double>(t_end - it->timestamp) / static_cast<double>(kSecondsPerWeek);
      mass[{src, dst}] += decay_weight(age, cfg.half_life_weeks);
      ++g.retweet_events;
      auto& tally = g.tallies[dst];
      ++tally.retweets_made;
      if (is_unacceptable(it->label)) ++tally.unacceptable_retweets_made;
    } else {
      auto& tally = g.tallies[*g.index_of(it->author_id)];
      const bool unacceptable = is_unacceptable(it->label);
      ++tally.originals_posted;
      if (unacceptable) ++tally.unacceptable_posted;
      if (retweeted_ids.contains(it->tweet_id)) {
        ++tally.retweeted_originals;
        if (unacceptable) ++tally.unacceptable_retweeted_originals;
      }
    }
  }

  g.edges.reserve(mass.size());
  for (const auto& [key, w] : mass) {
    if (w > 0.0) g.edges.push_back({key.first, key.second, w});
  }
  return g;
}

SnapshotSeries snapshot_series(const EventStream& s, const WindowConfig& cfg) {
  const Timestamp start = cfg.stream_start.value_or(s.start);
  const Timestamp end = cfg.stream_end.value_or(s.end);
  const auto plan = plan_windows(start, end, cfg);

  WindowConfig anchored = cfg;
  anchored.stream_start = start;

  SnapshotSeries series;
  series.clipped = plan.clipped;
  series.networks.resize(plan.ends.size());
  parallel_for(plan.ends.size(), [&](std::size_t i) {
    series.networks[i] = build_snapshot(s, plan.ends[i], anchored, static_cast<int>(i));
  });
  return series;
}

UndirectedNetwork project_undirected(const RetweetNetwork& g) {
  UndirectedNetwork u;
  u.t = g.t;
  u.nodes = g.nodes;
  std::map<std::pair<std::uint32_t, std::uint32_t>, double> mass;
  for (const auto& e : g.edges) {
    mass[{std::min(e.src, e.dst), std::max(e.src, e.dst)}] += e.weight;
  }
  u.edges.reserve(mass.size());
  for (const auto& [key, w] : mass) u.edges.push_back({key.first, key.second, w});
  return u;
}

void write_edge_list(std::ostream& out, const RetweetNetwork& g) {
  out << "src,dst,weight\n";
  for (const auto& e : g.edges) {
    out << fmt::format("{},{},{:.9f}\n", g.nodes[e.src], g.nodes[e.dst], e.weight);
  }
}

}  // namespace retnet
