#pragma once

#include <cstddef>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "retnet/community.hpp"
#include "retnet/influence.hpp"
#include "retnet/snapshot.hpp"
#include "retnet/stats.hpp"

namespace retnet {

inline constexpr int kSmallCommunity = -1;  // pooled remainder outside the top N

// One community (or the pooled "Small" remainder) at one timepoint. Shares are
// fractions of the window totals and are absent when the total is zero.
struct ShareRow {
  int community = kSmallCommunity;
  std::size_t size = 0;
  std::size_t communities = 1;  // > 1 only for the pooled row
  std::size_t originals = 0;
  std::size_t unacceptable = 0;
  std::size_t retweeted_originals = 0;
  std::size_t unacceptable_retweets = 0;  // retweets made of unacceptable tweets
  double out_mass = 0.0;
  std::optional<double> unacceptable_fraction;
  std::optional<double> unacceptable_share;
  std::optional<double> retweeted_share;
  std::optional<double> unacceptable_retweet_share;
  std::optional<double> influence_share;
  double size_share = 0.0;
  std::vector<std::string> top_members;  // highest retweet h-index first

  std::string name() const;
};

struct CommunityReport {
  int t = 0;
  std::size_t nodes = 0;
  std::size_t originals = 0;
  std::size_t unacceptable = 0;
  std::size_t retweeted_originals = 0;
  std::size_t unacceptable_retweeted_originals = 0;
  std::size_t retweets = 0;
  std::size_t unacceptable_retweets = 0;
  double mass = 0.0;
  std::vector<ShareRow> rows;  // top-N by community id, then "Small" if any

  std::optional<double> unacceptable_fraction() const;            // over all originals posted
  std::optional<double> retweeted_unacceptable_fraction() const;  // over retweeted originals
};

struct ReportOptions {
  std::size_t top_n = 7;
  std::size_t top_members = 5;
};

// Aggregates node tallies per community. `users` (optional) supplies h-indices
// for the top-member lists. Partition must cover exactly the network's nodes.
CommunityReport community_hate_shares(const RetweetNetwork& g, const Partition& p, const ReportOptions& opts,
                                      std::span<const UserInfluence> users = {});

// Human-assigned display names keyed by (timepoint, community id).
using CommunityLabels = std::map<std::pair<int, int>, std::string>;

// CSV "t,community_id,name".
CommunityLabels read_labels(std::istream& in);

struct MetaNode {
  int t = 0;
  int community = 0;
  std::size_t size = 0;
  std::optional<double> unacceptable_fraction;
  std::string name;

  std::string key() const;
};

struct MetaEdge {
  int t = 0;
  int from = 0;
  int to = 0;
  double weight = 0.0;  // I_ext(from -> to)
};

struct MetaNetwork {
  std::vector<MetaNode> nodes;  // ordered by (t, community)
  std::vector<MetaEdge> edges;  // ordered by (t, from, to)
};

struct Timepoint {
  int t = 0;
  std::vector<InfluenceSummary> influence;
  CommunityReport report;
};

// Top-N communities per timepoint and external-influence edges strictly above
// the threshold between them.
MetaNetwork meta_network(std::span<const Timepoint> timepoints, std::size_t top_n, double edge_threshold,
                         const CommunityLabels& labels = {});

void write_dot(std::ostream& out, const MetaNetwork& m);
void write_json(std::ostream& out, const MetaNetwork& m);

// Average shares across timepoints, compared by Cohen's h.
struct CommunityComparison {
  std::string name;
  std::size_t timepoints = 0;
  std::optional<double> unacceptable_share;
  std::optional<double> unacceptable_retweet_share;
  std::optional<double> influence_share;
  double size_share = 0.0;
  std::optional<EffectSize> tweets_vs_size;
  std::optional<EffectSize> retweets_vs_size;
  std::optional<EffectSize> influence_vs_size;
  std::optional<EffectSize> tweets_vs_influence;
};

// Groups top-N rows by label when one exists for (t, community), otherwise
// each (t, community) is its own group.
std::vector<CommunityComparison> compare_communities(std::span<const CommunityReport> reports,
                                                     const CommunityLabels& labels);

// Originals by (retweeted by someone else anywhere in the stream) x (acceptable).
ContingencyTable retweet_contingency(const EventStream& s);

void write_shares_csv(std::ostream& out, std::span<const CommunityReport> reports);
void write_comparison_csv(std::ostream& out, std::span<const CommunityComparison> rows);

}  // namespace retnet
