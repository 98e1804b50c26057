#pragma once

#include <cstddef>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "retnet/community.hpp"
#include "retnet/snapshot.hpp"

namespace retnet {

// Retweet influence of one community. Mass flows author -> retweeter, so a
// community's out-mass measures how much its members are retweeted.
struct InfluenceSummary {
  int community = 0;
  std::size_t size = 0;
  std::vector<double> out_mass;  // W[c][j] for every community j
  double total = 0.0;            // I
  double internal = 0.0;         // I_int
  std::vector<double> external;  // I_ext(c -> j); zero at j == c

  double internal_mass() const { return out_mass.at(static_cast<std::size_t>(community)); }
  double total_mass() const;
};

// One summary per community, indexed by community id.
std::vector<InfluenceSummary> community_influence(const RetweetNetwork& g, const Partition& p);

// Largest h such that at least h tweets have count >= h.
std::size_t retweet_hindex(std::span<const std::size_t> retweet_counts);

// Mean-absolute-difference Gini with population normalization.
// Throws std::invalid_argument for empty input, negative values, or all zeros.
double gini(std::span<const double> values);

struct UserInfluence {
  std::string user;
  std::size_t hindex = 0;
  std::size_t originals_posted = 0;
  std::size_t unacceptable_posted = 0;
  std::size_t retweets_received = 0;
  std::optional<double> unacceptable_fraction;  // absent without originals
};

// Per-user h-index over originals posted in [begin, end] and their non-self
// retweets inside the same period (raw counts, no decay). Sorted by user id.
std::vector<UserInfluence> user_influence(const EventStream& s, Timestamp begin, Timestamp end);

// CSV "t,from_community,to_community,W,I_component"; the diagonal carries I_int.
void write_influence_matrix(std::ostream& out, int t, const std::vector<InfluenceSummary>& summaries,
                            bool header = true);

}  // namespace retnet
