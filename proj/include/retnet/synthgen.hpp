#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "retnet/community.hpp"
#include "retnet/ingest.hpp"

namespace retnet {

struct BlockSpec {
  std::size_t user_count = 0;
  double hate_rate = 0.0;  // probability an original is unacceptable
};

// Moves one user (global index) to another block from `week` on.
struct DriftStep {
  std::size_t user = 0;
  int week = 0;
  std::size_t to_block = 0;
};

struct SynthConfig {
  std::vector<BlockSpec> blocks;
  double p_in = 0.3;   // weekly retweet propensity within a block, per ordered pair
  double p_out = 0.01; // between blocks
  int weeks = 30;
  int originals_per_week = 2;  // per user
  std::vector<DriftStep> drift;
  std::uint64_t seed = 0;
  Timestamp start = 0;

  void validate() const;
};

struct SynthResult {
  EventStream stream;
  std::vector<std::string> users;                 // index -> user id
  std::vector<std::vector<std::size_t>> membership;  // [week][user] -> block
  std::vector<double> hate_rates;                 // per block

  // Planted partition for one week, over all users.
  Partition truth(int week) const;
};

// Discrete-time stochastic block model over retweet events. Each week every
// user posts `originals_per_week` originals (unacceptable with its block's hate
// rate), and for every ordered pair (A, B) B retweets one of A's originals of
// that week with probability p_in or p_out. Deterministic given the seed.
SynthResult generate_stream(const SynthConfig& cfg);

// Sidecar CSV "user_id,week,block".
void write_truth(std::ostream& out, const SynthResult& r);

}  // namespace retnet
