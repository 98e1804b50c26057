#pragma once

#include <cstddef>
#include <functional>
#include <ostream>
#include <vector>

#include "retnet/community.hpp"

namespace retnet {

struct PartitionSimilarity {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  bool both_empty = false;  // f1 = 1 by convention
};

// Extended BCubed over the union of both node sets; a node missing from one
// partition counts as a singleton there. bcubed(p, q).precision == bcubed(q, p).recall.
PartitionSimilarity bcubed(const Partition& p, const Partition& q);

struct SelectionConfig {
  int k = 3;  // intermediate timepoints kept between the fixed endpoints
};

struct Selection {
  std::vector<std::size_t> indices;  // sorted, includes 0 and n
  std::size_t eliminations = 0;
};

// Similarity of two timeline positions (i < j), e.g. F1 between partitions.
using PairScore = std::function<double(std::size_t, std::size_t)>;

// Greedy top-down elimination over positions 0..n: repeatedly drops the interior
// position t maximizing score(prev, t) + score(t, next) among current neighbours,
// smallest t on ties, until k interior positions remain. Scores are requested
// only for pairs that are adjacent at some point.
Selection select_timepoints(std::size_t count, const PairScore& score, const SelectionConfig& cfg);
Selection select_timepoints(const std::vector<Partition>& partitions, const SelectionConfig& cfg);

// CSV "t_from,t_to,precision,recall,f1" for consecutive partitions.
void write_adjacent_similarity(std::ostream& out, const std::vector<Partition>& partitions);

}  // namespace retnet
