#pragma once

#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "retnet/snapshot.hpp"

namespace retnet {

// Assignment of every node to one community. Ids are dense, 0 is the largest
// community, and equal-size communities are ordered by their smallest member id.
class Partition {
 public:
  Partition() = default;

  // `labels[i]` is an arbitrary community key for `nodes[i]`. Nodes need not be
  // sorted but must be unique. Keys are renumbered into the canonical scheme.
  static Partition from_labels(std::vector<std::string> nodes, const std::vector<std::int64_t>& labels, int t = 0);
  static Partition from_groups(const std::vector<std::vector<std::string>>& groups, int t = 0);

  int t() const { return t_; }
  void set_t(int t) { t_ = t; }

  const std::vector<std::string>& nodes() const { return nodes_; }
  const std::vector<int>& assignment() const { return community_; }
  std::size_t size() const { return nodes_.size(); }
  bool empty() const { return nodes_.empty(); }
  int community_count() const { return static_cast<int>(sizes_.size()); }
  std::size_t community_size(int c) const { return sizes_.at(static_cast<std::size_t>(c)); }

  std::optional<int> community_of(std::string_view node) const;
  // Member lists per community; each sorted by node id.
  std::vector<std::vector<std::string>> groups() const;

  friend bool operator==(const Partition& a, const Partition& b) {
    return a.nodes_ == b.nodes_ && a.community_ == b.community_;
  }

 private:
  int t_ = 0;
  std::vector<std::string> nodes_;  // sorted
  std::vector<int> community_;      // parallel to nodes_
  std::vector<std::size_t> sizes_;
};

struct EnsembleConfig {
  int trials = 100;
  double threshold = 0.9;
  std::uint64_t base_seed = 0;

  void validate() const;
};

// Weighted Newman-Girvan modularity at resolution 1. Zero for an edgeless graph.
// Throws std::invalid_argument if the partition's node set differs from the graph's.
double modularity(const UndirectedNetwork& g, const Partition& p);

// Two-phase Louvain. Randomness enters only through the node visit order.
// Isolated nodes are returned as singleton communities.
Partition louvain(const UndirectedNetwork& g, std::uint64_t seed);

// Consensus over cfg.trials Louvain runs (seeds base_seed + i): nodes co-clustered
// in at least `threshold` of the trials are linked, and communities are the
// connected components of those links.
Partition ensemble_louvain(const UndirectedNetwork& g, const EnsembleConfig& cfg);

// CSV "node_id,community_id", rows in node order.
void write_partition(std::ostream& out, const Partition& p);
Partition read_partition(std::istream& in, int t = 0);

}  // namespace retnet
