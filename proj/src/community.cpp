#include "retnet/community.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <stdexcept>
#include <unordered_map>

#include "retnet/parallel.hpp"
#include "retnet/random.hpp"

namespace retnet {

// ---------------------------------------------------------------------------
// Partition

Partition Partition::from_labels(std::vector<std::string> nodes, const std::vector<std::int64_t>& labels, int t) {
  if (nodes.size() != labels.size()) throw std::invalid_argument("node and label counts differ");

  std::vector<std::size_t> order(nodes.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return nodes[a] < nodes[b]; });

  Partition p;
  p.t_ = t;
  p.nodes_.reserve(nodes.size());
  std::vector<std::int64_t> sorted_labels;
  sorted_labels.reserve(nodes.size());
  for (auto i : order) {
    if (!p.nodes_.empty() && p.nodes_.back() == nodes[i]) throw std::invalid_argument("duplicate node: " + nodes[i]);
    p.nodes_.push_back(std::move(nodes[i]));
    sorted_labels.push_back(labels[i]);
  }

  // Group keys by first occurrence (= smallest member, since nodes are sorted).
  std::unordered_map<std::int64_t, std::size_t> group_of;
  std::vector<std::size_t> group_size;
  std::vector<std::size_t> member_group(sorted_labels.size());
  for (std::size_t i = 0; i < sorted_labels.size(); ++i) {
    auto [it, inserted] = group_of.try_emplace(sorted_labels[i], group_size.size());
    if (inserted) group_size.push_back(0);
    ++group_size[it->second];
    member_group[i] = it->second;
  }

  std::vector<std::size_t> rank(group_size.size());
  std::iota(rank.begin(), rank.end(), 0);
  std::stable_sort(rank.begin(), rank.end(),
                   [&](std::size_t a, std::size_t b) { return group_size[a] > group_size[b]; });
  std::vector<int> new_id(group_size.size());
  p.sizes_.resize(group_size.size());
  for (std::size_t r = 0; r < rank.size(); ++r) {
    new_id[rank[r]] = static_cast<int>(r);
    p.sizes_[r] = group_size[rank[r]];
  }
  p.community_.resize(p.nodes_.size());
  for (std::size_t i = 0; i < p.nodes_.size(); ++i) p.community_[i] = new_id[member_group[i]];
  return p;
}

Partition Partition::from_groups(const std::vector<std::vector<std::string>>& groups, int t) {
  std::vector<std::string> nodes;
  std::vector<std::int64_t> labels;
  for (std::size_t g = 0; g < groups.size(); ++g) {
    for (const auto& n : groups[g]) {
      nodes.push_back(n);
      labels.push_back(static_cast<std::int64_t>(g));
    }
  }
  return from_labels(std::move(nodes), labels, t);
}

std::optional<int> Partition::community_of(std::string_view node) const {
  auto it = std::lower_bound(nodes_.begin(), nodes_.end(), node);
  if (it == nodes_.end() || *it != node) return std::nullopt;
  return community_[static_cast<std::size_t>(it - nodes_.begin())];
}

std::vector<std::vector<std::string>> Partition::groups() const {
  std::vector<std::vector<std::string>> out(sizes_.size());
  for (std::size_t i = 0; i < nodes_.size(); ++i) out[static_cast<std::size_t>(community_[i])].push_back(nodes_[i]);
  return out;
}

void EnsembleConfig::validate() const {
  if (trials < 1) throw std::invalid_argument("ensemble needs at least one trial");
  if (!(threshold > 0.0 && threshold <= 1.0)) throw std::invalid_argument("threshold must be in (0, 1]");
}

// ---------------------------------------------------------------------------
// Modularity

namespace {

void require_same_nodes(const UndirectedNetwork& g, const Partition& p) {
  if (g.nodes != p.nodes()) throw std::invalid_argument("partition does not cover exactly the network's nodes");
}

}  // namespace

double modularity(const UndirectedNetwork& g, const Partition& p) {
  require_same_nodes(g, p);
  const double m = g.total_weight();
  if (m <= 0.0) return 0.0;

  const auto& comm = p.assignment();
  std::vector<double> internal(static_cast<std::size_t>(p.community_count()), 0.0);
  std::vector<double> cut(internal.size(), 0.0);
  for (const auto& e : g.edges) {
    const auto cu = static_cast<std::size_t>(comm[e.u]);
    const auto cv = static_cast<std::size_t>(comm[e.v]);
    if (cu == cv) {
      internal[cu] += e.weight;
    } else {
      cut[cu] += e.weight;
      cut[cv] += e.weight;
    }
  }
  // degree = 2 internal + cut, so a single community gives exactly 1 - 1
  double q = 0.0;
  for (std::size_t c = 0; c < internal.size(); ++c) {
    const double frac = (2.0 * internal[c] + cut[c]) / (2.0 * m);
    q += internal[c] / m - frac * frac;
  }
  return q;
}

// ---------------------------------------------------------------------------
// Louvain

namespace {

// One aggregation level: undirected weighted graph with self-loops.
struct LevelGraph {
  std::size_t n = 0;
  std::vector<std::vector<std::pair<std::uint32_t, double>>> adj;  // no self entries
  std::vector<double> self_loop;
  std::vector<double> degree;  // includes 2 * self_loop
  double two_m = 0.0;

  static LevelGraph from_edges(std::size_t n, const std::vector<UndirectedEdge>& edges,
                               const std::vector<double>& self_loop) {
    LevelGraph g;
    g.n = n;
    g.adj.resize(n);
    g.self_loop = self_loop;
    g.degree.assign(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) g.degree[i] = 2.0 * self_loop[i];
    for (const auto& e : edges) {
      g.adj[e.u].emplace_back(e.v, e.weight);
      g.adj[e.v].emplace_back(e.u, e.weight);
      g.degree[e.u] += e.weight;
      g.degree[e.v] += e.weight;
    }
    for (double d : g.degree) g.two_m += d;
    return g;
  }
};

// Local-moving phase. Returns true if any node changed community.
bool move_nodes(const LevelGraph& g, std::vector<std::uint32_t>& comm, Rng& rng) {
  std::vector<double> tot(g.n, 0.0);
  for (std::size_t i = 0; i < g.n; ++i) tot[comm[i]] += g.degree[i];

  std::vector<std::uint32_t> order(g.n);
  std::iota(order.begin(), order.end(), 0u);
  rng.shuffle(order);

  std::vector<double> link(g.n, 0.0);
  std::vector<std::uint32_t> touched;
  bool any_move = false;
  bool moved = true;
  while (moved) {
    moved = false;
    for (auto i : order) {
      const auto own = comm[i];
      const double k = g.degree[i];
      touched.clear();
      for (const auto& [j, w] : g.adj[i]) {
        const auto c = comm[j];
        if (link[c] == 0.0) touched.push_back(c);
        link[c] += w;
      }
      tot[own] -= k;

      const double stay_gain = link[own] - tot[own] * k / g.two_m;
      std::sort(touched.begin(), touched.end());
      // Best other community; strict > keeps the lowest id on ties.
      std::uint32_t best = own;
      double best_gain = 0.0;
      bool found = false;
      for (auto c : touched) {
        if (c == own) continue;
        const double gain = link[c] - tot[c] * k / g.two_m;
        if (!found || gain > best_gain) {
          best = c;
          best_gain = gain;
          found = true;
        }
      }
      if (!found || !(best_gain > stay_gain + 1e-10 * k)) best = own;

      tot[best] += k;
      if (best != own) {
        comm[i] = best;
        moved = true;
        any_move = true;
      }
      for (auto c : touched) link[c] = 0.0;
    }
  }
  return any_move;
}

// Renumbers communities to 0..C-1 in order of first appearance. Returns C.
std::uint32_t compact(std::vector<std::uint32_t>& comm) {
  std::vector<std::int64_t> remap(comm.size(), -1);
  std::uint32_t next = 0;
  for (auto& c : comm) {
    if (remap[c] < 0) remap[c] = next++;
    c = static_cast<std::uint32_t>(remap[c]);
  }
  return next;
}

LevelGraph aggregate(const LevelGraph& g, const std::vector<std::uint32_t>& comm, std::uint32_t count) {
  std::vector<double> self(count, 0.0);
  std::map<std::pair<std::uint32_t, std::uint32_t>, double> between;
  for (std::uint32_t i = 0; i < g.n; ++i) {
    self[comm[i]] += g.self_loop[i];
    for (const auto& [j, w] : g.adj[i]) {
      if (j <= i) continue;
      const auto a = comm[i];
      const auto b = comm[j];
      if (a == b) {
        self[a] += w;
      } else {
        between[{std::min(a, b), std::max(a, b)}] += w;
      }
    }
  }
  std::vector<UndirectedEdge> edges;
  edges.reserve(between.size());
  for (const auto& [key, w] : between) edges.push_back({key.first, key.second, w});
  return LevelGraph::from_edges(count, edges, self);
}

// Louvain on the non-isolated core. Returns a community index per core node.
std::vector<std::uint32_t> louvain_core(const LevelGraph& base, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<std::uint32_t> membership(base.n);
  std::iota(membership.begin(), membership.end(), 0u);

  LevelGraph level = base;
  while (true) {
    std::vector<std::uint32_t> comm(level.n);
    std::iota(comm.begin(), comm.end(), 0u);
    const bool changed = move_nodes(level, comm, rng);
    const auto count = compact(comm);
    for (auto& m : membership) m = comm[m];
    if (!changed || count == level.n) break;
    level = aggregate(level, comm, count);
  }
  return membership;
}

struct Core {
  std::vector<std::uint32_t> to_full;  // core index -> network index
  LevelGraph graph;
};

Core extract_core(const UndirectedNetwork& g) {
  Core core;
  std::vector<std::int64_t> to_core(g.nodes.size(), -1);
  std::vector<bool> active(g.nodes.size(), false);
  for (const auto& e : g.edges) {
    if (e.weight > 0.0) active[e.u] = active[e.v] = true;
  }
  for (std::uint32_t i = 0; i < g.nodes.size(); ++i) {
    if (active[i]) {
      to_core[i] = static_cast<std::int64_t>(core.to_full.size());
      core.to_full.push_back(i);
    }
  }
  std::vector<UndirectedEdge> edges;
  std::vector<double> self(core.to_full.size(), 0.0);
  for (const auto& e : g.edges) {
    if (e.weight <= 0.0) continue;
    const auto u = static_cast<std::uint32_t>(to_core[e.u]);
    const auto v = static_cast<std::uint32_t>(to_core[e.v]);
    if (u == v) {
      self[u] += e.weight;
    } else {
      edges.push_back({std::min(u, v), std::max(u, v), e.weight});
    }
  }
  core.graph = LevelGraph::from_edges(core.to_full.size(), edges, self);
  return core;
}

// Core labels are shifted past the isolated-node singleton labels.
Partition assemble(const UndirectedNetwork& g, const Core& core, const std::vector<std::uint32_t>& core_labels) {
  std::vector<std::int64_t> labels(g.nodes.size());
  for (std::size_t i = 0; i < labels.size(); ++i) labels[i] = -1 - static_cast<std::int64_t>(i);
  for (std::size_t c = 0; c < core.to_full.size(); ++c) labels[core.to_full[c]] = core_labels[c];
  return Partition::from_labels(g.nodes, labels, g.t);
}

struct DisjointSets {
  std::vector<std::uint32_t> parent;
  explicit DisjointSets(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0u); }
  std::uint32_t find(std::uint32_t x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  }
  void unite(std::uint32_t a, std::uint32_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
};

}  // namespace

Partition louvain(const UndirectedNetwork& g, std::uint64_t seed) {
  const auto core = extract_core(g);
  return assemble(g, core, louvain_core(core.graph, seed));
}

Partition ensemble_louvain(const UndirectedNetwork& g, const EnsembleConfig& cfg) {
  cfg.validate();
  const auto core = extract_core(g);
  const std::size_t n = core.to_full.size();
  const auto trials = static_cast<std::size_t>(cfg.trials);

  std::vector<std::vector<std::uint32_t>> runs(trials);
  parallel_for(trials, [&](std::size_t i) { runs[i] = louvain_core(core.graph, cfg.base_seed + i); });

  // members[trial][community] -> core nodes
  std::vector<std::vector<std::vector<std::uint32_t>>> members(trials);
  for (std::size_t r = 0; r < trials; ++r) {
    const auto count = n == 0 ? 0 : *std::max_element(runs[r].begin(), runs[r].end()) + 1;
    members[r].resize(count);
    for (std::uint32_t v = 0; v < n; ++v) members[r][runs[r][v]].push_back(v);
  }

  const double needed = cfg.threshold * static_cast<double>(trials) - 1e-9;
  DisjointSets sets(n);
  std::vector<std::uint32_t> together(n, 0);
  std::vector<std::uint32_t> touched;
  for (std::uint32_t u = 0; u < n; ++u) {
    touched.clear();
    for (std::size_t r = 0; r < trials; ++r) {
      for (auto v : members[r][runs[r][u]]) {
        if (v <= u) continue;
        if (together[v]++ == 0) touched.push_back(v);
      }
    }
    for (auto v : touched) {
      if (static_cast<double>(together[v]) >= needed) sets.unite(u, v);
      together[v] = 0;
    }
  }

  std::vector<std::uint32_t> labels(n);
  for (std::uint32_t v = 0; v < n; ++v) labels[v] = sets.find(v);
  return assemble(g, core, labels);
}

// ---------------------------------------------------------------------------
// CSV

void write_partition(std::ostream& out, const Partition& p) {
  out << "node_id,community_id\n";
  for (std::size_t i = 0; i < p.size(); ++i) out << p.nodes()[i] << ',' << p.assignment()[i] << '\n';
}

Partition read_partition(std::istream& in, int t) {
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("partition CSV is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "node_id,community_id") throw std::runtime_error("partition CSV header must be node_id,community_id");

  std::vector<std::string> nodes;
  std::vector<std::int64_t> labels;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto comma = line.rfind(',');
    if (comma == std::string::npos || comma == 0) {
      throw std::runtime_error("partition CSV line " + std::to_string(lineno) + ": expected node_id,community_id");
    }
    try {
      std::size_t pos = 0;
      const auto id_text = line.substr(comma + 1);
      labels.push_back(std::stoll(id_text, &pos));
      if (pos != id_text.size()) throw std::invalid_argument("trailing characters");
    } catch (const std::logic_error&) {
      throw std::runtime_error("partition CSV line " + std::to_string(lineno) + ": bad community id");
    }
    nodes.push_back(line.substr(0, comma));
  }
  return Partition::from_labels(std::move(nodes), labels, t);
}

}  // namespace retnet
