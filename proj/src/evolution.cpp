#include "retnet/evolution.hpp"

#include <map>
#include <stdexcept>
#include <string>
#include <unordered_map>

#include <fmt/format.h>

#include "retnet/parallel.hpp"

namespace retnet {

namespace {

struct PairHash {
  std::size_t operator()(const std::pair<std::size_t, std::size_t>& k) const {
    return std::hash<std::size_t>{}(k.first * 0x9E3779B97F4A7C15ull ^ k.second);
  }
};

}  // namespace

PartitionSimilarity bcubed(const Partition& p, const Partition& q) {
  PartitionSimilarity sim;
  const auto& pn = p.nodes();
  const auto& qn = q.nodes();
  if (pn.empty() && qn.empty()) {
    sim.precision = sim.recall = sim.f1 = 1.0;
    sim.both_empty = true;
    return sim;
  }

  // Cluster keys over the union; absent nodes get a fresh singleton key.
  std::vector<std::size_t> cp;
  std::vector<std::size_t> cq;
  std::size_t next_p = static_cast<std::size_t>(p.community_count());
  std::size_t next_q = static_cast<std::size_t>(q.community_count());
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < pn.size() || j < qn.size()) {
    if (j == qn.size() || (i < pn.size() && pn[i] < qn[j])) {
      cp.push_back(static_cast<std::size_t>(p.assignment()[i++]));
      cq.push_back(next_q++);
    } else if (i == pn.size() || qn[j] < pn[i]) {
      cp.push_back(next_p++);
      cq.push_back(static_cast<std::size_t>(q.assignment()[j++]));
    } else {
      cp.push_back(static_cast<std::size_t>(p.assignment()[i++]));
      cq.push_back(static_cast<std::size_t>(q.assignment()[j++]));
    }
  }

  std::vector<std::size_t> size_p(next_p, 0);
  std::vector<std::size_t> size_q(next_q, 0);
  std::unordered_map<std::pair<std::size_t, std::size_t>, std::size_t, PairHash> joint;
  for (std::size_t v = 0; v < cp.size(); ++v) {
    ++size_p[cp[v]];
    ++size_q[cq[v]];
    ++joint[{cp[v], cq[v]}];
  }

  double pre = 0.0;
  double rec = 0.0;
  for (std::size_t v = 0; v < cp.size(); ++v) {
    const auto overlap = static_cast<double>(joint[{cp[v], cq[v]}]);
    pre += overlap / static_cast<double>(size_p[cp[v]]);
    rec += overlap / static_cast<double>(size_q[cq[v]]);
  }
  const auto total = static_cast<double>(cp.size());
  sim.precision = pre / total;
  sim.recall = rec / total;
  sim.f1 = sim.precision + sim.recall > 0.0
               ? 2.0 * sim.precision * sim.recall / (sim.precision + sim.recall)
               : 0.0;
  return sim;
}

Selection select_timepoints(std::size_t count, const PairScore& score, const SelectionConfig& cfg) {
  if (count < 2) throw std::invalid_argument("timepoint selection needs at least two timepoints");
  const std::size_t n = count - 1;
  if (cfg.k < 0 || static_cast<std::size_t>(cfg.k) > n - 1) {
    throw std::invalid_argument(fmt::format("k={} out of range [0, {}]", cfg.k, n - 1));
  }

  std::map<std::pair<std::size_t, std::size_t>, double> cache;
  auto pair_score = [&](std::size_t a, std::size_t b) {
    auto [it, inserted] = cache.try_emplace({a, b}, 0.0);
    if (inserted) it->second = score(a, b);
    return it->second;
  };

  // Doubly linked timeline.
  std::vector<std::size_t> prev(count);
  std::vector<std::size_t> next(count);
  for (std::size_t t = 0; t < count; ++t) {
    prev[t] = t == 0 ? 0 : t - 1;
    next[t] = t + 1;
  }
  std::vector<bool> alive(count, true);

  Selection sel;
  const std::size_t steps = n - 1 - static_cast<std::size_t>(cfg.k);
  for (std::size_t step = 0; step < steps; ++step) {
    std::size_t victim = 0;
    double best = 0.0;
    for (std::size_t t = next[0]; t < n; t = next[t]) {
      const double s = pair_score(prev[t], t) + pair_score(t, next[t]);
      if (victim == 0 || s > best) {
        victim = t;
        best = s;
      }
    }
    alive[victim] = false;
    next[prev[victim]] = next[victim];
    prev[next[victim]] = prev[victim];
    ++sel.eliminations;
  }
  for (std::size_t t = 0; t < count; ++t) {
    if (alive[t]) sel.indices.push_back(t);
  }
  return sel;
}

Selection select_timepoints(const std::vector<Partition>& partitions, const SelectionConfig& cfg) {
  // Initial adjacent pairs are independent; precompute them in parallel.
  std::vector<double> adjacent(partitions.size() > 0 ? partitions.size() - 1 : 0);
  parallel_for(adjacent.size(),
               [&](std::size_t t) { adjacent[t] = bcubed(partitions[t + 1], partitions[t]).f1; });
  return select_timepoints(
      partitions.size(),
      [&](std::size_t a, std::size_t b) {
        if (b == a + 1) return adjacent[a];
        return bcubed(partitions[b], partitions[a]).f1;
      },
      cfg);
}

void write_adjacent_similarity(std::ostream& out, const std::vector<Partition>& partitions) {
  out << "t_from,t_to,precision,recall,f1\n";
  for (std::size_t t = 0; t + 1 < partitions.size(); ++t) {
    const auto s = bcubed(partitions[t + 1], partitions[t]);
    out << fmt::format("{},{},{:.4f},{:.4f},{:.4f}\n", partitions[t].t(), partitions[t + 1].t(), s.precision,
                       s.recall, s.f1);
  }
}

}  // namespace retnet
