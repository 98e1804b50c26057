#include "retnet/influence.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <stdexcept>
#include <unordered_map>

#include <fmt/format.h>

namespace retnet {

double InfluenceSummary::total_mass() const {
  double sum = 0.0;
  for (double w : out_mass) sum += w;
  return sum;
}

std::vector<InfluenceSummary> community_influence(const RetweetNetwork& g, const Partition& p) {
  if (g.nodes != p.nodes()) throw std::invalid_argument("partition does not cover exactly the network's nodes");
  const auto count = static_cast<std::size_t>(p.community_count());
  const auto& comm = p.assignment();

  std::vector<std::vector<double>> w(count, std::vector<double>(count, 0.0));
  for (const auto& e : g.edges) {
    w[static_cast<std::size_t>(comm[e.src])][static_cast<std::size_t>(comm[e.dst])] += e.weight;
  }

  std::vector<InfluenceSummary> out(count);
  for (std::size_t c = 0; c < count; ++c) {
    auto& s = out[c];
    s.community = static_cast<int>(c);
    s.size = p.community_size(static_cast<int>(c));
    s.out_mass = std::move(w[c]);
    const auto size = static_cast<double>(s.size);
    s.external.assign(count, 0.0);
    for (std::size_t j = 0; j < count; ++j) {
      if (j != c) s.external[j] = s.out_mass[j] / size;
    }
    s.internal = s.out_mass[c] / size;
    s.total = s.total_mass() / size;
  }
  return out;
}

std::size_t retweet_hindex(std::span<const std::size_t> retweet_counts) {
  std::vector<std::size_t> sorted(retweet_counts.begin(), retweet_counts.end());
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  std::size_t h = 0;
  while (h < sorted.size() && sorted[h] >= h + 1) ++h;
  return h;
}

double gini(std::span<const double> values) {
  if (values.empty()) throw std::invalid_argument("gini of an empty sample");
  double sum = 0.0;
  for (double v : values) {
    if (!(v >= 0.0)) throw std::invalid_argument("gini requires non-negative values");
    sum += v;
  }
  if (sum <= 0.0) throw std::invalid_argument("gini undefined for an all-zero sample");

  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  // sum_i sum_j |x_i - x_j| = 2 * sum_i (2i - n - 1) x_(i), i = 1..n
  const auto n = static_cast<double>(sorted.size());
  double weighted = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    weighted += (2.0 * static_cast<double>(i + 1) - n - 1.0) * sorted[i];
  }
  const double mean = sum / n;
  return weighted / (n * n * mean);
}

std::vector<UserInfluence> user_influence(const EventStream& s, Timestamp begin, Timestamp end) {
  auto by_ts = [](const TweetEvent& e, Timestamp v) { return e.timestamp < v; };
  auto first = std::lower_bound(s.events.begin(), s.events.end(), begin, by_ts);
  auto last = std::lower_bound(first, s.events.end(), end + 1, by_ts);

  struct Original {
    std::string_view author;
    std::size_t retweets = 0;
  };
  std::unordered_map<std::string_view, Original> originals;
  std::map<std::string_view, UserInfluence> users;
  for (auto it = first; it != last; ++it) {
    auto& u = users[it->author_id];
    if (!it->is_retweet()) {
      originals.try_emplace(it->tweet_id, Original{it->author_id, 0});
      ++u.originals_posted;
      if (is_unacceptable(it->label)) ++u.unacceptable_posted;
    }
  }
  for (auto it = first; it != last; ++it) {
    if (!it->is_retweet() || it->is_self_retweet()) continue;
    auto o = originals.find(it->retweet_of->original_tweet_id);
    if (o != originals.end() && o->second.author == it->retweet_of->original_author_id) ++o->second.retweets;
  }

  std::map<std::string_view, std::vector<std::size_t>> counts;
  for (const auto& [id, o] : originals) counts[o.author].push_back(o.retweets);

  std::vector<UserInfluence> out;
  out.reserve(users.size());
  for (auto& [name, u] : users) {
    u.user = std::string(name);
    if (auto c = counts.find(name); c != counts.end()) {
      u.hindex = retweet_hindex(c->second);
      for (auto r : c->second) u.retweets_received += r;
    }
    if (u.originals_posted > 0) {
      u.unacceptable_fraction =
          static_cast<double>(u.unacceptable_posted) / static_cast<double>(u.originals_posted);
    }
    out.push_back(std::move(u));
  }
  return out;
}

void write_influence_matrix(std::ostream& out, int t, const std::vector<InfluenceSummary>& summaries, bool header) {
  if (header) out << "t,from_community,to_community,W,I_component\n";
  for (const auto& s : summaries) {
    for (std::size_t j = 0; j < s.out_mass.size(); ++j) {
      if (s.out_mass[j] <= 0.0) continue;
      const double component = static_cast<int>(j) == s.community ? s.internal : s.external[j];
      out << fmt::format("{},{},{},{:.9f},{:.9f}\n", t, s.community, j, s.out_mass[j], component);
    }
  }
}

}  // namespace retnet
