#include "retnet/report.hpp"

#include <algorithm>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

namespace retnet {

namespace {

std::optional<double> ratio(double num, double den) {
  if (den <= 0.0) return std::nullopt;
  return num / den;
}

std::string fixed4(const std::optional<double>& v) { return v ? fmt::format("{:.4f}", *v) : std::string(); }

std::string dot_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
  return out;
}

}  // namespace

std::string ShareRow::name() const { return community == kSmallCommunity ? "Small" : std::to_string(community); }

std::optional<double> CommunityReport::unacceptable_fraction() const {
  return ratio(static_cast<double>(unacceptable), static_cast<double>(originals));
}

std::optional<double> CommunityReport::retweeted_unacceptable_fraction() const {
  return ratio(static_cast<double>(unacceptable_retweeted_originals), static_cast<double>(retweeted_originals));
}

CommunityReport community_hate_shares(const RetweetNetwork& g, const Partition& p, const ReportOptions& opts,
                                      std::span<const UserInfluence> users) {
  if (g.nodes != p.nodes()) throw std::invalid_argument("partition does not cover exactly the network's nodes");

  CommunityReport rep;
  rep.t = g.t;
  rep.nodes = g.nodes.size();

  const auto count = static_cast<std::size_t>(p.community_count());
  const auto& comm = p.assignment();
  std::vector<ShareRow> per(count);
  for (std::size_t c = 0; c < count; ++c) {
    per[c].community = static_cast<int>(c);
    per[c].size = p.community_size(static_cast<int>(c));
  }
  for (std::size_t i = 0; i < g.nodes.size(); ++i) {
    const auto& tally = g.tallies[i];
    auto& row = per[static_cast<std::size_t>(comm[i])];
    row.originals += tally.originals_posted;
    row.unacceptable += tally.unacceptable_posted;
    row.retweeted_originals += tally.retweeted_originals;
    row.unacceptable_retweets += tally.unacceptable_retweets_made;
    rep.originals += tally.originals_posted;
    rep.unacceptable += tally.unacceptable_posted;
    rep.retweeted_originals += tally.retweeted_originals;
    rep.unacceptable_retweeted_originals += tally.unacceptable_retweeted_originals;
    rep.retweets += tally.retweets_made;
    rep.unacceptable_retweets += tally.unacceptable_retweets_made;
  }
  for (const auto& e : g.edges) {
    per[static_cast<std::size_t>(comm[e.src])].out_mass += e.weight;
    rep.mass += e.weight;
  }

  const std::size_t shown = std::min(opts.top_n, count);
  rep.rows.assign(per.begin(), per.begin() + static_cast<std::ptrdiff_t>(shown));
  if (shown < count) {
    ShareRow small;
    small.communities = count - shown;
    for (std::size_t c = shown; c < count; ++c) {
      small.size += per[c].size;
      small.originals += per[c].originals;
      small.unacceptable += per[c].unacceptable;
      small.retweeted_originals += per[c].retweeted_originals;
      small.unacceptable_retweets += per[c].unacceptable_retweets;
      small.out_mass += per[c].out_mass;
    }
    rep.rows.push_back(std::move(small));
  }

  for (auto& row : rep.rows) {
    row.unacceptable_fraction = ratio(static_cast<double>(row.unacceptable), static_cast<double>(row.originals));
    row.unacceptable_share = ratio(static_cast<double>(row.unacceptable), static_cast<double>(rep.unacceptable));
    row.retweeted_share =
        ratio(static_cast<double>(row.retweeted_originals), static_cast<double>(rep.retweeted_originals));
    row.unacceptable_retweet_share =
        ratio(static_cast<double>(row.unacceptable_retweets), static_cast<double>(rep.unacceptable_retweets));
    row.influence_share = ratio(row.out_mass, rep.mass);
    row.size_share = rep.nodes > 0 ? static_cast<double>(row.size) / static_cast<double>(rep.nodes) : 0.0;
  }

  if (!users.empty() && opts.top_members > 0) {
    std::vector<std::vector<const UserInfluence*>> ranked(shown);
    for (const auto& u : users) {
      if (auto c = p.community_of(u.user); c && static_cast<std::size_t>(*c) < shown) {
        ranked[static_cast<std::size_t>(*c)].push_back(&u);
      }
    }
    for (std::size_t c = 0; c < shown; ++c) {
      auto& list = ranked[c];
      std::sort(list.begin(), list.end(), [](const UserInfluence* a, const UserInfluence* b) {
        if (a->hindex != b->hindex) return a->hindex > b->hindex;
        if (a->retweets_received != b->retweets_received) return a->retweets_received > b->retweets_received;
        return a->user < b->user;
      });
      for (std::size_t i = 0; i < list.size() && i < opts.top_members; ++i) {
        rep.rows[c].top_members.push_back(list[i]->user);
      }
    }
  }
  return rep;
}

CommunityLabels read_labels(std::istream& in) {
  CommunityLabels labels;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || (lineno == 1 && line.rfind("t,", 0) == 0)) continue;
    const auto a = line.find(',');
    const auto b = a == std::string::npos ? a : line.find(',', a + 1);
    if (b == std::string::npos) throw std::runtime_error(fmt::format("labels line {}: expected t,community_id,name", lineno));
    try {
      labels[{std::stoi(line.substr(0, a)), std::stoi(line.substr(a + 1, b - a - 1))}] = line.substr(b + 1);
    } catch (const std::logic_error&) {
      throw std::runtime_error(fmt::format("labels line {}: bad timepoint or community id", lineno));
    }
  }
  return labels;
}

std::string MetaNode::key() const { return fmt::format("t{}_c{}", t, community); }

MetaNetwork meta_network(std::span<const Timepoint> timepoints, std::size_t top_n, double edge_threshold,
                         const CommunityLabels& labels) {
  std::vector<const Timepoint*> ordered;
  for (const auto& tp : timepoints) ordered.push_back(&tp);
  std::stable_sort(ordered.begin(), ordered.end(), [](const Timepoint* a, const Timepoint* b) { return a->t < b->t; });

  MetaNetwork m;
  for (const auto* tp : ordered) {
    const std::size_t shown = std::min(top_n, tp->influence.size());
    for (std::size_t c = 0; c < shown; ++c) {
      MetaNode node;
      node.t = tp->t;
      node.community = static_cast<int>(c);
      node.size = tp->influence[c].size;
      for (const auto& row : tp->report.rows) {
        if (row.community == node.community) node.unacceptable_fraction = row.unacceptable_fraction;
      }
      auto label = labels.find({tp->t, node.community});
      node.name = label != labels.end() ? label->second : std::to_string(c);
      m.nodes.push_back(std::move(node));
    }
    for (std::size_t c = 0; c < shown; ++c) {
      for (std::size_t j = 0; j < shown; ++j) {
        if (j == c) continue;
        const double w = tp->influence[c].external[j];
        if (w > edge_threshold) m.edges.push_back({tp->t, static_cast<int>(c), static_cast<int>(j), w});
      }
    }
  }
  return m;
}

void write_dot(std::ostream& out, const MetaNetwork& m) {
  out << "digraph meta {\n  node [shape=circle];\n";
  std::optional<int> open_t;
  for (const auto& n : m.nodes) {
    if (open_t != n.t) {
      if (open_t) out << "  }\n";
      out << fmt::format("  subgraph cluster_t{} {{\n    label=\"t={}\";\n", n.t, n.t);
      open_t = n.t;
    }
    out << fmt::format("    \"{}\" [label=\"{}\\nn={}\", size={}, unacceptable=\"{}\"];\n", n.key(),
                       dot_escape(n.name), n.size, n.size, fixed4(n.unacceptable_fraction));
  }
  if (open_t) out << "  }\n";
  for (const auto& e : m.edges) {
    out << fmt::format("  \"t{}_c{}\" -> \"t{}_c{}\" [weight=\"{:.4f}\"];\n", e.t, e.from, e.t, e.to, e.weight);
  }
  out << "}\n";
}

void write_json(std::ostream& out, const MetaNetwork& m) {
  using json = nlohmann::json;
  json doc = {{"nodes", json::array()}, {"edges", json::array()}};
  for (const auto& n : m.nodes) {
    json node = {{"t", n.t}, {"community", n.community}, {"name", n.name}, {"size", n.size}};
    node["unacceptable_fraction"] = n.unacceptable_fraction ? json(*n.unacceptable_fraction) : json(nullptr);
    doc["nodes"].push_back(std::move(node));
  }
  for (const auto& e : m.edges) {
    doc["edges"].push_back({{"t", e.t}, {"from", e.from}, {"to", e.to}, {"weight", e.weight}});
  }
  out << doc.dump(2) << '\n';
}

std::vector<CommunityComparison> compare_communities(std::span<const CommunityReport> reports,
                                                     const CommunityLabels& labels) {
  struct Acc {
    std::size_t timepoints = 0;
    double size = 0.0;
    std::vector<double> tweets, retweets, influence;
  };
  std::vector<std::string> order;
  std::map<std::string, Acc> groups;
  for (const auto& rep : reports) {
    for (const auto& row : rep.rows) {
      if (row.community == kSmallCommunity) continue;
      auto it = labels.find({rep.t, row.community});
      const auto name = it != labels.end() ? it->second : fmt::format("t{}_c{}", rep.t, row.community);
      auto [g, inserted] = groups.try_emplace(name);
      if (inserted) order.push_back(name);
      auto& acc = g->second;
      ++acc.timepoints;
      acc.size += row.size_share;
      if (row.unacceptable_share) acc.tweets.push_back(*row.unacceptable_share);
      if (row.unacceptable_retweet_share) acc.retweets.push_back(*row.unacceptable_retweet_share);
      if (row.influence_share) acc.influence.push_back(*row.influence_share);
    }
  }

  auto mean = [](const std::vector<double>& v) -> std::optional<double> {
    if (v.empty()) return std::nullopt;
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
  };
  auto h = [](const std::optional<double>& a, const std::optional<double>& b) -> std::optional<EffectSize> {
    if (!a || !b) return std::nullopt;
    return cohens_h(std::clamp(*a, 0.0, 1.0), std::clamp(*b, 0.0, 1.0));
  };

  std::vector<CommunityComparison> out;
  for (const auto& name : order) {
    const auto& acc = groups.at(name);
    CommunityComparison c;
    c.name = name;
    c.timepoints = acc.timepoints;
    c.size_share = acc.size / static_cast<double>(acc.timepoints);
    c.unacceptable_share = mean(acc.tweets);
    c.unacceptable_retweet_share = mean(acc.retweets);
    c.influence_share = mean(acc.influence);
    c.tweets_vs_size = h(c.unacceptable_share, c.size_share);
    c.retweets_vs_size = h(c.unacceptable_retweet_share, c.size_share);
    c.influence_vs_size = h(c.influence_share, c.size_share);
    c.tweets_vs_influence = h(c.unacceptable_share, c.influence_share);
    out.push_back(std::move(c));
  }
  return out;
}

ContingencyTable retweet_contingency(const EventStream& s) {
  std::unordered_set<std::string_view> retweeted;
  for (const auto& ev : s.events) {
    if (ev.is_retweet() && !ev.is_self_retweet()) retweeted.insert(ev.retweet_of->original_tweet_id);
  }
  ContingencyTable t;
  for (const auto& ev : s.events) {
    if (ev.is_retweet()) continue;
    const bool rt = retweeted.contains(ev.tweet_id);
    const bool acceptable = !is_unacceptable(ev.label);
    if (rt && acceptable) ++t.n11;
    else if (rt) ++t.n10;
    else if (acceptable) ++t.n01;
    else ++t.n00;
  }
  return t;
}

void write_shares_csv(std::ostream& out, std::span<const CommunityReport> reports) {
  out << "t,community,size,communities,originals,unacceptable,unacceptable_fraction,unacceptable_share,"
         "retweeted_originals,retweeted_share,unacceptable_retweets,unacceptable_retweet_share,influence_share,"
         "size_share,top_members\n";
  for (const auto& rep : reports) {
    for (const auto& r : rep.rows) {
      std::string members;
      for (const auto& m : r.top_members) members += (members.empty() ? "" : ";") + m;
      out << fmt::format("{},{},{},{},{},{},{},{},{},{},{},{},{},{:.4f},{}\n", rep.t, r.name(), r.size,
                         r.communities, r.originals, r.unacceptable, fixed4(r.unacceptable_fraction),
                         fixed4(r.unacceptable_share), r.retweeted_originals, fixed4(r.retweeted_share),
                         r.unacceptable_retweets, fixed4(r.unacceptable_retweet_share), fixed4(r.influence_share),
                         r.size_share, members);
    }
  }
}

void write_comparison_csv(std::ostream& out, std::span<const CommunityComparison> rows) {
  out << "community,timepoints,unacceptable_share,unacceptable_retweet_share,influence_share,size_share,"
         "h_tweets_vs_size,h_retweets_vs_size,h_influence_vs_size,h_tweets_vs_influence,"
         "effect_tweets_vs_size,effect_retweets_vs_size,effect_influence_vs_size,effect_tweets_vs_influence\n";
  auto hv = [](const std::optional<EffectSize>& e) { return e ? fmt::format("{:.4f}", e->h) : std::string(); };
  auto hl = [](const std::optional<EffectSize>& e) { return e ? std::string(to_string(e->magnitude)) : std::string(); };
  for (const auto& r : rows) {
    out << fmt::format("{},{},{},{},{},{:.4f},{},{},{},{},{},{},{},{}\n", r.name, r.timepoints,
                       fixed4(r.unacceptable_share), fixed4(r.unacceptable_retweet_share), fixed4(r.influence_share),
                       r.size_share, hv(r.tweets_vs_size), hv(r.retweets_vs_size), hv(r.influence_vs_size),
                       hv(r.tweets_vs_influence), hl(r.tweets_vs_size), hl(r.retweets_vs_size),
                       hl(r.influence_vs_size), hl(r.tweets_vs_influence));
  }
}

}  // namespace retnet
