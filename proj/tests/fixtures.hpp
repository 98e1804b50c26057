#pragma once

#include <algorithm>
#include <string>
#include <vector>

#include "retnet/ingest.hpp"
#include "retnet/snapshot.hpp"

namespace retnet::fixture {

inline constexpr Timestamp W = kSecondsPerWeek;

inline TweetEvent original(std::string id, std::string author, Timestamp ts,
                           HateLabel label = HateLabel::Acceptable) {
  TweetEvent ev;
  ev.tweet_id = std::move(id);
  ev.author_id = std::move(author);
  ev.timestamp = ts;
  ev.label = label;
  return ev;
}

inline TweetEvent retweet(std::string id, std::string retweeter, Timestamp ts, std::string orig_id,
                          std::string orig_author, HateLabel label = HateLabel::Acceptable) {
  auto ev = original(std::move(id), std::move(retweeter), ts, label);
  ev.retweet_of = RetweetOf{std::move(orig_id), std::move(orig_author)};
  return ev;
}

inline EventStream stream(std::vector<TweetEvent> events) {
  EventStream s;
  s.events = std::move(events);
  std::stable_sort(s.events.begin(), s.events.end(),
                   [](const TweetEvent& a, const TweetEvent& b) { return a.timestamp < b.timestamp; });
  if (!s.events.empty()) {
    s.start = s.events.front().timestamp;
    s.end = s.events.back().timestamp;
  }
  return s;
}

inline UndirectedNetwork graph(std::vector<std::string> nodes,
                               const std::vector<std::tuple<std::string, std::string, double>>& edges) {
  std::sort(nodes.begin(), nodes.end());
  UndirectedNetwork g;
  g.nodes = nodes;
  auto idx = [&](const std::string& n) {
    return static_cast<std::uint32_t>(std::lower_bound(nodes.begin(), nodes.end(), n) - nodes.begin());
  };
  for (const auto& [a, b, w] : edges) {
    auto u = idx(a), v = idx(b);
    g.edges.push_back({std::min(u, v), std::max(u, v), w});
  }
  std::sort(g.edges.begin(), g.edges.end(), [](const auto& x, const auto& y) {
    return std::pair(x.u, x.v) < std::pair(y.u, y.v);
  });
  return g;
}

// Two unit-weight triangles {a,b,c} and {d,e,f}.
inline UndirectedNetwork two_triangles() {
  return graph({"a", "b", "c", "d", "e", "f"}, {{"a", "b", 1}, {"b", "c", 1}, {"a", "c", 1},
                                                {"d", "e", 1}, {"e", "f", 1}, {"d", "f", 1}});
}

// Two 4-cliques {a..d} and {e..h} joined by the bridge d-e.
inline UndirectedNetwork bridged_cliques() {
  std::vector<std::tuple<std::string, std::string, double>> edges;
  const std::vector<std::string> left = {"a", "b", "c", "d"}, right = {"e", "f", "g", "h"};
  for (const auto* side : {&left, &right}) {
    for (std::size_t i = 0; i < 4; ++i) {
      for (std::size_t j = i + 1; j < 4; ++j) edges.emplace_back((*side)[i], (*side)[j], 1.0);
    }
  }
  edges.emplace_back("d", "e", 1.0);
  return graph({"a", "b", "c", "d", "e", "f", "g", "h"}, edges);
}

}  // namespace retnet::fixture
