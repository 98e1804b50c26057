#include <doctest.h>

#include <cstdlib>
#include <sstream>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "retnet/snapshot.hpp"

using namespace retnet;
using namespace retnet::fixture;

namespace {

EventStream random_stream(Rng& rng, std::size_t users, std::size_t events, Timestamp span) {
  std::vector<TweetEvent> out;
  for (std::size_t i = 0; i < events; ++i) {
    const auto author = "u" + std::to_string(rng.below(users));
    const auto ts = static_cast<Timestamp>(rng.below(static_cast<std::uint64_t>(span)));
    const auto label = kAllLabels[rng.below(4)];
    if (rng.bernoulli(0.6)) {
      out.push_back(retweet("e" + std::to_string(i), author, ts, "o" + std::to_string(rng.below(events)),
                            "u" + std::to_string(rng.below(users)), label));
    } else {
      out.push_back(original("e" + std::to_string(i), author, ts, label));
    }
  }
  return stream(out);
}

}  // namespace

TEST_CASE("decay_weight closed forms") {
  CHECK(decay_weight(0, 4) == 1.0);
  CHECK(decay_weight(4, 4) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(decay_weight(8, 4) == doctest::Approx(0.25).epsilon(1e-15));
  CHECK_THROWS_AS(decay_weight(-1, 4), std::invalid_argument);
  CHECK_THROWS_AS(decay_weight(1, 0), std::invalid_argument);
}

TEST_CASE("decay halves every half-life and is strictly decreasing") {
  Rng rng(1);
  for (int i = 0; i < 1000; ++i) {
    const double a = 200.0 * rng.uniform();
    CHECK(std::abs(decay_weight(a + 4, 4) - decay_weight(a, 4) / 2) <= 1e-12);
    CHECK(decay_weight(a + 0.01, 4) < decay_weight(a, 4));
  }
}

TEST_CASE("single retweet at the window end has weight 1") {
  const Timestamp t_end = 30 * W;
  auto s = stream({original("o1", "u1", 0), retweet("r1", "u2", t_end, "o1", "u1")});
  auto g = build_snapshot(s, t_end, {});
  REQUIRE(g.edges.size() == 1);
  CHECK(g.nodes[g.edges[0].src] == "u1");
  CHECK(g.nodes[g.edges[0].dst] == "u2");
  CHECK(g.edges[0].weight == 1.0);
}

TEST_CASE("repeated retweets sum their decayed weights") {
  const Timestamp t_end = 30 * W;
  auto s = stream({retweet("r1", "u2", t_end, "o1", "u1"), retweet("r2", "u2", t_end - 4 * W, "o2", "u1")});
  auto g = build_snapshot(s, t_end, {});
  REQUIRE(g.edges.size() == 1);
  CHECK(g.edges[0].weight == doctest::Approx(1.5).epsilon(1e-15));
}

TEST_CASE("window boundaries are half-open") {
  const Timestamp t_end = 100 * W;
  WindowConfig cfg;
  cfg.stream_start = 0;
  auto s = stream({retweet("old", "u2", t_end - 25 * W, "o", "u1"), retweet("edge", "u3", t_end - 24 * W, "o", "u1"),
                   retweet("in", "u4", t_end - 24 * W + 1, "o", "u1"), retweet("late", "u5", t_end + 1, "o", "u1")});
  auto g = build_snapshot(s, t_end, cfg);
  REQUIRE(g.edges.size() == 1);
  CHECK(g.nodes[g.edges[0].dst] == "u4");
}

TEST_CASE("first window is closed at the stream start") {
  auto s = stream({retweet("r0", "u2", 0, "o", "u1"), retweet("r1", "u3", 3 * W, "o", "u1")});
  auto g = build_snapshot(s, 24 * W, {});
  CHECK(g.edges.size() == 2);
  CHECK(g.window_begin == 0);
}

TEST_CASE("self-retweets are dropped, dangling retweets kept, tallies filled") {
  const Timestamp t_end = 10 * W;
  auto s = stream({original("o1", "u1", W, HateLabel::Offensive), original("o2", "u1", 2 * W),
                   original("o3", "u3", 2 * W), retweet("r1", "u1", 3 * W, "o1", "u1", HateLabel::Offensive),
                   retweet("r2", "u2", 3 * W, "o1", "u1", HateLabel::Offensive),
                   retweet("r3", "u2", 4 * W, "gone", "u9")});
  auto g = build_snapshot(s, t_end, {});
  CHECK(g.nodes == std::vector<std::string>{"u1", "u2", "u3", "u9"});
  REQUIRE(g.edges.size() == 2);
  for (const auto& e : g.edges) CHECK(e.src != e.dst);
  CHECK(g.retweet_events == 2);

  const auto& u1 = g.tallies[*g.index_of("u1")];
  CHECK(u1.originals_posted == 2);
  CHECK(u1.unacceptable_posted == 1);
  CHECK(u1.retweeted_originals == 1);
  CHECK(u1.unacceptable_retweeted_originals == 1);
  const auto& u2 = g.tallies[*g.index_of("u2")];
  CHECK(u2.retweets_made == 2);
  CHECK(u2.unacceptable_retweets_made == 1);
  CHECK(g.tallies[*g.index_of("u3")] == NodeTally{1, 0, 0, 0, 0, 0});
}

TEST_CASE("empty window gives an empty network") {
  auto s = stream({original("o", "u", 100 * W)});
  WindowConfig cfg;
  cfg.stream_start = 0;
  auto g = build_snapshot(s, 30 * W, cfg);
  CHECK(g.nodes.empty());
  CHECK(g.edges.empty());
}

TEST_CASE("window series counts") {
  WindowConfig cfg;
  SUBCASE("three-year stream with defaults") {
    CHECK(plan_windows(0, 156 * W - 1, cfg).ends.size() == 133);
    CHECK(oracle::count_windows(0, 156 * W - 1, 24, 1) == 133);
  }
  SUBCASE("stream exactly one window long") { CHECK(plan_windows(0, 24 * W, cfg).ends.size() == 1); }
  SUBCASE("26-week stream") {
    CHECK(plan_windows(0, 26 * W - 1, cfg).ends.size() == 3);
    cfg.window_weeks = 8;
    CHECK(plan_windows(0, 26 * W - 1, cfg).ends.size() == 19);
  }
  SUBCASE("short stream is clipped to a single window") {
    auto plan = plan_windows(0, 5 * W, cfg);
    CHECK(plan.clipped);
    REQUIRE(plan.ends.size() == 1);
    CHECK(plan.ends[0] == 5 * W);
  }
  SUBCASE("arithmetic matches stepping oracle") {
    Rng rng(4);
    for (int i = 0; i < 200; ++i) {
      WindowConfig c;
      c.window_weeks = 1 + static_cast<int>(rng.below(30));
      c.slide_weeks = 1 + static_cast<int>(rng.below(4));
      const Timestamp start = static_cast<Timestamp>(rng.below(1'000'000));
      const Timestamp end = start + static_cast<Timestamp>(rng.below(80 * W));
      CHECK(plan_windows(start, end, c).ends.size() ==
            oracle::count_windows(start, end, c.window_weeks, c.slide_weeks));
    }
  }
}

TEST_CASE("series windows end at start + L + i * slide") {
  WindowConfig cfg;
  cfg.window_weeks = 4;
  cfg.slide_weeks = 2;
  auto plan = plan_windows(1000, 1000 + 10 * W, cfg);
  REQUIRE(plan.ends.size() == 4);
  for (std::size_t i = 0; i < plan.ends.size(); ++i) {
    CHECK(plan.ends[i] == 1000 + 4 * W + static_cast<Timestamp>(i) * 2 * W);
  }
}

TEST_CASE("snapshot mass equals the event-by-event oracle") {
  Rng rng(9);
  for (int trial = 0; trial < 30; ++trial) {
    auto s = random_stream(rng, 12, 300, 40 * W);
    WindowConfig cfg;
    cfg.window_weeks = 1 + static_cast<int>(rng.below(12));
    cfg.half_life_weeks = 0.5 + 6 * rng.uniform();
    auto series = snapshot_series(s, cfg);
    for (const auto& g : series.networks) {
      const double expect = oracle::window_mass(s, g.window_end, s.start, cfg.window_weeks, cfg.half_life_weeks);
      CHECK(g.total_weight() == doctest::Approx(expect).epsilon(1e-12));
      for (const auto& e : g.edges) CHECK(e.weight > 0.0);
    }
  }
}

TEST_CASE("projection sums both directions and preserves mass") {
  RetweetNetwork g;
  g.nodes = {"u1", "u2", "u3"};
  g.tallies.resize(3);
  g.edges = {{0, 1, 2.0}, {1, 0, 1.0}, {1, 2, 0.5}};
  auto u = project_undirected(g);
  CHECK(u.nodes == g.nodes);
  REQUIRE(u.edges.size() == 2);
  CHECK(u.edges[0].weight == 3.0);
  CHECK(u.edges[1].weight == 0.5);
  CHECK(u.total_weight() == g.total_weight());

  RetweetNetwork empty;
  CHECK(project_undirected(empty).edges.empty());
  CHECK(project_undirected(empty).nodes.empty());

  Rng rng(2);
  for (int trial = 0; trial < 10; ++trial) {
    auto s = random_stream(rng, 10, 200, 10 * W);
    auto net = build_snapshot(s, 10 * W, {});
    CHECK(project_undirected(net).total_weight() == doctest::Approx(net.total_weight()).epsilon(1e-12));
  }
}

TEST_CASE("shifting all timestamps leaves the networks unchanged") {
  Rng rng(13);
  auto s = random_stream(rng, 10, 250, 30 * W);
  auto shifted = s;
  const Timestamp offset = 1'600'000'000;
  for (auto& e : shifted.events) e.timestamp += offset;
  shifted.start += offset;
  shifted.end += offset;

  WindowConfig cfg;
  cfg.window_weeks = 6;
  auto a = snapshot_series(s, cfg);
  auto b = snapshot_series(shifted, cfg);
  REQUIRE(a.networks.size() == b.networks.size());
  for (std::size_t i = 0; i < a.networks.size(); ++i) {
    CHECK(a.networks[i].window_end + offset == b.networks[i].window_end);
    CHECK(a.networks[i].nodes == b.networks[i].nodes);
    REQUIRE(a.networks[i].edges.size() == b.networks[i].edges.size());
    for (std::size_t k = 0; k < a.networks[i].edges.size(); ++k) {
      CHECK(a.networks[i].edges[k].src == b.networks[i].edges[k].src);
      CHECK(a.networks[i].edges[k].dst == b.networks[i].edges[k].dst);
      CHECK(a.networks[i].edges[k].weight == b.networks[i].edges[k].weight);
    }
  }
}

TEST_CASE("parallel construction is bit-identical to sequential") {
  Rng rng(21);
  auto s = random_stream(rng, 30, 2000, 40 * W);
  WindowConfig cfg;
  cfg.window_weeks = 8;
  setenv("RETNET_THREADS", "1", 1);
  auto seq = snapshot_series(s, cfg);
  setenv("RETNET_THREADS", "4", 1);
  auto par = snapshot_series(s, cfg);
  unsetenv("RETNET_THREADS");
  REQUIRE(seq.networks.size() == par.networks.size());
  for (std::size_t i = 0; i < seq.networks.size(); ++i) {
    std::ostringstream a, b;
    write_edge_list(a, seq.networks[i]);
    write_edge_list(b, par.networks[i]);
    CHECK(a.str() == b.str());
    REQUIRE(seq.networks[i].edges.size() == par.networks[i].edges.size());
    for (std::size_t k = 0; k < seq.networks[i].edges.size(); ++k) {
      CHECK(seq.networks[i].edges[k].weight == par.networks[i].edges[k].weight);
    }
  }
}

TEST_CASE("edge list export is sorted with 9 decimals") {
  RetweetNetwork g;
  g.nodes = {"a", "b", "c"};
  g.tallies.resize(3);
  g.edges = {{0, 2, 1.0 / 3.0}, {1, 0, 2.0}};
  std::ostringstream out;
  write_edge_list(out, g);
  CHECK(out.str() == "src,dst,weight\na,c,0.333333333\nb,a,2.000000000\n");
}

TEST_CASE("window config validation") {
  WindowConfig bad;
  bad.window_weeks = 0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = {};
  bad.slide_weeks = -1;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = {};
  bad.half_life_weeks = 0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}
