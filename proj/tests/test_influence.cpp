#include <doctest.h>

#include <sstream>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "retnet/influence.hpp"

using namespace retnet;
using namespace retnet::fixture;

namespace {

RetweetNetwork directed(std::vector<std::string> nodes,
                        const std::vector<std::tuple<std::string, std::string, double>>& edges) {
  std::sort(nodes.begin(), nodes.end());
  RetweetNetwork g;
  g.nodes = nodes;
  g.tallies.resize(nodes.size());
  for (const auto& [a, b, w] : edges) g.edges.push_back({*g.index_of(a), *g.index_of(b), w});
  std::sort(g.edges.begin(), g.edges.end(),
            [](const auto& x, const auto& y) { return std::pair(x.src, x.dst) < std::pair(y.src, y.dst); });
  return g;
}

RetweetNetwork random_directed(Rng& rng, std::size_t n, double density) {
  std::vector<std::string> nodes;
  for (std::size_t i = 0; i < n; ++i) nodes.push_back("n" + std::to_string(1000 + i));
  std::vector<std::tuple<std::string, std::string, double>> edges;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i != j && rng.bernoulli(density)) edges.emplace_back(nodes[i], nodes[j], 0.05 + 3 * rng.uniform());
    }
  }
  return directed(nodes, edges);
}

}  // namespace

TEST_CASE("influence worked example") {
  auto g = directed({"a", "b", "c"}, {{"a", "b", 4.0}, {"a", "c", 6.0}});
  auto p = Partition::from_groups({{"a", "b"}, {"c"}});
  auto s = community_influence(g, p);
  REQUIRE(s.size() == 2);
  CHECK(s[0].size == 2);
  CHECK(s[0].internal == doctest::Approx(2.0));
  CHECK(s[0].external[1] == doctest::Approx(3.0));
  CHECK(s[0].external[0] == 0.0);
  CHECK(s[0].total == doctest::Approx(5.0));
  CHECK(s[1].total == 0.0);

  std::ostringstream out;
  write_influence_matrix(out, 3, s);
  CHECK(out.str() ==
        "t,from_community,to_community,W,I_component\n"
        "3,0,0,4.000000000,2.000000000\n"
        "3,0,1,6.000000000,3.000000000\n");
  CHECK_THROWS_AS(community_influence(g, Partition::from_groups({{"a"}})), std::invalid_argument);
}

TEST_CASE("influence matrix matches a per-edge oracle and conserves mass") {
  Rng rng(6);
  for (int trial = 0; trial < 50; ++trial) {
    auto g = random_directed(rng, 4 + rng.below(20), 0.2);
    auto p = oracle::random_partition(rng, g.nodes, 5);
    auto s = community_influence(g, p);

    const auto k = static_cast<std::size_t>(p.community_count());
    std::vector<std::vector<double>> w(k, std::vector<double>(k, 0.0));
    for (const auto& e : g.edges) {
      w[static_cast<std::size_t>(*p.community_of(g.nodes[e.src]))]
       [static_cast<std::size_t>(*p.community_of(g.nodes[e.dst]))] += e.weight;
    }
    double grand = 0.0;
    for (std::size_t c = 0; c < k; ++c) {
      const double size = static_cast<double>(p.community_size(static_cast<int>(c)));
      double ext = 0.0;
      for (std::size_t j = 0; j < k; ++j) {
        CHECK(s[c].out_mass[j] == doctest::Approx(w[c][j]).epsilon(1e-12));
        ext += s[c].external[j];
      }
      CHECK(s[c].total == doctest::Approx(s[c].internal + ext).epsilon(1e-12));
      grand += s[c].total * size;
    }
    CHECK(grand == doctest::Approx(g.total_weight()).epsilon(1e-12));
  }
}

TEST_CASE("uniform weight scaling scales influence and keeps its ordering") {
  Rng rng(60);
  for (int trial = 0; trial < 20; ++trial) {
    auto g = random_directed(rng, 15, 0.25);
    auto p = oracle::random_partition(rng, g.nodes, 4);
    auto h = g;
    for (auto& e : h.edges) e.weight *= 3.5;
    auto a = community_influence(g, p);
    auto b = community_influence(h, p);
    for (std::size_t c = 0; c < a.size(); ++c) {
      CHECK(b[c].total == doctest::Approx(3.5 * a[c].total).epsilon(1e-12));
      for (std::size_t d = 0; d < a.size(); ++d) CHECK((a[c].total < a[d].total) == (b[c].total < b[d].total));
    }
  }
}

TEST_CASE("retweet h-index") {
  using V = std::vector<std::size_t>;
  CHECK(retweet_hindex(V{5, 4, 3, 2, 1}) == 3);
  CHECK(retweet_hindex(V{10, 10, 10}) == 3);
  CHECK(retweet_hindex(V{}) == 0);
  CHECK(retweet_hindex(V{0, 0}) == 0);
  CHECK(retweet_hindex(V{1}) == 1);

  Rng rng(8);
  for (int trial = 0; trial < 500; ++trial) {
    V counts(rng.below(30));
    for (auto& c : counts) c = rng.below(40);
    const auto h = retweet_hindex(counts);
    CHECK(h == oracle::hindex_scan(counts));
    CHECK(h <= counts.size());
    auto shuffled = counts;
    rng.shuffle(shuffled);
    CHECK(retweet_hindex(shuffled) == h);
    auto bumped = counts;
    if (!bumped.empty()) {
      ++bumped[rng.below(bumped.size())];
      CHECK(retweet_hindex(bumped) >= h);
    }
  }
}

TEST_CASE("gini closed forms and errors") {
  using V = std::vector<double>;
  CHECK(gini(V{3, 3, 3, 3}) == doctest::Approx(0.0));
  CHECK(gini(V{0, 0, 0, 1}) == doctest::Approx(0.75));
  CHECK(gini(V{7}) == 0.0);
  CHECK_THROWS_AS(gini(V{}), std::invalid_argument);
  CHECK_THROWS_AS(gini(V{0, 0}), std::invalid_argument);
  CHECK_THROWS_AS(gini(V{1, -1}), std::invalid_argument);
}

TEST_CASE("gini agrees with the double-sum definition") {
  Rng rng(77);
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<double> x(1 + rng.below(60));
    for (auto& v : x) v = rng.bernoulli(0.2) ? 0.0 : 100 * rng.uniform();
    if (std::all_of(x.begin(), x.end(), [](double v) { return v == 0.0; })) x[0] = 1.0;
    const double g = gini(x);
    CHECK(std::abs(g - oracle::gini_double_sum(x)) <= 1e-12);
    CHECK(g >= -1e-15);
    const double n = static_cast<double>(x.size());
    CHECK(g <= (n - 1) / n + 1e-12);
    auto y = x;
    for (auto& v : y) v *= 17.25;
    CHECK(std::abs(gini(y) - g) <= 1e-12);
  }
}

TEST_CASE("user influence over a period") {
  auto s = stream({original("o1", "alice", 0, HateLabel::Violent), original("o2", "alice", 10),
                   original("o3", "bob", 20), retweet("r1", "bob", 30, "o1", "alice"),
                   retweet("r2", "carol", 31, "o1", "alice"), retweet("r3", "carol", 32, "o2", "alice"),
                   retweet("r4", "dave", 33, "o2", "alice"), retweet("r5", "alice", 34, "o2", "alice"),
                   retweet("r6", "carol", 35, "o3", "bob"), retweet("r7", "bob", 500, "o3", "bob"),
                   retweet("r8", "carol", 501, "o3", "bob")});
  auto users = user_influence(s, 0, 100);
  REQUIRE(users.size() == 4);
  CHECK(users[0].user == "alice");
  CHECK(users[0].originals_posted == 2);
  CHECK(users[0].unacceptable_posted == 1);
  CHECK(users[0].retweets_received == 4);  // self-retweet r5 excluded
  CHECK(users[0].hindex == 2);
  CHECK(users[0].unacceptable_fraction == doctest::Approx(0.5));
  CHECK(users[1].user == "bob");
  CHECK(users[1].hindex == 1);  // r8 falls outside the period
  CHECK(users[2].user == "carol");
  CHECK_FALSE(users[2].unacceptable_fraction.has_value());

  // originals posted before the period do not count
  auto late = user_influence(s, 25, 600);
  for (const auto& u : late) {
    CHECK(u.originals_posted == 0);
    CHECK(u.hindex == 0);
  }
}
