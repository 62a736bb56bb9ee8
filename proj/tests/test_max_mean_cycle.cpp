#include <gtest/gtest.h>

#include <random>

#include "mmflow/max_mean_cycle.hpp"
#include "support/oracles.hpp"

using namespace mmflow;

namespace {

struct WeightedDigraph {
  Adjacency out;
  std::map<std::pair<std::size_t, std::size_t>, Rational> w;
};

WeightedDigraph random_digraph(std::mt19937_64& rng, std::size_t n, double p, bool rational) {
  WeightedDigraph g;
  g.out.resize(n);
  std::uniform_real_distribution<double> u(0, 1);
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b) {
      if (u(rng) >= p) continue;
      g.out[a].push_back(static_cast<std::uint32_t>(b));
      const long num = static_cast<long>(rng() % 41) - 20;
      g.w[{a, b}] = rational ? oracle::frac(num, 1 + static_cast<long>(rng() % 7)) : Rational(num);
    }
  // Guarantee a cycle.
  const std::size_t a = rng() % n, b = rng() % n;
  for (auto [x, y] : {std::pair{a, b}, std::pair{b, a}}) {
    if (!g.w.contains({x, y})) {
      g.out[x].push_back(static_cast<std::uint32_t>(y));
      g.w[{x, y}] = Rational(static_cast<long>(rng() % 9) - 4);
    }
  }
  for (auto& list : g.out) std::sort(list.begin(), list.end());
  return g;
}

oracle::Digraph plain(const Adjacency& out) {
  oracle::Digraph d(out.size());
  for (std::size_t u = 0; u < out.size(); ++u) d[u].assign(out[u].begin(), out[u].end());
  return d;
}

}  // namespace

TEST(MaxMeanCycle, SelfLoop) {
  Adjacency out{{0}};
  const auto c = max_mean_cycle(out, [](std::size_t, std::size_t) { return Rational(5); });
  EXPECT_EQ(c.mean, 5);
  EXPECT_EQ(c.length(), 1u);
}

TEST(MaxMeanCycle, TwoCycle) {
  Adjacency out{{1}, {0}};
  const auto c = max_mean_cycle(out, [](std::size_t u, std::size_t) { return Rational(u == 0 ? 2 : 4); });
  EXPECT_EQ(c.mean, 3);
  EXPECT_EQ(c.length(), 2u);
}

TEST(MaxMeanCycle, PicksBestComponent) {
  // Component {0,1} mean 1, component {2} self-loop 3/2, component {3,4} mean 7/4.
  Adjacency out{{1}, {0, 2}, {2, 3}, {4}, {3}};
  std::map<std::pair<std::size_t, std::size_t>, Rational> w{{{0, 1}, 1}, {{1, 0}, 1},        {{1, 2}, 100},
                                                            {{2, 2}, Rational(3, 2)}, {{2, 3}, 100},
                                                            {{3, 4}, 2},        {{4, 3}, Rational(3, 2)}};
  const auto c = max_mean_cycle(out, [&](std::size_t u, std::size_t v) { return w.at({u, v}); });
  EXPECT_EQ(c.mean, Rational(7, 4));
  EXPECT_EQ(cycle_mean(c.cycle, [&](std::size_t u, std::size_t v) { return w.at({u, v}); }), c.mean);
}

TEST(MaxMeanCycle, RejectsAcyclic) {
  Adjacency out{{1}, {}};
  EXPECT_THROW(max_mean_cycle(out, [](std::size_t, std::size_t) { return Rational(1); }), std::invalid_argument);
}

TEST(MaxMeanCycle, MatchesSimpleCycleEnumeration) {
  std::mt19937_64 rng(314);
  for (int trial = 0; trial < 150; ++trial) {
    const std::size_t n = 1 + trial % 12;
    const double p = 0.12 + 0.04 * (trial % 7);
    const auto g = random_digraph(rng, n, p, trial % 2 == 1);
    auto weight = [&](std::size_t u, std::size_t v) { return g.w.at({u, v}); };
    const auto c = max_mean_cycle(g.out, weight);
    const auto expected = oracle::brute_max_mean(plain(g.out), weight);
    ASSERT_TRUE(expected);
    EXPECT_EQ(c.mean, *expected) << "trial " << trial;
    // The returned cycle is a real cycle attaining the mean.
    ASSERT_GE(c.cycle.size(), 2u);
    EXPECT_EQ(c.cycle.front(), c.cycle.back());
    for (std::size_t k = 0; k + 1 < c.cycle.size(); ++k)
      EXPECT_TRUE(g.w.contains({c.cycle[k], c.cycle[k + 1]}));
    std::vector<std::size_t> interior(c.cycle.begin(), c.cycle.end() - 1);
    std::sort(interior.begin(), interior.end());
    EXPECT_EQ(std::adjacent_find(interior.begin(), interior.end()), interior.end());
    EXPECT_EQ(cycle_mean(c.cycle, weight), c.mean);
  }
}

TEST(MaxMeanCycle, HugeWeightsUseWideArithmetic) {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 20; ++trial) {
    auto g = random_digraph(rng, 8, 0.35, false);
    for (auto& [edge, w] : g.w) w = oracle::frac(mpz_class("1000000000000000000000000000000") * w.get_num() + 1,
                                            mpz_class("3") + static_cast<long>(rng() % 5));
    auto weight = [&](std::size_t u, std::size_t v) { return g.w.at({u, v}); };
    EXPECT_EQ(max_mean_cycle(g.out, weight).mean, *oracle::brute_max_mean(plain(g.out), weight));
  }
}

TEST(MaxMeanCycle, PositiveScaling) {
  std::mt19937_64 rng(55);
  for (int trial = 0; trial < 40; ++trial) {
    const auto g = random_digraph(rng, 9, 0.3, true);
    const Rational s = oracle::frac(1 + static_cast<long>(rng() % 6), 1 + static_cast<long>(rng() % 4));
    auto w1 = [&](std::size_t u, std::size_t v) { return g.w.at({u, v}); };
    auto w2 = [&](std::size_t u, std::size_t v) { return Rational(g.w.at({u, v}) * s); };
    const auto a = max_mean_cycle(g.out, w1);
    const auto b = max_mean_cycle(g.out, w2);
    EXPECT_EQ(b.mean, a.mean * s);
    EXPECT_EQ(cycle_mean(b.cycle, w1), a.mean);
  }
}

TEST(MaxMeanCycle, StronglyConnectedComponents) {
  Adjacency out{{1}, {2}, {0, 3}, {4}, {3}, {}};
  const auto comps = strongly_connected_components(out);
  ASSERT_EQ(comps.size(), 3u);
  EXPECT_EQ(comps[0], (std::vector<std::uint32_t>{0, 1, 2}));
  EXPECT_EQ(comps[1], (std::vector<std::uint32_t>{3, 4}));
  EXPECT_EQ(comps[2], (std::vector<std::uint32_t>{5}));
}
