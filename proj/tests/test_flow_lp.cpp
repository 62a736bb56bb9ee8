#include <gtest/gtest.h>

#include <random>

#include "mmflow/flow_lp.hpp"
#include "mmflow/generators.hpp"
#include "mmflow/mwis.hpp"

using namespace mmflow;

namespace {

RegionSubset region_of(std::initializer_list<std::vector<Rational>> rows) {
  RegionSubset r;
  for (const auto& row : rows) r.add(RateVector(row));
  return r;
}

const Rational half(1, 2);

}  // namespace

TEST(FlowLp, TwoHopRegions) {
  const auto inst = line_instance(2, 1, 0);
  const auto one = solve_flow_lp<Rational>(inst.network, inst.sessions, region_of({{1, 0}}),
                                           ProblemKind::MaxMultiflow);
  EXPECT_EQ(one.objective, 0);
  const auto both = solve_flow_lp<Rational>(inst.network, inst.sessions, region_of({{1, 0}, {0, 1}}),
                                            ProblemKind::MaxMultiflow);
  EXPECT_EQ(both.objective, half);
  EXPECT_EQ(both.combination, (std::vector<Rational>{half, half}));
  EXPECT_EQ(both.rate, (std::vector<Rational>{half, half}));
  EXPECT_TRUE(check_flow_solution(inst.network, inst.sessions, both).empty());

  const auto approx = solve_flow_lp<double>(inst.network, inst.sessions, region_of({{1, 0}, {0, 1}}),
                                            ProblemKind::MaxMultiflow);
  EXPECT_NEAR(approx.objective, 0.5, 1e-12);
  EXPECT_TRUE(check_flow_solution(inst.network, inst.sessions, approx).empty());
}

TEST(FlowLp, DualOfSingleVertexSubset) {
  // Only l2 can be active, so nothing reaches the sink. Any optimal dual has
  // mu(l2) = 0 and puts at least unit mass on the remaining path links; the
  // balanced one spreads it evenly.
  const auto inst = line_instance(4, 1, 1);
  const auto sol = solve_flow_lp<Rational>(inst.network, inst.sessions, region_of({{0, 1, 0, 0}}),
                                           ProblemKind::MaxMultiflow);
  EXPECT_EQ(sol.objective, 0);
  ASSERT_EQ(sol.dual.size(), 4u);
  EXPECT_EQ(sol.dual[1], 0);
  EXPECT_GE(sol.dual[0] + sol.dual[2] + sol.dual[3], 1);
  for (const auto& mu : sol.dual) EXPECT_GE(mu, 0);
  EXPECT_EQ(sol.dual, (std::vector<Rational>{Rational(1, 3), 0, Rational(1, 3), Rational(1, 3)}));

  const auto pivot = solve_flow_lp<Rational>(inst.network, inst.sessions, region_of({{0, 1, 0, 0}}),
                                             ProblemKind::MaxMultiflow, DualSelection::Pivot);
  EXPECT_EQ(pivot.dual[1], 0);
  EXPECT_GE(pivot.dual[0] + pivot.dual[2] + pivot.dual[3], 1);
}

TEST(FlowLp, DualCertifiesObjective) {
  // <mu, R_k> <= objective on the subset, with equality where lambda_k > 0.
  const auto inst = line_instance(4, 1, 1);
  const auto region = region_of({{1, 0, 0, 1}, {0, 1, 0, 0}, {0, 0, 1, 0}, {half, half, half, 0}});
  for (auto selection : {DualSelection::Pivot, DualSelection::Balanced}) {
    const auto sol =
        solve_flow_lp<Rational>(inst.network, inst.sessions, region, ProblemKind::MaxMultiflow, selection);
    EXPECT_EQ(sol.objective, Rational(1, 3));
    for (std::size_t k = 0; k < region.size(); ++k) {
      const Rational score = dot(sol.dual, region.vertices[k]);
      EXPECT_LE(score, sol.objective);
      if (sol.combination[k] > 0) EXPECT_EQ(score, sol.objective);
    }
    EXPECT_TRUE(check_flow_solution(inst.network, inst.sessions, sol).empty());
  }
}

TEST(FlowLp, ConcurrentBidirectional) {
  const auto weighted = bidir_line_scd(2, 0, half);
  const auto region = region_of({{1, 0}, {0, 1}, {0, 0}});
  const auto sol = solve_flow_lp<Rational>(weighted.network, weighted.sessions, region,
                                           ProblemKind::MaxConcurrentMultiflow);
  EXPECT_EQ(sol.objective, Rational(2, 3));
  EXPECT_EQ(sol.session_rates, (std::vector<Rational>{Rational(2, 3), Rational(1, 3)}));
  EXPECT_EQ(sol.flows[0][0][0], Rational(2, 3));
  EXPECT_EQ(sol.flows[1][0][1], Rational(1, 3));
  EXPECT_TRUE(check_flow_solution(weighted.network, weighted.sessions, sol).empty());

  const auto even = bidir_line_scd(2);
  EXPECT_EQ(solve_flow_lp<Rational>(even.network, even.sessions, region, ProblemKind::MaxConcurrentMultiflow)
                .objective,
            half);
  EXPECT_EQ(solve_flow_lp<Rational>(even.network, even.sessions, region_of({{0, 0}}),
                                    ProblemKind::MaxConcurrentMultiflow)
                .objective,
            0);
  // Sum of weighted rates for the max-multiflow counterpart.
  EXPECT_EQ(solve_flow_lp<Rational>(weighted.network, weighted.sessions, region, ProblemKind::MaxMultiflow)
                .objective,
            1);
}

TEST(FlowLp, MulticastUsesSharedCapacity) {
  // Butterfly without interference: each sink can receive two units.
  Network net;
  net.nodes = {"s", "a", "b", "c", "d", "t1", "t2"};
  net.links = {{"sa", 0, 1}, {"sb", 0, 2}, {"at1", 1, 5}, {"bt2", 2, 6}, {"ac", 1, 3},
               {"bc", 2, 3}, {"cd", 3, 4}, {"dt1", 4, 5}, {"dt2", 4, 6}};
  net.collisions.resize(net.links.size());
  SessionSet sessions{{Session{0, {5, 6}, Rational(1)}}};
  const auto sol = solve_flow_lp<Rational>(net, sessions, region_of({std::vector<Rational>(9, Rational(1))}),
                                           ProblemKind::MaxMultiflow);
  EXPECT_EQ(sol.objective, 2);
  EXPECT_EQ(sol.usage[0][6], 1);
  EXPECT_TRUE(check_flow_solution(net, sessions, sol).empty());
}

TEST(FlowLp, MonotoneInTheSubset) {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 20; ++trial) {
    const auto inst = random_acyclic(6, 100 + static_cast<std::uint64_t>(trial), 2);
    const auto& net = inst.network;
    RegionSubset region;
    region.add(RateVector(net.num_links()));
    Rational previous(0);
    for (int step = 0; step < 6; ++step) {
      std::vector<Rational> w(net.num_links());
      for (auto& x : w) x = static_cast<long>(rng() % 5);
      region.add(mwis_solve(net, w).indicator);
      for (auto kind : {ProblemKind::MaxMultiflow, ProblemKind::MaxConcurrentMultiflow}) {
        const auto sol = solve_flow_lp<Rational>(net, inst.sessions, region, kind);
        EXPECT_TRUE(check_flow_solution(net, inst.sessions, sol).empty());
        const auto approx = solve_flow_lp<double>(net, inst.sessions, region, kind);
        EXPECT_NEAR(approx.objective, sol.objective.get_d(), 1e-9);
        if (kind == ProblemKind::MaxMultiflow) {
          EXPECT_GE(sol.objective, previous);
          previous = sol.objective;
        }
      }
    }
  }
}

TEST(FlowLp, RejectsMalformedSubsets) {
  const auto inst = line_instance(2, 1, 0);
  EXPECT_THROW(solve_flow_lp<double>(inst.network, inst.sessions, RegionSubset{}, ProblemKind::MaxMultiflow),
               std::invalid_argument);
  EXPECT_THROW(solve_flow_lp<double>(inst.network, inst.sessions, region_of({{1, 0, 0}}),
                                     ProblemKind::MaxMultiflow),
               std::invalid_argument);
}

TEST(FlowLp, CheckerReportsViolations) {
  const auto inst = line_instance(2, 1, 0);
  auto sol = solve_flow_lp<Rational>(inst.network, inst.sessions, region_of({{1, 0}, {0, 1}}),
                                     ProblemKind::MaxMultiflow);
  sol.flows[0][0][1] += 1;
  EXPECT_FALSE(check_flow_solution(inst.network, inst.sessions, sol).empty());
}
