#include <gtest/gtest.h>

#include <random>

#include "mmflow/baseline.hpp"
#include "mmflow/generators.hpp"
#include "mmflow/joint_solver.hpp"
#include "support/four_hop.hpp"
#include "support/oracles.hpp"

using namespace mmflow;

namespace {

const Rational half(1, 2);

SolveOptions exact_options(SolveMode mode = SolveMode::Auto) {
  SolveOptions o;
  o.exact = true;
  o.mode = mode;
  return o;
}

// Assigns a random delay in [-2, 2] to every colliding pair.
Network with_random_delays(Network net, std::mt19937_64& rng) {
  for (auto& [pair, d] : net.delays) d = static_cast<std::int64_t>(rng() % 5) - 2;
  return net;
}

}  // namespace

TEST(JointSolver, TwoHopZeroDelayTrace) {
  const auto inst = line_instance(2, 1, 0);
  const auto r = joint_solve(inst.network, inst.sessions, ProblemKind::MaxMultiflow, exact_options());
  EXPECT_EQ(r.oracle, OracleKind::Mwis);
  EXPECT_EQ(r.objective, half);
  EXPECT_EQ(r.region.size(), 2u);
  ASSERT_EQ(r.iterations.size(), 2u);
  EXPECT_EQ(r.iterations[0].lp_objective, 0);
  EXPECT_EQ(r.iterations[0].dual, (std::vector<Rational>{0, 1}));
  EXPECT_EQ(r.iterations[0].oracle_vertex.rates, (std::vector<Rational>{0, 1}));
  EXPECT_EQ(r.iterations[1].dual, (std::vector<Rational>{half, half}));
  EXPECT_EQ(r.iterations[1].oracle_score, r.iterations[1].incumbent);
  EXPECT_FALSE(r.duplicate_vertex);
}

TEST(JointSolver, FourHopUnitDelay) {
  const auto inst = line_instance(4, 1, 1);
  for (bool exact : {false, true}) {
    SolveOptions o;
    o.exact = exact;
    const auto r = joint_solve(inst.network, inst.sessions, ProblemKind::MaxMultiflow, o);
    EXPECT_EQ(r.oracle, OracleKind::MaxMeanCycle);
    EXPECT_EQ(r.objective, half);
    EXPECT_LE(r.region.size(), 4u);
    EXPECT_EQ(r.graph_vertices, 9u);
    EXPECT_EQ(r.graph_edges, 56u);
    const auto known = four_hop::region_vertices();
    for (const auto& v : r.region.vertices)
      EXPECT_NE(std::find(known.begin(), known.end(), v), known.end());
  }
}

TEST(JointSolver, LineNetworksReachOneHalf) {
  for (int L = 2; L <= 6; ++L) {
    const auto inst = line_instance(L, 1, 1);
    const auto r = joint_solve(inst.network, inst.sessions, ProblemKind::MaxMultiflow, exact_options());
    EXPECT_EQ(r.objective, half) << "L=" << L;
  }
}

TEST(JointSolver, TerminationCertificate) {
  // On exit the oracle score does not exceed the incumbent, and the oracle
  // score equals the best score over the full region.
  std::vector<Instance> cases{line_instance(4, 1, 1), line_instance(3, 2, 1), bidir_line_scd(3, 1),
                              bidir_line_scd(3, 0, half), random_acyclic(6, 9, 2)};
  for (const auto& inst : cases) {
    const auto r = joint_solve(inst.network, inst.sessions, ProblemKind::MaxMultiflow, exact_options());
    const auto& last = r.iterations.back();
    EXPECT_LE(last.oracle_score, last.incumbent);
    const auto full = inst.network.has_nonzero_delay() ? region_delay(inst.network, r.window).region
                                                       : region_zero_delay(inst.network);
    Rational best(0);
    for (const auto& v : full.vertices) best = std::max(best, dot(last.dual, v));
    EXPECT_EQ(best, last.oracle_score);
  }
}

TEST(JointSolver, MulticastButterfly) {
  Network net;
  net.nodes = {"s", "a", "b", "c", "d", "t1", "t2"};
  net.links = {{"sa", 0, 1}, {"sb", 0, 2}, {"at1", 1, 5}, {"bt2", 2, 6}, {"ac", 1, 3},
               {"bc", 2, 3}, {"cd", 3, 4}, {"dt1", 4, 5}, {"dt2", 4, 6}};
  net.collisions.resize(net.links.size());
  SessionSet sessions{{Session{0, {5, 6}, Rational(1)}}};
  const auto r = joint_solve(net, sessions, ProblemKind::MaxMultiflow, exact_options());
  EXPECT_EQ(r.objective, 2);
  EXPECT_EQ(r.region.size(), 1u);
}

TEST(JointSolver, DelayModeOnZeroDelayNetworkAgrees) {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 40; ++trial) {
    const auto net = oracle::random_conflict_network(1 + trial % 4, 0.5, rng);
    SessionSet sessions{{Session{0, {1}, Rational(1)}}};
    const auto zero = joint_solve(net, sessions, ProblemKind::MaxMultiflow, exact_options(SolveMode::ZeroDelay));
    const auto delay = joint_solve(net, sessions, ProblemKind::MaxMultiflow, exact_options(SolveMode::Delay));
    EXPECT_EQ(zero.objective, delay.objective) << "trial " << trial;
    EXPECT_EQ(zero.objective, oracle::brute_mwis_value(net, std::vector<Rational>(net.num_links(), Rational(1))));
  }
}

TEST(JointSolver, AgreesWithTwoStepOnRandomNetworks) {
  for (std::uint64_t seed = 0; seed < 15; ++seed) {
    RandomNetworkOptions opts;
    opts.max_links = 9;
    const auto inst = random_acyclic(5 + static_cast<int>(seed % 3), seed, 1 + static_cast<int>(seed % 2), opts);
    for (auto kind : {ProblemKind::MaxMultiflow, ProblemKind::MaxConcurrentMultiflow}) {
      const auto joint = joint_solve(inst.network, inst.sessions, kind, exact_options());
      BaselineOptions b;
      b.exact = true;
      const auto two = two_step_solve(inst.network, inst.sessions, kind, b);
      EXPECT_EQ(joint.objective, two.objective) << "seed " << seed;
      const auto approx = joint_solve(inst.network, inst.sessions, kind);
      EXPECT_NEAR(approx.objective.get_d(), two.objective.get_d(), 1e-9);
    }
  }
}

TEST(JointSolver, AgreesWithTwoStepOnRandomDelays) {
  // Parallel links between two nodes with random collisions and delays. The
  // two-step side enumerates simple cycles, so graphs stay small.
  std::mt19937_64 rng(5);
  int checked = 0;
  for (int trial = 0; trial < 80 && checked < 25; ++trial) {
    const auto net = with_random_delays(oracle::random_conflict_network(2 + trial % 3, 0.6, rng), rng);
    if (!net.has_nonzero_delay() || build_scheduling_graph(net, min_window(net)).num_vertices() > 9) continue;
    ++checked;
    SessionSet sessions{{Session{0, {1}, Rational(1)}}};
    const auto joint = joint_solve(net, sessions, ProblemKind::MaxMultiflow, exact_options());
    BaselineOptions b;
    b.exact = true;
    const auto two = two_step_solve(net, sessions, ProblemKind::MaxMultiflow, b);
    EXPECT_EQ(joint.objective, two.objective) << "trial " << trial;
  }
  EXPECT_GE(checked, 10);
}

TEST(JointSolver, LongerWindowIsReportedNotRequired) {
  // A longer window may only enlarge the achievable region.
  const auto inst = line_instance(3, 1, 1);
  SolveOptions o = exact_options();
  const auto t1 = joint_solve(inst.network, inst.sessions, ProblemKind::MaxMultiflow, o);
  o.window = 2;
  const auto t2 = joint_solve(inst.network, inst.sessions, ProblemKind::MaxMultiflow, o);
  EXPECT_EQ(t2.window, 2u);
  EXPECT_GE(t2.objective, t1.objective);
}

TEST(JointSolver, ModeErrorsAndCaps) {
  const auto inst = line_instance(3, 1, 1);
  EXPECT_THROW(joint_solve(inst.network, inst.sessions, ProblemKind::MaxMultiflow,
                           exact_options(SolveMode::ZeroDelay)),
               std::invalid_argument);
  SolveOptions capped;
  capped.max_iterations = 1;
  EXPECT_THROW(joint_solve(inst.network, inst.sessions, ProblemKind::MaxMultiflow, capped), IterationCapExceeded);
  SolveOptions tiny;
  tiny.limits.max_vertices = 3;
  EXPECT_THROW(joint_solve(inst.network, inst.sessions, ProblemKind::MaxMultiflow, tiny), SchedulingGraphTooLarge);
}
