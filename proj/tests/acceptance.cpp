// Acceptance suite: one PASS/FAIL line per criterion. Exit status is nonzero
// iff a gating criterion fails. `--long` adds the optional N6 extreme-point
// count.

#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <set>
#include <string>

#include "CLI11.hpp"
#include "mmflow/mmflow.hpp"
#include "support/four_hop.hpp"
#include "support/oracles.hpp"

using namespace mmflow;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  std::string id;
  std::string name;
  double limit_seconds;
  bool gating;
  std::function<Outcome()> run;
};

const Rational half(1, 2);

std::string q(const Rational& x) { return to_string(x); }

SolveOptions opts(bool exact, SolveMode mode = SolveMode::Auto) {
  SolveOptions o;
  o.exact = exact;
  o.mode = mode;
  return o;
}

Outcome two_hop() {
  const auto inst = line_instance(2, 1, 0);
  const auto exact = joint_solve(inst.network, inst.sessions, ProblemKind::MaxMultiflow, opts(true));
  const auto approx = joint_solve(inst.network, inst.sessions, ProblemKind::MaxMultiflow, opts(false));
  const bool ok = exact.objective == half && std::abs(approx.objective.get_d() - 0.5) <= 1e-9 &&
                  exact.region.size() == 2 && approx.region.size() == 2;
  return {ok, "exact " + q(exact.objective) + ", float " + format_double(approx.objective.get_d()) +
                  ", region sizes " + std::to_string(exact.region.size()) + "/" +
                  std::to_string(approx.region.size())};
}

Outcome four_hop_structure() {
  const auto g = build_scheduling_graph(line_network(4, 1, 1), 1);
  bool ok = g.num_vertices() == 9 && g.num_edges == 56;
  std::size_t mismatches = 0;
  if (ok) {
    const auto index = four_hop::graph_index_of_listed(g);
    for (std::size_t i = 0; i < 9; ++i)
      for (std::size_t j = 0; j < 9; ++j)
        if (g.has_edge(index[i], index[j]) != (four_hop::kAdjacency[i][j] == '1')) ++mismatches;
  }
  ok = ok && mismatches == 0;
  return {ok, std::to_string(g.num_vertices()) + " vertices, " + std::to_string(g.num_edges) + " edges, " +
                  std::to_string(mismatches) + " adjacency mismatches"};
}

Outcome four_hop_optimum() {
  const auto inst = line_instance(4, 1, 1);
  const auto r = joint_solve(inst.network, inst.sessions, ProblemKind::MaxMultiflow, opts(false, SolveMode::Delay));
  const bool ok = std::abs(r.objective.get_d() - 0.5) <= 1e-6 && r.region.size() <= 4;
  return {ok, "objective " + format_double(r.objective.get_d()) + " with " + std::to_string(r.region.size()) +
                  " region vertices"};
}

Outcome four_hop_full_region() {
  const auto full = region_delay(line_network(4, 1, 1), 1);
  const auto ext = extreme_points(full.region.vertices);
  auto expected = four_hop::region_vertices();
  std::sort(expected.begin(), expected.end());
  const bool ok = ext == expected;
  return {ok, std::to_string(full.region.size()) + " distinct cycle rates, " + std::to_string(ext.size()) +
                  " extreme points"};
}

Outcome line6() {
  const auto inst = line_instance(6, 1, 1);
  const auto r = joint_solve(inst.network, inst.sessions, ProblemKind::MaxMultiflow, opts(false, SolveMode::Delay));
  // Independent optimality check: the final dual, scored by an exact max-mean
  // cycle over the whole scheduling graph, must not beat the LP value.
  const auto& last = r.iterations.back();
  const auto g = weight_graph(build_scheduling_graph(inst.network, r.window), last.dual);
  const Rational bound = max_mean_cycle(g).mean / Rational(static_cast<long>(r.window));
  const bool certified = bound <= last.incumbent + Rational(1, 1000000000);
  const bool ok = std::abs(r.objective.get_d() - 0.5) <= 1e-6 && r.region.size() <= 8 && certified;
  return {ok, "objective " + format_double(r.objective.get_d()) + " with " + std::to_string(r.region.size()) +
                  " region vertices, certificate " + (certified ? "holds" : "fails")};
}

Outcome line6_extreme_points() {
  // Cycle enumeration does not finish at this size, so the region is probed
  // with exact max-mean-cycle queries in random directions (both signs) and
  // the distinct maximizers are reduced to extreme points.
  const auto net = line_network(6, 1, 1);
  std::string note;
  try {
    BaselineLimits limits;
    limits.max_cycles = 20'000'000;
    const auto full = region_delay(net, 1, limits);
    const auto ext = extreme_points(full.region.vertices);
    return {ext.size() == 57, "full enumeration: " + std::to_string(ext.size()) + " extreme points"};
  } catch (const RegionOverflow& e) {
    note = std::string("enumeration stopped (") + e.what() + "); ";
  }
  const auto base = build_scheduling_graph(net, 1);
  std::mt19937_64 rng(2024);
  std::set<RateVector> found{RateVector(6)};
  for (int k = 0; k < 20000; ++k) {
    std::vector<Rational> a(6);
    for (auto& x : a) x = oracle::frac(static_cast<long>(rng() % 201) - 100, 100);
    const auto g = weight_graph(base, a);
    found.insert(cycle_to_rate_vector(g, max_mean_cycle(g)));
  }
  const auto ext = extreme_points(std::vector<RateVector>(found.begin(), found.end()));
  return {ext.size() == 57, note + "sampled " + std::to_string(found.size()) + " maximizers, " +
                                std::to_string(ext.size()) + " extreme points (expected 57)"};
}

Outcome oracle_equivalence() {
  std::size_t compared = 0, worst_index = 0;
  double worst = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    RandomNetworkOptions o;
    o.max_links = 8;
    auto inst = random_acyclic(4 + static_cast<int>(seed % 4), seed, 1 + static_cast<int>(seed % 2), o);
    for (auto kind : {ProblemKind::MaxMultiflow, ProblemKind::MaxConcurrentMultiflow}) {
      if (kind == ProblemKind::MaxConcurrentMultiflow && inst.sessions.size() == 2)
        inst.sessions.sessions[1].gamma = half;
      const auto joint = joint_solve(inst.network, inst.sessions, kind);
      const auto two = two_step_solve(inst.network, inst.sessions, kind);
      const double gap = std::abs(joint.objective.get_d() - two.objective.get_d());
      if (gap > worst) {
        worst = gap;
        worst_index = seed;
      }
      ++compared;
    }
  }
  return {worst <= 1e-6, std::to_string(compared) + " comparisons, max gap " + format_double(worst) +
                             (worst > 0 ? " (seed " + std::to_string(worst_index) + ")" : "")};
}

Outcome mwis_exactness() {
  std::mt19937_64 rng(7001);
  std::size_t wrong = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const auto net = oracle::random_conflict_network(1 + trial % 15, 0.1 + 0.05 * (trial % 10), rng);
    std::vector<Rational> w(net.num_links());
    for (auto& x : w) x = oracle::frac(1 + static_cast<long>(rng() % 50), 1 + static_cast<long>(rng() % 6));
    if (mwis_solve(net, w).value != oracle::brute_mwis_value(net, w)) ++wrong;
  }
  return {wrong == 0, "200 graphs, " + std::to_string(wrong) + " mismatches"};
}

Outcome mmc_exactness() {
  std::mt19937_64 rng(7002);
  std::size_t wrong = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + trial % 12;
    const double p = 0.1 + 0.05 * (trial % 7);
    Adjacency out(n);
    std::map<std::pair<std::size_t, std::size_t>, Rational> w;
    std::uniform_real_distribution<double> u(0, 1);
    auto add = [&](std::size_t a, std::size_t b) {
      if (w.contains({a, b})) return;
      out[a].push_back(static_cast<std::uint32_t>(b));
      w[{a, b}] = oracle::frac(static_cast<long>(rng() % 41) - 20, 1 + static_cast<long>(rng() % 5));
    };
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = 0; b < n; ++b)
        if (u(rng) < p) add(a, b);
    const std::size_t a = rng() % n, b = rng() % n;
    add(a, b);
    add(b, a);
    for (auto& list : out) std::sort(list.begin(), list.end());
    auto weight = [&](std::size_t x, std::size_t y) { return w.at({x, y}); };
    oracle::Digraph d(n);
    for (std::size_t x = 0; x < n; ++x) d[x].assign(out[x].begin(), out[x].end());
    if (max_mean_cycle(out, weight).mean != *oracle::brute_max_mean(d, weight)) ++wrong;
  }
  return {wrong == 0, "200 digraphs, " + std::to_string(wrong) + " mismatches"};
}

Outcome schedule_realization() {
  const auto net = line_network(4, 1, 1);
  const auto g = build_scheduling_graph(net, 1);
  std::mt19937_64 rng(7003);
  std::size_t bad = 0;
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<std::size_t> walk{static_cast<std::size_t>(rng() % g.num_vertices())};
    std::vector<int> seen(g.num_vertices(), -1);
    seen[walk[0]] = 0;
    CycleResult c;
    while (c.cycle.empty()) {
      const auto& next = g.out[walk.back()];
      const std::size_t v = next[rng() % next.size()];
      if (seen[v] >= 0) {
        c.cycle.assign(walk.begin() + seen[v], walk.end());
        c.cycle.push_back(v);
      } else {
        seen[v] = static_cast<int>(walk.size());
        walk.push_back(v);
      }
    }
    const auto s = realize_schedule(g, c, 1 + rng() % 6);
    if (!verify_collision_free(net, s).collision_free || empirical_rate(s) != cycle_to_rate_vector(g, c)) ++bad;
  }
  return {bad == 0, "100 cycles, " + std::to_string(bad) + " failures"};
}

Outcome performance_ordering() {
  std::string detail;
  bool ok = true;
  std::size_t completed = 0;
  for (int L = 3; L <= 5; ++L) {
    const auto inst = line_instance(L, 1, 1);
    const auto t0 = std::chrono::steady_clock::now();
    const auto joint = joint_solve(inst.network, inst.sessions, ProblemKind::MaxMultiflow);
    const auto t1 = std::chrono::steady_clock::now();
    const double joint_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
    BaselineOptions b;
    b.limits.max_cycles = 2'000'000;
    if (!detail.empty()) detail += "; ";
    try {
      const auto two = two_step_solve(inst.network, inst.sessions, ProblemKind::MaxMultiflow, b);
      const double two_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t1).count();
      ++completed;
      ok = ok && joint_ms < two_ms && std::abs(joint.objective.get_d() - two.objective.get_d()) <= 1e-6;
      char buf[128];
      std::snprintf(buf, sizeof buf, "L=%d joint %.3f ms, two-step %.3f ms, ratio %.3g", L, joint_ms, two_ms,
                    two_ms / std::max(joint_ms, 1e-6));
      detail += buf;
    } catch (const RegionOverflow&) {
      detail += "L=" + std::to_string(L) + " two-step hit its cycle cap";
    }
  }
  return {ok && completed > 0, detail};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance suite"};
  bool run_long = false;
  app.add_flag("--long", run_long, "also run the optional long check");
  CLI11_PARSE(app, argc, argv);

  std::vector<Criterion> criteria{
      {"1", "two-hop zero-delay MMF", 0.1, true, two_hop},
      {"2", "four-hop scheduling graph structure", 0.1, true, four_hop_structure},
      {"3", "four-hop delay MMF", 1.0, true, four_hop_optimum},
      {"4", "four-hop full region extreme points", 30.0, true, four_hop_full_region},
      {"5", "six-hop delay MMF", 10.0, true, line6},
      {"6", "joint vs two-step on random networks", 60.0, true, oracle_equivalence},
      {"7", "MWIS exactness", 30.0, true, mwis_exactness},
      {"8", "max-mean-cycle exactness", 30.0, true, mmc_exactness},
      {"9", "schedule realization", 10.0, true, schedule_realization},
      {"10", "joint faster than two-step on delayed lines (non-gating)", 1e9, false, performance_ordering},
  };
  if (run_long)
    criteria.push_back({"5-long", "six-hop region has 57 extreme points (optional)", 1e9, false, line6_extreme_points});

  bool all_gating = true;
  for (const auto& c : criteria) {
    Outcome outcome;
    const auto start = std::chrono::steady_clock::now();
    try {
      outcome = c.run();
    } catch (const std::exception& e) {
      outcome = {false, std::string("exception: ") + e.what()};
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = seconds < c.limit_seconds;
    const bool pass = outcome.pass && in_time;
    if (!pass && c.gating) all_gating = false;
    std::printf("%s %s %s (%.3f s%s): %s\n", pass ? "PASS" : "FAIL", c.id.c_str(), c.name.c_str(), seconds,
                in_time ? "" : ", over time limit", outcome.detail.c_str());
    std::fflush(stdout);
  }
  return all_gating ? 0 : 1;
}
