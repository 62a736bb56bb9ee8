#pragma once

// Two-step method: enumerate the whole scheduling rate region, then solve a
// single flow LP over it. Used as a correctness oracle for the joint solver.

#include <algorithm>
#include <chrono>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "mmflow/flow_lp.hpp"
#include "mmflow/joint_solver.hpp"
#include "mmflow/mwis.hpp"
#include "mmflow/sched_graph.hpp"

namespace mmflow {

class RegionOverflow : public std::runtime_error {
 public:
  RegionOverflow(const std::string& what, std::size_t cap)
      : std::runtime_error(what + " exceeds cap of " + std::to_string(cap)), cap_(cap) {}
  std::size_t cap() const { return cap_; }

 private:
  std::size_t cap_;
};

struct BaselineLimits {
  std::size_t max_sets = 1'000'000;
  std::size_t max_cycles = 20'000'000;
  GraphLimits graph{};
};

namespace detail {

// Bron-Kerbosch with pivoting on the complement of the conflict relation:
// maximal cliques there are maximal independent sets here.
class MaximalSetEnumerator {
 public:
  MaximalSetEnumerator(const Network& net, std::size_t cap) : cap_(cap) {
    const std::size_t m = net.num_links();
    const auto conflict = conflict_bitsets(net);
    compatible_.assign(m, Bitset(m));
    for (LinkIndex l = 0; l < m; ++l) {
      compatible_[l] = ~conflict[l];
      compatible_[l].reset(l);
    }
  }

  std::vector<std::vector<LinkIndex>> run() {
    const std::size_t m = compatible_.size();
    Bitset all(m);
    all.set();
    std::vector<LinkIndex> current;
    expand(current, all, Bitset(m));
    std::sort(results_.begin(), results_.end());
    return std::move(results_);
  }

 private:
  void expand(std::vector<LinkIndex>& current, Bitset p, Bitset x) {
    if (p.none() && x.none()) {
      if (results_.size() >= cap_) throw RegionOverflow("maximal independent set count", cap_);
      auto set = current;
      std::sort(set.begin(), set.end());
      results_.push_back(std::move(set));
      return;
    }
    // Pivot: vertex of P | X with most neighbours in P.
    const Bitset px = p | x;
    std::size_t pivot = px.find_first(), best = 0;
    for (auto u = px.find_first(); u != Bitset::npos; u = px.find_next(u)) {
      const std::size_t c = (p & compatible_[u]).count();
      if (c > best) {
        best = c;
        pivot = u;
      }
    }
    const Bitset branch = p - compatible_[pivot];
    for (auto v = branch.find_first(); v != Bitset::npos; v = branch.find_next(v)) {
      current.push_back(v);
      expand(current, p & compatible_[v], x & compatible_[v]);
      current.pop_back();
      p.reset(v);
      x.set(v);
    }
  }

  std::vector<Bitset> compatible_;
  std::size_t cap_;
  std::vector<std::vector<LinkIndex>> results_;
};

// Johnson-style elementary circuit search (blocking sets), rooted at each
// vertex s over the subgraph of vertices >= s. Per-link activity counts are
// maintained along the current path so each circuit's rate vector is formed
// without re-walking it.
class CycleRateCollector {
 public:
  CycleRateCollector(const SchedulingGraph& g, std::size_t cap)
      : g_(g), cap_(cap), blocked_(g.num_vertices(), 0), block_lists_(g.num_vertices()),
        counts_(g.num_links, 0) {}

  std::set<RateVector> run() {
    for (std::size_t s = 0; s < g_.num_vertices(); ++s) {
      root_ = s;
      for (std::size_t v = s; v < g_.num_vertices(); ++v) {
        blocked_[v] = 0;
        block_lists_[v].clear();
      }
      depth_ = 0;
      push(s);
      circuit(s);
      pop(s);
    }
    return std::move(rates_);
  }

  std::size_t cycles() const { return cycles_; }

 private:
  void push(std::size_t v) {
    ++depth_;
    for (std::uint64_t bits = g_.blocks[v]; bits; bits &= bits - 1)
      ++counts_[static_cast<std::size_t>(std::countr_zero(bits)) % g_.num_links];
  }
  void pop(std::size_t v) {
    --depth_;
    for (std::uint64_t bits = g_.blocks[v]; bits; bits &= bits - 1)
      --counts_[static_cast<std::size_t>(std::countr_zero(bits)) % g_.num_links];
  }

  void record() {
    if (++cycles_ > cap_) throw RegionOverflow("simple cycle count", cap_);
    RateVector r(g_.num_links);
    const long slots = static_cast<long>(depth_ * g_.window);
    for (std::size_t l = 0; l < g_.num_links; ++l) {
      r[l] = Rational(counts_[l], slots);
      r[l].canonicalize();
    }
    rates_.insert(std::move(r));
  }

  void unblock(std::size_t u) {
    std::vector<std::size_t> stack{u};
    while (!stack.empty()) {
      const std::size_t w = stack.back();
      stack.pop_back();
      if (!blocked_[w]) continue;
      blocked_[w] = 0;
      for (std::size_t x : block_lists_[w]) stack.push_back(x);
      block_lists_[w].clear();
    }
  }

  bool circuit(std::size_t v) {
    bool found = false;
    blocked_[v] = 1;
    for (std::uint32_t w : g_.out[v]) {
      if (w < root_) continue;
      if (w == root_) {
        record();
        found = true;
      } else if (!blocked_[w]) {
        push(w);
        if (circuit(w)) found = true;
        pop(w);
      }
    }
    if (found) {
      unblock(v);
    } else {
      for (std::uint32_t w : g_.out[v]) {
        if (w < root_) continue;
        auto& list = block_lists_[w];
        if (std::find(list.begin(), list.end(), v) == list.end()) list.push_back(v);
      }
    }
    return found;
  }

  const SchedulingGraph& g_;
  std::size_t cap_;
  std::size_t root_ = 0;
  std::size_t depth_ = 0;
  std::size_t cycles_ = 0;
  std::vector<char> blocked_;
  std::vector<std::vector<std::size_t>> block_lists_;
  std::vector<long> counts_;
  std::set<RateVector> rates_;
};

}  // namespace detail

/// All maximal independent sets of the conflict graph, each sorted, in
/// lexicographic order.
inline std::vector<std::vector<LinkIndex>> maximal_independent_sets(const Network& net,
                                                                    std::size_t cap = BaselineLimits{}.max_sets) {
  if (net.num_links() == 0) return {{}};
  return detail::MaximalSetEnumerator(net, cap).run();
}

/// Indicators of all maximal independent sets plus the zero vector.
inline RegionSubset region_zero_delay(const Network& net, const BaselineLimits& limits = {}) {
  if (net.has_nonzero_delay()) throw std::invalid_argument("network has nonzero delays");
  std::set<RateVector> unique;
  unique.insert(RateVector(net.num_links()));
  for (const auto& set : maximal_independent_sets(net, limits.max_sets))
    unique.insert(indicator_vector(net.num_links(), set));
  RegionSubset region;
  for (const auto& r : unique) region.vertices.push_back(r);
  return region;
}

struct DelayRegion {
  RegionSubset region;
  std::size_t cycles = 0;  // simple cycles enumerated, before deduplication
  std::size_t graph_vertices = 0;
  std::size_t graph_edges = 0;
};

/// Rate vectors of all simple cycles of the scheduling graph, deduplicated,
/// plus the zero vector.
inline DelayRegion region_delay(const Network& net, std::size_t window, const BaselineLimits& limits = {}) {
  const auto g = build_scheduling_graph(net, window, limits.graph);
  detail::CycleRateCollector collector(g, limits.max_cycles);
  auto rates = collector.run();
  rates.insert(RateVector(net.num_links()));
  DelayRegion result;
  for (const auto& r : rates) result.region.vertices.push_back(r);
  result.cycles = collector.cycles();
  result.graph_vertices = g.num_vertices();
  result.graph_edges = g.num_edges;
  return result;
}

/// True iff `p` is a convex combination of `points` (exact LP feasibility).
inline bool in_convex_hull(const RateVector& p, const std::vector<RateVector>& points) {
  if (points.empty()) return false;
  LinearProgram<Rational> lp;
  std::vector<std::size_t> weight;
  for (std::size_t k = 0; k < points.size(); ++k) weight.push_back(lp.add_variable());
  for (std::size_t l = 0; l < p.size(); ++l) {
    std::vector<LpTerm<Rational>> terms;
    for (std::size_t k = 0; k < points.size(); ++k)
      if (points[k][l] != 0) terms.push_back({weight[k], points[k][l]});
    lp.add_constraint(std::move(terms), Sense::Equal, p[l]);
  }
  std::vector<LpTerm<Rational>> sum;
  for (std::size_t k = 0; k < points.size(); ++k) sum.push_back({weight[k], Rational(1)});
  lp.add_constraint(std::move(sum), Sense::Equal, Rational(1));
  return lp_solve(lp).status == LpStatus::Optimal;
}

/// Vertices of conv(points): every point not a convex combination of the
/// remaining ones. Redundant points are discarded as they are found.
inline std::vector<RateVector> extreme_points(std::vector<RateVector> points) {
  std::sort(points.begin(), points.end());
  points.erase(std::unique(points.begin(), points.end()), points.end());
  std::vector<RateVector> kept = points;
  for (std::size_t k = 0; k < kept.size();) {
    std::vector<RateVector> others;
    others.reserve(kept.size() - 1);
    for (std::size_t j = 0; j < kept.size(); ++j)
      if (j != k) others.push_back(kept[j]);
    if (in_convex_hull(kept[k], others))
      kept.erase(kept.begin() + static_cast<long>(k));
    else
      ++k;
  }
  return kept;
}

struct BaselineOptions {
  SolveMode mode = SolveMode::Auto;
  bool exact = false;
  std::size_t window = 0;
  BaselineLimits limits{};
};

/// Enumerates the full region for the resolved mode and solves one LP.
inline SolveReport two_step_solve(const Network& net, const SessionSet& sessions, ProblemKind kind,
                                  const BaselineOptions& options = {}) {
  const auto start = std::chrono::steady_clock::now();
  SolveReport report;
  report.method = "two-step";
  report.kind = kind;
  report.mode = resolve_mode(net, options.mode);
  report.exact = options.exact;
  report.tolerance = options.exact ? 0.0 : ScalarTraits<double>::tolerance();
  if (report.mode == SolveMode::Delay) {
    report.window = options.window == 0 ? min_window(net) : options.window;
    auto full = region_delay(net, report.window, options.limits);
    report.region = std::move(full.region);
    report.graph_vertices = full.graph_vertices;
    report.graph_edges = full.graph_edges;
  } else {
    report.region = region_zero_delay(net, options.limits);
  }
  report.region_vertices_known = report.region.size();
  report.solution = options.exact
                        ? solve_flow_lp<Rational>(net, sessions, report.region, kind)
                        : convert_solution<Rational>(solve_flow_lp<double>(net, sessions, report.region, kind));
  report.objective = report.solution.objective;
  report.millis =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return report;
}

}  // namespace mmflow
