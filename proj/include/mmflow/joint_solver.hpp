#pragma once

// Joint iteration: LP over conv(subset) -> dual mu -> oracle argmax <mu, R>
// over the full region -> grow the subset, until the oracle cannot beat the
// subset's own best score under the current dual.

#include <chrono>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "mmflow/flow_lp.hpp"
#include "mmflow/mwis.hpp"
#include "mmflow/network.hpp"
#include "mmflow/sched_graph.hpp"

namespace mmflow {

enum class SolveMode { Auto, ZeroDelay, Delay };
enum class OracleKind { Mwis, MaxMeanCycle, None };

inline const char* to_string(SolveMode mode) {
  switch (mode) {
    case SolveMode::Auto: return "auto";
    case SolveMode::ZeroDelay: return "zero-delay";
    case SolveMode::Delay: return "delay";
  }
  return "?";
}

inline const char* to_string(OracleKind kind) {
  switch (kind) {
    case OracleKind::Mwis: return "mwis";
    case OracleKind::MaxMeanCycle: return "max-mean-cycle";
    case OracleKind::None: return "none";
  }
  return "?";
}

class IterationCapExceeded : public std::runtime_error {
 public:
  explicit IterationCapExceeded(std::size_t cap)
      : std::runtime_error("iteration cap of " + std::to_string(cap) + " reached without termination") {}
};

struct SolveOptions {
  SolveMode mode = SolveMode::Auto;
  bool exact = false;
  std::size_t window = 0;  // 0: min_window(net)
  std::size_t max_iterations = 10000;
  GraphLimits limits{};
};

struct IterationRecord {
  std::size_t region_size = 0;
  Rational lp_objective;
  std::vector<Rational> dual;
  RateVector oracle_vertex;
  Rational oracle_score;  // <mu, R_{i+1}>
  Rational incumbent;     // max over the subset of <mu, R>
  bool zero_dual = false;
};

struct SolveReport {
  std::string method = "joint";
  ProblemKind kind = ProblemKind::MaxMultiflow;
  SolveMode mode = SolveMode::Auto;
  OracleKind oracle = OracleKind::None;
  bool exact = false;
  double tolerance = 0;
  Rational objective;
  FlowSolution<Rational> solution;
  RegionSubset region;
  std::vector<IterationRecord> iterations;
  bool duplicate_vertex = false;  // oracle re-fetched a stored vertex with a better score
  std::size_t window = 0;
  std::size_t graph_vertices = 0;
  std::size_t graph_edges = 0;
  std::optional<std::size_t> region_vertices_known;
  double millis = 0;
};

/// Resolves Auto against the network; rejects zero-delay mode on a network
/// with nonzero delays.
inline SolveMode resolve_mode(const Network& net, SolveMode mode) {
  if (mode == SolveMode::Auto) return net.has_nonzero_delay() ? SolveMode::Delay : SolveMode::ZeroDelay;
  if (mode == SolveMode::ZeroDelay && net.has_nonzero_delay())
    throw std::invalid_argument("zero-delay mode requested for a network with nonzero delays");
  return mode;
}

/// Region oracle: a vertex maximizing <a, R> over the whole rate region.
class RegionOracle {
 public:
  RegionOracle(const Network& net, SolveMode mode, std::size_t window, const GraphLimits& limits)
      : net_(net), mode_(mode) {
    if (mode_ == SolveMode::Delay) {
      const std::size_t t = window == 0 ? min_window(net) : window;
      graph_ = build_scheduling_graph(net, t, limits);
    }
  }

  OracleKind kind() const { return mode_ == SolveMode::Delay ? OracleKind::MaxMeanCycle : OracleKind::Mwis; }
  const std::optional<SchedulingGraph>& graph() const { return graph_; }

  RateVector best_vertex(const std::vector<Rational>& a) {
    if (!graph_) return mwis_solve(net_, a).indicator;
    graph_->entry_weight = entry_weights(*graph_, a);
    return cycle_to_rate_vector(*graph_, max_mean_cycle_most_active(*graph_));
  }

 private:
  const Network& net_;
  SolveMode mode_;
  std::optional<SchedulingGraph> graph_;
};

namespace detail {

template <typename Scalar>
SolveReport joint_solve(const Network& net, const SessionSet& sessions, ProblemKind kind,
                        const SolveOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  SolveReport report;
  report.kind = kind;
  report.mode = resolve_mode(net, options.mode);
  report.exact = ScalarTraits<Scalar>::exact;
  report.tolerance = ScalarTraits<Scalar>::to_double(ScalarTraits<Scalar>::tolerance());

  RegionOracle oracle(net, report.mode, options.window, options.limits);
  report.oracle = oracle.kind();
  if (oracle.graph()) {
    report.window = oracle.graph()->window;
    report.graph_vertices = oracle.graph()->num_vertices();
    report.graph_edges = oracle.graph()->num_edges;
  }

  const std::size_t links = net.num_links();
  report.region.add(indicator_vector(links, greedy_maximal_independent_set(net)));
  const Rational tol = ScalarTraits<Scalar>::to_rational(ScalarTraits<Scalar>::tolerance());

  for (std::size_t iteration = 0;; ++iteration) {
    if (iteration >= options.max_iterations) throw IterationCapExceeded(options.max_iterations);
    const auto lp = solve_flow_lp<Scalar>(net, sessions, report.region, kind);
    report.solution = convert_solution<Rational>(lp);
    report.objective = report.solution.objective;

    IterationRecord record;
    record.region_size = report.region.size();
    record.lp_objective = report.objective;
    record.dual = report.solution.dual;
    record.zero_dual = std::all_of(record.dual.begin(), record.dual.end(),
                                   [](const Rational& x) { return x == 0; });

    bool first = true;
    for (const auto& r : report.region.vertices) {
      Rational s = dot(record.dual, r);
      if (first || s > record.incumbent) record.incumbent = s;
      first = false;
    }

    const std::vector<Rational> weights = record.zero_dual ? std::vector<Rational>(links, Rational(1)) : record.dual;
    record.oracle_vertex = oracle.best_vertex(weights);
    record.oracle_score = dot(record.dual, record.oracle_vertex);
    const bool known = report.region.contains(record.oracle_vertex);
    report.iterations.push_back(record);

    const auto& last = report.iterations.back();
    if (last.zero_dual) {
      if (known) break;
      report.region.add(last.oracle_vertex);
      continue;
    }
    if (last.oracle_score <= last.incumbent + tol * (1 + abs(last.oracle_score))) break;
    if (known) {
      report.duplicate_vertex = true;
      break;
    }
    report.region.add(last.oracle_vertex);
  }

  report.millis =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return report;
}

}  // namespace detail

/// Exact MMF / MCMF by the joint iteration. Double-precision LP unless
/// `options.exact`; oracle scoring is always exact.
inline SolveReport joint_solve(const Network& net, const SessionSet& sessions, ProblemKind kind,
                               const SolveOptions& options = {}) {
  if (options.exact) return detail::joint_solve<Rational>(net, sessions, kind, options);
  return detail::joint_solve<double>(net, sessions, kind, options);
}

}  // namespace mmflow
