#pragma once

// Maximum multiflow (MMF) and maximum concurrent multiflow (MCMF) linear
// programs over a V-represented subset of the rate region.
//
// Variables: the objective variable(s) (v_i per session for MMF, a single phi
// for MCMF), per-session per-sink link flows F_{i,j}(l), per-session link
// usage G_i(l) >= F_{i,j}(l) (intra-session coding: usage is the max over
// sinks, not the sum) and convex weights lambda_k over the stored vertices.
// The rate vector is R = sum_k lambda_k R_k; the duals of the coupling rows
// sum_i G_i(l) <= R(l) form the weight vector mu handed to the oracle.

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "mmflow/network.hpp"
#include "mmflow/simplex.hpp"

namespace mmflow {

enum class ProblemKind { MaxMultiflow, MaxConcurrentMultiflow };

inline const char* to_string(ProblemKind kind) {
  return kind == ProblemKind::MaxMultiflow ? "mmf" : "mcmf";
}

/// How the coupling duals are picked when the optimal dual is not unique:
/// as the simplex leaves them, or the optimal dual with the smallest largest
/// coupling entry.
enum class DualSelection { Pivot, Balanced };

template <typename Scalar>
struct FlowSolution {
  ProblemKind kind = ProblemKind::MaxMultiflow;
  Scalar objective{0};
  std::vector<Scalar> session_rates;                   // v_i
  std::vector<std::vector<std::vector<Scalar>>> flows;  // [session][sink][link]
  std::vector<std::vector<Scalar>> usage;               // G_i(l)
  std::vector<Scalar> rate;                             // R = sum_k lambda_k R_k
  std::vector<Scalar> combination;                      // lambda_k
  std::vector<Scalar> dual;                             // mu(l)
};

namespace detail {

template <typename To, typename From>
To convert_scalar(const From& x) {
  if constexpr (std::is_same_v<To, From>) {
    return x;
  } else if constexpr (std::is_same_v<To, Rational>) {
    return to_rational(x);
  } else {
    return x.get_d();
  }
}

}  // namespace detail

/// Element-wise conversion between scalar types (double -> Rational is exact).
template <typename To, typename From>
FlowSolution<To> convert_solution(const FlowSolution<From>& s) {
  auto vec = [](const std::vector<From>& v) {
    std::vector<To> out;
    out.reserve(v.size());
    for (const auto& x : v) out.push_back(detail::convert_scalar<To>(x));
    return out;
  };
  FlowSolution<To> r;
  r.kind = s.kind;
  r.objective = detail::convert_scalar<To>(s.objective);
  r.session_rates = vec(s.session_rates);
  for (const auto& per_session : s.flows) {
    r.flows.emplace_back();
    for (const auto& per_sink : per_session) r.flows.back().push_back(vec(per_sink));
  }
  for (const auto& g : s.usage) r.usage.push_back(vec(g));
  r.rate = vec(s.rate);
  r.combination = vec(s.combination);
  r.dual = vec(s.dual);
  return r;
}

/// Builds and solves LP-MMF or LP-MCMF with R ranging over conv(region).
///
/// Per-sink throughput is measured as net outflow at the source, with flow
/// conservation at every other node except the sink (whose balance then
/// follows). On acyclic networks this coincides with counting Out(s) and
/// In(t) alone; on networks with cycles it keeps loops through the source
/// from being counted as throughput.
template <typename Scalar>
FlowSolution<Scalar> solve_flow_lp(const Network& net, const SessionSet& sessions,
                                   const RegionSubset& region, ProblemKind kind,
                                   DualSelection selection = DualSelection::Balanced,
                                   const LpOptions& options = {}) {
  if (region.empty()) throw std::invalid_argument("region subset is empty");
  const std::size_t links = net.num_links();
  for (const auto& r : region.vertices)
    if (r.size() != links) throw std::invalid_argument("region vertex does not match link count");

  LinearProgram<Scalar> lp;
  const std::size_t k = sessions.size();
  std::vector<std::size_t> rate_var;
  if (kind == ProblemKind::MaxMultiflow) {
    for (std::size_t i = 0; i < k; ++i) rate_var.push_back(lp.add_variable(Scalar(1)));
  } else {
    rate_var.push_back(lp.add_variable(Scalar(1)));
  }

  std::vector<std::vector<std::vector<std::size_t>>> flow_var(k);
  std::vector<std::vector<std::size_t>> usage_var(k);
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < sessions.sessions[i].sinks.size(); ++j) {
      flow_var[i].emplace_back();
      for (LinkIndex l = 0; l < links; ++l) flow_var[i][j].push_back(lp.add_variable());
    }
    for (LinkIndex l = 0; l < links; ++l) usage_var[i].push_back(lp.add_variable());
  }
  std::vector<std::size_t> weight_var;
  for (std::size_t r = 0; r < region.size(); ++r) weight_var.push_back(lp.add_variable());

  std::vector<std::vector<LinkIndex>> outs(net.num_nodes()), ins(net.num_nodes());
  for (LinkIndex l = 0; l < links; ++l) {
    outs[net.links[l].tail].push_back(l);
    ins[net.links[l].head].push_back(l);
  }

  for (std::size_t i = 0; i < k; ++i) {
    const Session& s = sessions.sessions[i];
    for (std::size_t j = 0; j < s.sinks.size(); ++j) {
      for (NodeIndex v = 0; v < net.num_nodes(); ++v) {
        if (v == s.sinks[j]) continue;
        std::vector<LpTerm<Scalar>> terms;
        for (LinkIndex l : outs[v]) terms.push_back({flow_var[i][j][l], Scalar(1)});
        for (LinkIndex l : ins[v]) terms.push_back({flow_var[i][j][l], Scalar(-1)});
        if (v == s.source) {
          if (kind == ProblemKind::MaxMultiflow)
            terms.push_back({rate_var[i], Scalar(-1)});
          else
            terms.push_back({rate_var[0], Scalar(-ScalarTraits<Scalar>::from_rational(s.gamma))});
        }
        lp.add_constraint(std::move(terms), Sense::Equal, Scalar(0));
      }
      for (LinkIndex l = 0; l < links; ++l)
        lp.add_constraint({{flow_var[i][j][l], Scalar(1)}, {usage_var[i][l], Scalar(-1)}},
                          Sense::LessEqual, Scalar(0));
    }
  }

  std::vector<std::size_t> coupling_row(links);
  for (LinkIndex l = 0; l < links; ++l) {
    std::vector<LpTerm<Scalar>> terms;
    for (std::size_t i = 0; i < k; ++i) terms.push_back({usage_var[i][l], Scalar(1)});
    for (std::size_t r = 0; r < region.size(); ++r)
      if (region.vertices[r][l] != 0)
        terms.push_back({weight_var[r], Scalar(-ScalarTraits<Scalar>::from_rational(region.vertices[r][l]))});
    coupling_row[l] = lp.add_constraint(std::move(terms), Sense::LessEqual, Scalar(0));
  }
  {
    std::vector<LpTerm<Scalar>> terms;
    for (std::size_t var : weight_var) terms.push_back({var, Scalar(1)});
    lp.add_constraint(std::move(terms), Sense::Equal, Scalar(1));
  }

  const auto result = lp_solve(lp, options);
  if (result.status != LpStatus::Optimal)
    throw LpError(std::string("flow LP is ") + to_string(result.status), result.status);

  std::vector<Scalar> duals = result.duals;
  if (selection == DualSelection::Balanced)
    duals = balanced_duals(lp, result.objective, coupling_row, result.duals, options);

  auto clamp = [](Scalar x) {
    if constexpr (!ScalarTraits<Scalar>::exact)
      if ((x < 0 && x > -1e-9) || std::abs(x) < 1e-12) return Scalar(0);
    return x;
  };

  FlowSolution<Scalar> sol;
  sol.kind = kind;
  sol.objective = result.objective;
  for (std::size_t i = 0; i < k; ++i) {
    if (kind == ProblemKind::MaxMultiflow)
      sol.session_rates.push_back(clamp(result.values[rate_var[i]]));
    else
      sol.session_rates.push_back(
          clamp(result.values[rate_var[0]] * ScalarTraits<Scalar>::from_rational(sessions.sessions[i].gamma)));
    sol.flows.emplace_back();
    for (const auto& per_sink : flow_var[i]) {
      sol.flows[i].emplace_back();
      for (std::size_t var : per_sink) sol.flows[i].back().push_back(clamp(result.values[var]));
    }
    sol.usage.emplace_back();
    for (std::size_t var : usage_var[i]) sol.usage[i].push_back(clamp(result.values[var]));
  }
  for (std::size_t var : weight_var) sol.combination.push_back(clamp(result.values[var]));
  sol.rate.assign(links, Scalar(0));
  for (std::size_t r = 0; r < region.size(); ++r)
    for (LinkIndex l = 0; l < links; ++l)
      if (region.vertices[r][l] != 0)
        sol.rate[l] += sol.combination[r] * ScalarTraits<Scalar>::from_rational(region.vertices[r][l]);
  for (LinkIndex l = 0; l < links; ++l) sol.dual.push_back(clamp(duals[coupling_row[l]]));
  return sol;
}

template <typename Scalar>
FlowSolution<Scalar> build_and_solve_mmf(const Network& net, const SessionSet& sessions,
                                         const RegionSubset& region) {
  return solve_flow_lp<Scalar>(net, sessions, region, ProblemKind::MaxMultiflow);
}

template <typename Scalar>
FlowSolution<Scalar> build_and_solve_mcmf(const Network& net, const SessionSet& sessions,
                                          const RegionSubset& region) {
  return solve_flow_lp<Scalar>(net, sessions, region, ProblemKind::MaxConcurrentMultiflow);
}

/// Checks conservation, per-sink throughput, coupling and simplex weights.
/// Returns one message per violated condition; `tol` is absolute.
template <typename Scalar>
std::vector<std::string> check_flow_solution(const Network& net, const SessionSet& sessions,
                                             const FlowSolution<Scalar>& sol, double tol = 1e-9) {
  std::vector<std::string> problems;
  auto d = [](const Scalar& x) { return ScalarTraits<Scalar>::to_double(x); };
  const std::size_t links = net.num_links();

  for (std::size_t i = 0; i < sessions.size(); ++i) {
    const Session& s = sessions.sessions[i];
    const double v = d(sol.session_rates[i]);
    if (v < -tol) problems.push_back("negative rate for session " + std::to_string(i));
    for (std::size_t j = 0; j < s.sinks.size(); ++j) {
      const auto& f = sol.flows[i][j];
      for (NodeIndex node = 0; node < net.num_nodes(); ++node) {
        double balance = 0;  // out - in
        for (LinkIndex l = 0; l < links; ++l) {
          if (net.links[l].tail == node) balance += d(f[l]);
          if (net.links[l].head == node) balance -= d(f[l]);
        }
        double expected = node == s.source ? v : (node == s.sinks[j] ? -v : 0.0);
        if (std::abs(balance - expected) > tol)
          problems.push_back("conservation fails at node '" + net.nodes[node] + "' for session " +
                             std::to_string(i) + " sink " + std::to_string(j));
      }
      for (LinkIndex l = 0; l < links; ++l) {
        if (d(f[l]) < -tol) problems.push_back("negative flow on '" + net.links[l].id + "'");
        if (d(f[l]) > d(sol.usage[i][l]) + tol)
          problems.push_back("flow exceeds usage on '" + net.links[l].id + "'");
      }
    }
  }
  for (LinkIndex l = 0; l < links; ++l) {
    double total = 0;
    for (const auto& g : sol.usage) total += d(g[l]);
    if (total > d(sol.rate[l]) + tol) problems.push_back("coupling violated on '" + net.links[l].id + "'");
    if (d(sol.dual[l]) < -tol) problems.push_back("negative dual on '" + net.links[l].id + "'");
  }
  double weight_sum = 0;
  for (const auto& w : sol.combination) {
    if (d(w) < -tol) problems.push_back("negative convex weight");
    weight_sum += d(w);
  }
  if (std::abs(weight_sum - 1.0) > tol) problems.push_back("convex weights do not sum to 1");
  if (sol.kind == ProblemKind::MaxConcurrentMultiflow && !sessions.empty()) {
    const double phi = d(sol.objective);
    for (std::size_t i = 0; i < sessions.size(); ++i)
      if (std::abs(d(sol.session_rates[i]) - phi * sessions.sessions[i].gamma.get_d()) > tol)
        problems.push_back("session " + std::to_string(i) + " rate differs from phi * gamma");
  }
  return problems;
}

}  // namespace mmflow
