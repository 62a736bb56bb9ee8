#pragma once

// Structured-text (JSON) rendering of solve reports. Numbers are printed as
// exact rationals in exact mode and with 12 significant digits otherwise.

#include <optional>
#include <string>

#include "json.hpp"

#include "mmflow/joint_solver.hpp"

namespace mmflow {

struct NumberFormat {
  bool exact = false;

  std::string operator()(const Rational& q) const { return exact ? to_string(q) : format_double(q.get_d()); }
};

inline nlohmann::ordered_json format_vector(const std::vector<Rational>& v, const NumberFormat& fmt) {
  auto out = nlohmann::ordered_json::array();
  for (const auto& x : v) out.push_back(fmt(x));
  return out;
}

inline nlohmann::ordered_json format_vector(const RateVector& r, const NumberFormat& fmt) {
  return format_vector(r.rates, fmt);
}

struct RunMetadata {
  std::string command;
  std::string input;
  std::optional<std::uint64_t> seed;
};

inline nlohmann::ordered_json report_to_json(const Network& net, const SessionSet& sessions,
                                             const SolveReport& report, bool trace,
                                             const RunMetadata& meta = {}) {
  const NumberFormat fmt{report.exact};
  using J = nlohmann::ordered_json;
  J header;
  header["command"] = meta.command;
  header["method"] = report.method;
  header["kind"] = to_string(report.kind);
  header["mode"] = to_string(report.mode);
  header["oracle"] = to_string(report.oracle);
  header["arithmetic"] = report.exact ? "exact" : "double";
  header["lp_tolerance"] = report.tolerance;
  header["termination_tolerance"] = report.tolerance;
  header["seed"] = meta.seed ? J(*meta.seed) : J(nullptr);
  if (!meta.input.empty()) header["input"] = meta.input;

  J out;
  out["header"] = header;
  out["objective"] = fmt(report.objective);
  J rates = J::array();
  for (std::size_t i = 0; i < sessions.size(); ++i) {
    J s;
    s["source"] = net.nodes[sessions.sessions[i].source];
    s["gamma"] = to_string(sessions.sessions[i].gamma);
    s["rate"] = fmt(report.solution.session_rates[i]);
    J sinks = J::array();
    for (std::size_t j = 0; j < sessions.sessions[i].sinks.size(); ++j) {
      J flow;
      for (LinkIndex l = 0; l < net.num_links(); ++l)
        if (report.solution.flows[i][j][l] != 0) flow[net.links[l].id] = fmt(report.solution.flows[i][j][l]);
      sinks.push_back({{"sink", net.nodes[sessions.sessions[i].sinks[j]]}, {"flow", flow.is_null() ? J::object() : flow}});
    }
    s["sinks"] = sinks;
    rates.push_back(s);
  }
  out["sessions"] = rates;

  J links = J::array();
  for (const auto& l : net.links) links.push_back(l.id);
  out["links"] = links;
  out["rate_vector"] = format_vector(report.solution.rate, fmt);
  out["dual"] = format_vector(report.solution.dual, fmt);

  J region;
  region["size"] = report.region.size();
  if (report.region_vertices_known) region["full_region_vertices"] = *report.region_vertices_known;
  J weights = J::array();
  for (std::size_t k = 0; k < report.region.size(); ++k) {
    if (report.solution.combination[k] == 0) continue;
    weights.push_back({{"vertex", format_vector(report.region.vertices[k], fmt)},
                       {"lambda", fmt(report.solution.combination[k])}});
  }
  region["combination"] = weights;
  if (trace || report.method == "joint") {
    J vertices = J::array();
    for (const auto& r : report.region.vertices) vertices.push_back(format_vector(r, fmt));
    region["vertices"] = vertices;
  }
  out["region"] = region;

  if (report.oracle == OracleKind::MaxMeanCycle || report.graph_vertices > 0) {
    out["scheduling_graph"] = {{"window", report.window},
                               {"vertices", report.graph_vertices},
                               {"edges", report.graph_edges}};
  }
  out["iterations"] = report.iterations.size();
  if (report.duplicate_vertex) out["duplicate_vertex"] = true;
  if (trace) {
    J steps = J::array();
    for (const auto& it : report.iterations) {
      steps.push_back({{"region_size", it.region_size},
                       {"lp_objective", fmt(it.lp_objective)},
                       {"dual", format_vector(it.dual, fmt)},
                       {"zero_dual", it.zero_dual},
                       {"oracle_vertex", format_vector(it.oracle_vertex, fmt)},
                       {"oracle_score", fmt(it.oracle_score)},
                       {"incumbent", fmt(it.incumbent)}});
    }
    out["trace"] = steps;
  }
  out["millis"] = report.millis;
  return out;
}

}  // namespace mmflow
