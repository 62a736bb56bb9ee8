#pragma once

// Maximum mean cycle by Karp's characterization, applied per strongly
// connected component, with exact arithmetic throughout.
//
// Rational edge weights are scaled by the LCM of their denominators to
// integers. Each component runs Karp's recurrence
//   F_k(v) = max_{(u,v)} F_{k-1}(u) + w(u,v),  F_0(s) = 0,
//   lambda* = max_v min_{0<=k<n} (F_n(v) - F_k(v)) / (n - k)
// in __int128 when the magnitudes allow it and in GMP integers otherwise.
// The cycle is recovered from the predecessor walk of length n ending at the
// maximizing vertex; if no cycle on that walk attains lambda*, it is taken
// from the subgraph of tight edges under longest-path potentials instead.

#include <algorithm>
#include <cstdint>
#include <limits>
#include <optional>
#include <type_traits>
#include <stdexcept>
#include <vector>

#include "mmflow/rational.hpp"

namespace mmflow {

using Adjacency = std::vector<std::vector<std::uint32_t>>;

/// A cycle v_0, ..., v_m with v_0 = v_m and m >= 1 edges, and its mean.
struct CycleResult {
  std::vector<std::size_t> cycle;
  Rational mean;

  std::size_t length() const { return cycle.empty() ? 0 : cycle.size() - 1; }
};

/// Tarjan's algorithm, iterative. Components are returned with their
/// vertices ascending, ordered by smallest member.
inline std::vector<std::vector<std::uint32_t>> strongly_connected_components(const Adjacency& out) {
  const std::size_t n = out.size();
  constexpr std::uint32_t unvisited = std::numeric_limits<std::uint32_t>::max();
  std::vector<std::uint32_t> index(n, unvisited), low(n, 0);
  std::vector<char> on_stack(n, 0);
  std::vector<std::uint32_t> stack;
  std::vector<std::vector<std::uint32_t>> components;
  std::uint32_t counter = 0;

  struct Frame {
    std::uint32_t v;
    std::size_t next;
  };
  std::vector<Frame> call;
  for (std::uint32_t root = 0; root < n; ++root) {
    if (index[root] != unvisited) continue;
    call.push_back({root, 0});
    index[root] = low[root] = counter++;
    stack.push_back(root);
    on_stack[root] = 1;
    while (!call.empty()) {
      Frame& f = call.back();
      if (f.next < out[f.v].size()) {
        const std::uint32_t w = out[f.v][f.next++];
        if (index[w] == unvisited) {
          index[w] = low[w] = counter++;
          stack.push_back(w);
          on_stack[w] = 1;
          call.push_back({w, 0});
        } else if (on_stack[w]) {
          low[f.v] = std::min(low[f.v], index[w]);
        }
        continue;
      }
      const std::uint32_t v = f.v;
      call.pop_back();
      if (!call.empty()) low[call.back().v] = std::min(low[call.back().v], low[v]);
      if (low[v] == index[v]) {
        std::vector<std::uint32_t> component;
        std::uint32_t w;
        do {
          w = stack.back();
          stack.pop_back();
          on_stack[w] = 0;
          component.push_back(w);
        } while (w != v);
        std::sort(component.begin(), component.end());
        components.push_back(std::move(component));
      }
    }
  }
  std::sort(components.begin(), components.end(),
            [](const auto& a, const auto& b) { return a.front() < b.front(); });
  return components;
}

namespace detail {

inline __int128 to_int128(const mpz_class& z) {
  const bool negative = sgn(z) < 0;
  mpz_class magnitude = abs(z);
  const mpz_class low_mask = (mpz_class(1) << 64) - 1;
  const mpz_class low_part = magnitude & low_mask;
  const mpz_class high_part = magnitude >> 64;
  unsigned __int128 value = static_cast<unsigned __int128>(mpz_get_ui(high_part.get_mpz_t())) << 64;
  value |= mpz_get_ui(low_part.get_mpz_t());
  const auto result = static_cast<__int128>(value);
  return negative ? -result : result;
}

inline mpz_class from_int128(__int128 x) {
  const bool negative = x < 0;
  unsigned __int128 magnitude = negative ? static_cast<unsigned __int128>(-x) : static_cast<unsigned __int128>(x);
  mpz_class result(static_cast<unsigned long>(magnitude >> 64));
  result <<= 64;
  result += static_cast<unsigned long>(magnitude & 0xFFFFFFFFFFFFFFFFULL);
  return negative ? mpz_class(-result) : result;
}

template <typename W>
mpz_class to_mpz(const W& x) {
  if constexpr (std::is_same_v<W, mpz_class>) {
    return x;
  } else {
    return from_int128(x);
  }
}

// Graph restricted to one component, in CSR form with local indices.
template <typename W>
struct ComponentGraph {
  std::vector<std::uint32_t> global;  // local -> global vertex
  std::vector<std::size_t> offsets;   // out-edge ranges per local vertex
  std::vector<std::uint32_t> targets;
  std::vector<W> weights;
};

struct KarpOutcome {
  mpz_class numerator;    // lambda* in scaled units is numerator / denominator
  mpz_class denominator;  // positive
  std::vector<std::uint32_t> walk;  // local vertices x_0..x_n of the critical walk
  std::vector<std::size_t> walk_edges;  // edge index into targets for x_{k-1} -> x_k
};

template <typename W>
KarpOutcome karp(const ComponentGraph<W>& g) {
  const std::size_t n = g.global.size();
  constexpr std::uint32_t none = std::numeric_limits<std::uint32_t>::max();
  // pred[k * n + v] = edge index used to reach v at length k.
  std::vector<std::uint32_t> pred((n + 1) * n, none);

  auto relax_all = [&](auto&& on_layer) {
    std::vector<W> previous(n), next(n);
    std::vector<char> prev_ok(n, 0), next_ok(n, 0);
    previous[0] = W(0);
    prev_ok[0] = 1;
    on_layer(0, previous, prev_ok);
    for (std::size_t k = 1; k <= n; ++k) {
      std::fill(next_ok.begin(), next_ok.end(), 0);
      for (std::uint32_t u = 0; u < n; ++u) {
        if (!prev_ok[u]) continue;
        for (std::size_t e = g.offsets[u]; e < g.offsets[u + 1]; ++e) {
          const std::uint32_t v = g.targets[e];
          W candidate = previous[u] + g.weights[e];
          if (!next_ok[v] || candidate > next[v]) {
            next[v] = candidate;
            next_ok[v] = 1;
            pred[k * n + v] = static_cast<std::uint32_t>(e);
          }
        }
      }
      std::swap(previous, next);
      std::swap(prev_ok, next_ok);
      on_layer(k, previous, prev_ok);
    }
  };

  std::vector<W> final_layer;
  std::vector<char> final_ok;
  relax_all([&](std::size_t k, const std::vector<W>& layer, const std::vector<char>& ok) {
    if (k == n) {
      final_layer = layer;
      final_ok = ok;
    }
  });

  // Second pass: per vertex, min over k of (F_n - F_k) / (n - k).
  std::vector<W> min_num(n);
  std::vector<W> min_den(n);
  std::vector<char> has_min(n, 0);
  relax_all([&](std::size_t k, const std::vector<W>& layer, const std::vector<char>& ok) {
    if (k == n) return;
    for (std::uint32_t v = 0; v < n; ++v) {
      if (!final_ok[v] || !ok[v]) continue;
      W num = final_layer[v] - layer[v];
      W den = static_cast<long>(n - k);
      if (!has_min[v] || num * min_den[v] < min_num[v] * den) {
        min_num[v] = num;
        min_den[v] = den;
        has_min[v] = 1;
      }
    }
  });

  std::optional<std::uint32_t> best;
  for (std::uint32_t v = 0; v < n; ++v) {
    if (!has_min[v]) continue;
    if (!best || min_num[v] * min_den[*best] > min_num[*best] * min_den[v]) best = v;
  }
  if (!best) throw std::logic_error("strongly connected component without a cycle");

  KarpOutcome outcome;
  outcome.numerator = to_mpz(min_num[*best]);
  outcome.denominator = to_mpz(min_den[*best]);
  outcome.walk.assign(n + 1, 0);
  outcome.walk_edges.assign(n + 1, 0);
  std::uint32_t v = *best;
  for (std::size_t k = n; k >= 1; --k) {
    outcome.walk[k] = v;
    const std::uint32_t e = pred[k * n + v];
    outcome.walk_edges[k] = e;
    // Source of edge e: the local vertex whose range contains it.
    const auto it = std::upper_bound(g.offsets.begin(), g.offsets.end(), static_cast<std::size_t>(e));
    v = static_cast<std::uint32_t>((it - g.offsets.begin()) - 1);
  }
  outcome.walk[0] = v;
  return outcome;
}

template <typename W>
ComponentGraph<W> restrict_component(const Adjacency& out, const std::vector<mpz_class>& scaled,
                                     const std::vector<std::size_t>& edge_base,
                                     const std::vector<std::uint32_t>& component,
                                     const std::vector<std::uint32_t>& local_of) {
  ComponentGraph<W> g;
  g.global = component;
  g.offsets.push_back(0);
  for (std::uint32_t u : component) {
    for (std::size_t k = 0; k < out[u].size(); ++k) {
      const std::uint32_t v = out[u][k];
      if (local_of[v] == std::numeric_limits<std::uint32_t>::max()) continue;
      g.targets.push_back(local_of[v]);
      if constexpr (std::is_same_v<W, mpz_class>) {
        g.weights.push_back(scaled[edge_base[u] + k]);
      } else {
        g.weights.push_back(to_int128(scaled[edge_base[u] + k]));
      }
    }
    g.offsets.push_back(g.targets.size());
  }
  return g;
}

// Finds a cycle of mean num/den among tight edges (exact; used as fallback).
inline std::vector<std::uint32_t> tight_cycle(const ComponentGraph<mpz_class>& g,
                                              const mpz_class& num, const mpz_class& den) {
  const std::size_t n = g.global.size();
  std::vector<mpz_class> shifted(g.weights.size());
  for (std::size_t e = 0; e < shifted.size(); ++e) shifted[e] = g.weights[e] * den - num;
  auto source_of = [&](std::size_t e) {
    const auto it = std::upper_bound(g.offsets.begin(), g.offsets.end(), e);
    return static_cast<std::uint32_t>((it - g.offsets.begin()) - 1);
  };
  std::vector<mpz_class> potential(n, mpz_class(0));
  for (std::size_t round = 0; round < n; ++round) {
    bool changed = false;
    for (std::uint32_t u = 0; u < n; ++u)
      for (std::size_t e = g.offsets[u]; e < g.offsets[u + 1]; ++e) {
        mpz_class candidate = potential[u] + shifted[e];
        if (candidate > potential[g.targets[e]]) {
          potential[g.targets[e]] = candidate;
          changed = true;
        }
      }
    if (!changed) break;
  }
  // Walk tight edges until a vertex repeats.
  std::vector<std::vector<std::uint32_t>> tight(n);
  for (std::size_t e = 0; e < shifted.size(); ++e) {
    const std::uint32_t u = source_of(e);
    if (potential[u] + shifted[e] == potential[g.targets[e]]) tight[u].push_back(g.targets[e]);
  }
  std::vector<int> color(n, 0);
  std::vector<std::uint32_t> path;
  for (std::uint32_t root = 0; root < n; ++root) {
    if (color[root]) continue;
    std::vector<std::pair<std::uint32_t, std::size_t>> stack{{root, 0}};
    color[root] = 1;
    path = {root};
    while (!stack.empty()) {
      auto& [u, next] = stack.back();
      if (next < tight[u].size()) {
        const std::uint32_t v = tight[u][next++];
        if (color[v] == 1) {
          auto start = std::find(path.begin(), path.end(), v);
          std::vector<std::uint32_t> cycle(start, path.end());
          cycle.push_back(v);
          return cycle;
        }
        if (color[v] == 0) {
          color[v] = 1;
          path.push_back(v);
          stack.push_back({v, 0});
        }
        continue;
      }
      color[u] = 2;
      path.pop_back();
      stack.pop_back();
    }
  }
  throw std::logic_error("no tight cycle found for the maximum mean");
}

}  // namespace detail

/// Maximum mean cycle of a digraph given by out-adjacency and an edge weight
/// function `weight(u, v) -> Rational`. Self-loops are cycles of length 1.
/// Ties between components keep the first by smallest vertex; ties inside a
/// component follow the scan order of the recurrence.
template <typename WeightFn>
CycleResult max_mean_cycle(const Adjacency& out, WeightFn&& weight) {
  const std::size_t n = out.size();
  std::vector<std::size_t> edge_base(n + 1, 0);
  for (std::size_t u = 0; u < n; ++u) edge_base[u + 1] = edge_base[u] + out[u].size();

  std::vector<Rational> raw;
  raw.reserve(edge_base[n]);
  mpz_class scale(1);
  for (std::size_t u = 0; u < n; ++u)
    for (std::uint32_t v : out[u]) {
      raw.push_back(Rational(weight(u, static_cast<std::size_t>(v))));
      mpz_lcm(scale.get_mpz_t(), scale.get_mpz_t(), raw.back().get_den_mpz_t());
    }
  std::vector<mpz_class> scaled(raw.size());
  mpz_class max_abs(0);
  for (std::size_t e = 0; e < raw.size(); ++e) {
    scaled[e] = raw[e].get_num() * (scale / raw[e].get_den());
    if (abs(scaled[e]) > max_abs) max_abs = abs(scaled[e]);
  }

  std::optional<CycleResult> best;
  std::vector<std::uint32_t> local_of(n, std::numeric_limits<std::uint32_t>::max());
  for (const auto& component : strongly_connected_components(out)) {
    const bool has_cycle =
        component.size() > 1 ||
        std::find(out[component[0]].begin(), out[component[0]].end(), component[0]) !=
            out[component[0]].end();
    if (!has_cycle) continue;
    for (std::uint32_t k = 0; k < component.size(); ++k) local_of[component[k]] = k;

    const std::size_t size = component.size();
    const std::size_t bits = mpz_sizeinbase(max_abs.get_mpz_t(), 2) +
                             2 * (64 - static_cast<std::size_t>(__builtin_clzll(size + 1))) + 3;
    detail::KarpOutcome outcome;
    std::optional<detail::ComponentGraph<mpz_class>> exact_graph;
    if (bits < 125) {
      auto g = detail::restrict_component<__int128>(out, scaled, edge_base, component, local_of);
      outcome = detail::karp(g);
    } else {
      exact_graph = detail::restrict_component<mpz_class>(out, scaled, edge_base, component, local_of);
      outcome = detail::karp(*exact_graph);
    }
    Rational mean(outcome.numerator, outcome.denominator * scale);
    mean.canonicalize();

    if (!best || mean > best->mean) {
      if (!exact_graph)
        exact_graph = detail::restrict_component<mpz_class>(out, scaled, edge_base, component, local_of);
      const auto& g = *exact_graph;
      // Decompose the critical walk into cycles; take the first attaining the mean.
      std::vector<std::uint32_t> local_cycle;
      std::vector<std::size_t> position(size, SIZE_MAX);
      std::vector<std::uint32_t> stack_vertices;
      std::vector<mpz_class> prefix{mpz_class(0)};
      for (std::size_t k = 0; k < outcome.walk.size() && local_cycle.empty(); ++k) {
        const std::uint32_t v = outcome.walk[k];
        if (k > 0) prefix.push_back(prefix.back() + g.weights[outcome.walk_edges[k]]);
        if (position[v] != SIZE_MAX) {
          const std::size_t start = position[v];
          const std::size_t length = stack_vertices.size() - start;
          const mpz_class total = prefix.back() - prefix[start];
          if (total * outcome.denominator == outcome.numerator * static_cast<long>(length)) {
            local_cycle.assign(stack_vertices.begin() + static_cast<long>(start), stack_vertices.end());
            local_cycle.push_back(v);
            break;
          }
          for (std::size_t j = start + 1; j < stack_vertices.size(); ++j)
            position[stack_vertices[j]] = SIZE_MAX;
          stack_vertices.resize(start + 1);
          prefix.resize(start + 1);
          continue;
        }
        position[v] = stack_vertices.size();
        stack_vertices.push_back(v);
      }
      if (local_cycle.empty()) local_cycle = detail::tight_cycle(g, outcome.numerator, outcome.denominator);

      CycleResult result;
      for (std::uint32_t v : local_cycle) result.cycle.push_back(component[v]);
      result.mean = mean;
      best = std::move(result);
    }
    for (std::uint32_t v : component) local_of[v] = std::numeric_limits<std::uint32_t>::max();
  }
  if (!best) throw std::invalid_argument("graph has no cycle");
  return *best;
}

/// Mean of an explicit closed walk under `weight`.
template <typename WeightFn>
Rational cycle_mean(const std::vector<std::size_t>& cycle, WeightFn&& weight) {
  if (cycle.size() < 2 || cycle.front() != cycle.back())
    throw std::invalid_argument("not a closed walk");
  Rational total(0);
  for (std::size_t k = 0; k + 1 < cycle.size(); ++k) total += Rational(weight(cycle[k], cycle[k + 1]));
  return Rational(total / static_cast<long>(cycle.size() - 1));
}

}  // namespace mmflow
