#pragma once

// Canonical network families: K-hop line networks, bidirectional lines under
// a single collision domain, and seeded random acyclic networks.

#include <cstdint>
#include <cstdlib>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "mmflow/network.hpp"

namespace mmflow {

struct Instance {
  Network network;
  SessionSet sessions;
};

/// L-hop line with nodes "1".."L+1" and links l_i = (i, i+1) named "l<i>".
/// I(l_i) = {l_j : j != i, |i+1-j| <= K} and D(l_i, l_j) = d * (1 - |i+1-j|).
inline Network line_network(int num_hops, int interference_hops, std::int64_t hop_delay) {
  if (num_hops < 1) throw std::invalid_argument("line network needs L >= 1");
  if (interference_hops < 1) throw std::invalid_argument("line network needs K >= 1");
  if (hop_delay < 0) throw std::invalid_argument("line network needs d >= 0");

  Network net;
  for (int v = 1; v <= num_hops + 1; ++v) net.nodes.push_back(std::to_string(v));
  for (int i = 1; i <= num_hops; ++i)
    net.links.push_back({"l" + std::to_string(i), static_cast<NodeIndex>(i - 1),
                         static_cast<NodeIndex>(i)});
  net.collisions.resize(num_hops);
  for (int i = 1; i <= num_hops; ++i) {
    for (int j = 1; j <= num_hops; ++j) {
      const int gap = std::abs(i + 1 - j);
      if (j == i || gap > interference_hops) continue;
      net.collisions[i - 1].push_back(static_cast<LinkIndex>(j - 1));
      net.delays[{static_cast<LinkIndex>(i - 1), static_cast<LinkIndex>(j - 1)}] =
          hop_delay * (1 - gap);
    }
  }
  return net;
}

/// Unicast from the first to the last node of a line network.
inline SessionSet line_unicast_sessions(const Network& line) {
  return SessionSet{{Session{0, {line.num_nodes() - 1}, Rational(1)}}};
}

inline Instance line_instance(int num_hops, int interference_hops, std::int64_t hop_delay) {
  Instance inst{line_network(num_hops, interference_hops, hop_delay), {}};
  inst.sessions = line_unicast_sessions(inst.network);
  return inst;
}

/// Bidirectional line over nodes "1".."N" where every link collides with
/// every other link. Forward links "f<i>" = (i, i+1), backward links
/// "b<i>" = (i+1, i). With `hop_delay` = 0 all delays vanish; otherwise
/// D(l, l') = d * (1 - |head(l) - tail(l')|), the arrival offset of l''s
/// signal at l's receiver when nodes sit one hop apart. Two unicast sessions:
/// 1 -> N with weight 1 and N -> 1 with weight `reverse_gamma`.
inline Instance bidir_line_scd(int num_nodes, std::int64_t hop_delay = 0,
                               Rational reverse_gamma = Rational(1)) {
  if (num_nodes < 2) throw std::invalid_argument("bidirectional line needs N >= 2");
  if (hop_delay < 0) throw std::invalid_argument("bidirectional line needs d >= 0");
  if (reverse_gamma <= 0) throw std::invalid_argument("session weight must be positive");

  Instance inst;
  Network& net = inst.network;
  for (int v = 1; v <= num_nodes; ++v) net.nodes.push_back(std::to_string(v));
  for (int i = 1; i < num_nodes; ++i)
    net.links.push_back({"f" + std::to_string(i), static_cast<NodeIndex>(i - 1),
                         static_cast<NodeIndex>(i)});
  for (int i = 1; i < num_nodes; ++i)
    net.links.push_back({"b" + std::to_string(i), static_cast<NodeIndex>(i),
                         static_cast<NodeIndex>(i - 1)});
  const std::size_t m = net.links.size();
  net.collisions.resize(m);
  for (LinkIndex l = 0; l < m; ++l) {
    for (LinkIndex other = 0; other < m; ++other) {
      if (other == l) continue;
      net.collisions[l].push_back(other);
      const auto gap = std::llabs(static_cast<long long>(net.links[l].head) -
                                  static_cast<long long>(net.links[other].tail));
      net.delays[{l, other}] = hop_delay * (1 - gap);
    }
  }
  const auto last = static_cast<NodeIndex>(num_nodes - 1);
  inst.sessions.sessions = {Session{0, {last}, Rational(1)},
                            Session{last, {0}, std::move(reverse_gamma)}};
  return inst;
}

struct RandomNetworkOptions {
  /// Probability of each extra forward link i -> j beyond the spanning tree.
  double edge_probability = 0.3;
  /// Upper bound on the link count; 0 means unbounded.
  std::size_t max_links = 0;
  /// Attempts before giving up on session placement.
  int max_attempts = 16;
};

namespace detail {

// Draws are taken straight from mt19937_64 so that other implementations
// using the same engine can reproduce the structure: uniform_below(n) is
// `engine() % n` and bernoulli(p) compares the top 53 bits against p.
inline std::uint64_t uniform_below(std::mt19937_64& engine, std::uint64_t n) {
  return engine() % n;
}

inline bool bernoulli(std::mt19937_64& engine, double p) {
  return static_cast<double>(engine() >> 11) * 0x1.0p-53 < p;
}

inline std::vector<std::vector<bool>> reachability(const Network& net) {
  const std::size_t n = net.num_nodes();
  std::vector<std::vector<bool>> reach(n, std::vector<bool>(n, false));
  for (NodeIndex s = 0; s < n; ++s) {
    std::vector<NodeIndex> stack{s};
    while (!stack.empty()) {
      NodeIndex u = stack.back();
      stack.pop_back();
      for (const auto& link : net.links) {
        if (link.tail != u || reach[s][link.head]) continue;
        reach[s][link.head] = true;
        stack.push_back(link.head);
      }
    }
  }
  return reach;
}

}  // namespace detail

/// Connected DAG on nodes "n0".."n<N-1>" (topological order = index order)
/// under the 1-hop interference model: two links collide iff they share an
/// endpoint node; all delays are zero. A random forward spanning tree keeps
/// the network connected, then each further pair i < j gets a link with
/// probability `edge_probability`. Each session has one source and two
/// distinct sinks reachable from it. Attempt k uses seed + k * 0x9E3779B97F4A7C15.
inline Instance random_acyclic(int num_nodes, std::uint64_t seed, int num_sessions,
                               const RandomNetworkOptions& options = {}) {
  if (num_nodes < 3) throw std::invalid_argument("random network needs at least 3 nodes");
  if (num_sessions < 1) throw std::invalid_argument("random network needs at least 1 session");
  const auto n = static_cast<std::size_t>(num_nodes);
  if (options.max_links != 0 && options.max_links < n - 1)
    throw std::invalid_argument("max_links cannot hold a spanning tree");

  for (int attempt = 0; attempt < options.max_attempts; ++attempt) {
    std::mt19937_64 engine(seed + static_cast<std::uint64_t>(attempt) * 0x9E3779B97F4A7C15ULL);
    Instance inst;
    Network& net = inst.network;
    for (std::size_t v = 0; v < n; ++v) net.nodes.push_back("n" + std::to_string(v));

    std::vector<std::vector<bool>> linked(n, std::vector<bool>(n, false));
    auto add_link = [&](NodeIndex tail, NodeIndex head) {
      net.links.push_back({"e" + std::to_string(net.links.size()), tail, head});
      linked[tail][head] = true;
    };
    for (std::size_t j = 1; j < n; ++j) add_link(detail::uniform_below(engine, j), j);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        const bool draw = detail::bernoulli(engine, options.edge_probability);
        if (!draw || linked[i][j]) continue;
        if (options.max_links != 0 && net.links.size() >= options.max_links) continue;
        add_link(i, j);
      }
    }

    const std::size_t m = net.links.size();
    net.collisions.resize(m);
    for (LinkIndex a = 0; a < m; ++a) {
      for (LinkIndex b = 0; b < m; ++b) {
        if (a == b) continue;
        const auto& x = net.links[a];
        const auto& y = net.links[b];
        if (x.tail == y.tail || x.tail == y.head || x.head == y.tail || x.head == y.head) {
          net.collisions[a].push_back(b);
          net.delays[{a, b}] = 0;
        }
      }
    }

    const auto reach = detail::reachability(net);
    std::vector<NodeIndex> sources;
    for (NodeIndex v = 0; v < n; ++v) {
      std::size_t count = 0;
      for (NodeIndex t = 0; t < n; ++t) count += (t != v && reach[v][t]) ? 1 : 0;
      if (count >= 2) sources.push_back(v);
    }
    if (sources.empty()) continue;

    for (int k = 0; k < num_sessions; ++k) {
      const NodeIndex s = sources[detail::uniform_below(engine, sources.size())];
      std::vector<NodeIndex> reachable;
      for (NodeIndex t = 0; t < n; ++t)
        if (t != s && reach[s][t]) reachable.push_back(t);
      const auto first = detail::uniform_below(engine, reachable.size());
      auto second = detail::uniform_below(engine, reachable.size() - 1);
      if (second >= first) ++second;
      inst.sessions.sessions.push_back(
          Session{s, {reachable[first], reachable[second]}, Rational(1)});
    }
    return inst;
  }
  throw std::runtime_error("could not place sessions on a random network after " +
                           std::to_string(options.max_attempts) + " attempts");
}

}  // namespace mmflow
