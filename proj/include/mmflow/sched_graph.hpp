#pragma once

// Scheduling graphs for networks with propagation delays.
//
// A vertex is an |L| x T binary block that is internally collision free; an
// edge A -> B exists iff the 2T-slot concatenation [A|B] is collision free
// across the boundary. Once T >= max |D(l, l')|, collisions never reach
// beyond the adjacent window, so closed walks are exactly the periodic
// collision-free schedules. Blocks are stored as 64-bit masks with cell
// (link l, slot t) at bit t * |L| + l; vertices are indexed in ascending mask
// order.

#include <algorithm>
#include <bit>
#include <cstdint>
#include <cstdlib>
#include <optional>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "mmflow/max_mean_cycle.hpp"
#include "mmflow/network.hpp"

namespace mmflow {

class SchedulingGraphTooLarge : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct GraphLimits {
  std::size_t max_vertices = std::size_t{1} << 20;
  std::size_t max_edges = std::size_t{1} << 27;
};

struct SchedulingGraph {
  std::size_t num_links = 0;
  std::size_t window = 1;
  std::vector<std::uint64_t> blocks;
  Adjacency out;  // ascending targets
  std::size_t num_edges = 0;
  /// a^T B 1 for each vertex B; the weight of every edge entering B.
  /// Empty for an unweighted graph.
  std::vector<Rational> entry_weight;

  std::size_t num_vertices() const { return blocks.size(); }
  bool weighted() const { return !entry_weight.empty(); }

  bool cell(std::size_t v, std::size_t link, std::size_t slot) const {
    return (blocks[v] >> (slot * num_links + link)) & 1U;
  }

  bool has_edge(std::size_t u, std::size_t v) const {
    return std::binary_search(out[u].begin(), out[u].end(), static_cast<std::uint32_t>(v));
  }

  const Rational& edge_weight(std::size_t /*u*/, std::size_t v) const { return entry_weight[v]; }

  std::optional<std::size_t> find_block(std::uint64_t mask) const {
    auto it = std::lower_bound(blocks.begin(), blocks.end(), mask);
    if (it == blocks.end() || *it != mask) return std::nullopt;
    return static_cast<std::size_t>(it - blocks.begin());
  }
};

/// max(1, max |D(l, l')| over defined delays).
inline std::size_t min_window(const Network& net) {
  std::size_t window = 1;
  for (const auto& [pair, d] : net.delays)
    window = std::max(window, static_cast<std::size_t>(std::llabs(d)));
  return window;
}

/// Packs a |L| x T 0/1 matrix (rows = links) into a block mask.
inline std::uint64_t block_mask(const std::vector<std::vector<int>>& rows) {
  const std::size_t links = rows.size();
  std::uint64_t mask = 0;
  for (std::size_t l = 0; l < links; ++l)
    for (std::size_t t = 0; t < rows[l].size(); ++t)
      if (rows[l][t]) mask |= std::uint64_t{1} << (t * links + l);
  return mask;
}

namespace detail {

struct CellConflicts {
  std::vector<std::uint64_t> internal;  // per cell: conflicting cells in the same window
  std::vector<std::uint64_t> crossing;  // per cell of A: conflicting cells of the next window B
};

inline CellConflicts cell_conflicts(const Network& net, std::size_t window) {
  const std::size_t links = net.num_links();
  const std::size_t cells = links * window;
  CellConflicts c{std::vector<std::uint64_t>(cells, 0), std::vector<std::uint64_t>(cells, 0)};
  const auto span = static_cast<std::int64_t>(2 * window);
  const auto w = static_cast<std::int64_t>(window);
  for (LinkIndex l = 0; l < links; ++l) {
    for (LinkIndex other : net.collisions[l]) {
      const std::int64_t d = net.delay(l, other);
      for (std::int64_t t = 0; t < span; ++t) {
        const std::int64_t t2 = t + d;
        if (t2 < 0 || t2 >= span) continue;
        if (t < w && t2 < w) {
          const std::size_t a = static_cast<std::size_t>(t) * links + l;
          const std::size_t b = static_cast<std::size_t>(t2) * links + other;
          c.internal[a] |= std::uint64_t{1} << b;
          c.internal[b] |= std::uint64_t{1} << a;
        } else if (t < w && t2 >= w) {
          c.crossing[static_cast<std::size_t>(t) * links + l] |=
              std::uint64_t{1} << (static_cast<std::size_t>(t2 - w) * links + other);
        } else if (t >= w && t2 < w) {
          c.crossing[static_cast<std::size_t>(t2) * links + other] |=
              std::uint64_t{1} << (static_cast<std::size_t>(t - w) * links + l);
        }
      }
    }
  }
  return c;
}

}  // namespace detail

/// Builds (M_T, E_T). Throws std::invalid_argument when T < min_window and
/// SchedulingGraphTooLarge when a size limit would be exceeded.
inline SchedulingGraph build_scheduling_graph(const Network& net, std::size_t window,
                                              const GraphLimits& limits = {}) {
  if (window < min_window(net))
    throw std::invalid_argument("window " + std::to_string(window) + " is below the minimum " +
                                std::to_string(min_window(net)));
  const std::size_t links = net.num_links();
  const std::size_t cells = links * window;
  if (cells > 64)
    throw SchedulingGraphTooLarge("blocks of " + std::to_string(links) + " links x " +
                                  std::to_string(window) + " slots exceed 64 cells");

  const auto conflicts = detail::cell_conflicts(net, window);
  SchedulingGraph g;
  g.num_links = links;
  g.window = window;

  // Cells are decided in ascending order; a cell may switch on only if it
  // conflicts with no lower cell already on.
  std::vector<std::pair<std::size_t, std::uint64_t>> stack{{0, 0}};
  while (!stack.empty()) {
    auto [cell, mask] = stack.back();
    stack.pop_back();
    if (cell == cells) {
      g.blocks.push_back(mask);
      if (g.blocks.size() > limits.max_vertices)
        throw SchedulingGraphTooLarge("scheduling graph exceeds " +
                                      std::to_string(limits.max_vertices) + " vertices");
      continue;
    }
    stack.push_back({cell + 1, mask});
    if ((conflicts.internal[cell] & mask) == 0)
      stack.push_back({cell + 1, mask | (std::uint64_t{1} << cell)});
  }
  std::sort(g.blocks.begin(), g.blocks.end());

  const std::size_t n = g.blocks.size();
  g.out.assign(n, {});
  for (std::size_t u = 0; u < n; ++u) {
    std::uint64_t forbidden = 0;
    for (std::uint64_t bits = g.blocks[u]; bits; bits &= bits - 1)
      forbidden |= conflicts.crossing[static_cast<std::size_t>(std::countr_zero(bits))];
    for (std::size_t v = 0; v < n; ++v)
      if ((g.blocks[v] & forbidden) == 0) g.out[u].push_back(static_cast<std::uint32_t>(v));
    g.num_edges += g.out[u].size();
    if (g.num_edges > limits.max_edges)
      throw SchedulingGraphTooLarge("scheduling graph exceeds " + std::to_string(limits.max_edges) +
                                    " edges");
  }
  return g;
}

/// a^T B 1 for every vertex B.
inline std::vector<Rational> entry_weights(const SchedulingGraph& g, std::span<const Rational> a) {
  if (a.size() != g.num_links) throw std::invalid_argument("weight vector does not match link count");
  std::vector<Rational> result(g.num_vertices());
  for (std::size_t v = 0; v < g.num_vertices(); ++v) {
    Rational sum(0);
    for (std::uint64_t bits = g.blocks[v]; bits; bits &= bits - 1)
      sum += a[static_cast<std::size_t>(std::countr_zero(bits)) % g.num_links];
    result[v] = sum;
  }
  return result;
}

/// Same vertices and edges; every edge u -> v weighted by a^T v 1.
inline SchedulingGraph weight_graph(SchedulingGraph g, std::span<const Rational> a) {
  g.entry_weight = entry_weights(g, a);
  return g;
}

inline CycleResult max_mean_cycle(const SchedulingGraph& g) {
  if (!g.weighted()) throw std::invalid_argument("scheduling graph carries no weights");
  return max_mean_cycle(g.out, [&](std::size_t, std::size_t v) -> const Rational& {
    return g.entry_weight[v];
  });
}

/// A maximum-mean cycle that, among all cycles attaining lambda*, has the
/// most active cells per block on average. One Karp run on the combined
/// weight M * w + popcount(v), where M exceeds the largest possible change
/// in the secondary mean divided by the smallest gap between distinct
/// primary means. The returned mean is the primary one.
inline CycleResult max_mean_cycle_most_active(const SchedulingGraph& g) {
  if (!g.weighted()) throw std::invalid_argument("scheduling graph carries no weights");
  mpz_class denominators(1);
  for (const auto& w : g.entry_weight)
    mpz_lcm(denominators.get_mpz_t(), denominators.get_mpz_t(), w.get_den_mpz_t());
  const mpz_class n(static_cast<unsigned long>(g.num_vertices()));
  const Rational factor(denominators * n * n * static_cast<unsigned long>(g.num_links * g.window) + 1);
  std::vector<Rational> combined(g.num_vertices());
  for (std::size_t v = 0; v < g.num_vertices(); ++v)
    combined[v] = g.entry_weight[v] * factor + std::popcount(g.blocks[v]);
  CycleResult c = max_mean_cycle(g.out, [&](std::size_t, std::size_t v) -> const Rational& {
    return combined[v];
  });
  c.mean = cycle_mean(c.cycle, [&](std::size_t, std::size_t v) -> const Rational& { return g.entry_weight[v]; });
  return c;
}

/// Time-average link rates of the periodic schedule traversing the cycle.
inline RateVector cycle_to_rate_vector(const SchedulingGraph& g, const CycleResult& c) {
  const std::size_t m = c.length();
  if (m == 0) throw std::invalid_argument("empty cycle");
  std::vector<long> active(g.num_links, 0);
  for (std::size_t k = 0; k < m; ++k)
    for (std::uint64_t bits = g.blocks[c.cycle[k]]; bits; bits &= bits - 1)
      ++active[static_cast<std::size_t>(std::countr_zero(bits)) % g.num_links];
  RateVector r(g.num_links);
  const long slots = static_cast<long>(m * g.window);
  for (std::size_t l = 0; l < g.num_links; ++l) {
    r[l] = Rational(active[l], slots);
    r[l].canonicalize();
  }
  return r;
}

/// Finite schedule matrix, row-major with `length` slots per link.
struct Schedule {
  std::size_t num_links = 0;
  std::size_t length = 0;
  std::vector<std::uint8_t> cells;

  bool active(std::size_t link, std::size_t slot) const { return cells[link * length + slot] != 0; }
};

inline Schedule realize_schedule(const SchedulingGraph& g, const CycleResult& c, std::size_t periods) {
  const std::size_t m = c.length();
  if (m == 0 || periods == 0) throw std::invalid_argument("need a cycle and at least one period");
  Schedule s{g.num_links, periods * m * g.window, {}};
  s.cells.assign(s.num_links * s.length, 0);
  for (std::size_t p = 0; p < periods; ++p)
    for (std::size_t k = 0; k < m; ++k)
      for (std::size_t t = 0; t < g.window; ++t)
        for (std::size_t l = 0; l < g.num_links; ++l)
          if (g.cell(c.cycle[k], l, t))
            s.cells[l * s.length + (p * m + k) * g.window + t] = 1;
  return s;
}

struct CollisionViolation {
  LinkIndex link;
  std::size_t slot;
  LinkIndex interferer;  // active at slot + D(link, interferer)
};

struct CollisionCheck {
  bool collision_free = true;
  std::optional<CollisionViolation> first_violation;
};

/// Scans slots in time order, links ascending within a slot.
inline CollisionCheck verify_collision_free(const Network& net, const Schedule& s) {
  if (s.num_links != net.num_links()) throw std::invalid_argument("schedule does not match network");
  const auto length = static_cast<std::int64_t>(s.length);
  for (std::size_t t = 0; t < s.length; ++t) {
    for (LinkIndex l = 0; l < s.num_links; ++l) {
      if (!s.active(l, t)) continue;
      for (LinkIndex other : net.collisions[l]) {
        const std::int64_t t2 = static_cast<std::int64_t>(t) + net.delay(l, other);
        if (t2 < 0 || t2 >= length) continue;
        if (s.active(other, static_cast<std::size_t>(t2)))
          return {false, CollisionViolation{l, t, other}};
      }
    }
  }
  return {};
}

inline RateVector empirical_rate(const Schedule& s) {
  RateVector r(s.num_links);
  if (s.length == 0) return r;
  for (std::size_t l = 0; l < s.num_links; ++l) {
    long count = 0;
    for (std::size_t t = 0; t < s.length; ++t) count += s.active(l, t) ? 1 : 0;
    r[l] = Rational(count, static_cast<long>(s.length));
    r[l].canonicalize();
  }
  return r;
}

/// Columns of the block as bit strings (link 0 first), separated by '|'.
inline std::string format_block(const SchedulingGraph& g, std::size_t v) {
  std::string text;
  for (std::size_t t = 0; t < g.window; ++t) {
    if (t) text += '|';
    for (std::size_t l = 0; l < g.num_links; ++l) text += g.cell(v, l, t) ? '1' : '0';
  }
  return text;
}

/// Vertex list followed by the 0/1 adjacency matrix, rows = sources.
inline std::string format_adjacency(const SchedulingGraph& g) {
  std::ostringstream os;
  const std::size_t n = g.num_vertices();
  for (std::size_t v = 0; v < n; ++v) os << "v" << v << " = " << format_block(g, v) << "\n";
  os << "   ";
  for (std::size_t v = 0; v < n; ++v) os << " v" << v;
  os << "\n";
  for (std::size_t u = 0; u < n; ++u) {
    os << "v" << u << " ";
    for (std::size_t v = 0; v < n; ++v) {
      os << std::string(std::to_string(v).size() + 1, ' ') << (g.has_edge(u, v) ? '1' : '0');
    }
    os << "\n";
  }
  return os.str();
}

}  // namespace mmflow
