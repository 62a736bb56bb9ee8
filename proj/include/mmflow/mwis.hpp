#pragma once

// Exact maximum-weight independent set over the link conflict graph. This is
// the oracle argmax_{R in region} <a, R> for zero-delay networks: the region's
// vertices are indicator vectors of independent sets.

#include <algorithm>
#include <boost/dynamic_bitset.hpp>
#include <cmath>
#include <numeric>
#include <span>
#include <stdexcept>
#include <vector>

#include "mmflow/network.hpp"

namespace mmflow {

template <typename Weight>
struct IndependentSetSolution {
  std::vector<LinkIndex> selected;
  Weight value{0};
  RateVector indicator;
};

namespace detail {

template <typename Weight>
bool strictly_greater(const Weight& a, const Weight& b) {
  if constexpr (ScalarTraits<Weight>::exact) {
    return a > b;
  } else {
    return a > b + 1e-12 * (1.0 + std::abs(b));
  }
}

using Bitset = boost::dynamic_bitset<>;

inline std::vector<Bitset> conflict_bitsets(const Network& net) {
  const std::size_t m = net.num_links();
  std::vector<Bitset> adj(m, Bitset(m));
  for (LinkIndex l = 0; l < m; ++l) {
    for (LinkIndex other : net.collisions[l]) {
      adj[l].set(other);
      adj[other].set(l);
    }
  }
  return adj;
}

// Depth-first branch and bound. Candidates are branched in ascending link
// order with "include" explored first and the incumbent replaced only on
// strict improvement, so the answer is the first optimum in that order: the
// optimal set whose sorted index list is lexicographically smallest.
template <typename Weight>
class MwisSearch {
 public:
  MwisSearch(const std::vector<Bitset>& adj, std::span<const Weight> weights)
      : adj_(adj), weights_(weights), current_(adj.size()), best_(adj.size()) {}

  void run(const Bitset& candidates) { branch(candidates, Weight(0)); }

  const Bitset& best_set() const { return best_; }
  const Weight& best_value() const { return best_value_; }

 private:
  // Greedy clique partition of the candidates; the sum of per-clique maxima
  // bounds any independent subset.
  Weight clique_bound(const Bitset& candidates) const {
    std::vector<LinkIndex> order;
    for (auto l = candidates.find_first(); l != Bitset::npos; l = candidates.find_next(l))
      order.push_back(l);
    std::stable_sort(order.begin(), order.end(),
                     [&](LinkIndex a, LinkIndex b) { return weights_[a] > weights_[b]; });
    std::vector<Bitset> members;  // common neighbourhood of each clique
    Weight bound(0);
    for (LinkIndex l : order) {
      bool placed = false;
      for (auto& common : members) {
        if (common.test(l)) {
          common &= adj_[l];
          placed = true;
          break;
        }
      }
      if (!placed) {
        members.push_back(adj_[l]);
        bound += weights_[l];  // heaviest member opens the clique
      }
    }
    return bound;
  }

  void branch(const Bitset& candidates, const Weight& value) {
    if (candidates.none()) {
      if (strictly_greater(value, best_value_)) {
        best_value_ = value;
        best_ = current_;
      }
      return;
    }
    if (!strictly_greater(Weight(value + clique_bound(candidates)), best_value_)) return;

    const LinkIndex l = candidates.find_first();
    Bitset rest = candidates;
    rest.reset(l);

    current_.set(l);
    branch(rest - adj_[l], Weight(value + weights_[l]));
    current_.reset(l);

    branch(rest, value);
  }

  const std::vector<Bitset>& adj_;
  std::span<const Weight> weights_;
  Bitset current_;
  Bitset best_;
  Weight best_value_{0};
};

}  // namespace detail

/// Maximizes sum of weights over sets with no pair l' in I(l). Links with
/// weight <= 0 are never selected. Among optimal sets the one with the
/// lexicographically smallest ascending index list is returned.
template <typename Weight>
IndependentSetSolution<Weight> mwis_solve(const Network& net, std::span<const Weight> weights) {
  const std::size_t m = net.num_links();
  if (weights.size() != m) throw std::invalid_argument("weight vector does not match link count");

  const auto adj = detail::conflict_bitsets(net);
  detail::Bitset candidates(m);
  for (LinkIndex l = 0; l < m; ++l)
    if (weights[l] > 0) candidates.set(l);

  detail::MwisSearch<Weight> search(adj, weights);
  search.run(candidates);

  IndependentSetSolution<Weight> solution;
  const auto& best = search.best_set();
  for (auto l = best.find_first(); l != detail::Bitset::npos; l = best.find_next(l))
    solution.selected.push_back(l);
  for (LinkIndex l : solution.selected) solution.value += weights[l];
  solution.indicator = indicator_vector(m, solution.selected);
  return solution;
}

template <typename Weight>
IndependentSetSolution<Weight> mwis_solve(const Network& net, const std::vector<Weight>& weights) {
  return mwis_solve(net, std::span<const Weight>(weights));
}

/// Greedy maximal independent set: links scanned by ascending conflict
/// degree (highest degree last), ties by index.
inline std::vector<LinkIndex> greedy_maximal_independent_set(const Network& net) {
  const auto adj = detail::conflict_bitsets(net);
  std::vector<LinkIndex> order(net.num_links());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](LinkIndex a, LinkIndex b) { return adj[a].count() < adj[b].count(); });
  detail::Bitset blocked(net.num_links());
  std::vector<LinkIndex> chosen;
  for (LinkIndex l : order) {
    if (blocked.test(l)) continue;
    chosen.push_back(l);
    blocked |= adj[l];
    blocked.set(l);
  }
  std::sort(chosen.begin(), chosen.end());
  return chosen;
}

}  // namespace mmflow
