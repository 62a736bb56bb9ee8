#pragma once

// Network model: nodes, directed links, per-link collision sets and the
// link-pair delay matrix, plus multicast sessions and rate vectors.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "mmflow/rational.hpp"

namespace mmflow {

using NodeIndex = std::size_t;
using LinkIndex = std::size_t;

struct Link {
  std::string id;
  NodeIndex tail = 0;
  NodeIndex head = 0;
};

/// The tuple (V, L, I, D). Links are addressed by position in `links`;
/// parallel links are distinct entries. `collisions[l]` is I(l) in ascending
/// order and is not assumed symmetric. `delays` holds D(l, l') for exactly the
/// pairs with l' in I(l).
struct Network {
  std::vector<std::string> nodes;
  std::vector<Link> links;
  std::vector<std::vector<LinkIndex>> collisions;
  std::map<std::pair<LinkIndex, LinkIndex>, std::int64_t> delays;

  std::size_t num_nodes() const { return nodes.size(); }
  std::size_t num_links() const { return links.size(); }

  bool collides(LinkIndex l, LinkIndex other) const {
    const auto& set = collisions[l];
    return std::binary_search(set.begin(), set.end(), other);
  }

  /// Symmetric closure of the collision relation (the conflict graph).
  bool conflicts(LinkIndex a, LinkIndex b) const { return collides(a, b) || collides(b, a); }

  std::int64_t delay(LinkIndex l, LinkIndex other) const {
    auto it = delays.find({l, other});
    return it == delays.end() ? 0 : it->second;
  }

  bool has_nonzero_delay() const {
    return std::any_of(delays.begin(), delays.end(), [](const auto& e) { return e.second != 0; });
  }

  std::vector<LinkIndex> out_links(NodeIndex v) const {
    std::vector<LinkIndex> result;
    for (LinkIndex l = 0; l < links.size(); ++l)
      if (links[l].tail == v) result.push_back(l);
    return result;
  }

  std::vector<LinkIndex> in_links(NodeIndex v) const {
    std::vector<LinkIndex> result;
    for (LinkIndex l = 0; l < links.size(); ++l)
      if (links[l].head == v) result.push_back(l);
    return result;
  }

  std::optional<NodeIndex> find_node(const std::string& name) const {
    for (NodeIndex v = 0; v < nodes.size(); ++v)
      if (nodes[v] == name) return v;
    return std::nullopt;
  }

  std::optional<LinkIndex> find_link(const std::string& id) const {
    for (LinkIndex l = 0; l < links.size(); ++l)
      if (links[l].id == id) return l;
    return std::nullopt;
  }
};

/// One multicast session: a source, its sink set and desired traffic weight.
struct Session {
  NodeIndex source = 0;
  std::vector<NodeIndex> sinks;
  Rational gamma{1};
};

struct SessionSet {
  std::vector<Session> sessions;

  std::size_t size() const { return sessions.size(); }
  bool empty() const { return sessions.empty(); }
};

/// Per-link rates in packets per slot, indexed by link position.
struct RateVector {
  std::vector<Rational> rates;

  RateVector() = default;
  explicit RateVector(std::size_t num_links) : rates(num_links, Rational(0)) {}
  explicit RateVector(std::vector<Rational> values) : rates(std::move(values)) {}

  std::size_t size() const { return rates.size(); }
  const Rational& operator[](std::size_t l) const { return rates[l]; }
  Rational& operator[](std::size_t l) { return rates[l]; }

  friend bool operator==(const RateVector& a, const RateVector& b) { return a.rates == b.rates; }
  friend bool operator<(const RateVector& a, const RateVector& b) {
    return std::lexicographical_compare(a.rates.begin(), a.rates.end(), b.rates.begin(),
                                        b.rates.end());
  }
};

inline Rational dot(std::span<const Rational> weights, const RateVector& rate) {
  Rational sum(0);
  for (std::size_t l = 0; l < rate.size(); ++l) sum += weights[l] * rate[l];
  return sum;
}

inline RateVector indicator_vector(std::size_t num_links, std::span<const LinkIndex> selected) {
  RateVector r(num_links);
  for (LinkIndex l : selected) r[l] = 1;
  return r;
}

/// A V-represented subset of the rate region; conv(vertices) is implicit.
struct RegionSubset {
  std::vector<RateVector> vertices;

  std::size_t size() const { return vertices.size(); }
  bool empty() const { return vertices.empty(); }

  bool contains(const RateVector& r) const {
    return std::find(vertices.begin(), vertices.end(), r) != vertices.end();
  }

  /// Appends unless already present. Returns whether it was appended.
  bool add(RateVector r) {
    if (contains(r)) return false;
    vertices.push_back(std::move(r));
    return true;
  }
};

/// Empty iff every network invariant holds; each entry names the offender.
inline std::vector<std::string> validate_network(const Network& net) {
  std::vector<std::string> violations;
  const std::size_t n = net.num_nodes();
  const std::size_t m = net.num_links();

  std::set<std::string> node_names;
  for (const auto& name : net.nodes)
    if (!node_names.insert(name).second) violations.push_back("duplicate node '" + name + "'");

  std::set<std::string> link_ids;
  for (const auto& link : net.links) {
    if (!link_ids.insert(link.id).second)
      violations.push_back("duplicate link id '" + link.id + "'");
    if (link.tail >= n || link.head >= n)
      violations.push_back("link '" + link.id + "' has an undeclared endpoint");
  }

  if (net.collisions.size() != m) {
    violations.push_back("collision table has " + std::to_string(net.collisions.size()) +
                         " entries for " + std::to_string(m) + " links");
    return violations;
  }

  for (LinkIndex l = 0; l < m; ++l) {
    const auto& set = net.collisions[l];
    if (!std::is_sorted(set.begin(), set.end()) ||
        std::adjacent_find(set.begin(), set.end()) != set.end())
      violations.push_back("collision set of '" + net.links[l].id +
                           "' is not a strictly ascending list");
    for (LinkIndex other : set) {
      if (other >= m) {
        violations.push_back("collision set of '" + net.links[l].id + "' names unknown link #" +
                             std::to_string(other));
        continue;
      }
      if (other == l) violations.push_back("link '" + net.links[l].id + "' collides with itself");
      if (!net.delays.contains({l, other}))
        violations.push_back("missing delay for colliding pair ('" + net.links[l].id + "', '" +
                             net.links[other].id + "')");
    }
  }

  for (const auto& [pair, d] : net.delays) {
    const auto [l, other] = pair;
    if (l >= m || other >= m) {
      violations.push_back("delay defined on unknown link pair (#" + std::to_string(l) + ", #" +
                           std::to_string(other) + ")");
      continue;
    }
    if (!net.collides(l, other))
      violations.push_back("delay defined on non-colliding pair ('" + net.links[l].id + "', '" +
                           net.links[other].id + "')");
  }
  return violations;
}

inline std::vector<std::string> validate_sessions(const Network& net, const SessionSet& sessions) {
  std::vector<std::string> violations;
  for (std::size_t i = 0; i < sessions.size(); ++i) {
    const auto& s = sessions.sessions[i];
    const std::string tag = "session #" + std::to_string(i);
    if (s.source >= net.num_nodes()) violations.push_back(tag + " has an undeclared source");
    if (s.sinks.empty()) violations.push_back(tag + " has an empty sink set");
    std::set<NodeIndex> seen;
    for (NodeIndex t : s.sinks) {
      if (t >= net.num_nodes()) violations.push_back(tag + " has an undeclared sink");
      if (t == s.source) violations.push_back(tag + " lists its source as a sink");
      if (!seen.insert(t).second) violations.push_back(tag + " lists a sink twice");
    }
    if (s.gamma <= 0) violations.push_back(tag + " has non-positive gamma " + to_string(s.gamma));
  }
  return violations;
}

}  // namespace mmflow
