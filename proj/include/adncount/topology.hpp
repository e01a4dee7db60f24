#pragma once

#include <compare>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include <json.hpp>

#include "adncount/rng.hpp"

namespace adn {

using NodeId = std::uint32_t;

/// Index of the leader in every topology.
inline constexpr NodeId kLeader = 0;

struct Edge {
  NodeId u;
  NodeId v;

  auto operator<=>(const Edge&) const = default;
};

/// One snapshot of the dynamic network: an undirected simple graph over
/// node indices 0..n-1 with node 0 the leader.
class Topology {
 public:
  Topology() = default;
  explicit Topology(std::size_t n) : adjacency_(n) {}

  /// Throws InvalidParameters on self-loops, duplicates or out-of-range ends.
  static Topology from_edges(std::size_t n, std::span<const Edge> edges);

  std::size_t size() const { return adjacency_.size(); }

  /// Adds {u, v}. Throws InvalidParameters on a self-loop, a duplicate edge
  /// or an index outside 0..n-1.
  void add_edge(NodeId u, NodeId v);

  bool has_edge(NodeId u, NodeId v) const;

  std::span<const NodeId> neighbors(NodeId node) const {
    return adjacency_[node];
  }
  std::size_t degree(NodeId node) const { return adjacency_[node].size(); }
  std::size_t max_degree() const;
  std::size_t edge_count() const;

  /// Edges with u < v, sorted lexicographically.
  std::vector<Edge> edges() const;

  bool connected() const;

  /// Same node count and the same edge set, regardless of neighbor order.
  friend bool operator==(const Topology& a, const Topology& b);

 private:
  std::vector<std::vector<NodeId>> adjacency_;
};

/// Leader adjacent to every other node, no other edges.
Topology star(std::size_t n);

/// Edges {i, i+1} for 0 <= i < n-1; the leader is an endpoint.
Topology path(std::size_t n);

/// Path visiting the nodes in the given order. order[0] must be the leader.
Topology path_through(std::span<const NodeId> order);

/// Erdős–Rényi G(n, p): each unordered pair is an edge independently with
/// probability p. Pairs are visited in lexicographic order, one Bernoulli
/// draw each.
Topology gnp(std::size_t n, double p, Rng& rng);

/// {"n": n, "leader": 0, "edges": [[u, v], ...]} with u < v, sorted.
nlohmann::json to_json(const Topology& topology);
Topology topology_from_json(const nlohmann::json& j);

}  // namespace adn
