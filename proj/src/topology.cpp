#include "adncount/topology.hpp"

#include <algorithm>
#include <string>

#include <fmt/format.h>

#include "adncount/errors.hpp"

namespace adn {

Topology Topology::from_edges(std::size_t n, std::span<const Edge> edges) {
  Topology t(n);
  for (const Edge& e : edges) t.add_edge(e.u, e.v);
  return t;
}

void Topology::add_edge(NodeId u, NodeId v) {
  if (u >= size() || v >= size()) {
    throw InvalidParameters(
        fmt::format("edge {{{}, {}}} outside 0..{}", u, v, size() - 1));
  }
  if (u == v) throw InvalidParameters(fmt::format("self-loop at node {}", u));
  if (has_edge(u, v)) {
    throw InvalidParameters(fmt::format("duplicate edge {{{}, {}}}", u, v));
  }
  adjacency_[u].push_back(v);
  adjacency_[v].push_back(u);
}

bool Topology::has_edge(NodeId u, NodeId v) const {
  const auto& a = adjacency_[u];
  return std::find(a.begin(), a.end(), v) != a.end();
}

std::size_t Topology::max_degree() const {
  std::size_t best = 0;
  for (const auto& a : adjacency_) best = std::max(best, a.size());
  return best;
}

std::size_t Topology::edge_count() const {
  std::size_t twice = 0;
  for (const auto& a : adjacency_) twice += a.size();
  return twice / 2;
}

std::vector<Edge> Topology::edges() const {
  std::vector<Edge> out;
  out.reserve(edge_count());
  for (NodeId u = 0; u < size(); ++u) {
    for (NodeId v : adjacency_[u]) {
      if (u < v) out.push_back({u, v});
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

bool Topology::connected() const {
  if (size() <= 1) return true;
  std::vector<char> seen(size(), 0);
  std::vector<NodeId> stack{0};
  seen[0] = 1;
  std::size_t reached = 1;
  while (!stack.empty()) {
    NodeId u = stack.back();
    stack.pop_back();
    for (NodeId v : adjacency_[u]) {
      if (!seen[v]) {
        seen[v] = 1;
        ++reached;
        stack.push_back(v);
      }
    }
  }
  return reached == size();
}

bool operator==(const Topology& a, const Topology& b) {
  return a.size() == b.size() && a.edges() == b.edges();
}

Topology star(std::size_t n) {
  Topology t(n);
  for (NodeId i = 1; i < n; ++i) t.add_edge(kLeader, i);
  return t;
}

Topology path(std::size_t n) {
  Topology t(n);
  for (NodeId i = 0; i + 1 < n; ++i) t.add_edge(i, i + 1);
  return t;
}

Topology path_through(std::span<const NodeId> order) {
  if (order.empty() || order.front() != kLeader) {
    throw InvalidParameters("path order must start at the leader");
  }
  Topology t(order.size());
  for (std::size_t i = 0; i + 1 < order.size(); ++i) {
    t.add_edge(order[i], order[i + 1]);
  }
  return t;
}

Topology gnp(std::size_t n, double p, Rng& rng) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw InvalidParameters(fmt::format("edge probability {} not in [0, 1]", p));
  }
  Topology t(n);
  for (NodeId u = 0; u < n; ++u) {
    for (NodeId v = u + 1; v < n; ++v) {
      if (rng.bernoulli(p)) t.add_edge(u, v);
    }
  }
  return t;
}

nlohmann::json to_json(const Topology& topology) {
  nlohmann::json edges = nlohmann::json::array();
  for (const Edge& e : topology.edges()) edges.push_back({e.u, e.v});
  return {{"n", topology.size()}, {"leader", kLeader}, {"edges", edges}};
}

Topology topology_from_json(const nlohmann::json& j) {
  try {
    if (j.at("leader").get<NodeId>() != kLeader) {
      throw InvalidParameters("leader must be node 0");
    }
    Topology t(j.at("n").get<std::size_t>());
    for (const auto& e : j.at("edges")) {
      t.add_edge(e.at(0).get<NodeId>(), e.at(1).get<NodeId>());
    }
    return t;
  } catch (const nlohmann::json::exception& e) {
    throw InvalidParameters(std::string("malformed topology JSON: ") + e.what());
  }
}

}  // namespace adn
