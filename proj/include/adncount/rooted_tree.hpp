#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "adncount/topology.hpp"

namespace adn {

/// Ordered rooted unlabeled tree stored as per-vertex child lists.
///
/// Child lists keep insertion order, so the last child of a vertex is its
/// rightmost subtree. Vertices are never deleted; subtrees are only moved.
class RootedTree {
 public:
  static constexpr NodeId kNoParent = static_cast<NodeId>(-1);

  /// A single vertex, which is the root.
  RootedTree() : children_(1), parent_(1, kNoParent) {}

  std::size_t size() const { return children_.size(); }
  NodeId root() const { return root_; }

  std::span<const NodeId> children(NodeId v) const { return children_[v]; }
  NodeId parent(NodeId v) const { return parent_[v]; }

  /// Appends a new leaf as the rightmost child of `parent`.
  NodeId add_child(NodeId parent);

  /// Copies `subtree` and hangs it as the rightmost child of `parent`.
  void attach_copy(NodeId parent, const RootedTree& subtree);

  /// Removes the rightmost child of `v` (with its subtree) from `v`'s child
  /// list and returns it; the subtree stays in the tree, parentless, until
  /// adopted again.
  NodeId detach_rightmost(NodeId v);

  /// Hangs a detached subtree root as the rightmost child of `parent`.
  void adopt(NodeId parent, NodeId child);

  /// Neighbors in the underlying undirected graph.
  std::size_t graph_degree(NodeId v) const {
    return children_[v].size() + (v == root_ ? 0 : 1);
  }
  std::size_t max_graph_degree() const;

  /// Edges on the longest root-to-leaf path.
  std::size_t depth() const;

  /// Parent-child structure is a single tree spanning every vertex.
  bool valid() const;

 private:
  std::vector<std::vector<NodeId>> children_;
  std::vector<NodeId> parent_;
  NodeId root_ = 0;
};

/// Graph form of a tree: the root becomes the leader (index 0), remaining
/// vertices are numbered in preorder.
Topology tree_to_topology(const RootedTree& tree);

}  // namespace adn
