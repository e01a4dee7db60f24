#include "adncount/rooted_tree.hpp"

#include <algorithm>
#include <cassert>
#include <utility>

namespace adn {

NodeId RootedTree::add_child(NodeId parent) {
  auto id = static_cast<NodeId>(children_.size());
  children_.emplace_back();
  parent_.push_back(parent);
  children_[parent].push_back(id);
  return id;
}

void RootedTree::attach_copy(NodeId parent, const RootedTree& subtree) {
  // Preorder copy keeps each child list in its original order.
  std::vector<std::pair<NodeId, NodeId>> stack{{subtree.root(), parent}};
  while (!stack.empty()) {
    auto [source, target_parent] = stack.back();
    stack.pop_back();
    NodeId copy = add_child(target_parent);
    const auto& kids = subtree.children_[source];
    for (auto it = kids.rbegin(); it != kids.rend(); ++it) {
      stack.emplace_back(*it, copy);
    }
  }
}

NodeId RootedTree::detach_rightmost(NodeId v) {
  assert(!children_[v].empty());
  NodeId child = children_[v].back();
  children_[v].pop_back();
  parent_[child] = kNoParent;
  return child;
}

void RootedTree::adopt(NodeId parent, NodeId child) {
  assert(parent_[child] == kNoParent && child != root_);
  children_[parent].push_back(child);
  parent_[child] = parent;
}

std::size_t RootedTree::max_graph_degree() const {
  std::size_t best = 0;
  for (NodeId v = 0; v < size(); ++v) best = std::max(best, graph_degree(v));
  return best;
}

std::size_t RootedTree::depth() const {
  std::size_t best = 0;
  std::vector<std::pair<NodeId, std::size_t>> stack{{root_, 0}};
  while (!stack.empty()) {
    auto [v, d] = stack.back();
    stack.pop_back();
    best = std::max(best, d);
    for (NodeId c : children_[v]) stack.emplace_back(c, d + 1);
  }
  return best;
}

bool RootedTree::valid() const {
  if (parent_[root_] != kNoParent) return false;
  std::size_t edges = 0;
  for (NodeId v = 0; v < size(); ++v) {
    for (NodeId c : children_[v]) {
      if (c >= size() || parent_[c] != v) return false;
      ++edges;
    }
  }
  if (edges != size() - 1) return false;
  // With n-1 consistent parent links, reaching every vertex from the root
  // rules out cycles.
  std::vector<char> seen(size(), 0);
  std::vector<NodeId> stack{root_};
  std::size_t reached = 0;
  while (!stack.empty()) {
    NodeId v = stack.back();
    stack.pop_back();
    if (seen[v]) return false;
    seen[v] = 1;
    ++reached;
    for (NodeId c : children_[v]) stack.push_back(c);
  }
  return reached == size();
}

Topology tree_to_topology(const RootedTree& tree) {
  Topology t(tree.size());
  std::vector<NodeId> label(tree.size(), RootedTree::kNoParent);
  NodeId next = 0;
  std::vector<NodeId> stack{tree.root()};
  while (!stack.empty()) {
    NodeId v = stack.back();
    stack.pop_back();
    label[v] = next++;
    if (v != tree.root()) t.add_edge(label[tree.parent(v)], label[v]);
    auto kids = tree.children(v);
    for (auto it = kids.rbegin(); it != kids.rend(); ++it) stack.push_back(*it);
  }
  return t;
}

}  // namespace adn
