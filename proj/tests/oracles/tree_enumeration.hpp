#pragma once

// Brute-force rooted-tree oracle. Shares nothing with the counting
// recurrence: trees are generated explicitly and deduplicated by AHU
// canonical strings.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "adncount/rooted_tree.hpp"

namespace adn::oracle {

/// AHU canonical string: "(" + sorted child strings + ")". Two rooted trees
/// are isomorphic iff their strings are equal.
std::string canonical_form(const RootedTree& tree);

/// Same, for a parent array with parent[0] = -1 marking the root.
std::string canonical_form(std::span<const int> parent);

/// Canonical strings of every unlabeled rooted tree on n vertices, sorted.
/// Built by hanging a new leaf on every vertex of every class on n-1
/// vertices and deduplicating. n <= 16.
std::vector<std::string> enumerate_rooted_trees(std::size_t n);

/// counts[i-1] = number of classes on i vertices, i = 1..n_max (n_max <= 16).
std::vector<std::uint64_t> enumerated_counts(std::size_t n_max);

/// Largest size enumerate_rooted_trees accepts.
inline constexpr std::size_t kMaxEnumeratedSize = 16;

}  // namespace adn::oracle
