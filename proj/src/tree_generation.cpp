#include "adncount/tree_generation.hpp"

#include <algorithm>
#include <cassert>
#include <string>

#include <fmt/format.h>

#include "adncount/errors.hpp"

namespace adn {

TreeCountTable sizes_table(std::size_t n_max) {
  if (n_max == 0) throw InvalidParameters("sizes_table needs n_max >= 1");
  std::vector<BigInt> t(n_max + 1, 0);  // 1-based scratch
  t[1] = 1;
  if (n_max >= 2) t[2] = 1;
  for (std::size_t i = 3; i <= n_max; ++i) {
    BigInt sum = 0;
    for (std::size_t j = 1; j < i; ++j) {
      for (std::size_t d = 1; j * d < i; ++d) {
        sum += d * t[i - j * d] * t[d];
      }
    }
    assert(sum % (i - 1) == 0);
    t[i] = sum / (i - 1);
  }
  t.erase(t.begin());
  return TreeCountTable(std::move(t));
}

SubtreeDistribution::SubtreeDistribution(const TreeCountTable& t, std::size_t n)
    : rows_(n + 1), cumulative_(n + 1) {
  for (std::size_t k = 3; k <= n; ++k) {
    const double denominator = static_cast<double>(BigInt((k - 1) * t[k]));
    auto& row = rows_[k];
    auto& cumulative = cumulative_[k];
    double running = 0.0;
    for (std::size_t j = 1; j < k; ++j) {
      for (std::size_t d = 1; j * d < k; ++d) {
        const BigInt numerator = d * t[k - j * d] * t[d];
        const double p = static_cast<double>(numerator) / denominator;
        row.push_back({static_cast<std::uint32_t>(j),
                       static_cast<std::uint32_t>(d), p});
        running += p;
        cumulative.push_back(running);
      }
    }
  }
}

double SubtreeDistribution::probability(std::size_t k, std::size_t j,
                                        std::size_t d) const {
  if (k >= rows_.size()) return 0.0;
  for (const auto& c : rows_[k]) {
    if (c.copies == j && c.size == d) return c.probability;
  }
  return 0.0;
}

const SubtreeChoice& SubtreeDistribution::draw(std::size_t k, Rng& rng) const {
  const auto& cumulative = cumulative_[k];
  assert(!cumulative.empty());
  const double u = rng.uniform01() * cumulative.back();
  auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
  if (it == cumulative.end()) --it;
  return rows_[k][static_cast<std::size_t>(it - cumulative.begin())];
}

SubtreeDistribution subtree_distribution(const TreeCountTable& t,
                                         std::size_t n) {
  if (n < 3) {
    throw InvalidParameters(fmt::format("subtree_distribution needs n >= 3, got {}", n));
  }
  if (t.max_size() < n) {
    throw InvalidParameters(fmt::format(
        "tree count table covers 1..{}, need 1..{}", t.max_size(), n));
  }
  return SubtreeDistribution(t, n);
}

std::string_view to_string(RanrutVariant variant) {
  return variant == RanrutVariant::SameCopy ? "same-copy" : "paper-literal";
}

RanrutVariant parse_ranrut_variant(std::string_view text) {
  if (text == "paper-literal") return RanrutVariant::PaperLiteral;
  if (text == "same-copy") return RanrutVariant::SameCopy;
  throw InvalidParameters(fmt::format("unknown RANRUT variant '{}'", text));
}

RootedTree ranrut(std::size_t n, const SubtreeDistribution& dist, Rng& rng,
                  RanrutVariant variant) {
  if (n == 0) throw InvalidParameters("ranrut needs n >= 1");
  if (n <= 2) {
    RootedTree tree;
    if (n == 2) tree.add_child(tree.root());
    return tree;
  }
  if (n > dist.max_size()) {
    throw InvalidParameters(fmt::format(
        "subtree distribution covers sizes up to {}, asked for {}",
        dist.max_size(), n));
  }
  const SubtreeChoice choice = dist.draw(n, rng);
  RootedTree tree = ranrut(n - choice.copies * choice.size, dist, rng, variant);
  if (variant == RanrutVariant::SameCopy) {
    const RootedTree sub = ranrut(choice.size, dist, rng, variant);
    for (std::uint32_t i = 0; i < choice.copies; ++i) {
      tree.attach_copy(tree.root(), sub);
    }
  } else {
    for (std::uint32_t i = 0; i < choice.copies; ++i) {
      tree.attach_copy(tree.root(), ranrut(choice.size, dist, rng, variant));
    }
  }
  return tree;
}

namespace {

// Walks down from `start` through uniformly chosen children until a vertex
// has room for one more neighbor, and hangs `subtree` there.
void attach_below(RootedTree& tree, NodeId start, NodeId subtree,
                  std::size_t delta, Rng& rng) {
  NodeId cursor = start;
  while (tree.graph_degree(cursor) >= delta) {
    auto kids = tree.children(cursor);
    // A vertex at capacity with no children would have degree <= 1 < delta.
    assert(!kids.empty());
    cursor = kids[rng.uniform_below(kids.size())];
  }
  tree.adopt(cursor, subtree);
}

}  // namespace

RootedTree prune(RootedTree tree, std::size_t delta, Rng& rng) {
  if (tree.size() >= 3 && delta < 2) {
    throw InfeasibleDegreeBound(fmt::format(
        "no tree on {} vertices has maximum degree {}", tree.size(), delta));
  }
  if (tree.size() == 2 && delta == 0) {
    throw InfeasibleDegreeBound("a 2-vertex tree needs delta >= 1");
  }
  std::vector<NodeId> pending{tree.root()};
  while (!pending.empty()) {
    const NodeId v = pending.back();
    pending.pop_back();
    while (tree.graph_degree(v) > delta) {
      const NodeId moved = tree.detach_rightmost(v);
      attach_below(tree, v, moved, delta, rng);
    }
    auto kids = tree.children(v);
    pending.insert(pending.end(), kids.rbegin(), kids.rend());
  }
  return tree;
}

Topology random_tree(std::size_t n, std::size_t delta,
                     const SubtreeDistribution& dist, Rng& rng,
                     RanrutVariant variant) {
  return tree_to_topology(prune(ranrut(n, dist, rng, variant), delta, rng));
}

}  // namespace adn
