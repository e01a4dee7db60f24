#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "adncount/rng.hpp"
#include "adncount/rooted_tree.hpp"
#include "adncount/topology.hpp"

namespace adn {

using BigInt = boost::multiprecision::cpp_int;

/// t[i] = number of unlabeled rooted trees with i vertices, i = 1..n_max.
class TreeCountTable {
 public:
  explicit TreeCountTable(std::vector<BigInt> counts)
      : counts_(std::move(counts)) {}

  std::size_t max_size() const { return counts_.size(); }

  /// Count for trees with `vertices` vertices (1-based, as in t[i]).
  const BigInt& operator[](std::size_t vertices) const {
    return counts_[vertices - 1];
  }

  std::span<const BigInt> counts() const { return counts_; }

 private:
  std::vector<BigInt> counts_;
};

/// Rooted-tree counts by the convolution recurrence
///   t[i] = (1/(i-1)) * sum_{j,d >= 1, j*d < i} d * t[i-j*d] * t[d]
/// in exact integer arithmetic. Throws InvalidParameters for n_max == 0.
TreeCountTable sizes_table(std::size_t n_max);

/// One entry of a subtree-size row: j copies of a subtree of size d hang
/// from the root of a tree of size k - j*d.
struct SubtreeChoice {
  std::uint32_t copies;    // j
  std::uint32_t size;      // d
  double probability;
};

/// For each target size k >= 3, the distribution over (j, d) with j*d < k:
///   p[k][j][d] = d * t[k-jd] * t[d] / ((k-1) * t[k]).
///
/// Rows are stored sparsely (only pairs with j*d < k), so memory grows as
/// O(n^2 log n) rather than the O(n^3) of a dense table.
class SubtreeDistribution {
 public:
  SubtreeDistribution(const TreeCountTable& t, std::size_t n);

  std::size_t max_size() const { return rows_.size() - 1; }

  /// Entries for size k in (j ascending, d ascending) order; empty for k < 3.
  std::span<const SubtreeChoice> row(std::size_t k) const { return rows_[k]; }

  /// p[k][j][d]; zero when j*d >= k or k < 3.
  double probability(std::size_t k, std::size_t j, std::size_t d) const;

  /// Inverse-CDF draw of a (j, d) pair for size k >= 3.
  const SubtreeChoice& draw(std::size_t k, Rng& rng) const;

 private:
  std::vector<std::vector<SubtreeChoice>> rows_;
  std::vector<std::vector<double>> cumulative_;
};

/// Throws InvalidParameters unless n >= 3 and t covers 1..n.
SubtreeDistribution subtree_distribution(const TreeCountTable& t,
                                         std::size_t n);

enum class RanrutVariant {
  /// Each of the j subtrees of size d is drawn independently.
  PaperLiteral,
  /// One subtree of size d is drawn and hung j times (Nijenhuis–Wilf);
  /// uniform over isomorphism classes.
  SameCopy,
};

std::string_view to_string(RanrutVariant variant);
RanrutVariant parse_ranrut_variant(std::string_view text);

/// Random unlabeled rooted tree with exactly n vertices.
RootedTree ranrut(std::size_t n, const SubtreeDistribution& dist, Rng& rng,
                  RanrutVariant variant = RanrutVariant::PaperLiteral);

/// Pushes subtrees downward until every vertex has at most `delta` graph
/// neighbors: the root keeps at most delta children, other vertices at most
/// delta - 1. While a vertex is over the bound its rightmost subtree is
/// detached and re-attached at the first vertex with spare capacity on a
/// uniformly random downward walk starting at that vertex's children.
/// Vertex count is preserved and depth never decreases.
///
/// Throws InfeasibleDegreeBound when n >= 3 and delta < 2, and
/// InvalidParameters when delta == 0 on a tree with more than one vertex.
RootedTree prune(RootedTree tree, std::size_t delta, Rng& rng);

/// ranrut followed by prune and conversion to a leader-rooted topology.
Topology random_tree(std::size_t n, std::size_t delta,
                     const SubtreeDistribution& dist, Rng& rng,
                     RanrutVariant variant = RanrutVariant::PaperLiteral);

}  // namespace adn
