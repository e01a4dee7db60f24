#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <string_view>

#include "adncount/rng.hpp"
#include "adncount/topology.hpp"
#include "adncount/tree_generation.hpp"

namespace adn {

enum class Family { Tree, Star, Path, Gnp };

std::string_view to_string(Family family);
/// Accepts "tree" (or "random-tree"), "star", "path", "gnp".
Family parse_family(std::string_view text);

/// Stability period T in rounds; kStatic stands for T = infinity.
inline constexpr std::uint64_t kStatic = std::numeric_limits<std::uint64_t>::max();

/// "inf" for kStatic, the decimal count otherwise.
std::string period_to_string(std::uint64_t period);
/// Accepts "inf" or a positive integer.
std::uint64_t parse_period(std::string_view text);

struct ScheduleParams {
  Family family = Family::Path;
  std::size_t n = 2;
  /// Degree bound. Star and gnp force n-1 and reject any other value; tree
  /// and path default to n-1 and 2 respectively when unset.
  std::optional<std::size_t> delta;
  /// Edge probability, gnp only.
  double p = 0.0;
  std::uint64_t period = kStatic;
  std::uint64_t seed = 0;
  RanrutVariant variant = RanrutVariant::PaperLiteral;
};

/// Called with (first round in force, snapshot) for the initial snapshot and
/// for every change.
using ChangeObserver = std::function<void(std::uint64_t, const Topology&)>;

/// T-stable stream of topology snapshots.
///
/// The snapshot in force at round r belongs to epoch (r - 1) / T: a new link
/// set is drawn after the exchange of every round r with r % T == 0 and takes
/// effect at round r + 1. Tree and gnp epochs are fresh draws. Star and path
/// epochs after the first relabel the non-leader positions uniformly, keeping
/// the leader at the center / endpoint. Each epoch draws from its own random
/// stream derive_seed(seed, kTopologyStream, epoch), so the stream is a pure
/// function of the parameters.
class DynamicsSchedule {
 public:
  static constexpr std::uint64_t kTopologyStream = 0x746f706f;  // "topo"

  /// Validates the parameters and draws the snapshot for round 1. Throws
  /// InvalidParameters (InfeasibleDegreeBound for tree/path bounds below 2).
  explicit DynamicsSchedule(ScheduleParams params, ChangeObserver observer = {});

  const ScheduleParams& params() const { return params_; }
  std::size_t n() const { return params_.n; }
  std::size_t delta() const { return *params_.delta; }
  std::uint64_t period() const { return params_.period; }

  /// Snapshot in force at round r. Rounds must be queried in non-decreasing
  /// order; going backwards throws NonMonotoneAccess.
  const Topology& topology_at(std::uint64_t round);

  const Topology& current() const { return current_; }
  /// First round at which the current snapshot is in force.
  std::uint64_t current_since() const { return current_since_; }

 private:
  Topology draw(std::uint64_t epoch);

  ScheduleParams params_;
  ChangeObserver observer_;
  std::shared_ptr<const SubtreeDistribution> subtree_dist_;
  Topology current_;
  std::uint64_t current_epoch_ = 0;
  std::uint64_t current_since_ = 1;
  std::uint64_t last_round_ = 1;
};

}  // namespace adn
