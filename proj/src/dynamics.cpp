#include "adncount/dynamics.hpp"

#include <charconv>
#include <numeric>
#include <vector>

#include <fmt/format.h>

#include "adncount/errors.hpp"

namespace adn {

std::string_view to_string(Family family) {
  switch (family) {
    case Family::Tree: return "tree";
    case Family::Star: return "star";
    case Family::Path: return "path";
    case Family::Gnp: return "gnp";
  }
  return "?";
}

Family parse_family(std::string_view text) {
  if (text == "tree" || text == "random-tree") return Family::Tree;
  if (text == "star") return Family::Star;
  if (text == "path") return Family::Path;
  if (text == "gnp") return Family::Gnp;
  throw InvalidParameters(fmt::format("unknown topology family '{}'", text));
}

std::string period_to_string(std::uint64_t period) {
  return period == kStatic ? "inf" : std::to_string(period);
}

std::uint64_t parse_period(std::string_view text) {
  if (text == "inf") return kStatic;
  std::uint64_t value = 0;
  auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || end != text.data() + text.size() || value == 0 ||
      value == kStatic) {
    throw InvalidParameters(fmt::format(
        "stability period must be a positive integer or 'inf', got '{}'", text));
  }
  return value;
}

namespace {

void validate(ScheduleParams& params) {
  const std::size_t n = params.n;
  if (n < 2) throw InvalidParameters(fmt::format("need n >= 2, got {}", n));
  if (params.period == 0) throw InvalidParameters("stability period must be >= 1");
  const std::string family(to_string(params.family));

  switch (params.family) {
    case Family::Star:
    case Family::Gnp:
      if (params.delta && *params.delta != n - 1) {
        throw InvalidParameters(fmt::format(
            "{} topologies fix delta = n-1 = {}, got {}", family, n - 1, *params.delta));
      }
      params.delta = n - 1;
      break;
    case Family::Path:
      if (!params.delta) params.delta = std::min<std::size_t>(2, n - 1);
      break;
    case Family::Tree:
      if (!params.delta) params.delta = n - 1;
      break;
  }
  const std::size_t delta = *params.delta;
  if (delta > n - 1) {
    throw InvalidParameters(fmt::format("delta = {} exceeds n-1 = {}", delta, n - 1));
  }
  if (delta < std::min<std::size_t>(2, n - 1)) {
    throw InfeasibleDegreeBound(fmt::format(
        "no connected {} topology on {} nodes has maximum degree {}", family, n, delta));
  }
  if (params.family == Family::Gnp) {
    if (!(params.p >= 0.0 && params.p <= 1.0)) {
      throw InvalidParameters(fmt::format("edge probability {} not in [0, 1]", params.p));
    }
    if (params.period == kStatic) {
      throw InvalidParameters(
          "gnp requires a finite stability period: a static disconnected graph "
          "never completes");
    }
  }
}

}  // namespace

DynamicsSchedule::DynamicsSchedule(ScheduleParams params, ChangeObserver observer)
    : params_(std::move(params)), observer_(std::move(observer)) {
  validate(params_);
  if (params_.family == Family::Tree && params_.n >= 3) {
    subtree_dist_ = std::make_shared<const SubtreeDistribution>(
        subtree_distribution(sizes_table(params_.n), params_.n));
  }
  current_ = draw(0);
  if (observer_) observer_(1, current_);
}

const Topology& DynamicsSchedule::topology_at(std::uint64_t round) {
  if (round == 0) throw NonMonotoneAccess("rounds are numbered from 1");
  if (round < last_round_) {
    throw NonMonotoneAccess(fmt::format(
        "round {} requested after round {}", round, last_round_));
  }
  last_round_ = round;
  const std::uint64_t epoch =
      params_.period == kStatic ? 0 : (round - 1) / params_.period;
  if (epoch != current_epoch_) {
    current_ = draw(epoch);
    current_epoch_ = epoch;
    current_since_ = epoch * params_.period + 1;
    if (observer_) observer_(current_since_, current_);
  }
  return current_;
}

Topology DynamicsSchedule::draw(std::uint64_t epoch) {
  Rng rng(derive_seed(params_.seed, kTopologyStream, epoch));
  const std::size_t n = params_.n;
  switch (params_.family) {
    case Family::Star:
      // Relabeling the leaves of a star yields the same link set.
      return star(n);
    case Family::Path: {
      std::vector<NodeId> order(n);
      std::iota(order.begin(), order.end(), NodeId{0});
      if (epoch > 0) rng.shuffle(std::span<NodeId>(order).subspan(1));
      return path_through(order);
    }
    case Family::Gnp:
      return gnp(n, params_.p, rng);
    case Family::Tree:
      if (n == 2) return path(2);
      return random_tree(n, delta(), *subtree_dist_, rng, params_.variant);
  }
  return Topology(n);
}

}  // namespace adn
