#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include <boost/dynamic_bitset.hpp>
#include <json.hpp>

#include "adncount/dynamics.hpp"
#include "adncount/errors.hpp"
#include "adncount/topology.hpp"

namespace adn {

enum class Mode {
  /// Each phase runs until its stopping condition holds (centralized check).
  Experimental,
  /// Collection runs the fixed budget tau(k) = k * ceil((2 delta)^k ln k).
  Theoretical,
};

std::string_view to_string(Mode mode);
Mode parse_mode(std::string_view text);

inline constexpr double kDefaultThresholdExponent = 1.01;

/// Per-node bound on floating-point drift of the total energy n - 1.
inline constexpr double kConservationTolerance = 1e-9;

struct ProtocolState;

struct ProtocolConfig {
  /// Residual-energy threshold exponent: a node is "empty" at 1/k^c.
  double c = kDefaultThresholdExponent;
  Mode mode = Mode::Experimental;
  /// Safety cap on the global round counter; unset means 10 * delta * n^4.
  std::optional<std::uint64_t> max_rounds;
  /// Extend verification and notification until every node has been heard
  /// by / notified from the leader (needed when snapshots may be
  /// disconnected).
  bool disconnection_tolerant = false;
  /// Lifts the n <= 8, delta <= 4 gate on theoretical mode.
  bool allow_large_theoretical = false;
  /// Invoked after every collection round with the updated state.
  std::function<void(const ProtocolState&)> on_collection_round;
};

/// Throws InvalidParameters for c <= 1, for theoretical mode with
/// c <= log2(5), or for an ungated theoretical run with n > 8 or delta > 4.
void validate(const ProtocolConfig& config, std::size_t n, std::size_t delta);

std::uint64_t default_max_rounds(std::size_t n, std::size_t delta);

struct ProtocolState {
  explicit ProtocolState(std::size_t n);

  std::size_t k = 1;
  /// Global round counter; the next round to execute.
  std::uint64_t round = 1;
  std::vector<double> energy;
  std::vector<double> max_heard;
  std::vector<boost::dynamic_bitset<>> heard_sources;
  std::vector<char> halt;
  bool is_correct = false;

  std::size_t n() const { return energy.size(); }

  /// Starts the iteration for candidate size k: is_correct := true and the
  /// energy vector reset to (0, 1, ..., 1).
  void begin_candidate(std::size_t k);
};

struct PhaseTrace {
  std::size_t k = 0;
  std::uint64_t collection = 0;
  std::uint64_t verification = 0;
  std::uint64_t notification = 0;

  bool operator==(const PhaseTrace&) const = default;
};

enum class RunStatus { Ok, RoundLimit };

std::string_view to_string(RunStatus status);

struct RunRecord {
  Family family = Family::Path;
  std::size_t n = 0;
  std::size_t delta = 0;
  std::uint64_t period = kStatic;
  std::optional<double> p;
  Mode mode = Mode::Experimental;
  double c = kDefaultThresholdExponent;
  std::uint64_t seed = 0;
  bool disconnection_tolerant = false;

  RunStatus status = RunStatus::Ok;
  /// Last candidate size reached; the count when status is Ok.
  std::size_t estimate = 0;
  std::uint64_t rounds_total = 0;
  std::uint64_t rounds_collection = 0;
  std::uint64_t rounds_verification = 0;
  std::uint64_t rounds_notification = 0;
  std::vector<PhaseTrace> per_k_trace;
  /// n <= 3 lies outside the regime covered by the correctness analysis.
  bool outside_proven_regime = false;

  bool operator==(const RunRecord&) const = default;
};

void to_json(nlohmann::json& j, const RunRecord& record);
void from_json(const nlohmann::json& j, RunRecord& record);

/// Thrown when the global round counter would pass max_rounds. `record`
/// carries the trace up to that point when raised from count().
class RoundLimitExceeded : public Error {
 public:
  RoundLimitExceeded(const std::string& what, RunRecord partial = {})
      : Error(what), record(std::move(partial)) {}

  RunRecord record;
};

/// Collection threshold k - 1 - 1/k^c.
double collection_threshold(std::size_t k, double c);

/// Residual threshold 1/k^c.
double residual_threshold(std::size_t k, double c);

/// Fixed verification length 1 + ceil(k / (1 - 1/k^c)).
std::uint64_t verification_length(std::size_t k, double c);

/// Theoretical collection budget k * ceil((2 delta)^k * ln k), checked
/// against 128-bit overflow (BudgetOverflow).
unsigned __int128 collection_budget(std::size_t k, std::size_t delta);

/// One gossip exchange: every non-leader j sends energy[j] / (2 delta) to
/// each neighbor and keeps the rest; the leader keeps everything it holds
/// and receives. Writes the new vector to `next`. Throws
/// DegreeBoundViolated if some degree exceeds delta.
void collection_round(std::span<const double> energy, std::span<double> next,
                      const Topology& topology, std::size_t delta);

/// Runs the collection phase for state.k. Returns the rounds used.
std::uint64_t run_collection(ProtocolState& state, DynamicsSchedule& schedule,
                             const ProtocolConfig& config);

/// Runs the verification phase; may clear state.is_correct. Returns the
/// rounds used.
std::uint64_t run_verification(ProtocolState& state, DynamicsSchedule& schedule,
                               const ProtocolConfig& config);

/// Floods the halt flag from the leader for k rounds (longer when
/// disconnection tolerant). Returns the rounds used.
std::uint64_t run_notification(ProtocolState& state, DynamicsSchedule& schedule,
                               const ProtocolConfig& config);

/// Runs candidate sizes k = 2, 3, ... until the leader confirms one.
/// Throws RoundLimitExceeded with the partial record attached.
RunRecord count(DynamicsSchedule& schedule, const ProtocolConfig& config);

}  // namespace adn
