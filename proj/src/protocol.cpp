#include "adncount/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

namespace adn {

std::string_view to_string(Mode mode) {
  return mode == Mode::Theoretical ? "theoretical" : "experimental";
}

Mode parse_mode(std::string_view text) {
  if (text == "experimental") return Mode::Experimental;
  if (text == "theoretical") return Mode::Theoretical;
  throw InvalidParameters(fmt::format("unknown mode '{}'", text));
}

std::string_view to_string(RunStatus status) {
  return status == RunStatus::Ok ? "ok" : "round_limit";
}

namespace {

constexpr unsigned __int128 kU128Max = ~static_cast<unsigned __int128>(0);

std::uint64_t saturate(unsigned __int128 v) {
  return v > std::numeric_limits<std::uint64_t>::max()
             ? std::numeric_limits<std::uint64_t>::max()
             : static_cast<std::uint64_t>(v);
}

// Largest round count the theoretical schedule can need for sizes 2..n.
std::uint64_t theoretical_schedule_length(std::size_t n, std::size_t delta,
                                          double c) {
  unsigned __int128 total = 0;
  for (std::size_t k = 2; k <= n; ++k) {
    const unsigned __int128 phase =
        collection_budget(k, delta) + verification_length(k, c) + k;
    if (phase > kU128Max - total) return std::numeric_limits<std::uint64_t>::max();
    total += phase;
  }
  return saturate(total);
}

std::uint64_t max_rounds_for(const ProtocolConfig& config, std::size_t n,
                             std::size_t delta) {
  if (config.max_rounds) return *config.max_rounds;
  std::uint64_t cap = default_max_rounds(n, delta);
  if (config.mode == Mode::Theoretical) {
    cap = std::max(cap, theoretical_schedule_length(n, delta, config.c));
  }
  return cap;
}

// Snapshot for the round about to execute, enforcing the round cap.
const Topology& enter_round(ProtocolState& state, DynamicsSchedule& schedule,
                            std::uint64_t max_rounds) {
  if (state.round > max_rounds) {
    throw RoundLimitExceeded(fmt::format(
        "round limit {} exceeded at k = {}", max_rounds, state.k));
  }
  return schedule.topology_at(state.round);
}

void check_degree_bound(const Topology& topology, std::size_t delta) {
  for (NodeId i = 0; i < topology.size(); ++i) {
    if (topology.degree(i) > delta) {
      throw DegreeBoundViolated(fmt::format(
          "node {} has {} neighbors, bound is {}", i, topology.degree(i), delta));
    }
  }
}

}  // namespace

void validate(const ProtocolConfig& config, std::size_t n, std::size_t delta) {
  if (!(config.c > 1.0)) {
    throw InvalidParameters(fmt::format("threshold exponent c must exceed 1, got {}", config.c));
  }
  if (config.mode != Mode::Theoretical) return;
  if (!(config.c > std::log2(5.0))) {
    throw InvalidParameters(fmt::format(
        "theoretical mode needs c > log2(5) ~ 2.3219, got {}", config.c));
  }
  if (!config.allow_large_theoretical && (n > 8 || delta > 4)) {
    throw InvalidParameters(fmt::format(
        "theoretical mode is limited to n <= 8 and delta <= 4 (got n = {}, "
        "delta = {}); the collection budget grows as (2 delta)^k",
        n, delta));
  }
}

std::uint64_t default_max_rounds(std::size_t n, std::size_t delta) {
  const unsigned __int128 n2 = static_cast<unsigned __int128>(n) * n;
  return saturate(10 * static_cast<unsigned __int128>(delta) * n2 * n2);
}

ProtocolState::ProtocolState(std::size_t n)
    : energy(n, 0.0), max_heard(n, 0.0), halt(n, 0) {}

void ProtocolState::begin_candidate(std::size_t candidate) {
  k = candidate;
  is_correct = true;
  std::fill(energy.begin(), energy.end(), 1.0);
  energy[kLeader] = 0.0;
}

double collection_threshold(std::size_t k, double c) {
  const double kd = static_cast<double>(k);
  return kd - 1.0 - std::pow(kd, -c);
}

double residual_threshold(std::size_t k, double c) {
  return std::pow(static_cast<double>(k), -c);
}

std::uint64_t verification_length(std::size_t k, double c) {
  const double kd = static_cast<double>(k);
  return 1 + static_cast<std::uint64_t>(std::ceil(kd / (1.0 - std::pow(kd, -c))));
}

unsigned __int128 collection_budget(std::size_t k, std::size_t delta) {
  const auto fail = [&] {
    return BudgetOverflow(fmt::format(
        "collection budget for k = {}, delta = {} exceeds 128 bits", k, delta));
  };
  const unsigned __int128 base = 2 * static_cast<unsigned __int128>(delta);
  unsigned __int128 power = 1;
  for (std::size_t i = 0; i < k; ++i) {
    if (base != 0 && power > kU128Max / base) throw fail();
    power *= base;
  }
  const long double rho =
      std::ceil(static_cast<long double>(power) * std::log(static_cast<long double>(k)));
  if (rho >= std::ldexp(1.0L, 128)) throw fail();
  const auto rho_int = static_cast<unsigned __int128>(rho);
  if (rho_int != 0 && k > kU128Max / rho_int) throw fail();
  return k * rho_int;
}

void collection_round(std::span<const double> energy, std::span<double> next,
                      const Topology& topology, std::size_t delta) {
  const std::size_t n = energy.size();
  check_degree_bound(topology, delta);
  const double fraction = 1.0 / (2.0 * static_cast<double>(delta));
  next[kLeader] = energy[kLeader];
  for (NodeId j = 1; j < n; ++j) {
    next[j] = energy[j] * (1.0 - static_cast<double>(topology.degree(j)) * fraction);
  }
  for (NodeId j = 1; j < n; ++j) {
    const double share = energy[j] * fraction;
    for (NodeId i : topology.neighbors(j)) next[i] += share;
  }
}

std::uint64_t run_collection(ProtocolState& state, DynamicsSchedule& schedule,
                             const ProtocolConfig& config) {
  const std::size_t n = state.n();
  const std::size_t delta = schedule.delta();
  const std::uint64_t max_rounds = max_rounds_for(config, n, delta);
  std::vector<double> next(n);

  const auto step = [&] {
    const Topology& topology = enter_round(state, schedule, max_rounds);
    collection_round(state.energy, next, topology, delta);
    state.energy.swap(next);
    if (*std::min_element(state.energy.begin(), state.energy.end()) < 0.0) {
      throw Error(fmt::format("negative energy at round {}", state.round));
    }
    if (config.on_collection_round) config.on_collection_round(state);
    ++state.round;
  };

  const std::uint64_t start = state.round;
  if (config.mode == Mode::Theoretical) {
    const unsigned __int128 budget = collection_budget(state.k, delta);
    if (budget > static_cast<unsigned __int128>(max_rounds) - (state.round - 1)) {
      throw RoundLimitExceeded(fmt::format(
          "collection budget for k = {} does not fit in the round limit {}",
          state.k, max_rounds));
    }
    for (unsigned __int128 i = 0; i < budget; ++i) step();
  } else {
    const double threshold = collection_threshold(state.k, config.c);
    while (state.energy[kLeader] < threshold) step();
  }
  return state.round - start;
}

std::uint64_t run_verification(ProtocolState& state, DynamicsSchedule& schedule,
                               const ProtocolConfig& config) {
  const std::size_t n = state.n();
  const std::size_t k = state.k;
  const std::uint64_t max_rounds = max_rounds_for(config, n, schedule.delta());
  const bool tolerant = config.disconnection_tolerant;

  // The leader can never hold more than n - 1; once collection has run long
  // enough (theoretical budgets) rounding alone may put it an ulp above, so
  // this test allows the same slack as energy conservation.
  const double slack = kConservationTolerance * static_cast<double>(n);
  if (state.energy[kLeader] > static_cast<double>(k) - 1.0 + slack) state.is_correct = false;
  state.max_heard = state.energy;
  state.max_heard[kLeader] = 0.0;
  if (tolerant) {
    state.heard_sources.assign(n, boost::dynamic_bitset<>(n));
    for (std::size_t i = 0; i < n; ++i) state.heard_sources[i].set(i);
  }

  std::vector<double> next(n);
  std::vector<boost::dynamic_bitset<>> next_sources;
  const auto step = [&] {
    const Topology& topology = enter_round(state, schedule, max_rounds);
    for (NodeId i = 0; i < n; ++i) {
      double best = state.max_heard[i];
      for (NodeId j : topology.neighbors(i)) best = std::max(best, state.max_heard[j]);
      next[i] = best;
    }
    state.max_heard.swap(next);
    if (tolerant) {
      next_sources = state.heard_sources;
      for (NodeId i = 0; i < n; ++i) {
        for (NodeId j : topology.neighbors(i)) next_sources[i] |= state.heard_sources[j];
      }
      state.heard_sources.swap(next_sources);
    }
    ++state.round;
  };

  const std::uint64_t start = state.round;
  const std::uint64_t fixed = verification_length(k, config.c);
  for (std::uint64_t i = 0; i < fixed; ++i) step();
  if (tolerant) {
    while (!state.heard_sources[kLeader].all()) step();
  }
  if (state.max_heard[kLeader] > residual_threshold(k, config.c)) state.is_correct = false;
  return state.round - start;
}

std::uint64_t run_notification(ProtocolState& state, DynamicsSchedule& schedule,
                               const ProtocolConfig& config) {
  const std::size_t n = state.n();
  const std::uint64_t max_rounds = max_rounds_for(config, n, schedule.delta());

  std::fill(state.halt.begin(), state.halt.end(), 0);
  state.halt[kLeader] = state.is_correct ? 1 : 0;

  std::vector<char> next(n);
  const auto step = [&] {
    const Topology& topology = enter_round(state, schedule, max_rounds);
    for (NodeId i = 0; i < n; ++i) {
      char flag = state.halt[i];
      for (NodeId j : topology.neighbors(i)) flag |= state.halt[j];
      next[i] = flag;
    }
    state.halt.swap(next);
    ++state.round;
  };
  const auto all_halted = [&] {
    return std::all_of(state.halt.begin(), state.halt.end(), [](char h) { return h != 0; });
  };

  const std::uint64_t start = state.round;
  for (std::size_t i = 0; i < state.k; ++i) step();
  if (config.disconnection_tolerant) {
    while (state.halt[kLeader] && !all_halted()) step();
  }
  return state.round - start;
}

RunRecord count(DynamicsSchedule& schedule, const ProtocolConfig& config) {
  const ScheduleParams& params = schedule.params();
  const std::size_t n = schedule.n();
  validate(config, n, schedule.delta());

  RunRecord record;
  record.family = params.family;
  record.n = n;
  record.delta = schedule.delta();
  record.period = params.period;
  if (params.family == Family::Gnp) record.p = params.p;
  record.mode = config.mode;
  record.c = config.c;
  record.seed = params.seed;
  record.disconnection_tolerant = config.disconnection_tolerant;
  record.outside_proven_regime = n <= 3;

  ProtocolState state(n);
  PhaseTrace trace;
  std::uint64_t phase_start = state.round;
  std::uint64_t* phase_slot = &trace.collection;

  const auto enter_phase = [&](std::uint64_t& slot) {
    phase_slot = &slot;
    phase_start = state.round;
  };
  const auto finish = [&] {
    record.estimate = state.k;
    record.rounds_total = state.round - 1;
    for (const PhaseTrace& t : record.per_k_trace) {
      record.rounds_collection += t.collection;
      record.rounds_verification += t.verification;
      record.rounds_notification += t.notification;
    }
  };

  try {
    for (std::size_t k = 2;; ++k) {
      state.begin_candidate(k);
      trace = PhaseTrace{.k = k};
      enter_phase(trace.collection);
      trace.collection = run_collection(state, schedule, config);
      enter_phase(trace.verification);
      trace.verification = run_verification(state, schedule, config);
      enter_phase(trace.notification);
      trace.notification = run_notification(state, schedule, config);
      record.per_k_trace.push_back(trace);
      if (state.is_correct) break;
    }
  } catch (RoundLimitExceeded& e) {
    *phase_slot = state.round - phase_start;
    record.per_k_trace.push_back(trace);
    record.status = RunStatus::RoundLimit;
    finish();
    e.record = record;
    throw;
  }
  finish();
  return record;
}

void to_json(nlohmann::json& j, const RunRecord& r) {
  nlohmann::json trace = nlohmann::json::array();
  for (const PhaseTrace& t : r.per_k_trace) {
    trace.push_back({{"k", t.k},
                     {"collection", t.collection},
                     {"verification", t.verification},
                     {"notification", t.notification}});
  }
  nlohmann::json period = r.period == kStatic ? nlohmann::json("inf") : nlohmann::json(r.period);
  j = {{"family", to_string(r.family)},
       {"n", r.n},
       {"delta", r.delta},
       {"T", period},
       {"p", r.p ? nlohmann::json(*r.p) : nlohmann::json(nullptr)},
       {"mode", to_string(r.mode)},
       {"c", r.c},
       {"seed", r.seed},
       {"disconnection_tolerant", r.disconnection_tolerant},
       {"status", to_string(r.status)},
       {"estimate", r.estimate},
       {"rounds_total", r.rounds_total},
       {"rounds_collection", r.rounds_collection},
       {"rounds_verification", r.rounds_verification},
       {"rounds_notification", r.rounds_notification},
       {"per_k_trace", trace},
       {"outside_proven_regime", r.outside_proven_regime}};
}

void from_json(const nlohmann::json& j, RunRecord& r) {
  r.family = parse_family(j.at("family").get<std::string>());
  r.n = j.at("n").get<std::size_t>();
  r.delta = j.at("delta").get<std::size_t>();
  const auto& period = j.at("T");
  r.period = period.is_string() ? parse_period(period.get<std::string>())
                                : period.get<std::uint64_t>();
  r.p = j.at("p").is_null() ? std::nullopt : std::optional<double>(j.at("p").get<double>());
  r.mode = parse_mode(j.at("mode").get<std::string>());
  r.c = j.at("c").get<double>();
  r.seed = j.at("seed").get<std::uint64_t>();
  r.disconnection_tolerant = j.at("disconnection_tolerant").get<bool>();
  const auto status = j.at("status").get<std::string>();
  if (status == "ok") {
    r.status = RunStatus::Ok;
  } else if (status == "round_limit") {
    r.status = RunStatus::RoundLimit;
  } else {
    throw InvalidParameters(fmt::format("unknown run status '{}'", status));
  }
  r.estimate = j.at("estimate").get<std::size_t>();
  r.rounds_total = j.at("rounds_total").get<std::uint64_t>();
  r.rounds_collection = j.at("rounds_collection").get<std::uint64_t>();
  r.rounds_verification = j.at("rounds_verification").get<std::uint64_t>();
  r.rounds_notification = j.at("rounds_notification").get<std::uint64_t>();
  r.per_k_trace.clear();
  for (const auto& t : j.at("per_k_trace")) {
    r.per_k_trace.push_back({t.at("k").get<std::size_t>(),
                             t.at("collection").get<std::uint64_t>(),
                             t.at("verification").get<std::uint64_t>(),
                             t.at("notification").get<std::uint64_t>()});
  }
  r.outside_proven_regime = j.at("outside_proven_regime").get<bool>();
}

}  // namespace adn
