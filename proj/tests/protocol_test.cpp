#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "adncount/errors.hpp"
#include "adncount/protocol.hpp"

using namespace adn;

namespace {

ScheduleParams make(Family family, std::size_t n, std::optional<std::size_t> delta,
                    std::uint64_t period, std::uint64_t seed = 1, double p = 0.0) {
  ScheduleParams params;
  params.family = family;
  params.n = n;
  params.delta = delta;
  params.period = period;
  params.seed = seed;
  params.p = p;
  return params;
}

// Evaluates 1 + ceil(k / (1 - k^-c)) in long double, apart from the
// implementation's double arithmetic.
std::uint64_t verification_length_oracle(long double k, long double c) {
  return 1 + static_cast<std::uint64_t>(std::ceil(k / (1.0L - std::pow(k, -c))));
}

}  // namespace

TEST_CASE("two-node collection closes to 1 - 2^-r") {
  Topology t = path(2);
  std::vector<double> e{0.0, 1.0}, next(2);
  collection_round(e, next, t, 1);
  CHECK(next == std::vector<double>{0.5, 0.5});
  e.swap(next);
  collection_round(e, next, t, 1);
  CHECK(next == std::vector<double>{0.75, 0.25});
  e = {0.0, 1.0};
  for (int r = 1; r <= 40; ++r) {
    collection_round(e, next, t, 1);
    e.swap(next);
    REQUIRE(e[0] == 1.0 - std::ldexp(1.0, -r));
    REQUIRE(e[1] == std::ldexp(1.0, -r));
  }
}

TEST_CASE("complete graph share matrix") {
  Rng rng(0);
  Topology k4 = gnp(4, 1.0, rng);
  std::vector<double> next(4);
  // Column j of F is the image of the unit vector at j.
  for (NodeId j = 1; j < 4; ++j) {
    std::vector<double> unit(4, 0.0);
    unit[j] = 1.0;
    collection_round(unit, next, k4, 3);
    for (NodeId i = 0; i < 4; ++i) {
      CAPTURE(i);
      CAPTURE(j);
      CHECK(next[i] == doctest::Approx(i == j ? 0.5 : 1.0 / 6.0).epsilon(1e-15));
    }
  }
  std::vector<double> leader_only{1.0, 0.0, 0.0, 0.0};
  collection_round(leader_only, next, k4, 3);
  CHECK(next == leader_only);
}

TEST_CASE("isolated nodes keep their energy") {
  Topology t(3);
  t.add_edge(0, 1);
  std::vector<double> e{0.0, 1.0, 1.0}, next(3);
  collection_round(e, next, t, 2);
  CHECK(next[2] == 1.0);
  CHECK(next[0] == 0.25);
  CHECK(next[1] == 0.75);
}

TEST_CASE("collection rejects a topology above the degree bound") {
  std::vector<double> e{0.0, 1.0, 1.0, 1.0}, next(4);
  CHECK_THROWS_AS(collection_round(e, next, star(4), 2), DegreeBoundViolated);
}

TEST_CASE("thresholds and phase lengths") {
  CHECK(collection_threshold(2, 1.01) == doctest::Approx(0.503453752281482).epsilon(1e-14));
  CHECK(residual_threshold(2, 1.01) == doctest::Approx(0.49654624771851796).epsilon(1e-14));
  CHECK(verification_length(2, 1.01) == 5);
  CHECK(verification_length(10, 1.01) == 13);
  for (std::size_t k = 2; k <= 500; ++k) {
    CAPTURE(k);
    REQUIRE(verification_length(k, 1.01) == verification_length_oracle(k, 1.01L));
    REQUIRE(verification_length(k, 2.4) == verification_length_oracle(k, 2.4L));
  }
  CHECK(collection_budget(2, 1) == 6);
  CHECK(collection_budget(2, 2) == 24);
  CHECK(collection_budget(3, 2) == 213);
  CHECK(collection_budget(4, 2) == 1420);
  CHECK(collection_budget(8, 4) == 279097920);
  CHECK_THROWS_AS(collection_budget(60, 4), BudgetOverflow);
  CHECK(default_max_rounds(20, 2) == 3200000);
}

TEST_CASE("two-node run phase by phase") {
  DynamicsSchedule schedule(make(Family::Path, 2, 1, kStatic));
  ProtocolConfig config;
  ProtocolState state(2);
  state.begin_candidate(2);
  CHECK(state.energy == std::vector<double>{0.0, 1.0});
  CHECK(run_collection(state, schedule, config) == 2);
  CHECK(state.energy == std::vector<double>{0.75, 0.25});
  CHECK(run_verification(state, schedule, config) == 5);
  CHECK(state.is_correct);
  CHECK(state.max_heard[kLeader] == 0.25);
  CHECK(run_notification(state, schedule, config) == 2);
  CHECK(state.halt == std::vector<char>{1, 1});
  CHECK(state.round == 10);
}

TEST_CASE("theoretical collection uses the fixed budget") {
  DynamicsSchedule schedule(make(Family::Path, 2, 1, kStatic));
  ProtocolConfig config{.c = 2.4, .mode = Mode::Theoretical};
  ProtocolState state(2);
  state.begin_candidate(2);
  CHECK(run_collection(state, schedule, config) == 6);
  CHECK(state.energy[kLeader] == 1.0 - std::ldexp(1.0, -6));
}

TEST_CASE("notification with a wrong candidate keeps every flag down") {
  DynamicsSchedule schedule(make(Family::Star, 6, std::nullopt, kStatic));
  ProtocolState state(6);
  state.k = 4;
  state.is_correct = false;
  CHECK(run_notification(state, schedule, ProtocolConfig{}) == 4);
  CHECK(std::none_of(state.halt.begin(), state.halt.end(), [](char h) { return h; }));
}

TEST_CASE("halt flag crosses a static path in n - 1 rounds") {
  for (std::size_t n : {3, 10, 25}) {
    CAPTURE(n);
    for (std::size_t rounds : {n - 2, n - 1}) {
      DynamicsSchedule schedule(make(Family::Path, n, 2, kStatic));
      ProtocolState state(n);
      state.k = rounds;
      state.is_correct = true;
      run_notification(state, schedule, ProtocolConfig{});
      CHECK(static_cast<bool>(state.halt[n - 1]) == (rounds == n - 1));
      CHECK(static_cast<bool>(state.halt[n - 2]));
    }
  }
}

TEST_CASE("star halts everyone in one round") {
  DynamicsSchedule schedule(make(Family::Star, 9, std::nullopt, kStatic));
  ProtocolState state(9);
  state.k = 1;
  state.is_correct = true;
  run_notification(state, schedule, ProtocolConfig{});
  CHECK(std::all_of(state.halt.begin(), state.halt.end(), [](char h) { return h; }));
}

TEST_CASE("verification spreads the largest residual to the leader") {
  Rng rng(31);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 4 + rng.uniform_below(20);
    DynamicsSchedule schedule(make(Family::Tree, n, std::nullopt, kStatic, trial));
    ProtocolState state(n);
    state.k = n;
    state.is_correct = true;
    for (auto& e : state.energy) e = rng.uniform01() * 1e-3;
    state.energy[kLeader] = 0.0;
    const double largest = *std::max_element(state.energy.begin() + 1, state.energy.end());
    const auto before = state.energy;
    run_verification(state, schedule, ProtocolConfig{});
    CHECK(state.max_heard[kLeader] == largest);
    for (std::size_t i = 1; i < n; ++i) REQUIRE(state.max_heard[i] >= before[i]);
  }
}

TEST_CASE("verification flags a leader holding more than k - 1") {
  DynamicsSchedule schedule(make(Family::Path, 3, 2, kStatic));
  ProtocolState state(3);
  state.k = 2;
  state.is_correct = true;
  state.energy = {1.5, 0.25, 0.25};
  run_verification(state, schedule, ProtocolConfig{});
  CHECK_FALSE(state.is_correct);
}

TEST_CASE("end-to-end counts") {
  SUBCASE("two nodes") {
    DynamicsSchedule schedule(make(Family::Path, 2, 1, kStatic));
    RunRecord r = count(schedule, ProtocolConfig{});
    CHECK(r.estimate == 2);
    CHECK(r.rounds_collection == 2);
    CHECK(r.rounds_verification == 5);
    CHECK(r.rounds_notification == 2);
    CHECK(r.rounds_total == 9);
    CHECK(r.outside_proven_regime);
  }
  SUBCASE("static path of five") {
    DynamicsSchedule schedule(make(Family::Path, 5, 2, kStatic));
    RunRecord r = count(schedule, ProtocolConfig{});
    CHECK(r.estimate == 5);
    // Golden value from this engine.
    CHECK(r.rounds_total == 188);
    CHECK(r.per_k_trace.size() == 4);
    CHECK(r.per_k_trace.back() == PhaseTrace{5, 95, 8, 5});
    CHECK_FALSE(r.outside_proven_regime);
    std::uint64_t sum = 0;
    for (const auto& t : r.per_k_trace) sum += t.collection + t.verification + t.notification;
    CHECK(sum == r.rounds_total);
  }
  SUBCASE("theoretical mode on a four-node path") {
    DynamicsSchedule schedule(make(Family::Path, 4, 2, kStatic));
    RunRecord r = count(schedule, ProtocolConfig{.c = 2.4, .mode = Mode::Theoretical});
    CHECK(r.estimate == 4);
    CHECK(r.per_k_trace[0].collection == 24);
    CHECK(r.per_k_trace[1].collection == 213);
    CHECK(r.per_k_trace[2].collection == 1420);
  }
}

TEST_CASE("collection invariants hold across families and seeds") {
  std::size_t rounds_checked = 0;
  for (std::uint64_t seed = 0; seed < 4; ++seed) {
    for (std::size_t n = 3; n <= 12; ++n) {
      std::vector<ScheduleParams> cases{
          make(Family::Path, n, 2, kStatic, seed), make(Family::Path, n, 2, 1, seed),
          make(Family::Star, n, std::nullopt, kStatic, seed),
          make(Family::Tree, n, std::nullopt, 1, seed), make(Family::Tree, n, 2, 7, seed),
          make(Family::Gnp, n, std::nullopt, 10, seed, 0.3)};
      for (const auto& params : cases) {
        DynamicsSchedule schedule(params);
        double leader = 0.0;
        std::size_t k = 0;
        ProtocolConfig config;
        config.disconnection_tolerant = params.family == Family::Gnp;
        config.on_collection_round = [&](const ProtocolState& s) {
          if (s.k != k) {
            k = s.k;
            leader = 0.0;
          }
          const double total = std::accumulate(s.energy.begin(), s.energy.end(), 0.0);
          REQUIRE(std::abs(total - static_cast<double>(n - 1)) <= 1e-9 * static_cast<double>(n));
          for (std::size_t i = 1; i < n; ++i) REQUIRE(s.energy[i] <= 1.0 + 1e-12);
          REQUIRE(*std::min_element(s.energy.begin(), s.energy.end()) >= 0.0);
          REQUIRE(s.energy[kLeader] >= leader);
          leader = s.energy[kLeader];
          ++rounds_checked;
        };
        RunRecord r = count(schedule, config);
        CAPTURE(to_string(params.family));
        CAPTURE(n);
        REQUIRE(r.estimate == n);
      }
    }
  }
  CHECK(rounds_checked > 10000);
}

TEST_CASE("same schedule seed, same record") {
  for (Family family : {Family::Tree, Family::Gnp}) {
    ScheduleParams params = make(family, 15, std::nullopt, 3, 42, 0.3);
    ProtocolConfig config{.disconnection_tolerant = true};
    DynamicsSchedule a(params), b(params);
    CHECK(count(a, config) == count(b, config));
  }
}

TEST_CASE("round limit carries the partial record") {
  DynamicsSchedule schedule(make(Family::Gnp, 6, std::nullopt, 10, 1, 0.0));
  ProtocolConfig config{.max_rounds = 500, .disconnection_tolerant = true};
  try {
    count(schedule, config);
    FAIL("expected RoundLimitExceeded");
  } catch (const RoundLimitExceeded& e) {
    CHECK(e.record.status == RunStatus::RoundLimit);
    CHECK(e.record.rounds_total == 500);
    CHECK(e.record.per_k_trace.size() == 1);
    CHECK(e.record.per_k_trace[0].collection == 500);
    CHECK(e.record.estimate == 2);
  }
}

TEST_CASE("configuration checks") {
  CHECK_THROWS_AS(validate(ProtocolConfig{.c = 1.0}, 5, 2), InvalidParameters);
  CHECK_THROWS_AS(validate(ProtocolConfig{.c = 2.3, .mode = Mode::Theoretical}, 5, 2),
                  InvalidParameters);
  CHECK_NOTHROW(validate(ProtocolConfig{.c = 2.4, .mode = Mode::Theoretical}, 8, 4));
  CHECK_THROWS_AS(validate(ProtocolConfig{.c = 2.4, .mode = Mode::Theoretical}, 9, 2),
                  InvalidParameters);
  CHECK_THROWS_AS(validate(ProtocolConfig{.c = 2.4, .mode = Mode::Theoretical}, 8, 5),
                  InvalidParameters);
  CHECK_NOTHROW(validate(
      ProtocolConfig{.c = 2.4, .mode = Mode::Theoretical, .allow_large_theoretical = true}, 9, 2));
}

TEST_CASE("run record JSON round trip") {
  DynamicsSchedule schedule(make(Family::Gnp, 8, std::nullopt, 10, 3, 0.3));
  RunRecord r = count(schedule, ProtocolConfig{.disconnection_tolerant = true});
  nlohmann::json j = r;
  CHECK(j.at("T") == 10);
  CHECK(j.at("per_k_trace").size() == r.per_k_trace.size());
  CHECK(j.get<RunRecord>() == r);

  DynamicsSchedule static_path(make(Family::Path, 4, 2, kStatic));
  RunRecord s = count(static_path, ProtocolConfig{});
  nlohmann::json js = s;
  CHECK(js.at("T") == "inf");
  CHECK(js.at("p").is_null());
  CHECK(js.get<RunRecord>() == s);
}
