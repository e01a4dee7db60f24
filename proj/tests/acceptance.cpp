// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any
// criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <numeric>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "adncount/experiment.hpp"
#include "adncount/protocol.hpp"
#include "adncount/tree_generation.hpp"
#include "tree_enumeration.hpp"

using namespace adn;

namespace {

constexpr std::uint64_t kMasterSeed = 20160601;

// Upper 0.1% point of the chi-square distribution with 8 degrees of freedom.
constexpr double kChiSquare8At001 = 26.124481558376;

struct Outcome {
  bool pass;
  std::string detail;
};

int failures = 0;

void report(int id, const std::string& name, const std::function<Outcome()>& body) {
  const auto start = std::chrono::steady_clock::now();
  Outcome out;
  try {
    out = body();
  } catch (const std::exception& e) {
    out = {false, fmt::format("exception: {}", e.what())};
  }
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (!out.pass) ++failures;
  std::printf("%s  %2d  %s: %s (%.1fs)\n", out.pass ? "PASS" : "FAIL", id, name.c_str(),
              out.detail.c_str(), seconds);
  std::fflush(stdout);
}

ScheduleParams params_for(const RunConfig& c, std::uint64_t seed) {
  ScheduleParams p;
  p.family = c.family;
  p.n = c.n;
  p.delta = c.delta;
  p.p = c.p.value_or(0.0);
  p.period = c.period;
  p.seed = seed;
  p.variant = c.variant;
  return p;
}

std::vector<SweepSpec> exact_count_grid() {
  SweepSpec base;
  base.n_min = 3;
  base.n_max = 30;
  base.delta_rule = DeltaRule::PowersOfTwo;
  base.repetitions = 10;
  base.master_seed = kMasterSeed;

  SweepSpec fixed = base;
  fixed.families = {Family::Path, Family::Star};
  fixed.periods = {kStatic};

  SweepSpec trees = base;
  trees.families = {Family::Tree};
  trees.periods = {1, 1280};

  SweepSpec graphs = base;
  graphs.families = {Family::Gnp};
  graphs.periods = {10};
  graphs.p_set = {0.3};
  return {fixed, trees, graphs};
}

double mean_rounds(const ConfigResult& c) {
  double sum = 0.0;
  for (const auto& r : c.runs) sum += static_cast<double>(r.rounds_total);
  return sum / static_cast<double>(c.runs.size());
}

}  // namespace

int main() {
  const auto grid = exact_count_grid();
  SweepResult baseline;

  report(1, "exact count", [&] {
    baseline = run_sweep(grid, 1);
    std::size_t runs = 0, exact = 0;
    for (const auto& c : baseline.configs) {
      for (const auto& r : c.runs) {
        ++runs;
        exact += r.status == RunStatus::Ok && r.estimate == c.config.n;
      }
    }
    return Outcome{runs > 0 && exact == runs,
                   fmt::format("{}/{} runs output n over {} configurations", exact, runs,
                               baseline.configs.size())};
  });

  report(2, "conservation and per-node energy bound", [&] {
    std::size_t rounds = 0, conservation = 0, node_bound = 0, negative = 0, mismatched = 0;
    double worst_drift = 0.0, worst_node = 0.0;
    for (const auto& c : baseline.configs) {
      for (std::size_t rep = 0; rep < c.runs.size(); ++rep) {
        const double n = static_cast<double>(c.config.n);
        ProtocolConfig config;
        config.disconnection_tolerant = c.config.family == Family::Gnp;
        config.on_collection_round = [&](const ProtocolState& s) {
          ++rounds;
          const double total = std::accumulate(s.energy.begin(), s.energy.end(), 0.0);
          const double drift = std::abs(total - (n - 1.0));
          worst_drift = std::max(worst_drift, drift);
          if (drift > 1e-9 * n) ++conservation;
          const double top = *std::max_element(s.energy.begin() + 1, s.energy.end());
          worst_node = std::max(worst_node, top);
          if (top > 1.0 + 1e-12) ++node_bound;
          if (*std::min_element(s.energy.begin(), s.energy.end()) < 0.0) ++negative;
        };
        DynamicsSchedule schedule(params_for(c.config, run_seed(kMasterSeed, c.index, rep)));
        // Same seed as the criterion-1 sweep, so these are the same runs.
        if (!(count(schedule, config) == c.runs[rep])) ++mismatched;
      }
    }
    const bool ok = rounds > 0 && conservation == 0 && node_bound == 0 && negative == 0 &&
                    mismatched == 0;
    return Outcome{ok, fmt::format("{} collection rounds, {} conservation / {} node-bound / {} "
                                   "negative violations, max drift {:.3g}, max node energy "
                                   "{:.17g}, {} records differing from sweep",
                                   rounds, conservation, node_bound, negative, worst_drift,
                                   worst_node, mismatched)};
  });

  report(3, "polynomial envelope on static paths", [&] {
    SweepSpec spec;
    spec.families = {Family::Path};
    spec.delta_rule = DeltaRule::PowersOfTwo;
    spec.periods = {kStatic};
    spec.repetitions = 10;
    spec.master_seed = kMasterSeed;
    bool ok = true;
    std::string detail;
    for (std::size_t n : {10, 20, 30, 40}) {
      spec.n_min = spec.n_max = n;
      SweepResult result = run_sweep(spec);
      for (const auto& b : check_bound(result)) {
        if (b.config.delta != 2) continue;
        ok = ok && b.within;
        detail += fmt::format("n={} mean={} bound={}; ", n, b.rounds_mean, b.bound);
      }
    }
    return Outcome{ok, detail};
  });

  report(4, "network changes speed up counting", [&] {
    SweepSpec spec;
    spec.families = {Family::Tree};
    spec.n_min = spec.n_max = 25;
    spec.delta_rule = DeltaRule::PowersOfTwo;
    spec.periods = {1, 1280};
    spec.repetitions = 30;
    spec.master_seed = kMasterSeed;
    SweepResult result = run_sweep(spec);
    double fast = -1.0, slow = -1.0;
    for (const auto& c : result.configs) {
      if (c.config.delta != 4) continue;
      if (c.summary.failures != 0) return Outcome{false, "a run failed"};
      (c.config.period == 1 ? fast : slow) = mean_rounds(c);
    }
    return Outcome{fast >= 0 && slow >= 0 && fast < slow,
                   fmt::format("mean rounds T=1: {:.1f}, T=1280: {:.1f}", fast, slow)};
  });

  report(5, "rooted-tree counts vs enumeration", [&] {
    const auto table = sizes_table(8);
    const auto enumerated = oracle::enumerated_counts(8);
    bool ok = table.max_size() == 8;
    std::string shown;
    for (std::size_t i = 1; i <= 8; ++i) {
      ok = ok && table[i] == enumerated[i - 1];
      shown += fmt::format("{}{}", i > 1 ? "," : "", enumerated[i - 1]);
    }
    return Outcome{ok, fmt::format("sizes_table(8) = enumeration = [{}]", shown)};
  });

  report(6, "same-copy RANRUT uniformity at n = 5", [&] {
    const auto classes = oracle::enumerate_rooted_trees(5);
    std::map<std::string, std::size_t> counts;
    for (const auto& c : classes) counts[c] = 0;
    const auto dist = subtree_distribution(sizes_table(5), 5);
    Rng rng(kMasterSeed);
    constexpr std::size_t draws = 90000;
    std::size_t unknown = 0;
    for (std::size_t i = 0; i < draws; ++i) {
      auto it = counts.find(oracle::canonical_form(ranrut(5, dist, rng, RanrutVariant::SameCopy)));
      if (it == counts.end()) {
        ++unknown;
      } else {
        ++it->second;
      }
    }
    const double expected = static_cast<double>(draws) / static_cast<double>(classes.size());
    double statistic = 0.0;
    for (const auto& [form, observed] : counts) {
      const double d = static_cast<double>(observed) - expected;
      statistic += d * d / expected;
    }
    const bool ok = classes.size() == 9 && unknown == 0 && statistic < kChiSquare8At001;
    return Outcome{ok, fmt::format("{} classes, chi-square {:.3f} < {:.3f} (8 dof, alpha 0.001)",
                                   classes.size(), statistic, kChiSquare8At001)};
  });

  report(7, "phase-length formulas", [&] {
    // Independent evaluation of 1 + ceil(k / (1 - k^-c)) in long double.
    const auto oracle = [](long double k, long double c) {
      return 1 + static_cast<std::uint64_t>(std::ceil(k / (1.0L - std::pow(k, -c))));
    };
    const std::uint64_t v2 = verification_length(2, 1.01);
    const std::uint64_t v10 = verification_length(10, 1.01);
    bool ok = v2 == oracle(2, 1.01L) && v10 == oracle(10, 1.01L) && v2 == 5 && v10 == 13;

    // Rounds actually spent by the phases.
    {
      DynamicsSchedule schedule(ScheduleParams{.family = Family::Path, .n = 12, .delta = 2});
      ProtocolState state(12);
      for (std::size_t k : {2, 10}) {
        state.begin_candidate(k);
        std::fill(state.energy.begin(), state.energy.end(), 0.0);
        ok = ok && run_verification(state, schedule, ProtocolConfig{}) == oracle(k, 1.01L);
        state.is_correct = false;
        ok = ok && run_notification(state, schedule, ProtocolConfig{}) == k;
      }
    }
    const auto tau = collection_budget(2, 1);
    DynamicsSchedule pair(ScheduleParams{.family = Family::Path, .n = 2, .delta = 1});
    ProtocolState state(2);
    state.begin_candidate(2);
    const std::uint64_t used =
        run_collection(state, pair, ProtocolConfig{.c = 2.4, .mode = Mode::Theoretical});
    ok = ok && tau == 6 && used == 6;
    return Outcome{ok, fmt::format("verification k=2: {}, k=10: {}; notification = k; "
                                   "theoretical collection k=2, delta=1: {}",
                                   v2, v10, used)};
  });

  report(8, "theoretical budget suffices at n = 4", [&] {
    constexpr double c = 2.4;
    const ScheduleParams params{.family = Family::Path, .n = 4, .delta = 2};
    const ProtocolConfig config{.c = c, .mode = Mode::Theoretical};
    DynamicsSchedule schedule(params);
    ProtocolState state(4);
    state.begin_candidate(4);
    const std::uint64_t used = run_collection(state, schedule, config);
    const double leader = state.energy[kLeader];
    const double threshold = collection_threshold(4, c);
    DynamicsSchedule fresh(params);
    const RunRecord record = count(fresh, config);
    const bool ok = leader >= threshold && record.status == RunStatus::Ok && record.estimate == 4;
    return Outcome{ok, fmt::format("after {} rounds leader holds {:.17g} >= {:.17g}; estimate {}",
                                   used, leader, threshold, record.estimate)};
  });

  report(9, "halt flag crosses a static path in n - 1 rounds", [&] {
    bool ok = true;
    std::string detail;
    for (std::size_t n : {3, 10, 25}) {
      // Smallest number of rounds after which the far end is halted.
      std::size_t reached = 0;
      for (std::size_t rounds = 1; rounds <= 2 * n && reached == 0; ++rounds) {
        DynamicsSchedule schedule(ScheduleParams{.family = Family::Path, .n = n, .delta = 2});
        ProtocolState state(n);
        state.k = rounds;
        state.is_correct = true;
        run_notification(state, schedule, ProtocolConfig{});
        if (state.halt[n - 1]) reached = rounds;
      }
      ok = ok && reached == n - 1;
      detail += fmt::format("n={}: {} rounds; ", n, reached);
    }
    return Outcome{ok, detail};
  });

  report(10, "determinism of sweep output", [&] {
    const std::string first = to_csv(baseline);
    const std::string again = to_csv(run_sweep(grid, 1));
    const std::string parallel = to_csv(run_sweep(grid, 4));
    const bool ok = !baseline.configs.empty() && first == again && first == parallel;
    return Outcome{ok, fmt::format("{} CSV bytes identical across reruns with 1 and 4 workers",
                                   first.size())};
  });

  std::printf("%s: %d criteria failed\n", failures == 0 ? "ACCEPTED" : "REJECTED", failures);
  return failures == 0 ? 0 : 1;
}
