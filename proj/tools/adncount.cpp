// adncount: topology generation, counting runs, sweeps and table checks.
//
// Exit status: 0 success, 1 a check reported FAIL, 2 usage or parameter
// error, 3 a run hit its round limit.

#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "adncount/dynamics.hpp"
#include "adncount/errors.hpp"
#include "adncount/experiment.hpp"
#include "adncount/protocol.hpp"
#include "adncount/tree_generation.hpp"
#include "tree_enumeration.hpp"

namespace {

constexpr int kExitCheckFailed = 1;
constexpr int kExitUsage = 2;
constexpr int kExitRoundLimit = 3;

// Sizes up to which check-tables runs the enumeration oracle.
constexpr std::size_t kEnumerationLimit = 12;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void write_output(const std::string& text, const std::string& path) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw adn::Error(fmt::format("cannot open '{}' for writing", path));
  out << text;
}

struct TopologyFlags {
  std::string family;
  std::size_t n = 0;
  std::optional<std::size_t> delta;
  std::optional<double> p;
  std::uint64_t seed = 1;
  std::string variant = "paper-literal";
};

void add_topology_flags(CLI::App* cmd, TopologyFlags& f) {
  cmd->add_option("--family", f.family, "tree | star | path | gnp")->required();
  cmd->add_option("--n", f.n, "Node count (leader included)")->required();
  cmd->add_option("--delta", f.delta, "Degree upper bound");
  cmd->add_option("--p", f.p, "Edge probability (gnp)");
  cmd->add_option("--seed", f.seed, "Master seed")->capture_default_str();
  cmd->add_option("--ranrut-variant", f.variant, "paper-literal | same-copy")
      ->capture_default_str();
}

adn::ScheduleParams schedule_params(const TopologyFlags& f, std::uint64_t period) {
  adn::ScheduleParams params;
  params.family = adn::parse_family(f.family);
  params.n = f.n;
  params.delta = f.delta;
  params.period = period;
  params.seed = f.seed;
  params.variant = adn::parse_ranrut_variant(f.variant);
  if (params.family == adn::Family::Gnp) {
    if (!f.p) throw UsageError("--p is required for --family gnp");
    params.p = *f.p;
  } else if (f.p) {
    throw UsageError("--p only applies to --family gnp");
  }
  return params;
}

int cmd_generate(const TopologyFlags& f, const std::string& out) {
  adn::ScheduleParams params = schedule_params(f, 1);
  adn::DynamicsSchedule schedule(params);
  write_output(adn::to_json(schedule.current()).dump() + "\n", out);
  return 0;
}

struct RunFlags {
  TopologyFlags topology;
  std::string period = "inf";
  double c = adn::kDefaultThresholdExponent;
  std::string mode = "experimental";
  std::optional<std::uint64_t> max_rounds;
  bool json = false;
  bool allow_large = false;
  std::string trace;
};

void print_record(const adn::RunRecord& r, bool json) {
  if (json) {
    std::cout << nlohmann::json(r).dump(2) << "\n";
    return;
  }
  std::cout << fmt::format("status: {}\n", adn::to_string(r.status))
            << fmt::format("estimate: {}\n", r.estimate)
            << fmt::format("rounds_total: {}\n", r.rounds_total)
            << fmt::format("rounds_collection: {}\n", r.rounds_collection)
            << fmt::format("rounds_verification: {}\n", r.rounds_verification)
            << fmt::format("rounds_notification: {}\n", r.rounds_notification);
  for (const auto& t : r.per_k_trace) {
    std::cout << fmt::format("k={} collection={} verification={} notification={}\n", t.k,
                             t.collection, t.verification, t.notification);
  }
  if (r.outside_proven_regime) {
    std::cout << "note: n <= 3 is outside the regime covered by the correctness analysis\n";
  }
}

int cmd_run(const RunFlags& f) {
  adn::ScheduleParams params = schedule_params(f.topology, adn::parse_period(f.period));
  adn::ProtocolConfig config;
  config.c = f.c;
  config.mode = adn::parse_mode(f.mode);
  config.max_rounds = f.max_rounds;
  config.allow_large_theoretical = f.allow_large;
  config.disconnection_tolerant = params.family == adn::Family::Gnp;

  std::ofstream trace;
  adn::ChangeObserver observer;
  if (!f.trace.empty()) {
    trace.open(f.trace, std::ios::binary | std::ios::trunc);
    if (!trace) throw adn::Error(fmt::format("cannot open '{}' for writing", f.trace));
    observer = [&trace](std::uint64_t round, const adn::Topology& t) {
      trace << nlohmann::json{{"round", round}, {"topology", adn::to_json(t)}}.dump() << "\n";
    };
  }
  adn::DynamicsSchedule schedule(params, observer);
  adn::validate(config, schedule.n(), schedule.delta());
  try {
    print_record(adn::count(schedule, config), f.json);
    return 0;
  } catch (const adn::RoundLimitExceeded& e) {
    print_record(e.record, f.json);
    std::cerr << "round limit: " << e.what() << "\n";
    return kExitRoundLimit;
  }
}

struct SweepFlags {
  std::string spec;
  std::string preset;
  bool full = false;
  std::uint64_t seed = 1;
  std::size_t workers = 1;
  std::string out_csv;
  std::string out_json;
};

std::vector<adn::SweepSpec> load_specs(const SweepFlags& f) {
  if (!f.spec.empty() == !f.preset.empty()) {
    throw UsageError("give exactly one of --spec and --preset");
  }
  if (!f.preset.empty()) {
    if (f.preset != "published") throw UsageError(fmt::format("unknown preset '{}'", f.preset));
    return adn::published_grid(f.full, f.seed);
  }
  std::ifstream in(f.spec);
  if (!in) throw UsageError(fmt::format("cannot read spec file '{}'", f.spec));
  std::vector<adn::SweepSpec> specs;
  try {
    const auto j = nlohmann::json::parse(in);
    if (j.is_array()) {
      for (const auto& item : j) specs.push_back(item.get<adn::SweepSpec>());
    } else {
      specs.push_back(j.get<adn::SweepSpec>());
    }
  } catch (const nlohmann::json::exception& e) {
    throw UsageError(fmt::format("malformed spec '{}': {}", f.spec, e.what()));
  }
  return specs;
}

int cmd_sweep(const SweepFlags& f) {
  const auto specs = load_specs(f);
  for (const auto& s : specs) adn::expand(s);  // validate everything before running
  const adn::SweepResult result = adn::run_sweep(specs, f.workers);
  if (!f.out_csv.empty()) adn::export_csv(result, f.out_csv);
  if (!f.out_json.empty()) adn::export_json(result, f.out_json);
  if (f.out_csv.empty() && f.out_json.empty()) std::cout << adn::to_csv(result);
  return 0;
}

std::string join(const std::vector<std::string>& items) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out += ',';
    out += items[i];
  }
  return out;
}

int cmd_check_tables(std::size_t n_max, std::optional<std::size_t> corrupt_index) {
  if (n_max == 0) throw UsageError("--n-max must be at least 1");
  const adn::TreeCountTable table = adn::sizes_table(n_max);
  std::vector<adn::BigInt> counts(table.counts().begin(), table.counts().end());
  if (corrupt_index) {
    if (*corrupt_index == 0 || *corrupt_index > n_max) {
      throw UsageError("--corrupt-index must lie in 1..n-max");
    }
    counts[*corrupt_index - 1] += 1;
  }
  std::vector<std::string> shown;
  for (const auto& t : counts) shown.push_back(t.str());
  std::cout << fmt::format("sizes 1..{}: {}\n", n_max, join(shown));

  const std::size_t enumerated_max = std::min(n_max, kEnumerationLimit);
  const auto expected = adn::oracle::enumerated_counts(enumerated_max);
  std::vector<std::string> enumerated;
  for (auto v : expected) enumerated.push_back(std::to_string(v));
  std::cout << fmt::format("enumerated 1..{}: {}\n", enumerated_max, join(enumerated));

  bool ok = true;
  for (std::size_t i = 0; i < enumerated_max; ++i) {
    if (counts[i] != expected[i]) {
      std::cout << fmt::format("FAIL: first mismatch at index {} (recurrence {}, enumeration {})\n",
                               i + 1, counts[i].str(), expected[i]);
      ok = false;
      break;
    }
  }
  if (n_max >= 3) {
    const auto dist = adn::subtree_distribution(table, n_max);
    double worst = 0.0;
    for (std::size_t k = 3; k <= n_max; ++k) {
      double sum = 0.0;
      for (const auto& choice : dist.row(k)) sum += choice.probability;
      worst = std::max(worst, std::abs(sum - 1.0));
    }
    std::cout << fmt::format("distribution rows 3..{}: max |sum - 1| = {:.3g}\n", n_max, worst);
    if (!(worst <= 1e-12)) {
      std::cout << "FAIL: distribution row does not sum to 1 within 1e-12\n";
      ok = false;
    }
  }
  std::cout << (ok ? "PASS\n" : "FAIL\n");
  return ok ? 0 : kExitCheckFailed;
}

int cmd_check_bound(const std::string& in) {
  const adn::SweepResult result = adn::import_json(in);
  if (result.configs.empty()) throw UsageError("sweep result has no configurations");
  bool all = true;
  std::cout << "family,n,delta,T,p,rounds_mean,bound,within\n";
  for (const auto& b : adn::check_bound(result)) {
    all = all && b.within;
    std::cout << fmt::format("{},{},{},{},{},{},{},{}\n", adn::to_string(b.config.family),
                             b.config.n, b.config.delta, adn::period_to_string(b.config.period),
                             b.config.p ? adn::format_double(*b.config.p) : std::string(),
                             adn::format_double(b.rounds_mean), adn::format_double(b.bound),
                             b.within ? "true" : "false");
  }
  return all ? 0 : kExitCheckFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Incremental Counting simulator for anonymous dynamic networks"};
  app.require_subcommand(1);

  TopologyFlags gen;
  std::string gen_out;
  auto* generate = app.add_subcommand("generate", "Print one topology snapshot as JSON");
  add_topology_flags(generate, gen);
  generate->add_option("--out", gen_out, "Output file (default stdout)");

  RunFlags run;
  auto* run_cmd = app.add_subcommand("run", "Run the counting protocol once");
  add_topology_flags(run_cmd, run.topology);
  run_cmd->add_option("--T", run.period, "Stability period in rounds, or inf")
      ->capture_default_str();
  run_cmd->add_option("--c", run.c, "Threshold exponent")->capture_default_str();
  run_cmd->add_option("--mode", run.mode, "experimental | theoretical")->capture_default_str();
  run_cmd->add_option("--max-rounds", run.max_rounds, "Round cap (default 10*delta*n^4)");
  run_cmd->add_flag("--json", run.json, "Print the run record as JSON");
  run_cmd->add_flag("--allow-large-theoretical", run.allow_large,
                    "Lift the n <= 8, delta <= 4 limit of theoretical mode");
  run_cmd->add_option("--trace", run.trace, "Write topology changes as JSON lines");

  SweepFlags sweep;
  auto* sweep_cmd = app.add_subcommand("sweep", "Run a parameter sweep");
  sweep_cmd->add_option("--spec", sweep.spec, "Sweep spec JSON (object or array)");
  sweep_cmd->add_option("--preset", sweep.preset, "Built-in grid: published");
  sweep_cmd->add_flag("--full", sweep.full, "Full published grid (n <= 75, 100 reps)");
  sweep_cmd->add_option("--seed", sweep.seed, "Master seed for --preset")->capture_default_str();
  sweep_cmd->add_option("--workers", sweep.workers, "Worker threads")->capture_default_str();
  sweep_cmd->add_option("--out-csv", sweep.out_csv, "CSV output file");
  sweep_cmd->add_option("--out-json", sweep.out_json, "JSON output file");

  std::size_t n_max = 8;
  std::optional<std::size_t> corrupt_index;
  auto* tables = app.add_subcommand("check-tables", "Check tree counts against enumeration");
  tables->add_option("--n-max", n_max, "Largest tree size")->capture_default_str();
  tables->add_option("--corrupt-index", corrupt_index)->group("");

  std::string bound_in;
  auto* bound = app.add_subcommand("check-bound", "Compare sweep means with delta*n^4");
  bound->add_option("--in", bound_in, "Sweep result JSON")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (generate->parsed()) return cmd_generate(gen, gen_out);
    if (run_cmd->parsed()) return cmd_run(run);
    if (sweep_cmd->parsed()) return cmd_sweep(sweep);
    if (tables->parsed()) return cmd_check_tables(n_max, corrupt_index);
    if (bound->parsed()) return cmd_check_bound(bound_in);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const adn::InvalidParameters& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitCheckFailed;
  }
  return kExitUsage;
}
