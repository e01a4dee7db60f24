#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "adncount/dynamics.hpp"
#include "adncount/protocol.hpp"

namespace adn {

enum class DeltaRule {
  /// delta = 2^i for every i > 0 with 2^i <= n - 1.
  PowersOfTwo,
  /// delta = n - 1.
  MaxDegree,
};

/// A parameter grid. Star and gnp always use delta = n - 1; delta_rule
/// applies to tree and path. p_set applies to gnp only.
struct SweepSpec {
  std::vector<Family> families;
  std::size_t n_min = 3;
  std::size_t n_max = 30;
  DeltaRule delta_rule = DeltaRule::PowersOfTwo;
  std::vector<std::uint64_t> periods;
  std::vector<double> p_set;
  std::size_t repetitions = 10;
  std::uint64_t master_seed = 1;
  Mode mode = Mode::Experimental;
  double c = kDefaultThresholdExponent;
  RanrutVariant variant = RanrutVariant::PaperLiteral;
  std::optional<std::uint64_t> max_rounds;

  bool operator==(const SweepSpec&) const = default;
};

void to_json(nlohmann::json& j, const SweepSpec& spec);
void from_json(const nlohmann::json& j, SweepSpec& spec);

/// One point of the grid.
struct RunConfig {
  Family family = Family::Path;
  std::size_t n = 0;
  std::size_t delta = 0;
  std::uint64_t period = kStatic;
  std::optional<double> p;
  Mode mode = Mode::Experimental;
  double c = kDefaultThresholdExponent;
  RanrutVariant variant = RanrutVariant::PaperLiteral;
  std::optional<std::uint64_t> max_rounds;

  bool operator==(const RunConfig&) const = default;
};

void to_json(nlohmann::json& j, const RunConfig& config);
void from_json(const nlohmann::json& j, RunConfig& config);

/// Throws InvalidParameters when the grid breaks a family constraint
/// (e.g. gnp with a static period) or is empty.
void validate(const SweepSpec& spec);

/// Grid points in the order family, n, delta, T, p. Validates first.
std::vector<RunConfig> expand(const SweepSpec& spec);

/// The published grid: n in [3, 75], T in {1, 10, ..., 1280, inf}, delta
/// powers of two for tree/path, p in {0.1, ..., 0.5}, 100 repetitions.
/// With full == false: n in [3, 30] and 10 repetitions.
std::vector<SweepSpec> published_grid(bool full, std::uint64_t master_seed);

/// Executes one run of a grid point with the given seed. Round-limit
/// failures come back as records with status RoundLimit.
RunRecord run_one(const RunConfig& config, std::uint64_t seed);

/// Summary of rounds_total over the ok runs of one configuration.
struct Aggregate {
  std::size_t count = 0;     // all runs, including error rows
  std::size_t failures = 0;  // runs with status != ok
  double mean = 0.0;
  double stddev = 0.0;       // population standard deviation
  std::uint64_t min = 0;
  std::uint64_t max = 0;

  bool operator==(const Aggregate&) const = default;
};

void to_json(nlohmann::json& j, const Aggregate& summary);
void from_json(const nlohmann::json& j, Aggregate& summary);

Aggregate aggregate(const std::vector<RunRecord>& runs);

struct ConfigResult {
  std::size_t index = 0;
  RunConfig config;
  std::vector<RunRecord> runs;  // ordered by repetition
  Aggregate summary;

  bool operator==(const ConfigResult&) const = default;
};

struct SweepResult {
  std::vector<ConfigResult> configs;

  bool operator==(const SweepResult&) const = default;
};

/// Seed of repetition `rep` of grid point `config_index`.
std::uint64_t run_seed(std::uint64_t master_seed, std::size_t config_index,
                       std::size_t rep);

/// Runs every repetition of every grid point of every spec on `workers`
/// threads. Grid points are numbered consecutively across specs; the result
/// depends only on the specs, never on the worker count.
SweepResult run_sweep(const std::vector<SweepSpec>& specs, std::size_t workers = 1);
SweepResult run_sweep(const SweepSpec& spec, std::size_t workers = 1);

struct BoundCheck {
  std::size_t index = 0;
  RunConfig config;
  double rounds_mean = 0.0;
  double bound = 0.0;  // delta * n^4
  bool within = false;
};

/// within = (mean rounds_total < delta * n^4), and false whenever any run of
/// the configuration failed.
std::vector<BoundCheck> check_bound(const SweepResult& result);

inline constexpr const char* kCsvHeader =
    "family,n,delta,T,p,mode,c,seed,rep,estimate,rounds_total,"
    "rounds_collection,rounds_verification,rounds_notification,status";

/// One header line plus one line per run, LF-terminated.
std::string to_csv(const SweepResult& result);
void export_csv(const SweepResult& result, const std::filesystem::path& path);

void to_json(nlohmann::json& j, const SweepResult& result);
void from_json(const nlohmann::json& j, SweepResult& result);
void export_json(const SweepResult& result, const std::filesystem::path& path);
SweepResult import_json(const std::filesystem::path& path);

/// printf "%.17g": 17 significant digits, so outputs compare byte for byte.
std::string format_double(double value);

}  // namespace adn
