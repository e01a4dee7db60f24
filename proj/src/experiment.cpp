#include "adncount/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <fstream>
#include <mutex>
#include <thread>

#include <fmt/format.h>

namespace adn {

namespace {

nlohmann::json period_json(std::uint64_t period) {
  return period == kStatic ? nlohmann::json("inf") : nlohmann::json(period);
}

std::uint64_t period_from_json(const nlohmann::json& j) {
  return j.is_string() ? parse_period(j.get<std::string>()) : j.get<std::uint64_t>();
}

std::string_view to_string(DeltaRule rule) {
  return rule == DeltaRule::PowersOfTwo ? "powers-of-two" : "n-1";
}

DeltaRule parse_delta_rule(std::string_view text) {
  if (text == "powers-of-two") return DeltaRule::PowersOfTwo;
  if (text == "n-1") return DeltaRule::MaxDegree;
  throw InvalidParameters(fmt::format("unknown delta rule '{}'", text));
}

std::vector<std::size_t> deltas_for(Family family, std::size_t n, DeltaRule rule) {
  if (family == Family::Star || family == Family::Gnp || rule == DeltaRule::MaxDegree) {
    return {n - 1};
  }
  std::vector<std::size_t> out;
  for (std::size_t d = 2; d <= n - 1; d *= 2) out.push_back(d);
  return out;
}

void write_file(const std::filesystem::path& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(fmt::format("cannot open '{}' for writing", path.string()));
  out << contents;
  out.flush();
  if (!out) throw Error(fmt::format("failed writing '{}'", path.string()));
}

}  // namespace

std::string format_double(double value) { return fmt::format("{:.17g}", value); }

void to_json(nlohmann::json& j, const RunConfig& c) {
  j = {{"family", to_string(c.family)},
       {"n", c.n},
       {"delta", c.delta},
       {"T", period_json(c.period)},
       {"p", c.p ? nlohmann::json(*c.p) : nlohmann::json(nullptr)},
       {"mode", to_string(c.mode)},
       {"c", c.c},
       {"ranrut_variant", to_string(c.variant)},
       {"max_rounds", c.max_rounds ? nlohmann::json(*c.max_rounds) : nlohmann::json(nullptr)}};
}

void from_json(const nlohmann::json& j, RunConfig& c) {
  c.family = parse_family(j.at("family").get<std::string>());
  c.n = j.at("n").get<std::size_t>();
  c.delta = j.at("delta").get<std::size_t>();
  c.period = period_from_json(j.at("T"));
  c.p = j.at("p").is_null() ? std::nullopt : std::optional<double>(j.at("p").get<double>());
  c.mode = parse_mode(j.at("mode").get<std::string>());
  c.c = j.at("c").get<double>();
  c.variant = parse_ranrut_variant(j.at("ranrut_variant").get<std::string>());
  c.max_rounds = j.at("max_rounds").is_null()
                     ? std::nullopt
                     : std::optional<std::uint64_t>(j.at("max_rounds").get<std::uint64_t>());
}

void to_json(nlohmann::json& j, const Aggregate& a) {
  j = {{"count", a.count}, {"failures", a.failures}, {"mean", a.mean},
       {"stddev", a.stddev}, {"min", a.min},         {"max", a.max}};
}

void from_json(const nlohmann::json& j, Aggregate& a) {
  a.count = j.at("count").get<std::size_t>();
  a.failures = j.at("failures").get<std::size_t>();
  a.mean = j.at("mean").get<double>();
  a.stddev = j.at("stddev").get<double>();
  a.min = j.at("min").get<std::uint64_t>();
  a.max = j.at("max").get<std::uint64_t>();
}


void to_json(nlohmann::json& j, const SweepSpec& s) {
  std::vector<std::string> families;
  for (Family f : s.families) families.emplace_back(to_string(f));
  nlohmann::json periods = nlohmann::json::array();
  for (std::uint64_t t : s.periods) periods.push_back(period_json(t));
  j = {{"families", families},
       {"n_min", s.n_min},
       {"n_max", s.n_max},
       {"delta_rule", to_string(s.delta_rule)},
       {"T", periods},
       {"p", s.p_set},
       {"repetitions", s.repetitions},
       {"master_seed", s.master_seed},
       {"mode", to_string(s.mode)},
       {"c", s.c},
       {"ranrut_variant", to_string(s.variant)},
       {"max_rounds", s.max_rounds ? nlohmann::json(*s.max_rounds) : nlohmann::json(nullptr)}};
}

void from_json(const nlohmann::json& j, SweepSpec& s) {
  s = SweepSpec{};
  s.families.clear();
  for (const auto& f : j.at("families")) s.families.push_back(parse_family(f.get<std::string>()));
  if (j.contains("n_range")) {
    s.n_min = j.at("n_range").at(0).get<std::size_t>();
    s.n_max = j.at("n_range").at(1).get<std::size_t>();
  }
  if (j.contains("n_min")) s.n_min = j.at("n_min").get<std::size_t>();
  if (j.contains("n_max")) s.n_max = j.at("n_max").get<std::size_t>();
  if (j.contains("delta_rule")) s.delta_rule = parse_delta_rule(j.at("delta_rule").get<std::string>());
  s.periods.clear();
  for (const auto& t : j.at("T")) s.periods.push_back(period_from_json(t));
  if (j.contains("p")) s.p_set = j.at("p").get<std::vector<double>>();
  if (j.contains("repetitions")) s.repetitions = j.at("repetitions").get<std::size_t>();
  if (j.contains("master_seed")) s.master_seed = j.at("master_seed").get<std::uint64_t>();
  if (j.contains("mode")) s.mode = parse_mode(j.at("mode").get<std::string>());
  if (j.contains("c")) s.c = j.at("c").get<double>();
  if (j.contains("ranrut_variant")) {
    s.variant = parse_ranrut_variant(j.at("ranrut_variant").get<std::string>());
  }
  if (j.contains("max_rounds") && !j.at("max_rounds").is_null()) {
    s.max_rounds = j.at("max_rounds").get<std::uint64_t>();
  }
}

void validate(const SweepSpec& spec) {
  if (spec.families.empty()) throw InvalidParameters("sweep lists no families");
  if (spec.n_min < 3 || spec.n_min > spec.n_max) {
    throw InvalidParameters(fmt::format(
        "sweep needs 3 <= n_min <= n_max, got [{}, {}]", spec.n_min, spec.n_max));
  }
  if (spec.periods.empty()) throw InvalidParameters("sweep lists no stability periods");
  if (spec.repetitions == 0) throw InvalidParameters("sweep needs at least one repetition");
  const bool has_gnp =
      std::find(spec.families.begin(), spec.families.end(), Family::Gnp) != spec.families.end();
  if (has_gnp) {
    if (spec.p_set.empty()) throw InvalidParameters("gnp sweep lists no edge probabilities");
    if (std::find(spec.periods.begin(), spec.periods.end(), kStatic) != spec.periods.end()) {
      throw InvalidParameters("gnp cannot be swept with T = inf");
    }
  }
}

std::vector<RunConfig> expand(const SweepSpec& spec) {
  validate(spec);
  std::vector<RunConfig> out;
  for (Family family : spec.families) {
    for (std::size_t n = spec.n_min; n <= spec.n_max; ++n) {
      for (std::size_t delta : deltas_for(family, n, spec.delta_rule)) {
        for (std::uint64_t period : spec.periods) {
          RunConfig base{family, n, delta, period, std::nullopt, spec.mode,
                         spec.c, spec.variant, spec.max_rounds};
          ProtocolConfig protocol{.c = spec.c, .mode = spec.mode};
          validate(protocol, n, delta);
          if (family == Family::Gnp) {
            for (double p : spec.p_set) {
              base.p = p;
              out.push_back(base);
            }
          } else {
            out.push_back(base);
          }
        }
      }
    }
  }
  return out;
}

std::vector<SweepSpec> published_grid(bool full, std::uint64_t master_seed) {
  SweepSpec base;
  base.n_min = 3;
  base.n_max = full ? 75 : 30;
  base.repetitions = full ? 100 : 10;
  base.master_seed = master_seed;
  base.delta_rule = DeltaRule::PowersOfTwo;

  SweepSpec trees = base;
  trees.families = {Family::Tree, Family::Path, Family::Star};
  trees.periods = {1, 10, 20, 40, 80, 160, 320, 640, 1280, kStatic};

  SweepSpec graphs = base;
  graphs.families = {Family::Gnp};
  graphs.periods = {1, 10, 20, 40, 80, 160, 320, 640, 1280};
  graphs.p_set = {0.1, 0.2, 0.3, 0.4, 0.5};
  return {trees, graphs};
}

RunRecord run_one(const RunConfig& config, std::uint64_t seed) {
  ScheduleParams params{.family = config.family,
                        .n = config.n,
                        .delta = config.delta,
                        .p = config.p.value_or(0.0),
                        .period = config.period,
                        .seed = seed,
                        .variant = config.variant};
  DynamicsSchedule schedule(params);
  ProtocolConfig protocol{.c = config.c,
                          .mode = config.mode,
                          .max_rounds = config.max_rounds,
                          .disconnection_tolerant = config.family == Family::Gnp};
  try {
    return count(schedule, protocol);
  } catch (const RoundLimitExceeded& e) {
    return e.record;
  }
}

Aggregate aggregate(const std::vector<RunRecord>& runs) {
  Aggregate a;
  a.count = runs.size();
  std::vector<std::uint64_t> ok;
  for (const RunRecord& r : runs) {
    if (r.status == RunStatus::Ok) {
      ok.push_back(r.rounds_total);
    } else {
      ++a.failures;
    }
  }
  if (ok.empty()) return a;
  a.min = *std::min_element(ok.begin(), ok.end());
  a.max = *std::max_element(ok.begin(), ok.end());
  double sum = 0.0;
  for (auto v : ok) sum += static_cast<double>(v);
  a.mean = sum / static_cast<double>(ok.size());
  double squares = 0.0;
  for (auto v : ok) {
    const double d = static_cast<double>(v) - a.mean;
    squares += d * d;
  }
  a.stddev = std::sqrt(squares / static_cast<double>(ok.size()));
  return a;
}

std::uint64_t run_seed(std::uint64_t master_seed, std::size_t config_index,
                       std::size_t rep) {
  return derive_seed(master_seed, config_index, rep);
}

SweepResult run_sweep(const std::vector<SweepSpec>& specs, std::size_t workers) {
  SweepResult result;
  struct Job {
    std::size_t config;
    std::size_t rep;
    std::uint64_t master_seed;
  };
  std::vector<Job> jobs;
  for (const SweepSpec& spec : specs) {
    for (const RunConfig& config : expand(spec)) {
      const std::size_t index = result.configs.size();
      result.configs.push_back({index, config, std::vector<RunRecord>(spec.repetitions), {}});
      for (std::size_t rep = 0; rep < spec.repetitions; ++rep) {
        jobs.push_back({index, rep, spec.master_seed});
      }
    }
  }

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  const auto work = [&] {
    for (std::size_t i = next++; i < jobs.size(); i = next++) {
      const Job& job = jobs[i];
      ConfigResult& slot = result.configs[job.config];
      try {
        slot.runs[job.rep] = run_one(slot.config, run_seed(job.master_seed, job.config, job.rep));
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = jobs.size();
      }
    }
  };

  workers = std::clamp<std::size_t>(workers, 1, std::max<std::size_t>(jobs.size(), 1));
  if (workers == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
  }
  if (failure) std::rethrow_exception(failure);

  for (ConfigResult& c : result.configs) c.summary = aggregate(c.runs);
  return result;
}

SweepResult run_sweep(const SweepSpec& spec, std::size_t workers) {
  return run_sweep(std::vector<SweepSpec>{spec}, workers);
}

std::vector<BoundCheck> check_bound(const SweepResult& result) {
  std::vector<BoundCheck> out;
  for (const ConfigResult& c : result.configs) {
    const double n = static_cast<double>(c.config.n);
    BoundCheck check;
    check.index = c.index;
    check.config = c.config;
    check.rounds_mean = c.summary.mean;
    check.bound = static_cast<double>(c.config.delta) * n * n * n * n;
    check.within = c.summary.failures == 0 && c.summary.count > 0 &&
                   check.rounds_mean < check.bound;
    out.push_back(check);
  }
  return out;
}

std::string to_csv(const SweepResult& result) {
  std::string out = kCsvHeader;
  out += '\n';
  for (const ConfigResult& c : result.configs) {
    for (std::size_t rep = 0; rep < c.runs.size(); ++rep) {
      const RunRecord& r = c.runs[rep];
      out += fmt::format("{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n",
                         to_string(c.config.family), c.config.n, c.config.delta,
                         period_to_string(c.config.period),
                         c.config.p ? format_double(*c.config.p) : std::string(),
                         to_string(c.config.mode), format_double(c.config.c), r.seed, rep,
                         r.estimate, r.rounds_total, r.rounds_collection,
                         r.rounds_verification, r.rounds_notification, to_string(r.status));
    }
  }
  return out;
}

void export_csv(const SweepResult& result, const std::filesystem::path& path) {
  write_file(path, to_csv(result));
}

void to_json(nlohmann::json& j, const SweepResult& result) {
  nlohmann::json configs = nlohmann::json::array();
  for (const ConfigResult& c : result.configs) {
    configs.push_back({{"index", c.index},
                       {"config", c.config},
                       {"summary", c.summary},
                       {"runs", c.runs}});
  }
  j = {{"configs", configs}};
}

void from_json(const nlohmann::json& j, SweepResult& result) {
  result.configs.clear();
  for (const auto& c : j.at("configs")) {
    ConfigResult entry;
    entry.index = c.at("index").get<std::size_t>();
    entry.config = c.at("config").get<RunConfig>();
    entry.summary = c.at("summary").get<Aggregate>();
    entry.runs = c.at("runs").get<std::vector<RunRecord>>();
    result.configs.push_back(std::move(entry));
  }
}

void export_json(const SweepResult& result, const std::filesystem::path& path) {
  write_file(path, nlohmann::json(result).dump(2) + "\n");
}

SweepResult import_json(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(fmt::format("cannot open '{}' for reading", path.string()));
  try {
    return nlohmann::json::parse(in).get<SweepResult>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(fmt::format("malformed sweep JSON in '{}': {}", path.string(), e.what()));
  }
}

}  // namespace adn
