// exactcount: single runs, sweeps and primitive checks for the exact counting
// protocol. Machine-readable results go to stdout, progress to stderr.

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <mutex>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "exactcount/checks.hpp"
#include "exactcount/engine.hpp"
#include "exactcount/experiment.hpp"

namespace {

using namespace exactcount;

constexpr int kExitOk = 0;
constexpr int kExitFailed = 1;
constexpr int kExitUsage = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

nlohmann::json load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot read config file '" + path + "'");
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw UsageError("config file '" + path + "': " + e.what());
  }
}

LevelSchedule schedule_from(const std::string& text) {
  auto s = parse_level_schedule(text);
  if (!s) throw UsageError("unknown schedule '" + text + "' (double, increment, square)");
  return *s;
}

StopCondition stop_from(const std::string& text) {
  auto s = parse_stop_condition(text);
  if (!s) throw UsageError("unknown stop condition '" + text + "' (correct, stable, interactions)");
  return *s;
}

std::vector<std::size_t> parse_n_list(const std::string& text) {
  std::vector<std::size_t> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    std::size_t used = 0;
    unsigned long long v = 0;
    try {
      v = std::stoull(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != item.size()) throw UsageError("bad entry in --n-values: '" + item + "'");
    out.push_back(static_cast<std::size_t>(v));
  }
  if (out.empty()) throw UsageError("--n-values is empty");
  return out;
}

// Opens `path` for writing; "-" means stdout.
class Output {
 public:
  explicit Output(const std::string& path) {
    if (path == "-") return;
    file_.open(path, std::ios::binary | std::ios::trunc);
    if (!file_) throw UsageError("cannot write to '" + path + "'");
  }
  std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }
  void close(const std::string& path) {
    if (!file_.is_open()) {
      std::cout.flush();
      return;
    }
    file_.close();
    if (!file_) throw std::runtime_error("write to '" + path + "' failed");
  }

 private:
  std::ofstream file_;
};

struct RunFlags {
  std::size_t n = 0;
  std::uint64_t seed = 0;
  std::string schedule = "double";
  std::uint32_t max_phase = 1184;
  std::string stop = "stable";
  std::uint64_t max_interactions = kDefaultMaxInteractions;
  std::string trace_path;
  std::string config_path;
};

// Run config files use the SimConfig names: n, seed, schedule, max_phase,
// stop, max_interactions.
void apply_run_config(SimConfig& config, const nlohmann::json& j) {
  if (!j.is_object()) throw UsageError("config must be a JSON object");
  try {
    for (const auto& [key, value] : j.items()) {
      if (key == "n") {
        config.n = value.get<std::size_t>();
      } else if (key == "seed") {
        config.seed = value.get<std::uint64_t>();
      } else if (key == "schedule") {
        config.params.schedule = schedule_from(value.get<std::string>());
      } else if (key == "max_phase") {
        config.params.max_phase = value.get<std::uint32_t>();
      } else if (key == "stop") {
        config.stop = stop_from(value.get<std::string>());
      } else if (key == "max_interactions") {
        config.max_interactions = value.get<std::uint64_t>();
      } else {
        throw UsageError("unknown config key '" + key + "'");
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw UsageError(std::string("config: ") + e.what());
  }
}

int cmd_run(const RunFlags& flags, const CLI::App& sub) {
  SimConfig config;
  if (!flags.config_path.empty()) apply_run_config(config, load_config(flags.config_path));
  if (sub.count("--n")) config.n = flags.n;
  if (sub.count("--seed")) config.seed = flags.seed;
  if (sub.count("--schedule") || flags.config_path.empty()) {
    config.params.schedule = schedule_from(flags.schedule);
  }
  if (sub.count("--max-phase")) config.params.max_phase = flags.max_phase;
  if (sub.count("--stop") || flags.config_path.empty()) config.stop = stop_from(flags.stop);
  if (sub.count("--max-interactions")) config.max_interactions = flags.max_interactions;
  if (flags.config_path.empty() && !sub.count("--n")) throw UsageError("--n is required");
  try {
    config.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }

  std::optional<Output> trace_out;
  if (!flags.trace_path.empty()) trace_out.emplace(flags.trace_path);

  const RunTrace trace = run(config);
  if (trace_out) {
    write_count_writes_jsonl(trace_out->stream(), trace);
    trace_out->close(flags.trace_path);
  }
  std::cout << run_summary_json(config, trace.summary).dump() << '\n';

  const RunSummary& s = trace.summary;
  const bool needs_correct = config.stop != StopCondition::kMaxInteractions;
  return s.stop_reached && (!needs_correct || s.final_counts_correct) ? kExitOk : kExitFailed;
}

struct SweepFlags {
  std::string n_values;
  std::size_t trials = 1;
  std::uint64_t seed = 0;
  std::string schedule;
  std::uint32_t max_phase = 0;
  std::string stop;
  std::uint64_t max_interactions = 0;
  std::string out;
  std::string config_path;
  std::size_t jobs = 0;
  bool quiet = false;
};

int cmd_sweep(const SweepFlags& flags, const CLI::App& sub) {
  ExperimentSpec spec;
  if (!flags.config_path.empty()) {
    try {
      apply_json_config(spec, load_config(flags.config_path));
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
  }
  if (sub.count("--n-values")) spec.n_values = parse_n_list(flags.n_values);
  if (sub.count("--trials")) spec.trials_per_n = flags.trials;
  if (sub.count("--seed")) spec.master_seed = flags.seed;
  if (sub.count("--schedule")) spec.schedule = schedule_from(flags.schedule);
  if (sub.count("--max-phase")) spec.max_phase = flags.max_phase;
  if (sub.count("--stop")) spec.stop = stop_from(flags.stop);
  if (sub.count("--max-interactions")) spec.max_interactions = flags.max_interactions;
  if (sub.count("--out")) spec.output_path = flags.out;
  try {
    spec.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }

  Output out(spec.output_path);
  std::optional<Output> meta;
  const std::string meta_path = spec.output_path + ".meta.json";
  if (spec.output_path != "-") meta.emplace(meta_path);

  std::mutex log_mutex;
  std::size_t done = 0;
  const std::size_t total = spec.n_values.size() * spec.trials_per_n;
  SweepProgress progress;
  if (!flags.quiet) {
    progress = [&](const SweepRow& row) {
      std::lock_guard lock(log_mutex);
      ++done;
      std::cerr << '[' << done << '/' << total << "] n=" << row.n << " trial=" << row.trial
                << " parallel_time="
                << (row.parallel_time ? format_parallel_time(*row.parallel_time) : "-")
                << (row.correct ? "" : " (stop not reached)") << '\n';
    };
  }
  const auto rows = run_sweep(spec, flags.jobs, progress);
  write_sweep_csv(out.stream(), rows);
  out.close(spec.output_path);
  if (meta) {
    meta->stream() << to_json(spec).dump(2) << '\n';
    meta->close(meta_path);
  }
  return kExitOk;
}

struct CheckFlags {
  std::string which = "all";
  std::uint64_t seed = 1;
  std::size_t jobs = 0;
};

int cmd_check(const CheckFlags& flags) {
  const auto battery = checks::parse_battery(flags.which);
  if (!battery) throw UsageError("unknown battery '" + flags.which + "'");
  checks::CheckOptions options;
  options.master_seed = flags.seed;
  options.workers = flags.jobs;
  bool all_passed = true;
  options.on_result = [&](const checks::CheckResult& r) {
    all_passed = all_passed && r.passed;
    std::cout << (r.passed ? "PASS " : "FAIL ") << r.name << ": " << r.detail << std::endl;
  };
  checks::run_battery(*battery, options);
  return all_passed ? kExitOk : kExitFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Simulator for leaderless exact population size counting"};
  app.require_subcommand(1);

  RunFlags run_flags;
  auto* run_cmd = app.add_subcommand("run", "Single run; prints a JSON summary");
  run_cmd->add_option("--n", run_flags.n, "Population size (>= 2)");
  run_cmd->add_option("--seed", run_flags.seed, "RNG seed");
  run_cmd->add_option("--schedule", run_flags.schedule, "double | increment | square");
  run_cmd->add_option("--max-phase", run_flags.max_phase, "Phase clock length");
  run_cmd->add_option("--stop", run_flags.stop, "correct | stable | interactions");
  run_cmd->add_option("--max-interactions", run_flags.max_interactions, "Interaction budget");
  run_cmd->add_option("--trace", run_flags.trace_path, "Write count writes as JSON lines");
  run_cmd->add_option("--config", run_flags.config_path, "JSON config; flags override it");

  SweepFlags sweep_flags;
  auto* sweep_cmd = app.add_subcommand("sweep", "Trials over several n; writes CSV");
  sweep_cmd->add_option("--n-values", sweep_flags.n_values, "Comma-separated population sizes");
  sweep_cmd->add_option("--trials", sweep_flags.trials, "Trials per n");
  sweep_cmd->add_option("--seed", sweep_flags.seed, "Master seed");
  sweep_cmd->add_option("--schedule", sweep_flags.schedule, "double | increment | square");
  sweep_cmd->add_option("--max-phase", sweep_flags.max_phase, "Phase clock length");
  sweep_cmd->add_option("--stop", sweep_flags.stop, "correct | stable | interactions");
  sweep_cmd->add_option("--max-interactions", sweep_flags.max_interactions,
                        "Interaction budget per trial");
  sweep_cmd->add_option("--out", sweep_flags.out, "CSV path, - for stdout");
  sweep_cmd->add_option("--config", sweep_flags.config_path, "JSON config; flags override it");
  sweep_cmd->add_option("--jobs", sweep_flags.jobs, "Worker threads (0 = all cores)");
  sweep_cmd->add_flag("--quiet", sweep_flags.quiet, "No progress on stderr");

  CheckFlags check_flags;
  auto* check_cmd = app.add_subcommand("check", "Primitive check batteries");
  check_cmd->add_option("which", check_flags.which,
                        "epidemic | phase-clock | rounding | averaging | birthday | all");
  check_cmd->add_option("--seed", check_flags.seed, "Master seed");
  check_cmd->add_option("--jobs", check_flags.jobs, "Worker threads (0 = all cores)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*run_cmd) return cmd_run(run_flags, *run_cmd);
    if (*sweep_cmd) return cmd_sweep(sweep_flags, *sweep_cmd);
    if (*check_cmd) return cmd_check(check_flags);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFailed;
  }
  return kExitUsage;
}
