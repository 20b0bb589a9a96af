#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "exactcount/engine.hpp"

namespace exactcount {

// One sweep: trials_per_n independent runs for each population size.
struct ExperimentSpec {
  std::vector<std::size_t> n_values;
  std::size_t trials_per_n = 1;
  std::uint64_t master_seed = 0;
  LevelSchedule schedule = LevelSchedule::kDouble;
  std::uint32_t max_phase = 1184;
  StopCondition stop = StopCondition::kAllCountCorrect;
  std::uint64_t max_interactions = kDefaultMaxInteractions;
  std::string output_path = "-";

  // Throws std::invalid_argument on an empty or < 2 entry in n_values, or
  // trials_per_n == 0.
  void validate() const;
};

// Overlays the keys present in `config` (snake_case field names) onto
// `spec`. Throws std::invalid_argument on unknown keys or bad values.
void apply_json_config(ExperimentSpec& spec, const nlohmann::json& config);
nlohmann::ordered_json to_json(const ExperimentSpec& spec);

// Seed of trial `trial` at population size n; any sweep row can be re-run on
// its own from this seed.
std::uint64_t trial_seed(std::uint64_t master_seed, std::size_t n, std::size_t trial);

SimConfig trial_config(const ExperimentSpec& spec, std::size_t n, std::size_t trial);

struct SweepRow {
  std::size_t n = 0;
  std::size_t trial = 0;
  std::uint64_t seed = 0;
  LevelSchedule schedule = LevelSchedule::kDouble;
  std::uint32_t max_phase = 0;
  StopCondition stop = StopCondition::kAllCountCorrect;
  std::uint64_t interactions = 0;
  // Stop-dependent: last count write for "stable", first all-correct moment
  // for "correct", total time for "interactions". Absent if not reached.
  std::optional<ParallelTime> parallel_time;
  std::size_t final_level = 0;
  std::size_t max_code_len = 0;
  std::size_t max_agent_bits = 0;
  std::size_t leader_count = 0;
  bool correct = false;
};

SweepRow make_sweep_row(const SimConfig& config, const RunSummary& summary);

// Called from worker threads after each finished trial.
using SweepProgress = std::function<void(const SweepRow&)>;

// Runs every (n, trial) on `workers` threads (0 = one per core); rows come
// back in (n, trial) order.
std::vector<SweepRow> run_sweep(const ExperimentSpec& spec, std::size_t workers = 0,
                                const SweepProgress& progress = {});

std::string sweep_csv_header();
std::string to_csv_line(const SweepRow& row);
void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows);

// Shortest decimal that round-trips the parallel time.
std::string format_parallel_time(const ParallelTime& t);

// One-object JSON description of a finished run (config echoed back).
nlohmann::ordered_json run_summary_json(const SimConfig& config, const RunSummary& summary);

// Count writes as JSON lines: interaction, agent, old_count, new_count.
void write_count_writes_jsonl(std::ostream& out, const RunTrace& trace);

}  // namespace exactcount
