#include "exactcount/experiment.hpp"

#include <charconv>
#include <limits>
#include <ostream>
#include <stdexcept>

#include "exactcount/trial_farm.hpp"

namespace exactcount {

namespace {

nlohmann::ordered_json big_to_json(const BigInt& x) {
  if (x >= 0 && x <= std::numeric_limits<std::uint64_t>::max()) {
    return static_cast<std::uint64_t>(x);
  }
  return x.str();
}

nlohmann::ordered_json time_to_json(const std::optional<ParallelTime>& t) {
  if (!t) return nullptr;
  return t->value();
}

template <typename T>
T get_checked(const nlohmann::json& value, const char* key) {
  try {
    return value.get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("config key '") + key + "': " + e.what());
  }
}

}  // namespace

void ExperimentSpec::validate() const {
  if (n_values.empty()) throw std::invalid_argument("n_values must not be empty");
  for (std::size_t n : n_values) {
    if (n < 2) {
      throw std::invalid_argument("every population size must be at least 2, got " +
                                  std::to_string(n));
    }
  }
  if (trials_per_n == 0) throw std::invalid_argument("trials_per_n must be at least 1");
  if (max_phase == 0) throw std::invalid_argument("max_phase must be at least 1");
}

void apply_json_config(ExperimentSpec& spec, const nlohmann::json& config) {
  if (!config.is_object()) throw std::invalid_argument("config must be a JSON object");
  for (const auto& [key, value] : config.items()) {
    if (key == "n_values") {
      spec.n_values = get_checked<std::vector<std::size_t>>(value, "n_values");
    } else if (key == "trials_per_n") {
      spec.trials_per_n = get_checked<std::size_t>(value, "trials_per_n");
    } else if (key == "master_seed") {
      spec.master_seed = get_checked<std::uint64_t>(value, "master_seed");
    } else if (key == "schedule") {
      auto parsed = parse_level_schedule(get_checked<std::string>(value, "schedule"));
      if (!parsed) throw std::invalid_argument("config key 'schedule': unknown schedule");
      spec.schedule = *parsed;
    } else if (key == "max_phase") {
      spec.max_phase = get_checked<std::uint32_t>(value, "max_phase");
    } else if (key == "stop") {
      auto parsed = parse_stop_condition(get_checked<std::string>(value, "stop"));
      if (!parsed) throw std::invalid_argument("config key 'stop': unknown stop condition");
      spec.stop = *parsed;
    } else if (key == "max_interactions") {
      spec.max_interactions = get_checked<std::uint64_t>(value, "max_interactions");
    } else if (key == "output_path") {
      spec.output_path = get_checked<std::string>(value, "output_path");
    } else {
      throw std::invalid_argument("unknown config key '" + key + "'");
    }
  }
}

nlohmann::ordered_json to_json(const ExperimentSpec& spec) {
  nlohmann::ordered_json j;
  j["n_values"] = spec.n_values;
  j["trials_per_n"] = spec.trials_per_n;
  j["master_seed"] = spec.master_seed;
  j["schedule"] = to_string(spec.schedule);
  j["max_phase"] = spec.max_phase;
  j["stop"] = to_string(spec.stop);
  j["max_interactions"] = spec.max_interactions;
  j["output_path"] = spec.output_path;
  return j;
}

std::uint64_t trial_seed(std::uint64_t master_seed, std::size_t n, std::size_t trial) {
  return derive_seed(master_seed, {n, trial});
}

SimConfig trial_config(const ExperimentSpec& spec, std::size_t n, std::size_t trial) {
  SimConfig config;
  config.n = n;
  config.seed = trial_seed(spec.master_seed, n, trial);
  config.params.max_phase = spec.max_phase;
  config.params.schedule = spec.schedule;
  config.stop = spec.stop;
  config.max_interactions = spec.max_interactions;
  return config;
}

SweepRow make_sweep_row(const SimConfig& config, const RunSummary& summary) {
  SweepRow row;
  row.n = config.n;
  row.seed = config.seed;
  row.schedule = config.params.schedule;
  row.max_phase = config.params.max_phase;
  row.stop = config.stop;
  row.interactions = summary.interactions;
  switch (config.stop) {
    case StopCondition::kOutputStable:
      row.parallel_time = summary.convergence_parallel_time;
      break;
    case StopCondition::kAllCountCorrect:
      row.parallel_time = summary.first_all_correct_parallel_time;
      break;
    case StopCondition::kMaxInteractions:
      row.parallel_time = ParallelTime{summary.interactions, config.n};
      break;
  }
  row.final_level = summary.final_level;
  row.max_code_len = summary.max_code_len;
  row.max_agent_bits = summary.max_agent_bits;
  row.leader_count = summary.leader_count_final;
  row.correct = summary.stop_reached && summary.final_counts_correct;
  return row;
}

std::vector<SweepRow> run_sweep(const ExperimentSpec& spec, std::size_t workers,
                                const SweepProgress& progress) {
  spec.validate();
  struct Job {
    std::size_t n;
    std::size_t trial;
  };
  std::vector<Job> jobs;
  jobs.reserve(spec.n_values.size() * spec.trials_per_n);
  for (std::size_t n : spec.n_values) {
    for (std::size_t t = 0; t < spec.trials_per_n; ++t) jobs.push_back({n, t});
  }
  return run_trials(jobs.size(), workers, [&](std::size_t i) {
    const SimConfig config = trial_config(spec, jobs[i].n, jobs[i].trial);
    SweepRow row = make_sweep_row(config, run(config).summary);
    row.trial = jobs[i].trial;
    if (progress) progress(row);
    return row;
  });
}

std::string sweep_csv_header() {
  return "n,trial,seed,schedule,max_phase,stop,interactions,parallel_time,final_level,"
         "max_code_len,max_agent_bits,leader_count,correct";
}

std::string format_parallel_time(const ParallelTime& t) {
  char buf[64];
  auto result = std::to_chars(buf, buf + sizeof buf, t.value());
  return std::string(buf, result.ptr);
}

std::string to_csv_line(const SweepRow& row) {
  std::string line;
  line += std::to_string(row.n) + ',';
  line += std::to_string(row.trial) + ',';
  line += std::to_string(row.seed) + ',';
  line += std::string(to_string(row.schedule)) + ',';
  line += std::to_string(row.max_phase) + ',';
  line += std::string(to_string(row.stop)) + ',';
  line += std::to_string(row.interactions) + ',';
  line += (row.parallel_time ? format_parallel_time(*row.parallel_time) : std::string()) + ',';
  line += std::to_string(row.final_level) + ',';
  line += std::to_string(row.max_code_len) + ',';
  line += std::to_string(row.max_agent_bits) + ',';
  line += std::to_string(row.leader_count) + ',';
  line += row.correct ? "true" : "false";
  return line;
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
  out << sweep_csv_header() << '\n';
  for (const SweepRow& row : rows) out << to_csv_line(row) << '\n';
}

nlohmann::ordered_json run_summary_json(const SimConfig& config, const RunSummary& summary) {
  nlohmann::ordered_json j;
  j["n"] = config.n;
  j["seed"] = config.seed;
  j["schedule"] = to_string(config.params.schedule);
  j["max_phase"] = config.params.max_phase;
  j["stop"] = to_string(config.stop);
  j["max_interactions"] = config.max_interactions;
  j["interactions"] = summary.interactions;
  j["stop_reached"] = summary.stop_reached;
  j["final_counts_correct"] = summary.final_counts_correct;
  j["convergence_parallel_time"] = time_to_json(summary.convergence_parallel_time);
  j["stabilization_parallel_time"] = time_to_json(summary.stabilization_parallel_time);
  j["first_all_correct_parallel_time"] = time_to_json(summary.first_all_correct_parallel_time);
  j["final_level"] = summary.final_level;
  j["max_code_len"] = summary.max_code_len;
  j["max_agent_bits"] = summary.max_agent_bits;
  j["leader_count_final"] = summary.leader_count_final;
  return j;
}

void write_count_writes_jsonl(std::ostream& out, const RunTrace& trace) {
  for (const CountWrite& w : trace.count_writes) {
    nlohmann::ordered_json j;
    j["interaction"] = w.interaction;
    j["agent"] = w.agent;
    j["old_count"] = big_to_json(w.old_count);
    j["new_count"] = big_to_json(w.new_count);
    out << j.dump() << '\n';
  }
}

}  // namespace exactcount
