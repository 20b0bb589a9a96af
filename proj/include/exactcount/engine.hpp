#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "exactcount/protocol.hpp"
#include "exactcount/random_source.hpp"

namespace exactcount {

enum class StopCondition {
  kMaxInteractions,  // run the full interaction budget
  kOutputStable,     // first configuration satisfying is_output_stable()
  kAllCountCorrect,  // first moment every count equals n
};

std::string_view to_string(StopCondition stop);
// Accepts "interactions", "stable" or "correct".
std::optional<StopCondition> parse_stop_condition(std::string_view name);

inline constexpr std::uint64_t kDefaultMaxInteractions = 100'000'000'000ULL;

struct SimConfig {
  std::size_t n = 2;
  std::uint64_t seed = 0;
  ProtocolParams params;
  StopCondition stop = StopCondition::kOutputStable;
  std::uint64_t max_interactions = kDefaultMaxInteractions;
  // Keep the full (receiver, sender) log in addition to count writes.
  bool record_trace = false;

  // Throws std::invalid_argument for n < 2 or max_phase < 1.
  void validate() const;
};

// Exact parallel time: interactions / n.
struct ParallelTime {
  std::uint64_t interactions = 0;
  std::uint64_t n = 1;

  double value() const noexcept {
    return static_cast<double>(interactions) / static_cast<double>(n);
  }
  friend bool operator==(const ParallelTime&, const ParallelTime&) = default;
};

struct ScheduledPair {
  std::size_t receiver = 0;
  std::size_t sender = 0;
  friend bool operator==(const ScheduledPair&, const ScheduledPair&) = default;
};

// Interaction indices are 1-based: the k-th interaction has index k.
struct CountWrite {
  std::uint64_t interaction = 0;
  std::size_t agent = 0;
  BigInt old_count;
  BigInt new_count;
  friend bool operator==(const CountWrite&, const CountWrite&) = default;
};

struct LevelTransition {
  std::uint64_t interaction = 0;
  std::size_t level = 0;
  friend bool operator==(const LevelTransition&, const LevelTransition&) = default;
};

struct RunSummary {
  std::uint64_t interactions = 0;
  bool stop_reached = false;
  bool final_counts_correct = false;
  // Last count write; only known once the run reached an output-stable
  // configuration.
  std::optional<ParallelTime> convergence_parallel_time;
  std::optional<ParallelTime> stabilization_parallel_time;
  std::optional<ParallelTime> first_all_correct_parallel_time;
  std::size_t final_level = 0;    // max code length at the end
  std::size_t max_code_len = 0;   // longest leader code ever held
  std::size_t max_agent_bits = 0; // peak agent_bits() over the run
  std::size_t leader_count_final = 0;
  friend bool operator==(const RunSummary&, const RunSummary&) = default;
};

struct RunTrace {
  std::vector<CountWrite> count_writes;
  std::vector<LevelTransition> level_transitions;
  std::vector<ScheduledPair> interactions;  // only with record_trace
  RunSummary summary;
  friend bool operator==(const RunTrace&, const RunTrace&) = default;
};

// Uniform over the n(n-1) ordered pairs of distinct agents.
ScheduledPair schedule_next(RandomSource& rng, std::size_t n);

// Memory footprint of one agent in bits. Zero-valued integers count as one
// bit.
std::size_t agent_bits(const AgentState& agent);

// Sufficient condition for output stability: all codes unique and of equal
// length, one shared leader code, exactly one leader, every clock finished,
// every ave in {floor(M/n), ceil(M/n)}, and every count equal to n.
bool is_output_stable(std::span<const AgentState> agents,
                      const ProtocolParams& params);

// Parallel time of the last count write, or nullopt when the trace did not
// reach stability or holds no writes.
std::optional<ParallelTime> convergence_time(const RunTrace& trace, std::size_t n);

// A population evolving under the uniform random scheduler. Keeps running
// statistics so each stop condition is an O(1) check per interaction.
class Simulation {
 public:
  explicit Simulation(const SimConfig& config);

  const SimConfig& config() const noexcept { return config_; }
  std::span<const AgentState> agents() const noexcept { return agents_; }
  std::uint64_t interactions() const noexcept { return interactions_; }
  ParallelTime parallel_time() const noexcept {
    return {interactions_, static_cast<std::uint64_t>(agents_.size())};
  }
  const RunTrace& trace() const noexcept { return trace_; }

  // Current value of the incrementally tracked stability predicate.
  bool output_stable() const noexcept;
  bool all_counts_correct() const noexcept { return counts_correct_ == agents_.size(); }
  bool stop_satisfied() const noexcept;
  std::size_t leader_count() const noexcept { return leaders_; }
  std::size_t level() const noexcept { return max_level_; }

  // One scheduled interaction.
  void step();
  // Applies a chosen interaction; used by step() and by tests that probe
  // specific transitions.
  void apply(ScheduledPair pair);

  // Steps until the stop condition holds or the budget runs out, then
  // finalizes and returns the trace.
  const RunTrace& run();

 private:
  struct AgentFlags {
    bool count_correct = false;
    bool phase_done = false;
    bool ave_settled = false;
    bool leader = false;
  };
  // {floor(M/n), ceil(M/n)}. M is a function of the leader code length, so
  // bands are cached per length.
  struct SettleBand {
    BigInt low;
    BigInt high;
  };

  const SettleBand& settle_band(const AgentState& agent);

  void refresh_flags(std::size_t i, bool ave_or_scale_changed);
  void retrack_code(std::size_t i);
  void retrack_leader_code(std::size_t i);
  void note_progress();
  void finalize();

  SimConfig config_;
  RandomSource rng_;
  std::vector<AgentState> agents_;
  std::uint64_t interactions_ = 0;
  RunTrace trace_;

  std::vector<AgentFlags> flags_;
  std::size_t counts_correct_ = 0;
  std::size_t phases_done_ = 0;
  std::size_t aves_settled_ = 0;
  std::size_t leaders_ = 0;
  std::vector<BitString> tracked_code_;
  std::vector<BitString> tracked_leader_code_;
  std::unordered_map<BitString, std::size_t> code_counts_;
  std::map<std::size_t, std::size_t> code_lengths_;
  std::unordered_map<BitString, std::size_t> leader_code_counts_;
  std::size_t max_level_ = 0;
  std::vector<std::optional<SettleBand>> bands_;
};

// Runs config to its stop condition.
RunTrace run(const SimConfig& config);

}  // namespace exactcount
