#include "exactcount/engine.hpp"

#include <algorithm>
#include <bit>
#include <stdexcept>
#include <string>
#include <unordered_set>

namespace exactcount {

namespace {

std::size_t bit_length(const BigInt& x) {
  // Read the top limb directly; msb() would also re-check sign and zero.
  constexpr std::size_t kLimbBits = sizeof(boost::multiprecision::limb_type) * 8;
  const auto& backend = x.backend();
  const std::size_t top = backend.size() - 1;
  const auto word = backend.limbs()[top];
  if (word == 0) return 1;  // only a zero value has a zero top limb
  return top * kLimbBits + kLimbBits - static_cast<std::size_t>(std::countl_zero(word));
}

std::size_t bit_length(std::uint64_t x) {
  return x == 0 ? 1 : static_cast<std::size_t>(std::bit_width(x));
}

// ave in {floor(M/n), ceil(M/n)}  <=>  |n * ave - M| < n.
bool ave_settled(const AgentState& agent, std::size_t n) {
  BigInt diff = agent.ave * n - agent.scale;
  if (diff < 0) diff = -diff;
  return diff < n;
}

template <typename Map>
void decrement(Map& counts, const typename Map::key_type& key) {
  auto it = counts.find(key);
  if (--it->second == 0) counts.erase(it);
}

}  // namespace

std::string_view to_string(StopCondition stop) {
  switch (stop) {
    case StopCondition::kMaxInteractions:
      return "interactions";
    case StopCondition::kOutputStable:
      return "stable";
    case StopCondition::kAllCountCorrect:
      return "correct";
  }
  return "unknown";
}

std::optional<StopCondition> parse_stop_condition(std::string_view name) {
  if (name == "interactions") return StopCondition::kMaxInteractions;
  if (name == "stable") return StopCondition::kOutputStable;
  if (name == "correct") return StopCondition::kAllCountCorrect;
  return std::nullopt;
}

void SimConfig::validate() const {
  if (n < 2) {
    throw std::invalid_argument("population size must be at least 2, got " + std::to_string(n));
  }
  if (params.max_phase < 1) throw std::invalid_argument("max_phase must be at least 1");
}

ScheduledPair schedule_next(RandomSource& rng, std::size_t n) {
  const auto receiver = static_cast<std::size_t>(rng.uniform_below(n));
  auto sender = static_cast<std::size_t>(rng.uniform_below(n - 1));
  if (sender >= receiver) ++sender;
  return {receiver, sender};
}

std::size_t agent_bits(const AgentState& agent) {
  return agent.code.size() + agent.leader_code.size() + bit_length(agent.scale) +
         bit_length(agent.ave) + bit_length(agent.count) + 1 + bit_length(agent.phase);
}

bool is_output_stable(std::span<const AgentState> agents,
                      const ProtocolParams& params) {
  const std::size_t n = agents.size();
  if (n == 0) return false;
  const AgentState& first = agents.front();
  std::size_t leaders = 0;
  std::unordered_set<BitString> codes;
  for (const AgentState& a : agents) {
    if (a.code.size() != first.code.size()) return false;
    if (!(a.leader_code == first.leader_code)) return false;
    if (a.phase != params.max_phase) return false;
    if (!ave_settled(a, n)) return false;
    if (a.count != n) return false;
    if (a.is_leader) ++leaders;
    if (!codes.insert(a.code).second) return false;
  }
  return leaders == 1;
}

std::optional<ParallelTime> convergence_time(const RunTrace& trace, std::size_t n) {
  if (!trace.summary.stabilization_parallel_time || trace.count_writes.empty()) {
    return std::nullopt;
  }
  return ParallelTime{trace.count_writes.back().interaction, n};
}

Simulation::Simulation(const SimConfig& config)
    : config_(config), rng_(config.seed) {
  config_.validate();
  const std::size_t n = config_.n;
  agents_.resize(n);
  flags_.resize(n);
  tracked_code_.resize(n);
  tracked_leader_code_.resize(n);
  code_counts_[BitString{}] = n;
  code_lengths_[0] = n;
  leader_code_counts_[BitString{}] = n;
  for (std::size_t i = 0; i < n; ++i) refresh_flags(i, true);
}

void Simulation::refresh_flags(std::size_t i, bool ave_or_scale_changed) {
  const AgentState& a = agents_[i];
  AgentFlags& f = flags_[i];
  const std::size_t n = agents_.size();

  auto update = [](bool& flag, bool value, std::size_t& counter) {
    if (flag == value) return;
    flag = value;
    if (value) {
      ++counter;
    } else {
      --counter;
    }
  };
  update(f.count_correct, a.count == n, counts_correct_);
  update(f.phase_done, a.phase == config_.params.max_phase, phases_done_);
  update(f.leader, a.is_leader, leaders_);
  if (ave_or_scale_changed) {
    const SettleBand& band = settle_band(a);
    update(f.ave_settled, band.low <= a.ave && a.ave <= band.high, aves_settled_);
  }
  trace_.summary.max_agent_bits = std::max(trace_.summary.max_agent_bits, agent_bits(a));
}

const Simulation::SettleBand& Simulation::settle_band(const AgentState& agent) {
  const std::size_t key = agent.leader_code.size();
  if (key >= bands_.size()) bands_.resize(key + 1);
  if (!bands_[key]) {
    const std::size_t n = agents_.size();
    BigInt low = agent.scale / n;
    BigInt high = low * n == agent.scale ? low : BigInt(low + 1);
    bands_[key] = SettleBand{std::move(low), std::move(high)};
  }
  return *bands_[key];
}

void Simulation::retrack_code(std::size_t i) {
  const BitString& code = agents_[i].code;
  decrement(code_counts_, tracked_code_[i]);
  decrement(code_lengths_, tracked_code_[i].size());
  tracked_code_[i] = code;
  ++code_counts_[code];
  ++code_lengths_[code.size()];
  if (code.size() > max_level_) {
    max_level_ = code.size();
    trace_.level_transitions.push_back({interactions_, max_level_});
  }
}

void Simulation::retrack_leader_code(std::size_t i) {
  const BitString& lc = agents_[i].leader_code;
  decrement(leader_code_counts_, tracked_leader_code_[i]);
  tracked_leader_code_[i] = lc;
  ++leader_code_counts_[lc];
  trace_.summary.max_code_len = std::max(trace_.summary.max_code_len, lc.size());
}

bool Simulation::output_stable() const noexcept {
  const std::size_t n = agents_.size();
  return counts_correct_ == n && phases_done_ == n && aves_settled_ == n &&
         leaders_ == 1 && code_counts_.size() == n && code_lengths_.size() == 1 &&
         leader_code_counts_.size() == 1;
}

bool Simulation::stop_satisfied() const noexcept {
  switch (config_.stop) {
    case StopCondition::kMaxInteractions:
      return interactions_ >= config_.max_interactions;
    case StopCondition::kOutputStable:
      return output_stable();
    case StopCondition::kAllCountCorrect:
      return all_counts_correct();
  }
  return false;
}

void Simulation::step() { apply(schedule_next(rng_, agents_.size())); }

void Simulation::apply(ScheduledPair pair) {
  ++interactions_;
  if (config_.record_trace) trace_.interactions.push_back(pair);
  AgentState& rec = agents_[pair.receiver];
  AgentState& sen = agents_[pair.sender];

  InteractionEffects effects = interact(rec, sen, rng_, config_.params);

  if (effects.code_changed) retrack_code(pair.receiver);
  if (effects.leader_code_changed) retrack_leader_code(pair.receiver);
  refresh_flags(pair.receiver, effects.averaged || effects.leader_code_changed);
  if (effects.averaged) refresh_flags(pair.sender, true);
  if (effects.previous_count) {
    trace_.count_writes.push_back(
        {interactions_, pair.receiver, std::move(*effects.previous_count), rec.count});
  }
  note_progress();
}

void Simulation::note_progress() {
  RunSummary& s = trace_.summary;
  if (!s.first_all_correct_parallel_time && all_counts_correct()) {
    s.first_all_correct_parallel_time = parallel_time();
  }
  if (!s.stabilization_parallel_time && output_stable()) {
    s.stabilization_parallel_time = parallel_time();
  }
}

const RunTrace& Simulation::run() {
  while (!stop_satisfied() && interactions_ < config_.max_interactions) step();
  finalize();
  return trace_;
}

void Simulation::finalize() {
  RunSummary& s = trace_.summary;
  s.interactions = interactions_;
  s.stop_reached = stop_satisfied();
  s.final_counts_correct = all_counts_correct();
  s.final_level = max_level_;
  s.leader_count_final = leaders_;
  s.convergence_parallel_time = convergence_time(trace_, agents_.size());
}

RunTrace run(const SimConfig& config) {
  Simulation sim(config);
  return sim.run();
}

}  // namespace exactcount
