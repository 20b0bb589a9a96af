#include "exactcount/protocol.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace exactcount {

std::size_t grow(LevelSchedule schedule, std::size_t level) {
  switch (schedule) {
    case LevelSchedule::kDouble:
      return std::max<std::size_t>(1, level);
    case LevelSchedule::kIncrement:
      return 1;
    case LevelSchedule::kSquare:
      return level < 2 ? 1 : level * level - level;
  }
  throw std::logic_error("grow: unknown schedule");
}

std::string_view to_string(LevelSchedule schedule) {
  switch (schedule) {
    case LevelSchedule::kDouble:
      return "double";
    case LevelSchedule::kIncrement:
      return "increment";
    case LevelSchedule::kSquare:
      return "square";
  }
  return "unknown";
}

std::optional<LevelSchedule> parse_level_schedule(std::string_view name) {
  if (name == "double") return LevelSchedule::kDouble;
  if (name == "increment") return LevelSchedule::kIncrement;
  if (name == "square") return LevelSchedule::kSquare;
  return std::nullopt;
}

BigInt scale_for_leader_code(std::size_t leader_code_length) {
  BigInt m = 3;
  m <<= 3 * (leader_code_length / 2);
  return m;
}

void set_new_leader_code(AgentState& rec, BitString new_leader_code) {
  if (new_leader_code.size() < 2 || new_leader_code.size() % 2 != 0) {
    throw std::invalid_argument("set_new_leader_code: length must be even and >= 2, got " +
                                std::to_string(new_leader_code.size()));
  }
  rec.scale = scale_for_leader_code(new_leader_code.size());
  rec.leader_code = std::move(new_leader_code);
  rec.phase = 1;
  if (rec.is_leader) {
    rec.ave = rec.scale;
  } else {
    rec.ave = 0;
  }
}

void extend_code(AgentState& rec, std::size_t num_bits, BitSource& bits) {
  if (num_bits == 0) throw std::invalid_argument("extend_code: num_bits must be >= 1");
  if (rec.is_leader) {
    BitString new_leader_code = append(rec.leader_code, bits.rand_bits(2 * num_bits));
    const std::size_t old_length = rec.code.size();
    rec.code.append(new_leader_code.slice(old_length, num_bits));
    set_new_leader_code(rec, std::move(new_leader_code));
  } else {
    rec.code.append(bits.rand_bits(num_bits));
  }
}

bool unique_id_step(AgentState& rec, const BitString& sender_code,
                    BitSource& bits, LevelSchedule schedule) {
  bool changed = false;
  if (rec.code.size() < sender_code.size()) {
    extend_code(rec, sender_code.size() - rec.code.size(), bits);
    changed = true;
  }
  if (rec.code == sender_code) {
    extend_code(rec, grow(schedule, rec.code.size()), bits);
    changed = true;
  }
  return changed;
}

bool elect_leader_step(AgentState& rec, const BitString& sender_leader_code) {
  bool changed = false;
  if (lex_precedes(rec.leader_code, sender_leader_code)) {
    rec.is_leader = false;
    set_new_leader_code(rec, sender_leader_code);
    changed = true;
  }
  // Followers catch up to longer codes so all lengths eventually agree.
  if (!rec.is_leader && rec.leader_code.size() < sender_leader_code.size()) {
    set_new_leader_code(rec, sender_leader_code);
    changed = true;
  }
  return changed;
}

std::pair<BigInt, BigInt> averaging_step(const BigInt& rec_ave,
                                         const BigInt& sen_ave) {
  BigInt sum = rec_ave + sen_ave;
  BigInt floor_half = sum >> 1;
  BigInt ceil_half = sum - floor_half;
  return {std::move(ceil_half), std::move(floor_half)};
}

std::optional<BigInt> size_estimate(const BigInt& scale, const BigInt& ave) {
  if (ave == 0) return std::nullopt;
  return BigInt((2 * scale + ave) / (2 * ave));
}

std::optional<BigInt> timer_step(AgentState& rec, std::uint32_t sender_phase,
                                 const ProtocolParams& params) {
  if (rec.is_leader && rec.phase == sender_phase && rec.phase < params.max_phase) {
    ++rec.phase;
  }
  if (!rec.is_leader && rec.phase < sender_phase) rec.phase = sender_phase;

  // The estimate only matters once the clock is done, so skip the division
  // before then.
  if (rec.phase != params.max_phase) return std::nullopt;
  std::optional<BigInt> new_count = size_estimate(rec.scale, rec.ave);
  if (!new_count || rec.count == *new_count) return std::nullopt;
  if (rec.scale < 3 * (*new_count) * (*new_count) * (*new_count)) return std::nullopt;
  std::optional<BigInt> previous = std::move(rec.count);
  rec.count = std::move(*new_count);
  return previous;
}

InteractionEffects interact(AgentState& rec, AgentState& sen, BitSource& bits,
                            const ProtocolParams& params) {
  InteractionEffects effects;
  // A leader's code growth installs a new leader code too.
  const bool was_leader = rec.is_leader;
  effects.code_changed = unique_id_step(rec, sen.code, bits, params.schedule);
  const bool elected = elect_leader_step(rec, sen.leader_code);
  effects.leader_code_changed = elected || (effects.code_changed && was_leader);
  if (rec.leader_code == sen.leader_code) {
    // averaging_step, in place.
    rec.ave += sen.ave;
    sen.ave = rec.ave >> 1;
    rec.ave -= sen.ave;
    effects.averaged = true;
    effects.previous_count = timer_step(rec, sen.phase, params);
  }
  return effects;
}

}  // namespace exactcount
