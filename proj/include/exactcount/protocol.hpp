#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>
#include <utility>

#include "exactcount/bit_string.hpp"
#include "exactcount/random_source.hpp"

namespace exactcount {

using BigInt = boost::multiprecision::cpp_int;

// How many bits a receiver appends when it meets an agent with its own code.
enum class LevelSchedule {
  kDouble,     // max(1, l): level doubles
  kIncrement,  // 1: level grows by one
  kSquare,     // max(1, l^2 - l): level squares
};

std::size_t grow(LevelSchedule schedule, std::size_t level);

std::string_view to_string(LevelSchedule schedule);
// Accepts "double", "increment" or "square"; nullopt otherwise.
std::optional<LevelSchedule> parse_level_schedule(std::string_view name);

struct ProtocolParams {
  std::uint32_t max_phase = 1184;
  LevelSchedule schedule = LevelSchedule::kDouble;
};

// Full state of one agent. A default-constructed AgentState is the initial
// state: empty codes, a leader, and M = ave = count = phase = 1.
struct AgentState {
  BitString code;
  BitString leader_code;
  bool is_leader = true;
  BigInt scale = 1;  // M; 3 * 2^(3 * |leader_code| / 2) once a code is set
  BigInt ave = 1;
  BigInt count = 1;
  std::uint32_t phase = 1;

  friend bool operator==(const AgentState&, const AgentState&) = default;
};

// M for a leader code of the given (even) length: 3 * 2^(3 * length / 2).
BigInt scale_for_leader_code(std::size_t leader_code_length);

// Installs a new leader code and restarts the timer and averaging under it.
// Throws std::invalid_argument if |new_leader_code| is odd or < 2.
void set_new_leader_code(AgentState& rec, BitString new_leader_code);

// Grows rec's code by num_bits >= 1. A leader draws 2 * num_bits new leader
// code bits and takes its new code bits from the leader code, so the code
// stays a prefix of the leader code; a follower just draws num_bits.
void extend_code(AgentState& rec, std::size_t num_bits, BitSource& bits);

// Catch up to a longer sender code, then grow past a sender with the same
// code. Returns true iff rec's code changed.
bool unique_id_step(AgentState& rec, const BitString& sender_code,
                    BitSource& bits, LevelSchedule schedule);

// Adopts the sender's leader code if it beats rec's on the common prefix
// (rec then stops being a leader), and lets a follower adopt a longer code.
// Returns true iff rec's leader code changed.
bool elect_leader_step(AgentState& rec, const BitString& sender_leader_code);

// (ceil((a + b) / 2), floor((a + b) / 2)).
std::pair<BigInt, BigInt> averaging_step(const BigInt& rec_ave,
                                         const BigInt& sen_ave);

// floor(M / ave + 1/2), or nullopt when ave == 0.
std::optional<BigInt> size_estimate(const BigInt& scale, const BigInt& ave);

// Advances the phase clock and, once the clock is done, writes the size
// estimate into count. Returns the previous count when count was written.
std::optional<BigInt> timer_step(AgentState& rec, std::uint32_t sender_phase,
                                 const ProtocolParams& params);

// What an interaction changed; lets callers maintain incremental statistics
// without diffing states.
struct InteractionEffects {
  bool code_changed = false;         // receiver
  bool leader_code_changed = false;  // receiver
  bool averaged = false;             // both ave fields rewritten
  std::optional<BigInt> previous_count;  // set iff receiver's count was written
};

// One ordered interaction: rec is updated by code growth, leader election,
// and, when both now share a leader code, averaging (which also updates sen)
// and the timer.
InteractionEffects interact(AgentState& rec, AgentState& sen, BitSource& bits,
                            const ProtocolParams& params);

}  // namespace exactcount
