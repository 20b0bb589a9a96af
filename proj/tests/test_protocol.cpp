#include <doctest.h>

#include <cmath>
#include <vector>

#include "exactcount/engine.hpp"
#include "exactcount/protocol.hpp"
#include "support.hpp"

using namespace exactcount;
using testing::bits;
using testing::ScriptedBits;

namespace {

AgentState follower(std::string_view code, std::string_view leader_code = "") {
  AgentState a;
  a.is_leader = false;
  a.code = bits(code);
  if (!leader_code.empty()) set_new_leader_code(a, bits(leader_code));
  return a;
}

AgentState leader(std::string_view code, std::string_view leader_code) {
  AgentState a;
  a.code = bits(code);
  set_new_leader_code(a, bits(leader_code));
  return a;
}

BigInt pow2(unsigned k) { return BigInt(1) << k; }

}  // namespace

TEST_CASE("initial agent state") {
  const AgentState a;
  CHECK(a.code.empty());
  CHECK(a.leader_code.empty());
  CHECK(a.is_leader);
  CHECK(a.scale == 1);
  CHECK(a.ave == 1);
  CHECK(a.count == 1);
  CHECK(a.phase == 1);
}

TEST_CASE("level growth per schedule") {
  CHECK(grow(LevelSchedule::kDouble, 0) == 1);
  CHECK(grow(LevelSchedule::kDouble, 1) == 1);
  CHECK(grow(LevelSchedule::kDouble, 4) == 4);
  CHECK(grow(LevelSchedule::kIncrement, 0) == 1);
  CHECK(grow(LevelSchedule::kIncrement, 9) == 1);
  CHECK(grow(LevelSchedule::kSquare, 0) == 1);
  CHECK(grow(LevelSchedule::kSquare, 1) == 1);
  CHECK(grow(LevelSchedule::kSquare, 2) == 2);
  CHECK(grow(LevelSchedule::kSquare, 4) == 12);
  for (auto s : {LevelSchedule::kDouble, LevelSchedule::kIncrement, LevelSchedule::kSquare}) {
    CHECK(parse_level_schedule(to_string(s)) == s);
  }
  CHECK_FALSE(parse_level_schedule("triple").has_value());
}

TEST_CASE("set_new_leader_code") {
  SUBCASE("leader, length 4") {
    AgentState a;
    a.phase = 9;
    set_new_leader_code(a, bits("1001"));
    CHECK(a.scale == 192);
    CHECK(a.ave == 192);
    CHECK(a.phase == 1);
    CHECK(a.leader_code == bits("1001"));
  }
  SUBCASE("follower, length 6") {
    AgentState a = follower("");
    a.ave = 77;
    set_new_leader_code(a, bits("101101"));
    CHECK(a.scale == 1536);
    CHECK(a.ave == 0);
    CHECK(a.phase == 1);
  }
  SUBCASE("odd or empty codes are rejected") {
    AgentState a;
    CHECK_THROWS_AS(set_new_leader_code(a, bits("101")), std::invalid_argument);
    CHECK_THROWS_AS(set_new_leader_code(a, bits("")), std::invalid_argument);
  }
}

TEST_CASE("M reaches 3n^3 once the level reaches log2 n") {
  for (std::size_t n = 2; n <= 5000; ++n) {
    const auto level = static_cast<std::size_t>(std::ceil(std::log2(static_cast<double>(n))));
    INFO("n = ", n);
    CHECK(scale_for_leader_code(2 * level) >= BigInt(3) * n * n * n);
  }
  CHECK(scale_for_leader_code(2) == 24);
  CHECK(scale_for_leader_code(40) == 3 * pow2(60));
}

TEST_CASE("extend_code") {
  SUBCASE("leader takes its new code bits from the new leader code") {
    AgentState a = leader("1", "10");
    ScriptedBits script("01");
    extend_code(a, 1, script);
    CHECK(a.leader_code == bits("1001"));
    CHECK(a.scale == 192);
    CHECK(a.ave == 192);
    CHECK(a.phase == 1);
    CHECK(a.code == bits("10"));
    CHECK(a.leader_code.starts_with(a.code));
    CHECK(script.exhausted());
  }
  SUBCASE("follower draws plain bits") {
    AgentState a = follower("01", "1100");
    a.ave = 33;
    a.phase = 4;
    const AgentState before = a;
    ScriptedBits script("10");
    extend_code(a, 2, script);
    CHECK(a.code == bits("0110"));
    CHECK(a.leader_code == before.leader_code);
    CHECK(a.scale == before.scale);
    CHECK(a.ave == 33);
    CHECK(a.phase == 4);
  }
  SUBCASE("first extension of a fresh leader") {
    AgentState a;
    ScriptedBits script("10");
    extend_code(a, 1, script);
    CHECK(a.leader_code == bits("10"));
    CHECK(a.code == bits("1"));
    CHECK(a.scale == 24);
    CHECK(a.ave == 24);
  }
}

TEST_CASE("unique_id_step") {
  SUBCASE("catch up to a longer code, then stop when codes differ") {
    AgentState a = follower("0");
    ScriptedBits script("11");
    CHECK(unique_id_step(a, bits("101"), script, LevelSchedule::kDouble));
    CHECK(a.code == bits("011"));
    CHECK(script.exhausted());
  }
  SUBCASE("equal codes double the length") {
    AgentState a = follower("01");
    ScriptedBits script("10");
    CHECK(unique_id_step(a, bits("01"), script, LevelSchedule::kDouble));
    CHECK(a.code == bits("0110"));
  }
  SUBCASE("empty codes grow by one bit") {
    AgentState a = follower("");
    ScriptedBits script("1");
    CHECK(unique_id_step(a, bits(""), script, LevelSchedule::kDouble));
    CHECK(a.code == bits("1"));
  }
  SUBCASE("catching up onto the sender's code grows again") {
    AgentState a = follower("1");
    ScriptedBits script("0" "11");
    CHECK(unique_id_step(a, bits("10"), script, LevelSchedule::kDouble));
    CHECK(a.code == bits("1011"));
    CHECK(script.exhausted());
  }
  SUBCASE("increment schedule adds one bit") {
    AgentState a = follower("0110");
    ScriptedBits script("1");
    CHECK(unique_id_step(a, bits("0110"), script, LevelSchedule::kIncrement));
    CHECK(a.code == bits("01101"));
  }
  SUBCASE("different codes of equal length leave rec alone") {
    AgentState a = follower("01");
    ScriptedBits script("");
    CHECK_FALSE(unique_id_step(a, bits("10"), script, LevelSchedule::kDouble));
    CHECK_FALSE(unique_id_step(a, bits("0"), script, LevelSchedule::kDouble));
    CHECK(a.code == bits("01"));
  }
}

TEST_CASE("elect_leader_step") {
  SUBCASE("smaller prefix loses and becomes a follower") {
    AgentState a = leader("01", "0110");
    CHECK(elect_leader_step(a, bits("10")));
    CHECK_FALSE(a.is_leader);
    CHECK(a.leader_code == bits("10"));
    CHECK(a.phase == 1);
    CHECK(a.ave == 0);
    CHECK(a.scale == 24);
  }
  SUBCASE("a follower adopts a longer code with an equal prefix") {
    AgentState a = follower("11", "10");
    CHECK(elect_leader_step(a, bits("1011")));
    CHECK(a.leader_code == bits("1011"));
    CHECK(a.scale == 192);
  }
  SUBCASE("a leader keeps its shorter code") {
    AgentState a = leader("1", "10");
    CHECK_FALSE(elect_leader_step(a, bits("1011")));
    CHECK(a.is_leader);
    CHECK(a.leader_code == bits("10"));
  }
  SUBCASE("a larger or empty sender code changes nothing") {
    AgentState a = leader("1", "10");
    CHECK_FALSE(elect_leader_step(a, bits("01")));
    CHECK_FALSE(elect_leader_step(a, bits("")));
    CHECK(a.is_leader);
  }
}

TEST_CASE("averaging_step examples") {
  CHECK(averaging_step(7, 2) == std::pair<BigInt, BigInt>(5, 4));
  CHECK(averaging_step(4, 4) == std::pair<BigInt, BigInt>(4, 4));
  CHECK(averaging_step(192, 0) == std::pair<BigInt, BigInt>(96, 96));
  CHECK(averaging_step(0, 7) == std::pair<BigInt, BigInt>(4, 3));
}

TEST_CASE("averaging_step preserves the sum on 0..1000 squared") {
  bool ok = true;
  for (int a = 0; a <= 1000 && ok; ++a) {
    for (int b = 0; b <= 1000; ++b) {
      const auto [r, s] = averaging_step(a, b);
      if (r + s != a + b || r < s || r - s > 1) {
        ok = false;
        INFO("a = ", a, " b = ", b);
        CHECK(ok);
        break;
      }
    }
  }
  CHECK(ok);
  const BigInt huge = 3 * pow2(300) + 1;
  const auto [r, s] = averaging_step(huge, 2);
  CHECK(r + s == huge + 2);
  CHECK(r - s == 1);
}

TEST_CASE("size_estimate") {
  CHECK(size_estimate(3000, 300) == BigInt(10));
  CHECK(size_estimate(300, 29) == BigInt(10));
  CHECK_FALSE(size_estimate(192, 0).has_value());
  CHECK(size_estimate(10, 4) == BigInt(3));  // 2.5 rounds up
  CHECK(size_estimate(7, 2) == BigInt(4));   // 3.5 rounds up
  CHECK(size_estimate(7, 3) == BigInt(2));
}

TEST_CASE("timer_step") {
  ProtocolParams params;
  SUBCASE("leader advances on an equal phase") {
    AgentState a = leader("1", "10");
    a.phase = 3;
    timer_step(a, 3, params);
    CHECK(a.phase == 4);
    timer_step(a, 3, params);
    CHECK(a.phase == 4);
  }
  SUBCASE("follower catches up") {
    AgentState a = follower("1", "10");
    a.phase = 2;
    timer_step(a, 7, params);
    CHECK(a.phase == 7);
    timer_step(a, 5, params);
    CHECK(a.phase == 7);
  }
  SUBCASE("leader stops at max_phase") {
    AgentState a = leader("1", "10");
    a.phase = params.max_phase;
    timer_step(a, params.max_phase, params);
    CHECK(a.phase == params.max_phase);
  }
  SUBCASE("finished follower writes the estimate") {
    AgentState a = follower("01", "1001");
    REQUIRE(a.scale == 192);
    a.ave = 64;
    a.phase = params.max_phase;
    const auto previous = timer_step(a, 1, params);
    CHECK(a.count == 3);
    REQUIRE(previous.has_value());
    CHECK(*previous == 1);
    CHECK_FALSE(timer_step(a, 1, params).has_value());
  }
  SUBCASE("no write before the clock finishes") {
    AgentState a = follower("01", "1001");
    a.ave = 64;
    a.phase = params.max_phase - 2;
    CHECK_FALSE(timer_step(a, 1, params).has_value());
    CHECK(a.count == 1);
  }
  SUBCASE("no write when M is below 3 count^3") {
    AgentState a = follower("1", "10");  // M = 24
    a.ave = 4;                          // estimate 6, 3 * 216 > 24
    a.phase = params.max_phase;
    CHECK_FALSE(timer_step(a, 1, params).has_value());
    CHECK(a.count == 1);
  }
  SUBCASE("ave zero is skipped") {
    AgentState a = follower("01", "1001");
    a.phase = params.max_phase;
    CHECK_FALSE(timer_step(a, 1, params).has_value());
    CHECK(a.count == 1);
  }
}

TEST_CASE("interact: two fresh agents") {
  AgentState rec;
  AgentState sen;
  ScriptedBits script("10");
  const auto effects = interact(rec, sen, script, ProtocolParams{});
  CHECK(rec.code == bits("1"));
  CHECK(rec.leader_code == bits("10"));
  CHECK(rec.scale == 24);
  CHECK(rec.ave == 24);
  CHECK(sen == AgentState{});
  CHECK(effects.code_changed);
  CHECK(effects.leader_code_changed);
  CHECK_FALSE(effects.averaged);
  CHECK_FALSE(effects.previous_count.has_value());
}

TEST_CASE("interact: settled pair averages and the timer writes") {
  ProtocolParams params;
  AgentState rec = leader("10", "1011");
  AgentState sen = follower("01", "1011");
  rec.phase = sen.phase = params.max_phase;

  SUBCASE("stale counts, ave 7 and 2") {
    rec.ave = 7;
    sen.ave = 2;
    ScriptedBits script("");
    const auto effects = interact(rec, sen, script, params);
    CHECK(rec.ave == 5);
    CHECK(sen.ave == 4);
    CHECK(effects.averaged);
    // 384 / 5 rounds to 38 and 192 < 3 * 38^3, so the count stays.
    CHECK(rec.count == 1);
  }
  SUBCASE("values that estimate n = 3") {
    rec.ave = 70;
    sen.ave = 58;
    ScriptedBits script("");
    const auto effects = interact(rec, sen, script, params);
    CHECK(rec.ave == 64);
    CHECK(sen.ave == 64);
    CHECK(rec.count == 3);
    CHECK(sen.count == 1);
    REQUIRE(effects.previous_count.has_value());
    CHECK(*effects.previous_count == 1);
  }
}

TEST_CASE("interact: adopting the sender's code runs averaging in the same step") {
  AgentState rec = follower("00", "0100");
  rec.ave = 30;
  rec.phase = 5;
  AgentState sen = follower("11", "1011");
  sen.ave = 50;
  sen.phase = 7;
  const AgentState sen_before = sen;
  ScriptedBits script("");
  const auto effects = interact(rec, sen, script, ProtocolParams{});
  CHECK(rec.leader_code == bits("1011"));
  CHECK(effects.leader_code_changed);
  CHECK(effects.averaged);
  CHECK(rec.ave == 25);
  CHECK(sen.ave == 25);
  CHECK(rec.phase == 7);
  sen.ave = sen_before.ave;
  CHECK(sen == sen_before);
}

TEST_CASE("interact invariants along random trajectories") {
  for (auto schedule : {LevelSchedule::kDouble, LevelSchedule::kIncrement, LevelSchedule::kSquare}) {
    for (std::uint64_t seed = 0; seed < 6; ++seed) {
      ProtocolParams params;
      params.max_phase = 12;
      params.schedule = schedule;
      const std::size_t n = 4 + seed;
      std::vector<AgentState> agents(n);
      RandomSource rng(derive_seed(99, {seed, static_cast<std::uint64_t>(schedule)}));
      bool ok = true;
      int failed_line = 0;
      auto expect = [&](bool cond, int line) {
        if (!cond && ok) {
          ok = false;
          failed_line = line;
        }
      };
      for (int step = 0; step < 20000 && ok; ++step) {
        const ScheduledPair pair = schedule_next(rng, n);
        AgentState& rec = agents[pair.receiver];
        AgentState& sen = agents[pair.sender];
        const AgentState rec_before = rec;
        const AgentState sen_before = sen;
        const auto effects = interact(rec, sen, rng, params);

        // The sender only ever changes its ave.
        AgentState sen_check = sen;
        sen_check.ave = sen_before.ave;
        expect(sen_check == sen_before, __LINE__);
        expect((rec_before.is_leader || !rec.is_leader), __LINE__);
        expect(rec.code.size() >= rec_before.code.size(), __LINE__);
        // A leader code only gets shorter by adopting a sender's code that
        // wins on the common prefix.
        if (rec.leader_code.size() < rec_before.leader_code.size()) {
          expect(rec.leader_code == sen_before.leader_code && !rec.is_leader, __LINE__);
        }
        expect(rec.code.starts_with(rec_before.code), __LINE__);
        expect(rec.leader_code.size() % 2 == 0, __LINE__);
        expect(rec.phase >= 1 && rec.phase <= params.max_phase, __LINE__);
        expect(effects.leader_code_changed == !(rec.leader_code == rec_before.leader_code), __LINE__);
        if (!rec.leader_code.empty()) {
          expect(rec.scale == scale_for_leader_code(rec.leader_code.size()), __LINE__);
          expect(rec.ave >= 0 && rec.ave <= rec.scale, __LINE__);
        }
        if (rec.is_leader && !rec.leader_code.empty()) {
          expect(2 * rec.code.size() == rec.leader_code.size(), __LINE__);
          expect(rec.leader_code.starts_with(rec.code), __LINE__);
        }
        if (effects.leader_code_changed && !(rec.leader_code == sen_before.leader_code)) {
          expect(rec.phase == 1, __LINE__);
        }
        if (!effects.leader_code_changed) expect(rec.phase >= rec_before.phase, __LINE__);
        if (effects.averaged) {
          expect(rec.ave + sen.ave == (rec.leader_code == rec_before.leader_code
                                               ? rec_before.ave + sen_before.ave
                                               : (rec.is_leader ? rec.scale : BigInt(0)) +
                                                     sen_before.ave), __LINE__);
        }
        if (effects.previous_count) {
          expect(rec.phase == params.max_phase, __LINE__);
          expect(size_estimate(rec.scale, rec.ave) == rec.count, __LINE__);
          expect(rec.count != *effects.previous_count, __LINE__);
        } else {
          expect(rec.count == rec_before.count, __LINE__);
        }
        if (!ok) {
          INFO("schedule ", to_string(schedule), " seed ", seed, " step ", step, " line ", failed_line);
          CHECK(ok);
        }
      }
      CHECK(ok);
    }
  }
}
