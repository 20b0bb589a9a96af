#include <doctest.h>

#include <set>
#include <vector>

#include "exactcount/bit_string.hpp"
#include "exactcount/random_source.hpp"
#include "support.hpp"

using exactcount::BitString;
using exactcount::RandomSource;
using testing::bits;

namespace {

// Every bit string of length 0..max_len.
std::vector<BitString> all_strings(std::size_t max_len) {
  std::vector<BitString> out;
  for (std::size_t len = 0; len <= max_len; ++len) {
    for (std::size_t v = 0; v < (std::size_t{1} << len); ++v) {
      std::string s;
      for (std::size_t i = 0; i < len; ++i) s += ((v >> (len - 1 - i)) & 1) ? '1' : '0';
      out.push_back(bits(s));
    }
  }
  return out;
}

// Reference order on the common prefix, straight from characters.
bool reference_precedes(const std::string& a, const std::string& b) {
  const std::size_t p = std::min(a.size(), b.size());
  return a.substr(0, p) < b.substr(0, p);
}

}  // namespace

TEST_CASE("bit string parsing and printing") {
  CHECK(bits("").empty());
  CHECK(bits("0110").to_string() == "0110");
  CHECK(bits("0110").size() == 4);
  CHECK(bits("10")[0]);
  CHECK_FALSE(bits("10")[1]);
  CHECK_THROWS_AS(BitString::from_string("012"), std::invalid_argument);
  const std::string long_bits(150, '1');
  CHECK(bits(long_bits + "0").to_string() == long_bits + "0");
}

TEST_CASE("lex_precedes examples") {
  CHECK(lex_precedes(bits("01"), bits("10")));
  CHECK_FALSE(lex_precedes(bits("10"), bits("1011")));
  CHECK_FALSE(lex_precedes(bits(""), bits("1011")));
  CHECK_FALSE(lex_precedes(bits("1011"), bits("")));
}

TEST_CASE("lex_precedes agrees with a character-level reference") {
  const auto strings = all_strings(5);
  for (const auto& a : strings) {
    for (const auto& b : strings) {
      INFO(a.to_string(), " vs ", b.to_string());
      CHECK(lex_precedes(a, b) == reference_precedes(a.to_string(), b.to_string()));
    }
  }
}

TEST_CASE("lex_precedes across word boundaries") {
  const std::string base(70, '1');
  CHECK(lex_precedes(bits(base + "0"), bits(base + "1")));
  CHECK_FALSE(lex_precedes(bits(base + "1"), bits(base + "0")));
  CHECK_FALSE(lex_precedes(bits(base), bits(base + "0101")));
  CHECK(lex_precedes(bits(std::string(64, '1') + "0"), bits(std::string(65, '1'))));
}

TEST_CASE("lex_precedes is a strict order on equal-length strings") {
  for (std::size_t len : {0, 1, 3, 4}) {
    std::vector<BitString> same;
    for (const auto& s : all_strings(len)) {
      if (s.size() == len) same.push_back(s);
    }
    for (const auto& a : same) {
      CHECK_FALSE(lex_precedes(a, a));
      for (const auto& b : same) {
        const int relations = int(lex_precedes(a, b)) + int(lex_precedes(b, a)) + int(a == b);
        CHECK(relations == 1);
        for (const auto& c : same) {
          if (lex_precedes(a, b) && lex_precedes(b, c)) CHECK(lex_precedes(a, c));
        }
      }
    }
  }
}

TEST_CASE("lex_precedes is asymmetric on mixed lengths") {
  const auto strings = all_strings(4);
  for (const auto& a : strings) {
    for (const auto& b : strings) CHECK_FALSE((lex_precedes(a, b) && lex_precedes(b, a)));
  }
}

TEST_CASE("append examples") {
  CHECK(append(bits("01"), bits("10")) == bits("0110"));
  CHECK(append(bits(""), bits("1")) == bits("1"));
  CHECK(append(bits("1"), bits("")) == bits("1"));
}

TEST_CASE("append is associative with the empty string as identity") {
  RandomSource rng(11);
  for (int trial = 0; trial < 300; ++trial) {
    BitString parts[3];
    for (auto& p : parts) {
      const std::size_t len = rng.uniform_below(140);
      p = len == 0 ? BitString() : rng.rand_bits(len);
    }
    const BitString left = append(append(parts[0], parts[1]), parts[2]);
    const BitString right = append(parts[0], append(parts[1], parts[2]));
    CHECK(left == right);
    CHECK(left.to_string() == parts[0].to_string() + parts[1].to_string() + parts[2].to_string());
    CHECK(left.size() == parts[0].size() + parts[1].size() + parts[2].size());
    CHECK(left.starts_with(parts[0]));
    CHECK(append(parts[0], BitString()) == parts[0]);
    CHECK(append(BitString(), parts[0]) == parts[0]);
  }
}

TEST_CASE("slice takes bits from the middle") {
  const BitString s = bits("1001");
  CHECK(s.slice(1, 1) == bits("0"));
  CHECK(s.slice(0, 4) == s);
  CHECK(s.slice(4, 0).empty());
  CHECK_THROWS_AS(s.slice(3, 2), std::out_of_range);
  const std::string wide = std::string(60, '0') + "10110" + std::string(20, '1');
  CHECK(bits(wide).slice(60, 5) == bits("10110"));
}

TEST_CASE("equal strings hash equally and tails stay clean") {
  BitString a = bits("1");
  a.append(bits("0"));
  BitString b = bits("10");
  CHECK(a == b);
  CHECK(a.hash() == b.hash());
  CHECK(bits("10") != bits("100"));
}

TEST_CASE("rand_bits is determined by the seed") {
  RandomSource a(42);
  RandomSource b(42);
  const BitString x = a.rand_bits(4);
  CHECK(x.size() == 4);
  CHECK(x == b.rand_bits(4));
  RandomSource c(43);
  std::set<std::string> seen;
  for (int i = 0; i < 16; ++i) seen.insert(c.rand_bits(64).to_string());
  CHECK(seen.size() == 16);
}

TEST_CASE("rand_bits rejects zero bits") {
  RandomSource rng(1);
  CHECK_THROWS_AS(rng.rand_bits(0), std::invalid_argument);
}

TEST_CASE("single bits are fair") {
  RandomSource rng(2024);
  constexpr int kDraws = 1000000;
  int ones = 0;
  for (int i = 0; i < kDraws; ++i) ones += rng.rand_bits(1)[0] ? 1 : 0;
  const double fraction = static_cast<double>(ones) / kDraws;
  CHECK(fraction >= 0.497);
  CHECK(fraction <= 0.503);
}

TEST_CASE("successive draws advance the stream without reuse") {
  RandomSource rng(9);
  const BitString first = rng.rand_bits(8);
  const BitString second = rng.rand_bits(8);
  CHECK(rng.bits_consumed() == 16);

  RandomSource replay(9);
  const BitString both = replay.rand_bits(16);
  CHECK(append(first, second) == both);
}

TEST_CASE("uniform_below stays in range and hits every value") {
  RandomSource rng(5);
  std::vector<int> hits(7, 0);
  for (int i = 0; i < 7000; ++i) {
    const auto v = rng.uniform_below(7);
    REQUIRE(v < 7);
    ++hits[v];
  }
  for (int h : hits) CHECK(h > 800);
  CHECK(rng.uniform_below(1) == 0);
}

TEST_CASE("derived seeds differ per index and are stable") {
  using exactcount::derive_seed;
  CHECK(derive_seed(1, {2, 3}) == derive_seed(1, {2, 3}));
  std::set<std::uint64_t> seeds;
  for (std::uint64_t n : {10, 100, 1000}) {
    for (std::uint64_t t = 0; t < 50; ++t) seeds.insert(derive_seed(7, {n, t}));
  }
  CHECK(seeds.size() == 150);
  CHECK(derive_seed(1, {2, 3}) != derive_seed(1, {3, 2}));
  CHECK(derive_seed(1, {2}) != derive_seed(2, {2}));
}
