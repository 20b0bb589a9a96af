#pragma once

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <random>

#include "exactcount/bit_string.hpp"

namespace exactcount {

// Supplier of uniformly random bits for code generation. The protocol only
// ever asks for fresh bits through this interface, so tests can script them.
class BitSource {
 public:
  virtual ~BitSource() = default;
  // Returns m >= 1 bits; m == 0 throws std::invalid_argument.
  virtual BitString rand_bits(std::size_t m) = 0;
};

// Seeded stream of random bits and bounded integers for one run.
//
// The engine is std::mt19937_64, whose output sequence is fixed by the C++
// standard, and bounded draws use our own rejection sampler rather than
// std::uniform_int_distribution (whose algorithm is implementation-defined).
// Together that makes a run bit-identical across standard libraries.
//
// Bits handed out by rand_bits() are cut from a dedicated 64-bit buffer,
// most significant bit first; uniform_below() always draws whole words.
class RandomSource final : public BitSource {
 public:
  explicit RandomSource(std::uint64_t seed);

  std::uint64_t seed() const noexcept { return seed_; }

  std::uint64_t next_u64() { return engine_(); }

  // Uniform in [0, bound); bound must be positive.
  std::uint64_t uniform_below(std::uint64_t bound);

  // Uniform in [0, 1) with 53 random bits.
  double uniform01();

  bool next_bit();
  BitString rand_bits(std::size_t m) override;

  // Number of bits consumed through next_bit()/rand_bits() so far.
  std::uint64_t bits_consumed() const noexcept { return bits_consumed_; }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
  std::uint64_t bit_buffer_ = 0;
  unsigned bits_left_ = 0;
  std::uint64_t bits_consumed_ = 0;
};

// splitmix64 finalizer; a bijection on 64-bit values.
std::uint64_t mix64(std::uint64_t x) noexcept;

// Seed of an independent stream, derived from a master seed and any number
// of indices (e.g. trial number, or population size and trial number).
std::uint64_t derive_seed(std::uint64_t master,
                          std::initializer_list<std::uint64_t> indices) noexcept;

}  // namespace exactcount
