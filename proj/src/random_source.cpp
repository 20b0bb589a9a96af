#include "exactcount/random_source.hpp"

#include <stdexcept>

namespace exactcount {

namespace {

std::mt19937_64 seeded_engine(std::uint64_t seed) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed),
                    static_cast<std::uint32_t>(seed >> 32)};
  return std::mt19937_64(seq);
}

}  // namespace

RandomSource::RandomSource(std::uint64_t seed)
    : seed_(seed), engine_(seeded_engine(seed)) {}

std::uint64_t RandomSource::uniform_below(std::uint64_t bound) {
  if (bound == 0) throw std::invalid_argument("uniform_below: bound must be positive");
  // Lemire's multiply-shift with rejection: exact for every bound.
  unsigned __int128 product = static_cast<unsigned __int128>(engine_()) * bound;
  auto low = static_cast<std::uint64_t>(product);
  if (low < bound) {
    const std::uint64_t threshold = (0 - bound) % bound;
    while (low < threshold) {
      product = static_cast<unsigned __int128>(engine_()) * bound;
      low = static_cast<std::uint64_t>(product);
    }
  }
  return static_cast<std::uint64_t>(product >> 64);
}

double RandomSource::uniform01() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

bool RandomSource::next_bit() {
  if (bits_left_ == 0) {
    bit_buffer_ = engine_();
    bits_left_ = 64;
  }
  --bits_left_;
  ++bits_consumed_;
  return (bit_buffer_ >> bits_left_) & 1U;
}

BitString RandomSource::rand_bits(std::size_t m) {
  if (m == 0) throw std::invalid_argument("rand_bits: m must be at least 1");
  BitString out;
  for (std::size_t i = 0; i < m; ++i) out.push_back(next_bit());
  return out;
}

std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t master,
                          std::initializer_list<std::uint64_t> indices) noexcept {
  std::uint64_t h = mix64(master);
  for (std::uint64_t index : indices) h = mix64(h ^ mix64(index + 0x632be59bd9b4e019ULL));
  return h;
}

}  // namespace exactcount
