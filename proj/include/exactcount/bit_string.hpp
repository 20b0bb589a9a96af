#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

namespace exactcount {

// Variable-length binary string, packed 64 bits per word, most significant
// bit first. With that packing, comparing masked words as unsigned integers
// is the same as comparing the bits lexicographically. Bits beyond size() in
// the last word are always zero.
class BitString {
 public:
  BitString() = default;

  // Parses a string of '0'/'1' characters; throws std::invalid_argument on
  // any other character.
  static BitString from_string(std::string_view bits);

  std::size_t size() const noexcept { return size_; }
  bool empty() const noexcept { return size_ == 0; }

  // 0-based bit access.
  bool operator[](std::size_t i) const noexcept {
    return (words_[i / 64] >> (63 - i % 64)) & 1U;
  }

  void push_back(bool bit);
  BitString& append(const BitString& tail);

  // Bits [pos, pos + count); throws std::out_of_range past the end.
  BitString slice(std::size_t pos, std::size_t count) const;

  bool starts_with(const BitString& prefix) const noexcept;

  std::string to_string() const;
  std::size_t hash() const noexcept;

  friend bool operator==(const BitString& a, const BitString& b) noexcept {
    return a.size_ == b.size_ && a.words_ == b.words_;
  }

 private:
  friend bool lex_precedes(const BitString& a, const BitString& b) noexcept;
  friend int compare_prefix(const BitString& a, const BitString& b,
                            std::size_t length) noexcept;

  std::vector<std::uint64_t> words_;
  std::size_t size_ = 0;
};

// Concatenation ab.
BitString append(const BitString& a, const BitString& b);

// Three-way comparison of the first `length` bits of a and b.
// Precondition: length <= min(a.size(), b.size()).
int compare_prefix(const BitString& a, const BitString& b,
                   std::size_t length) noexcept;

// True iff a[1..p] is strictly lexicographically smaller than b[1..p], where
// p = min(|a|, |b|). Equal prefixes (including p = 0) compare false.
bool lex_precedes(const BitString& a, const BitString& b) noexcept;

}  // namespace exactcount

template <>
struct std::hash<exactcount::BitString> {
  std::size_t operator()(const exactcount::BitString& s) const noexcept {
    return s.hash();
  }
};
