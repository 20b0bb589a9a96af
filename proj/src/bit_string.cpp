#include "exactcount/bit_string.hpp"

#include <algorithm>
#include <stdexcept>

namespace exactcount {

namespace {

constexpr std::size_t kWordBits = 64;

std::size_t words_for(std::size_t bits) {
  return (bits + kWordBits - 1) / kWordBits;
}

// Mask keeping the top `bits` bits of a word, 0 < bits <= 64.
std::uint64_t high_mask(std::size_t bits) {
  return bits == kWordBits ? ~std::uint64_t{0} : ~(~std::uint64_t{0} >> bits);
}

}  // namespace

BitString BitString::from_string(std::string_view bits) {
  BitString out;
  out.words_.reserve(words_for(bits.size()));
  for (char c : bits) {
    if (c != '0' && c != '1') {
      throw std::invalid_argument("BitString: expected '0' or '1', got '" +
                                  std::string(1, c) + "'");
    }
    out.push_back(c == '1');
  }
  return out;
}

void BitString::push_back(bool bit) {
  if (size_ % kWordBits == 0) words_.push_back(0);
  if (bit) words_.back() |= std::uint64_t{1} << (63 - size_ % kWordBits);
  ++size_;
}

BitString& BitString::append(const BitString& tail) {
  if (tail.empty()) return *this;
  const std::size_t shift = size_ % kWordBits;
  if (shift == 0) {
    words_.insert(words_.end(), tail.words_.begin(), tail.words_.end());
  } else {
    // Spread each tail word over the free low bits of the current last word
    // and the high bits of the next one.
    for (std::uint64_t w : tail.words_) {
      words_.back() |= w >> shift;
      words_.push_back(w << (kWordBits - shift));
    }
  }
  size_ += tail.size_;
  words_.resize(words_for(size_));
  return *this;
}

BitString BitString::slice(std::size_t pos, std::size_t count) const {
  if (pos > size_ || count > size_ - pos) {
    throw std::out_of_range("BitString::slice: range exceeds length");
  }
  BitString out;
  out.words_.reserve(words_for(count));
  for (std::size_t i = 0; i < count; ++i) out.push_back((*this)[pos + i]);
  return out;
}

bool BitString::starts_with(const BitString& prefix) const noexcept {
  return prefix.size_ <= size_ && compare_prefix(*this, prefix, prefix.size_) == 0;
}

std::string BitString::to_string() const {
  std::string out;
  out.reserve(size_);
  for (std::size_t i = 0; i < size_; ++i) out.push_back((*this)[i] ? '1' : '0');
  return out;
}

std::size_t BitString::hash() const noexcept {
  // splitmix64 finalizer folded over the words.
  std::uint64_t h = 0x9e3779b97f4a7c15ULL ^ size_;
  for (std::uint64_t w : words_) {
    h ^= w + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    h = (h ^ (h >> 30)) * 0xbf58476d1ce4e5b9ULL;
    h = (h ^ (h >> 27)) * 0x94d049bb133111ebULL;
    h ^= h >> 31;
  }
  return static_cast<std::size_t>(h);
}

BitString append(const BitString& a, const BitString& b) {
  BitString out = a;
  out.append(b);
  return out;
}

int compare_prefix(const BitString& a, const BitString& b,
                   std::size_t length) noexcept {
  const std::size_t full = length / kWordBits;
  for (std::size_t i = 0; i < full; ++i) {
    if (a.words_[i] != b.words_[i]) return a.words_[i] < b.words_[i] ? -1 : 1;
  }
  const std::size_t rest = length % kWordBits;
  if (rest == 0) return 0;
  const std::uint64_t mask = high_mask(rest);
  const std::uint64_t wa = a.words_[full] & mask;
  const std::uint64_t wb = b.words_[full] & mask;
  if (wa == wb) return 0;
  return wa < wb ? -1 : 1;
}

bool lex_precedes(const BitString& a, const BitString& b) noexcept {
  return compare_prefix(a, b, std::min(a.size_, b.size_)) < 0;
}

}  // namespace exactcount
