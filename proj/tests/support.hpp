#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

#include "exactcount/bit_string.hpp"
#include "exactcount/random_source.hpp"

namespace testing {

inline exactcount::BitString bits(std::string_view s) {
  return exactcount::BitString::from_string(s);
}

// Hands out a fixed script of bits and fails loudly if the code under test
// asks for more than the script holds.
class ScriptedBits final : public exactcount::BitSource {
 public:
  explicit ScriptedBits(std::string script) : script_(std::move(script)) {}

  exactcount::BitString rand_bits(std::size_t m) override {
    if (m == 0) throw std::invalid_argument("rand_bits(0)");
    if (pos_ + m > script_.size()) throw std::logic_error("bit script exhausted");
    auto out = exactcount::BitString::from_string(std::string_view(script_).substr(pos_, m));
    pos_ += m;
    return out;
  }

  std::size_t used() const { return pos_; }
  bool exhausted() const { return pos_ == script_.size(); }

 private:
  std::string script_;
  std::size_t pos_ = 0;
};

}  // namespace testing
