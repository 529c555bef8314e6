#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace dfc {

// Philox4x32-10 counter-based generator. A (seed, stream) pair names an
// independent sequence, so replica r of a run simply uses stream r.
class Philox4x32 {
 public:
  using result_type = std::uint64_t;
  using Block = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  Philox4x32(std::uint64_t seed = 0, std::uint64_t stream = 0)
      : key_{std::uint32_t(seed), std::uint32_t(seed >> 32)},
        ctr_{0, 0, std::uint32_t(stream), std::uint32_t(stream >> 32)} {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() {
    if (pos_ >= 4) refill();
    const std::uint64_t lo = buf_[pos_++];
    const std::uint64_t hi = buf_[pos_++];
    return lo | (hi << 32);
  }

  // uniform on the closed interval [0,1]
  double closed01() { return double((*this)() >> 11) * (1.0 / 9007199254740991.0); }
  // uniform on [0,1)
  double open01() { return double((*this)() >> 11) * (1.0 / 9007199254740992.0); }

  static Block bijection(Block ctr, Key key) {
    for (int r = 0; r < 10; ++r) {
      if (r > 0) {
        key[0] += 0x9E3779B9u;
        key[1] += 0xBB67AE85u;
      }
      const std::uint64_t p0 = std::uint64_t(0xD2511F53u) * ctr[0];
      const std::uint64_t p1 = std::uint64_t(0xCD9E8D57u) * ctr[2];
      ctr = {std::uint32_t(p1 >> 32) ^ ctr[1] ^ key[0], std::uint32_t(p1), std::uint32_t(p0 >> 32) ^ ctr[3] ^ key[1],
             std::uint32_t(p0)};
    }
    return ctr;
  }

 private:
  void refill() {
    buf_ = bijection(ctr_, key_);
    if (++ctr_[0] == 0) ++ctr_[1];
    pos_ = 0;
  }

  Key key_;
  Block ctr_;
  Block buf_{};
  int pos_ = 4;
};

}  // namespace dfc
