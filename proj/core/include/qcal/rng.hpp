#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace qcal {

/// Philox4x64-10 counter-based generator (Salmon et al. 2011).
///
/// The key is (seed, stream); the 256-bit counter starts at zero and advances
/// by one per block of four outputs. Distinct streams are statistically
/// independent, so trajectory i of an ensemble owns stream i regardless of
/// which worker runs it. Satisfies UniformRandomBitGenerator.
class Philox4x64 {
 public:
  using result_type = std::uint64_t;
  using Block = std::array<std::uint64_t, 4>;
  using Key = std::array<std::uint64_t, 2>;
  __extension__ typedef unsigned __int128 u128;

  Philox4x64(std::uint64_t seed, std::uint64_t stream) : key_{seed, stream} {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() {
    if (index_ == 4) {
      buffer_ = block(counter_, key_);
      increment(counter_);
      index_ = 0;
    }
    return buffer_[index_++];
  }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  /// The raw bijection: ten rounds of Philox4x64 applied to `counter` under `key`.
  static Block block(const Block& counter, const Key& key) {
    constexpr std::uint64_t kMul0 = 0xD2E7470EE14C6C93ULL;
    constexpr std::uint64_t kMul1 = 0xCA5A826395121157ULL;
    constexpr std::uint64_t kWeyl0 = 0x9E3779B97F4A7C15ULL;
    constexpr std::uint64_t kWeyl1 = 0xBB67AE8584CAA73BULL;
    std::uint64_t c0 = counter[0], c1 = counter[1], c2 = counter[2], c3 = counter[3];
    std::uint64_t k0 = key[0], k1 = key[1];
    for (int round = 0; round < 10; ++round) {
      if (round > 0) {
        k0 += kWeyl0;
        k1 += kWeyl1;
      }
      const u128 p0 = static_cast<u128>(kMul0) * c0;
      const u128 p1 = static_cast<u128>(kMul1) * c2;
      const auto hi0 = static_cast<std::uint64_t>(p0 >> 64), lo0 = static_cast<std::uint64_t>(p0);
      const auto hi1 = static_cast<std::uint64_t>(p1 >> 64), lo1 = static_cast<std::uint64_t>(p1);
      c0 = hi1 ^ c1 ^ k0;
      c1 = lo1;
      c2 = hi0 ^ c3 ^ k1;
      c3 = lo0;
    }
    return {c0, c1, c2, c3};
  }

 private:
  static void increment(Block& c) {
    for (auto& word : c) {
      if (++word != 0) break;
    }
  }

  Key key_;
  Block counter_{};
  Block buffer_{};
  int index_ = 4;
};

}  // namespace qcal
