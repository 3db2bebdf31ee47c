#pragma once

#include <cstdint>
#include <limits>

namespace evonet {

// PCG-XSH-RR 64/32, bit-compatible with the reference pcg32_srandom_r /
// pcg32_random_r pair. Satisfies std::uniform_random_bit_generator.
class Pcg32 {
 public:
  using result_type = std::uint32_t;

  // Stream selector matching the reference PCG32_INITIALIZER increment.
  static constexpr std::uint64_t kDefaultStream = 0xda3e39cb94b95bdbULL >> 1;

  explicit Pcg32(std::uint64_t seed = 0, std::uint64_t stream = kDefaultStream) noexcept {
    seed_with(seed, stream);
  }

  void seed_with(std::uint64_t seed, std::uint64_t stream = kDefaultStream) noexcept {
    state_ = 0;
    inc_ = (stream << 1u) | 1u;
    (*this)();
    state_ += seed;
    (*this)();
  }

  result_type operator()() noexcept {
    const std::uint64_t old = state_;
    state_ = old * kMultiplier + inc_;
    const auto xorshifted = static_cast<std::uint32_t>(((old >> 18u) ^ old) >> 27u);
    const auto rot = static_cast<std::uint32_t>(old >> 59u);
    return (xorshifted >> rot) | (xorshifted << ((-rot) & 31u));
  }

  // Two outputs, high word first.
  std::uint64_t next64() noexcept {
    const std::uint64_t hi = (*this)();
    return (hi << 32u) | (*this)();
  }

  // 53-bit uniform double in [0,1); consumes two outputs.
  double next_double() noexcept {
    const std::uint64_t a = (*this)() >> 5u;
    const std::uint64_t b = (*this)() >> 6u;
    return static_cast<double>(a * 67108864ULL + b) * (1.0 / 9007199254740992.0);
  }

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  friend bool operator==(const Pcg32&, const Pcg32&) = default;

 private:
  static constexpr std::uint64_t kMultiplier = 6364136223846793005ULL;
  std::uint64_t state_ = 0;
  std::uint64_t inc_ = 0;
};

}  // namespace evonet
