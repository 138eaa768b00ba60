#pragma once

// Counter-based random numbers.
//
// The engine is Philox4x64-10 (Salmon et al., "Parallel random numbers: as
// easy as 1, 2, 3", SC11): a 256-bit counter is pushed through ten rounds of
// a multiply/xor Feistel network keyed by 128 bits. We key it with
// (seed, stream), so every (seed, stream) pair is an independent,
// reproducible stream and splitting is free. Within a stream the counter
// starts at zero and each block yields four 64-bit words.

#include <array>
#include <cstdint>
#include <limits>

namespace combsum {

class Philox4x64 {
 public:
  using result_type = std::uint64_t;
  using Counter = std::array<std::uint64_t, 4>;
  using Key = std::array<std::uint64_t, 2>;

  explicit Philox4x64(std::uint64_t seed, std::uint64_t stream = 0) noexcept
      : key_{seed, stream} {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()() noexcept {
    if (pos_ == 4) {
      buffer_ = block(counter_, key_);
      increment();
      pos_ = 0;
    }
    return buffer_[pos_++];
  }

  /// Independent stream with the same seed.
  Philox4x64 split(std::uint64_t stream) const noexcept { return Philox4x64(key_[0], stream); }

  std::uint64_t seed() const noexcept { return key_[0]; }
  std::uint64_t stream() const noexcept { return key_[1]; }

  /// The raw bijection: ten keyed rounds applied to one counter block.
  static Counter block(Counter ctr, Key key) noexcept;

 private:
  void increment() noexcept {
    for (auto& word : counter_) {
      if (++word != 0) break;
    }
  }

  Key key_;
  Counter counter_{0, 0, 0, 0};
  Counter buffer_{};
  int pos_ = 4;
};

/// Uniform on [0, 1) with 53 random bits.
inline double uniform01(Philox4x64& rng) noexcept {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Uniform on (0, 1]; safe as a log argument.
inline double uniform01_open_left(Philox4x64& rng) noexcept {
  return static_cast<double>((rng() >> 11) + 1) * 0x1.0p-53;
}

/// Unbiased integer in [0, bound) (Lemire's multiply-and-reject method).
std::uint64_t uniform_index(Philox4x64& rng, std::uint64_t bound) noexcept;

double standard_exponential(Philox4x64& rng) noexcept;

/// Marsaglia polar method; the second variate is discarded so draws stay a
/// pure function of the stream position.
double standard_normal(Philox4x64& rng) noexcept;

/// Gamma(shape, 1) by Marsaglia–Tsang, with the U^{1/shape} boost for shape < 1.
double standard_gamma(Philox4x64& rng, double shape) noexcept;

}  // namespace combsum
