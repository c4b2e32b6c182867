#pragma once

#include <array>
#include <cstdint>

namespace spinterf {

inline constexpr const char* kRngAlgorithm = "philox4x32-10";

/// Philox4x32 with 10 rounds (Salmon et al., SC'11). Stateless block function.
std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> counter, std::array<std::uint32_t, 2> key);

/// Counter-based stream: key = seed, counter = (block index, stream id).
/// Distinct (seed, stream) pairs give independent sequences, so parallel
/// workers never share state.
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t stream);

  std::uint32_t next_u32();
  std::uint64_t next_u64();
  /// Uniform on [0, 1) with 53 random bits.
  double uniform();

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream() const { return stream_; }

 private:
  void refill();

  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t block_ = 0;
  std::array<std::uint32_t, 4> buffer_{};
  int used_ = 4;
};

}  // namespace spinterf
