#pragma once

#include <array>
#include <cstdint>

namespace ggl {

// Philox4x32-10 counter-based generator.
//
// Stream layout: key = (seed & 0xffffffff, seed >> 32); the 128-bit counter
// is (block_lo, block_hi, stream_lo, stream_hi). Each block yields four
// 32-bit words consumed in order. Two streams with the same seed and
// different stream ids never overlap.
class Philox4x32 {
 public:
  using Block = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static Block encrypt(Block counter, Key key);
};

struct RngState {
  std::array<std::uint32_t, 2> key{};
  std::array<std::uint32_t, 4> counter{};
  std::array<std::uint32_t, 4> buffer{};
  std::uint32_t position = 4;  // 4 = buffer exhausted
};

class Rng {
 public:
  Rng(std::uint64_t seed, std::uint64_t stream_id = 0);
  explicit Rng(const RngState& state) : state_(state) {}

  std::uint32_t next_u32();
  std::uint64_t next_u64();

  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  /// Standard normal; Box–Muller on two uniforms, returns the cosine branch.
  double normal();
  /// Exp(rate).
  double exponential(double rate);
  /// Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n);

  const RngState& state() const { return state_; }

 private:
  void refill();
  RngState state_;
};

}  // namespace ggl
