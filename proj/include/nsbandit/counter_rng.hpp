#pragma once

#include <array>
#include <cstdint>

namespace nsbandit {

/// Philox4x32-10 block function from Random123. Stateless: the
/// output is a pure function of (counter, key), which lets every reward
/// X_{k,t} be addressed directly by (arm, time) regardless of which arms a
/// policy happens to pull.
class Philox4x32 {
 public:
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static Counter generate(Counter ctr, Key key) noexcept;
};

/// Converts the top 53 bits of a 64-bit word to a double in [0, 1).
inline double to_unit_interval(std::uint64_t bits) noexcept {
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

/// Per-run noise source. Cheap to copy; holds only the seed.
class NoiseStream {
 public:
  explicit NoiseStream(std::uint64_t seed) noexcept : seed_(seed) {}

  std::uint64_t seed() const noexcept { return seed_; }

  /// Two independent uniforms in [0,1) attached to the (arm, time) cell.
  std::array<double, 2> uniforms(int arm, std::int64_t time) const noexcept;

 private:
  std::uint64_t seed_;
};

}  // namespace nsbandit
