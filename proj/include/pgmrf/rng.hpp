#pragma once

#include <array>
#include <cstdint>

namespace pgmrf {

/// Which logical draw family a stream belongs to. Mixed into the counter so
/// that, e.g., the U draw and the X draw of the same site never collide.
enum class StreamTag : std::uint8_t {
  U = 1,
  W = 2,
  X = 3,
  Init = 4,
  Simulate = 5,
  Mask = 6,
  Scene = 7,
  Test = 200,
};

/// Philox4x32-10 block function (Salmon et al., "Parallel random numbers: as
/// easy as 1, 2, 3", SC'11).
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key);

/// Deterministic per-site random stream. Every value it produces is a pure
/// function of (seed, iteration, site, tag, draw number), so a parallel sweep
/// produces the same chain as a serial one regardless of visiting order or
/// worker count.
///
/// Counter layout: word 0 = block index, word 1 = site low 32 bits,
/// word 2 = tag << 24 | site bits 32..55, word 3 = iteration.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint32_t iteration, std::uint64_t site, StreamTag tag);

  std::uint32_t next_u32();
  /// Uniform on the open interval (0, 1) with 53-bit resolution.
  double uniform();
  /// Standard normal via Box-Muller (one variate per pair of uniforms).
  double normal();

  std::uint64_t draws() const { return draws_; }

 private:
  void refill();

  std::array<std::uint32_t, 2> key_;
  std::array<std::uint32_t, 4> counter_;
  std::array<std::uint32_t, 4> buffer_{};
  unsigned pos_ = 4;
  std::uint64_t draws_ = 0;
};

/// Seed + iteration pair from which a sweep derives one stream per site.
struct RngKey {
  std::uint64_t seed = 0;
  std::uint32_t iteration = 0;

  RngStream stream(std::uint64_t site, StreamTag tag) const {
    return RngStream(seed, iteration, site, tag);
  }
};

}  // namespace pgmrf
