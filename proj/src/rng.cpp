#include "pgmrf/rng.hpp"

#include <cmath>
#include <numbers>

namespace pgmrf {

namespace {

constexpr std::uint32_t kPhiloxW0 = 0x9E3779B9;
constexpr std::uint32_t kPhiloxW1 = 0xBB67AE85;
constexpr std::uint32_t kPhiloxM0 = 0xD2511F53;
constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& lo, std::uint32_t& hi) {
  const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
  lo = static_cast<std::uint32_t>(p);
  hi = static_cast<std::uint32_t>(p >> 32);
}

}  // namespace

std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> ctr,
                                        std::array<std::uint32_t, 2> key) {
  for (int round = 0; round < 10; ++round) {
    std::uint32_t lo0, hi0, lo1, hi1;
    mulhilo(kPhiloxM0, ctr[0], lo0, hi0);
    mulhilo(kPhiloxM1, ctr[2], lo1, hi1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    key[0] += kPhiloxW0;
    key[1] += kPhiloxW1;
  }
  return ctr;
}

RngStream::RngStream(std::uint64_t seed, std::uint32_t iteration, std::uint64_t site,
                     StreamTag tag)
    : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
      counter_{0u, static_cast<std::uint32_t>(site),
               (static_cast<std::uint32_t>(tag) << 24) |
                   (static_cast<std::uint32_t>(site >> 32) & 0x00FFFFFFu),
               iteration} {}

void RngStream::refill() {
  buffer_ = philox4x32(counter_, key_);
  ++counter_[0];
  pos_ = 0;
}

std::uint32_t RngStream::next_u32() {
  if (pos_ == 4) refill();
  ++draws_;
  return buffer_[pos_++];
}

double RngStream::uniform() {
  const std::uint64_t a = next_u32() >> 5;  // 27 bits
  const std::uint64_t b = next_u32() >> 6;  // 26 bits
  // (k + 0.5) / 2^53 keeps the result strictly inside (0, 1).
  return (static_cast<double>((a << 26) | b) + 0.5) * 0x1.0p-53;
}

double RngStream::normal() {
  const double u1 = uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace pgmrf
