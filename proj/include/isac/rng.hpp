// SPDX-License-Identifier: MIT
// Counter-based random streams.  Every consumer derives an independent
// stream from (master seed, purpose tag, counters), so results do not
// depend on evaluation order or thread count.
#pragma once

#include <complex>
#include <cstdint>

#include "isac/types.hpp"

namespace isac {

// One step of the splitmix64 sequence: advances `state` by the golden-ratio
// increment and returns a mixed output word.
inline std::uint64_t splitmix64_next(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Self-contained uniform/Gaussian generator seeded from a master seed plus
// up to three stream identifiers.  The identifiers are chain-mixed so that
// distinct (purpose, set, draw) tuples give decorrelated streams.
class StreamRng {
 public:
  explicit StreamRng(std::uint64_t master, std::uint64_t id1 = 0,
                     std::uint64_t id2 = 0, std::uint64_t id3 = 0) {
    std::uint64_t h = master;
    (void)splitmix64_next(h);
    h ^= 0xa076'1d64'78bd'642fULL + id1;
    (void)splitmix64_next(h);
    h ^= 0xe703'7ed1'a0b4'28dbULL + id2;
    (void)splitmix64_next(h);
    h ^= 0x8ebc'6af0'9c88'c6e3ULL + id3;
    (void)splitmix64_next(h);
    state_ = h;
  }

  std::uint64_t next_u64() { return splitmix64_next(state_); }

  // Uniform on [0, 1): 53 random mantissa bits.
  double uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // Standard normal via Box-Muller with one cached partner value.
  double gaussian() {
    if (have_cached_) {
      have_cached_ = false;
      return cached_;
    }
    // u1 in (0,1] so that log(u1) is finite.
    double u1 = 1.0 - uniform();
    double u2 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    double ang = 2.0 * pi * u2;
    cached_ = r * std::sin(ang);
    have_cached_ = true;
    return r * std::cos(ang);
  }

  // Circularly-symmetric complex normal with unit total variance,
  // i.e. real and imaginary parts are independent N(0, 1/2).
  cplx cgaussian() {
    double re = gaussian();
    double im = gaussian();
    return cplx(re * inv_sqrt2, im * inv_sqrt2);
  }

 private:
  static constexpr double inv_sqrt2 = 0.70710678118654752440;
  std::uint64_t state_ = 0;
  double cached_ = 0.0;
  bool have_cached_ = false;
};

// Purpose tags keeping unrelated random streams disjoint under one master
// seed.  Values are arbitrary but frozen: changing them changes all
// seeded outputs.
enum class RngPurpose : std::uint64_t {
  large_scale = 0x11,
  small_scale = 0x22,
  radar_symbols = 0x33,
  sensing_noise = 0x44,
  oracle = 0x55,
};

inline StreamRng make_stream(std::uint64_t master, RngPurpose purpose,
                             std::uint64_t id2 = 0, std::uint64_t id3 = 0) {
  return StreamRng(master, static_cast<std::uint64_t>(purpose), id2, id3);
}

}  // namespace isac
