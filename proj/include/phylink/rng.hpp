#pragma once

#include <cstdint>

#include "phylink/hex.hpp"

namespace phylink {

/// Counter-based 64-bit generator (SplitMix64). Fully specified by its seed,
/// so every stream is reproducible across platforms and compilers; the
/// standard library distributions are avoided for the same reason.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  /// Uniform draw in [0, bound) via the fixed-point multiply trick.
  std::uint64_t below(std::uint64_t bound) {
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(next()) * bound) >> 64);
  }

  /// True with probability p. p <= 0 is never, p >= 1 is always.
  bool bernoulli(double p) {
    if (p <= 0.0) return false;
    if (p >= 1.0) return true;
    return static_cast<double>(next()) < p * 18446744073709551616.0;
  }

  Bytes bytes(std::size_t n) {
    Bytes out(n);
    std::size_t i = 0;
    while (i < n) {
      std::uint64_t w = next();
      for (int b = 0; b < 8 && i < n; ++b, ++i) out[i] = static_cast<std::uint8_t>(w >> (8 * b));
    }
    return out;
  }

 private:
  std::uint64_t state_;
};

/// SplitMix64 finalizer as a standalone mixing function.
inline std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Derives an independent stream seed from a master seed and a stream index.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  return mix64(master + 0x9e3779b97f4a7c15ULL * (index + 1));
}

}  // namespace phylink
