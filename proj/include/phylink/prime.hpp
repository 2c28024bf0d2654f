#pragma once

#include <cstdint>

#include "phylink/bigint.hpp"
#include "phylink/rng.hpp"

namespace phylink {

namespace detail {

inline constexpr std::uint32_t kSmallPrimes[] = {
    2,   3,   5,   7,   11,  13,  17,  19,  23,  29,  31,  37,  41,  43,  47,  53,  59,  61,
    67,  71,  73,  79,  83,  89,  97,  101, 103, 107, 109, 113, 127, 131, 137, 139, 149, 151,
    157, 163, 167, 173, 179, 181, 191, 193, 197, 199, 211, 223, 227, 229, 233, 239, 241, 251};

/// Deterministic Miller-Rabin witness: assembled from a SplitMix64 stream
/// seeded by the candidate itself, reduced into [2, n-2].
inline BigInt mr_witness(const BigInt& n, SplitMix64& stream) {
  const BigInt span = n - 3;  // witnesses live in [2, n-2]
  std::size_t words = (boost::multiprecision::msb(span) / 64) + 1;
  BigInt w = 0;
  for (std::size_t i = 0; i < words; ++i) {
    w <<= 64;
    w |= stream.next();
  }
  return 2 + (w % span);
}

}  // namespace detail

/// Miller-Rabin primality test. Witnesses follow a schedule derived from n
/// alone, so results never depend on call order or global state. Primes are
/// never rejected; a composite survives with probability at most 4^-rounds.
inline bool is_probable_prime(const BigInt& n, unsigned rounds = 24) {
  if (rounds < 1) throw std::invalid_argument("rounds must be >= 1");
  if (n < 2) return false;
  for (std::uint32_t p : detail::kSmallPrimes) {
    if (n == p) return true;
    if (n % p == 0) return false;
  }
  if (n < 65536) return true;  // any composite here has a factor <= 251, ruled out above

  // n - 1 = d * 2^r with d odd
  BigInt d = n - 1;
  unsigned r = 0;
  while (!boost::multiprecision::bit_test(d, 0)) {
    d >>= 1;
    ++r;
  }

  SplitMix64 stream(mix64(static_cast<std::uint64_t>(n & 0xffffffffffffffffULL) ^
                          static_cast<std::uint64_t>(boost::multiprecision::msb(n))));
  for (unsigned round = 0; round < rounds; ++round) {
    BigInt a = detail::mr_witness(n, stream);
    BigInt x = mod_pow(a, d, n);
    if (x == 1 || x == n - 1) continue;
    bool composite = true;
    for (unsigned i = 0; i + 1 < r; ++i) {
      x = (x * x) % n;
      if (x == n - 1) {
        composite = false;
        break;
      }
    }
    if (composite) return false;
  }
  return true;
}

/// First probable prime >= candidate (ascending scan).
inline BigInt next_prime_at_or_after(BigInt candidate, unsigned rounds = 24) {
  if (candidate <= 2) return 2;
  if (!boost::multiprecision::bit_test(candidate, 0)) ++candidate;
  while (!is_probable_prime(candidate, rounds)) candidate += 2;
  return candidate;
}

}  // namespace phylink
