#pragma once

// Shared fixtures for the test suite: cheap deterministic key material and
// random-value helpers, all driven by explicit seeds.

#include <cstdint>

#include "phylink/bigint.hpp"
#include "phylink/bitstring.hpp"
#include "phylink/keys.hpp"
#include "phylink/rng.hpp"
#include "phylink/sha256.hpp"

namespace testutil {

/// Bitstring spelling out the low `nbits` bits of `value`, most significant
/// first — so bigint_from_bits() reads back exactly `value`.
inline phylink::Bitstring bits_of(std::uint64_t value, std::size_t nbits) {
  phylink::Bitstring bs(nbits);
  for (std::size_t i = 0; i < nbits; ++i)
    bs.set_bit(nbits - 1 - i, (value >> i) & 1);
  return bs;
}

inline phylink::ChipId chip_id_of(std::uint64_t value, std::size_t nbits) {
  return phylink::ChipId{bits_of(value, nbits)};
}

/// Small-modulus RSA pair (64-bit chip value, so n is ~128 bits): fast
/// enough for chain-shaped property tests while keeping real signatures.
inline phylink::RsaKeyMaterial toy_rsa(std::uint64_t seed) {
  phylink::SplitMix64 rng(seed);
  phylink::Bitstring bits = phylink::Bitstring::random(64, rng);
  return phylink::derive_rsa_keypair(phylink::ChipId{bits}, 3, 7);
}

/// Desk-scale ElGamal pair from a random 256-bit chip.
inline phylink::ElgamalKeyMaterial desk_elgamal(std::uint64_t seed) {
  phylink::SplitMix64 rng(seed);
  phylink::Bitstring bits = phylink::Bitstring::random(256, rng);
  phylink::ElgamalPublicKey grp = phylink::desk_elgamal_group();
  return phylink::derive_elgamal_keypair(phylink::ChipId{bits}, grp.p, grp.g);
}

inline phylink::Digest random_digest(phylink::SplitMix64& rng) {
  phylink::Digest d;
  phylink::Bytes b = rng.bytes(32);
  std::copy(b.begin(), b.end(), d.bytes.begin());
  return d;
}

}  // namespace testutil
