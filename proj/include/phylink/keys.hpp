#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <variant>
#include <vector>

#include "phylink/bigint.hpp"
#include "phylink/chip.hpp"
#include "phylink/prime.hpp"
#include "phylink/sha256.hpp"

namespace phylink {

enum class Scheme : std::uint8_t { Rsa = 1, Elgamal = 2 };

inline const char* scheme_name(Scheme s) { return s == Scheme::Rsa ? "rsa" : "elgamal"; }

struct RsaPublicKey {
  BigInt e;
  BigInt n;

  friend bool operator==(const RsaPublicKey&, const RsaPublicKey&) = default;
};

struct ElgamalPublicKey {
  BigInt p;
  BigInt g;
  BigInt y;

  friend bool operator==(const ElgamalPublicKey&, const ElgamalPublicKey&) = default;
};

/// A logical address: the public half of a chip-derived key pair.
using PublicKey = std::variant<RsaPublicKey, ElgamalPublicKey>;

inline Scheme scheme_of(const PublicKey& pk) {
  return std::holds_alternative<RsaPublicKey>(pk) ? Scheme::Rsa : Scheme::Elgamal;
}

/// Full RSA key pair. p and q are kept for auditing but can be wiped; the
/// secret exponent d and modulus n are all that signing needs afterwards.
struct RsaKeyMaterial {
  BigInt e;
  BigInt n;
  BigInt d;
  std::optional<BigInt> p;
  std::optional<BigInt> q;

  RsaPublicKey public_key() const { return {e, n}; }

  friend bool operator==(const RsaKeyMaterial&, const RsaKeyMaterial&) = default;
};

struct ElgamalKeyMaterial {
  BigInt p;
  BigInt g;
  BigInt x;  // secret
  BigInt y;  // public: g^x mod p

  ElgamalPublicKey public_key() const { return {p, g, y}; }

  friend bool operator==(const ElgamalKeyMaterial&, const ElgamalKeyMaterial&) = default;
};

using KeyMaterial = std::variant<RsaKeyMaterial, ElgamalKeyMaterial>;

inline Scheme scheme_of(const KeyMaterial& km) {
  return std::holds_alternative<RsaKeyMaterial>(km) ? Scheme::Rsa : Scheme::Elgamal;
}

inline PublicKey public_key_of(const KeyMaterial& km) {
  return std::visit([](const auto& k) -> PublicKey { return k.public_key(); }, km);
}

struct RsaSignature {
  BigInt s;

  friend bool operator==(const RsaSignature&, const RsaSignature&) = default;
};

struct ElgamalSignature {
  BigInt r;
  BigInt s;

  friend bool operator==(const ElgamalSignature&, const ElgamalSignature&) = default;
};

using Signature = std::variant<RsaSignature, ElgamalSignature>;

inline Scheme scheme_of(const Signature& sig) {
  return std::holds_alternative<RsaSignature>(sig) ? Scheme::Rsa : Scheme::Elgamal;
}

// ---- canonical byte serialization ----
// Fixed field order with u32 big-endian length prefixes. These bytes feed
// the hash chain, so the layout must never change.

namespace detail {

inline void put_block(Bytes& out, const Bytes& block) {
  std::uint32_t len = static_cast<std::uint32_t>(block.size());
  out.push_back(static_cast<std::uint8_t>(len >> 24));
  out.push_back(static_cast<std::uint8_t>(len >> 16));
  out.push_back(static_cast<std::uint8_t>(len >> 8));
  out.push_back(static_cast<std::uint8_t>(len));
  out.insert(out.end(), block.begin(), block.end());
}

inline void put_field(Bytes& out, const BigInt& v) { put_block(out, bigint_to_bytes_be(v)); }

struct ByteReader {
  const Bytes& data;
  std::size_t pos = 0;

  std::uint8_t u8() {
    if (pos + 1 > data.size()) throw std::invalid_argument("truncated serialized value");
    return data[pos++];
  }

  Bytes raw(std::size_t n) {
    if (pos + n > data.size()) throw std::invalid_argument("truncated serialized value");
    Bytes out(data.begin() + static_cast<std::ptrdiff_t>(pos),
              data.begin() + static_cast<std::ptrdiff_t>(pos + n));
    pos += n;
    return out;
  }

  Bytes block() {
    if (pos + 4 > data.size()) throw std::invalid_argument("truncated serialized value");
    std::uint32_t len = (std::uint32_t(data[pos]) << 24) | (std::uint32_t(data[pos + 1]) << 16) |
                        (std::uint32_t(data[pos + 2]) << 8) | std::uint32_t(data[pos + 3]);
    pos += 4;
    return raw(len);
  }

  BigInt field() {
    Bytes mag = block();
    return bigint_from_bytes_be(mag.data(), mag.size());
  }

  bool done() const { return pos == data.size(); }
};

}  // namespace detail

inline Bytes serialize(const PublicKey& pk) {
  Bytes out;
  out.push_back(static_cast<std::uint8_t>(scheme_of(pk)));
  if (const auto* rsa = std::get_if<RsaPublicKey>(&pk)) {
    detail::put_field(out, rsa->e);
    detail::put_field(out, rsa->n);
  } else {
    const auto& eg = std::get<ElgamalPublicKey>(pk);
    detail::put_field(out, eg.p);
    detail::put_field(out, eg.g);
    detail::put_field(out, eg.y);
  }
  return out;
}

inline PublicKey deserialize_public_key(const Bytes& bytes) {
  detail::ByteReader r{bytes};
  std::uint8_t tag = r.u8();
  PublicKey pk;
  if (tag == static_cast<std::uint8_t>(Scheme::Rsa)) {
    BigInt e = r.field(), n = r.field();
    pk = RsaPublicKey{e, n};
  } else if (tag == static_cast<std::uint8_t>(Scheme::Elgamal)) {
    BigInt p = r.field(), g = r.field(), y = r.field();
    pk = ElgamalPublicKey{p, g, y};
  } else {
    throw std::invalid_argument("unknown public key scheme tag");
  }
  if (!r.done()) throw std::invalid_argument("trailing bytes after public key");
  return pk;
}

inline Bytes serialize(const Signature& sig) {
  Bytes out;
  out.push_back(static_cast<std::uint8_t>(scheme_of(sig)));
  if (const auto* rsa = std::get_if<RsaSignature>(&sig)) {
    detail::put_field(out, rsa->s);
  } else {
    const auto& eg = std::get<ElgamalSignature>(sig);
    detail::put_field(out, eg.r);
    detail::put_field(out, eg.s);
  }
  return out;
}

inline Signature deserialize_signature(const Bytes& bytes) {
  detail::ByteReader r{bytes};
  std::uint8_t tag = r.u8();
  Signature sig;
  if (tag == static_cast<std::uint8_t>(Scheme::Rsa)) {
    sig = RsaSignature{r.field()};
  } else if (tag == static_cast<std::uint8_t>(Scheme::Elgamal)) {
    BigInt rr = r.field(), ss = r.field();
    sig = ElgamalSignature{rr, ss};
  } else {
    throw std::invalid_argument("unknown signature scheme tag");
  }
  if (!r.done()) throw std::invalid_argument("trailing bytes after signature");
  return sig;
}

// ---- key derivation ----

inline constexpr std::uint64_t kDefaultRsaExponent = 65537;  // 1 + 2^16

/// The stated preference is that the two offsets be "prime numbers each
/// other", read here as mutually coprime. Callers may warn; derivation does
/// not reject.
inline bool offsets_mutually_coprime(const BigInt& offset1, const BigInt& offset2) {
  return gcd(offset1, offset2) == 1;
}

inline Digest chip_id_digest(const ChipId& id) { return sha256(id.bits.packed_bytes()); }

/// Derives an RSA pair from a Chip-ID read as a big-endian integer C:
/// p is the first prime at or after C + offset1, q the first prime at or
/// after C + offset2 scanning past p on collision. When e is not coprime
/// with (p-1)(q-1) the scans advance to the next prime pair, q first, then
/// p, alternating until the inverse exists.
inline RsaKeyMaterial derive_rsa_keypair(const ChipId& chip_id, const BigInt& offset1,
                                         const BigInt& offset2,
                                         const BigInt& e = kDefaultRsaExponent) {
  if (chip_id.bits.empty()) throw std::invalid_argument("malformed chip id: no bits");
  if (offset1 < 1 || offset2 < 1) throw std::invalid_argument("offsets must be positive");
  if (e < 1) throw std::invalid_argument("public exponent must be positive");

  const BigInt c = bigint_from_bits(chip_id.bits);
  BigInt p = next_prime_at_or_after(c + offset1);
  BigInt q = next_prime_at_or_after(c + offset2);
  if (q == p) q = next_prime_at_or_after(q + 1);

  BigInt phi = (p - 1) * (q - 1);
  bool advance_q = true;
  while (gcd(e, phi) != 1) {
    if (advance_q) {
      q = next_prime_at_or_after(q + 1);
      if (q == p) q = next_prime_at_or_after(q + 1);
    } else {
      p = next_prime_at_or_after(p + 1);
      if (p == q) p = next_prime_at_or_after(p + 1);
    }
    advance_q = !advance_q;
    phi = (p - 1) * (q - 1);
  }

  RsaKeyMaterial key;
  key.e = e;
  key.n = p * q;
  key.d = *mod_inverse(e, phi);
  key.p = p;
  key.q = q;
  return key;
}

/// True when g generates the full multiplicative group mod p, checked
/// against the supplied distinct prime factors of p-1.
inline bool is_primitive_root(const BigInt& g, const BigInt& p,
                              const std::vector<BigInt>& p_minus_1_factors) {
  if (p < 3 || g <= 1 || g >= p) return false;
  for (const BigInt& f : p_minus_1_factors) {
    if (f <= 1 || (p - 1) % f != 0) throw std::invalid_argument("bad factor of p-1");
    if (mod_pow(g, (p - 1) / f, p) == 1) return false;
  }
  return true;
}

/// ElGamal derivation given the hashed Chip-ID as an integer: the hash is
/// reduced mod p-1 to form the secret x (zero maps to one), and the public
/// key is g^x mod p.
inline ElgamalKeyMaterial elgamal_keypair_from_hash_value(const BigInt& hashed, const BigInt& p,
                                                          const BigInt& g) {
  if (p < 5) throw std::invalid_argument("elgamal group too small: p must be >= 5");
  if (g < 2 || g > p - 2) throw std::invalid_argument("generator out of range");
  BigInt x = hashed % (p - 1);
  if (x < 0) x += p - 1;
  if (x == 0) x = 1;
  ElgamalKeyMaterial key;
  key.p = p;
  key.g = g;
  key.x = x;
  key.y = mod_pow(g, x, p);
  return key;
}

inline ElgamalKeyMaterial derive_elgamal_keypair(const ChipId& chip_id, const BigInt& p,
                                                 const BigInt& g) {
  if (chip_id.bits.empty()) throw std::invalid_argument("malformed chip id: no bits");
  return elgamal_keypair_from_hash_value(bigint_from_digest(chip_id_digest(chip_id)), p, g);
}

/// 256-bit safe prime group with generator 2, used at simulator scale.
/// p = 2q+1 with q prime and p = 3 (mod 8), so 2 is a primitive root.
inline ElgamalPublicKey desk_elgamal_group() {
  static const BigInt p = bigint_from_hex(
      "800000000000000000000000000000000000000000000000000000000003889b");
  return {p, 2, 0};
}

// ---- signing ----

enum class VerifyStatus : std::uint8_t {
  Accept,
  Reject,     // well-formed but wrong
  Malformed,  // components outside the scheme's valid ranges
};

inline bool accepted(VerifyStatus s) { return s == VerifyStatus::Accept; }

inline Signature sign(const Digest& digest, const RsaKeyMaterial& key) {
  BigInt m = bigint_from_digest(digest) % key.n;
  return RsaSignature{mod_pow(m, key.d, key.n)};
}

inline Signature sign(const Digest& digest, const ElgamalKeyMaterial& key) {
  const BigInt pm1 = key.p - 1;
  const BigInt m = bigint_from_digest(digest) % pm1;

  // Ephemeral k is pinned to (digest, secret): no randomness at signing time.
  Bytes seed(digest.bytes.begin(), digest.bytes.end());
  Bytes xb = bigint_to_bytes_be(key.x);
  seed.insert(seed.end(), xb.begin(), xb.end());
  BigInt k = bigint_from_digest(sha256(seed)) % pm1;
  if (k == 0) k = 1;

  std::uint64_t tried = 0;
  while (true) {
    if (BigInt(tried) >= pm1 - 1) throw std::runtime_error("elgamal signing failure: k space exhausted");
    if (gcd(k, pm1) == 1) {
      BigInt r = mod_pow(key.g, k, key.p);
      BigInt kinv = *mod_inverse(k, pm1);
      BigInt s = (kinv * (m - key.x * r)) % pm1;
      if (s < 0) s += pm1;
      if (s != 0) return ElgamalSignature{r, s};
    }
    k += 1;
    if (k > pm1 - 1) k = 1;
    ++tried;
  }
}

inline Signature sign(const Digest& digest, const KeyMaterial& key) {
  return std::visit([&](const auto& k) { return sign(digest, k); }, key);
}

inline VerifyStatus verify(const Digest& digest, const Signature& sig, const PublicKey& pk) {
  if (scheme_of(sig) != scheme_of(pk)) return VerifyStatus::Malformed;
  if (const auto* rsa = std::get_if<RsaPublicKey>(&pk)) {
    const BigInt& s = std::get<RsaSignature>(sig).s;
    if (s < 0 || s >= rsa->n) return VerifyStatus::Malformed;
    BigInt m = bigint_from_digest(digest) % rsa->n;
    return mod_pow(s, rsa->e, rsa->n) == m ? VerifyStatus::Accept : VerifyStatus::Reject;
  }
  const auto& eg = std::get<ElgamalPublicKey>(pk);
  const auto& es = std::get<ElgamalSignature>(sig);
  if (es.r < 1 || es.r >= eg.p) return VerifyStatus::Malformed;
  if (es.s < 1 || es.s >= eg.p - 1) return VerifyStatus::Malformed;
  BigInt m = bigint_from_digest(digest) % (eg.p - 1);
  BigInt lhs = mod_pow(eg.g, m, eg.p);
  BigInt rhs = (mod_pow(eg.y, es.r, eg.p) * mod_pow(es.r, es.s, eg.p)) % eg.p;
  return lhs == rhs ? VerifyStatus::Accept : VerifyStatus::Reject;
}

}  // namespace phylink
