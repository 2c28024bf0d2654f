#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <optional>
#include <string>
#include <string_view>

#include "phylink/bitstring.hpp"
#include "phylink/hex.hpp"
#include "phylink/sha256.hpp"

namespace phylink {

using BigInt = boost::multiprecision::cpp_int;

inline BigInt bigint_from_bytes_be(const std::uint8_t* data, std::size_t len) {
  BigInt v = 0;
  for (std::size_t i = 0; i < len; ++i) {
    v <<= 8;
    v |= data[i];
  }
  return v;
}

inline BigInt bigint_from_bytes_be(const Bytes& bytes) {
  return bigint_from_bytes_be(bytes.data(), bytes.size());
}

/// Minimal big-endian magnitude; zero encodes as an empty byte string.
inline Bytes bigint_to_bytes_be(const BigInt& v) {
  if (v < 0) throw std::invalid_argument("negative values have no byte encoding");
  Bytes out;
  BigInt t = v;
  while (t > 0) {
    out.push_back(static_cast<std::uint8_t>(t & 0xff));
    t >>= 8;
  }
  std::reverse(out.begin(), out.end());
  return out;
}

/// Lowercase hex with no leading zeros; zero is "0".
inline std::string bigint_to_hex(const BigInt& v) {
  if (v == 0) return "0";
  Bytes bytes = bigint_to_bytes_be(v);
  std::string h = to_hex(bytes);
  if (h.size() > 1 && h[0] == '0') h.erase(0, 1);
  return h;
}

inline BigInt bigint_from_hex(std::string_view h) {
  if (h.empty()) throw std::invalid_argument("empty hex integer");
  BigInt v = 0;
  for (char c : h) {
    int nib = hex_nibble(c);
    if (nib < 0) throw std::invalid_argument("invalid hex character in integer");
    v <<= 4;
    v |= nib;
  }
  return v;
}

/// The unsigned integer whose binary expansion is the bitstring (bit 0 most
/// significant). This is how a Chip-ID enters key derivation.
inline BigInt bigint_from_bits(const Bitstring& bits) {
  BigInt v = bigint_from_bytes_be(bits.packed_bytes());
  std::size_t slack = bits.packed_bytes().size() * 8 - bits.size();
  return v >> slack;
}

inline BigInt bigint_from_digest(const Digest& d) {
  return bigint_from_bytes_be(d.bytes.data(), d.bytes.size());
}

struct EgcdResult {
  BigInt gcd;
  BigInt x;  // coefficient on a
  BigInt y;  // coefficient on b
};

/// Extended Euclid: gcd(a, b) = a*x + b*y.
inline EgcdResult egcd(BigInt a, BigInt b) {
  BigInt x0 = 1, x1 = 0, y0 = 0, y1 = 1;
  while (b != 0) {
    BigInt q = a / b;
    BigInt r = a - q * b;
    a = b;
    b = r;
    BigInt nx = x0 - q * x1;
    x0 = x1;
    x1 = nx;
    BigInt ny = y0 - q * y1;
    y0 = y1;
    y1 = ny;
  }
  return {a, x0, y0};
}

/// a^-1 mod m, or nullopt when gcd(a, m) != 1.
inline std::optional<BigInt> mod_inverse(const BigInt& a, const BigInt& m) {
  if (m <= 0) throw std::invalid_argument("modulus must be positive");
  EgcdResult r = egcd(((a % m) + m) % m, m);
  if (r.gcd != 1) return std::nullopt;
  BigInt inv = r.x % m;
  if (inv < 0) inv += m;
  return inv;
}

/// base^exp mod m by binary square-and-multiply.
inline BigInt mod_pow(BigInt base, BigInt exp, const BigInt& m) {
  if (m <= 0) throw std::invalid_argument("modulus must be positive");
  if (exp < 0) throw std::invalid_argument("negative exponent");
  if (m == 1) return 0;
  base %= m;
  if (base < 0) base += m;
  BigInt result = 1;
  while (exp > 0) {
    if (boost::multiprecision::bit_test(exp, 0)) result = (result * base) % m;
    base = (base * base) % m;
    exp >>= 1;
  }
  return result;
}

using boost::multiprecision::gcd;

}  // namespace phylink
