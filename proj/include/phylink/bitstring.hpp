#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "phylink/hex.hpp"
#include "phylink/rng.hpp"

namespace phylink {

/// Fixed-length bit sequence, packed 8 bits per byte. Bit 0 is the most
/// significant: when a bitstring is read as an unsigned integer, bit 0
/// contributes 2^(size-1). Readouts, dumps and key derivation all share
/// this convention.
class Bitstring {
 public:
  Bitstring() = default;

  explicit Bitstring(std::size_t nbits) : nbits_(nbits), words_((nbits + 7) / 8, 0) {}

  static Bitstring random(std::size_t nbits, SplitMix64& rng) {
    Bitstring bs(nbits);
    for (std::size_t i = 0; i < bs.words_.size(); ++i)
      bs.words_[i] = static_cast<std::uint8_t>(rng.next());
    bs.mask_tail();
    return bs;
  }

  std::size_t size() const { return nbits_; }
  bool empty() const { return nbits_ == 0; }

  bool bit(std::size_t i) const {
    check_index(i);
    return (words_[i >> 3] >> (7 - (i & 7))) & 1;
  }

  void set_bit(std::size_t i, bool v) {
    check_index(i);
    std::uint8_t mask = static_cast<std::uint8_t>(1u << (7 - (i & 7)));
    if (v)
      words_[i >> 3] |= mask;
    else
      words_[i >> 3] &= static_cast<std::uint8_t>(~mask);
  }

  void flip(std::size_t i) { set_bit(i, !bit(i)); }

  Bitstring complemented() const {
    Bitstring out = *this;
    for (auto& w : out.words_) w = static_cast<std::uint8_t>(~w);
    out.mask_tail();
    return out;
  }

  /// Packed big-endian bytes; unused low bits of the final byte are zero.
  const Bytes& packed_bytes() const { return words_; }

  static Bitstring from_packed_bytes(const Bytes& bytes, std::size_t nbits) {
    if (bytes.size() != (nbits + 7) / 8) throw std::invalid_argument("byte count does not match bit length");
    Bitstring bs(nbits);
    bs.words_ = bytes;
    bs.mask_tail();
    return bs;
  }

  friend bool operator==(const Bitstring&, const Bitstring&) = default;

  friend std::size_t hamming_distance(const Bitstring& a, const Bitstring& b) {
    if (a.nbits_ != b.nbits_) throw std::invalid_argument("hamming distance requires equal lengths");
    std::size_t dist = 0;
    for (std::size_t i = 0; i < a.words_.size(); ++i)
      dist += static_cast<std::size_t>(__builtin_popcount(a.words_[i] ^ b.words_[i]));
    return dist;
  }

 private:
  void check_index(std::size_t i) const {
    if (i >= nbits_) throw std::out_of_range("bit index out of range");
  }

  void mask_tail() {
    if (nbits_ % 8 != 0 && !words_.empty())
      words_.back() &= static_cast<std::uint8_t>(0xff << (8 - nbits_ % 8));
  }

  std::size_t nbits_ = 0;
  Bytes words_;
};

}  // namespace phylink
