#pragma once

#include <bit>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "phylink/merkle.hpp"
#include "phylink/sha256.hpp"

namespace phylink {

/// Block header: the merkle root representing the bundled transactions, the
/// tuned nonce, and the hash of the previous block's header.
struct Block {
  Digest merkle_root;
  std::uint64_t nonce = 0;
  Digest prev_block_hash;  // all zero for the first block

  friend bool operator==(const Block&, const Block&) = default;
};

/// merkle root (32) || nonce (8, big-endian) || prev block hash (32).
inline Bytes block_bytes(const Block& b) {
  Bytes out;
  out.reserve(72);
  out.insert(out.end(), b.merkle_root.bytes.begin(), b.merkle_root.bytes.end());
  for (int shift = 56; shift >= 0; shift -= 8)
    out.push_back(static_cast<std::uint8_t>(b.nonce >> shift));
  out.insert(out.end(), b.prev_block_hash.bytes.begin(), b.prev_block_hash.bytes.end());
  return out;
}

inline Digest block_hash(const Block& b) { return sha256(block_bytes(b)); }

inline unsigned leading_zero_bits(const Digest& d) {
  unsigned zeros = 0;
  for (std::uint8_t byte : d.bytes) {
    if (byte == 0) {
      zeros += 8;
      continue;
    }
    zeros += static_cast<unsigned>(std::countl_zero(byte));
    break;
  }
  return zeros;
}

inline constexpr unsigned kDefaultDifficultyBits = 16;

/// The linkage requirement: the hash's most significant difficulty_bits are
/// all zero (big-endian bit order).
inline bool meets_difficulty(const Digest& d, unsigned difficulty_bits) {
  if (difficulty_bits > 256) throw std::invalid_argument("difficulty exceeds digest width");
  return leading_zero_bits(d) >= difficulty_bits;
}

struct MinedBlock {
  Block block;
  std::uint64_t attempts = 0;  // nonces hashed, successful one included
};

/// Tunes the nonce by ascending scan from nonce_start and returns the first
/// block whose hash clears the difficulty, with the attempt count.
inline MinedBlock mine_block(const Digest& merkle_root, const Digest& prev_block_hash,
                             unsigned difficulty_bits = kDefaultDifficultyBits,
                             std::uint64_t nonce_start = 0) {
  if (difficulty_bits > 256) throw std::invalid_argument("difficulty exceeds digest width");
  Block b{merkle_root, nonce_start, prev_block_hash};
  Bytes header = block_bytes(b);
  std::uint64_t nonce = nonce_start;
  std::uint64_t attempts = 0;
  while (true) {
    ++attempts;
    for (int i = 0; i < 8; ++i) header[32 + i] = static_cast<std::uint8_t>(nonce >> (56 - 8 * i));
    if (meets_difficulty(sha256(header), difficulty_bits)) {
      b.nonce = nonce;
      return {b, attempts};
    }
    if (nonce == UINT64_MAX) throw std::runtime_error("mining failure: nonce space exhausted");
    ++nonce;
  }
}

/// The chain plus the per-block leaf bundles retained for audit. Value
/// semantics: append returns a new state, existing readers keep theirs.
struct BlockChainState {
  std::vector<Block> blocks;
  unsigned difficulty_bits = kDefaultDifficultyBits;
  std::vector<std::vector<Digest>> bundles;  // leaf digests, one list per block

  std::size_t length() const { return blocks.size(); }
  Digest tip_hash() const { return blocks.empty() ? Digest{} : block_hash(blocks.back()); }

  friend bool operator==(const BlockChainState&, const BlockChainState&) = default;
};

/// Bundles the leaves under a merkle root, mines against the current tip,
/// and returns the extended chain.
inline BlockChainState append_block(const BlockChainState& chain,
                                    const std::vector<Digest>& leaves) {
  if (leaves.empty()) throw std::invalid_argument("empty bundle: a block needs transactions");
  BlockChainState next = chain;
  MinedBlock mined = mine_block(merkle_root(leaves), chain.tip_hash(), chain.difficulty_bits);
  next.blocks.push_back(mined.block);
  next.bundles.push_back(leaves);
  return next;
}

struct ChainCheck {
  bool valid = true;
  std::size_t first_bad_block = 0;
  std::string reason;

  explicit operator bool() const { return valid; }
};

inline ChainCheck chain_failure(std::size_t index, std::string reason) {
  return ChainCheck{false, index, std::move(reason)};
}

/// Checks every block's difficulty and every adjacent linkage; an empty
/// chain is vacuously valid. Merkle roots are taken at face value — a
/// forged root betrays itself by breaking the difficulty or the next link.
inline ChainCheck validate_chain(const BlockChainState& chain) {
  Digest expected_prev{};  // zero
  for (std::size_t i = 0; i < chain.blocks.size(); ++i) {
    const Block& b = chain.blocks[i];
    if (b.prev_block_hash != expected_prev)
      return chain_failure(i, "previous-block hash mismatch");
    Digest h = block_hash(b);
    if (!meets_difficulty(h, chain.difficulty_bits))
      return chain_failure(i, "block hash misses the difficulty target");
    expected_prev = h;
  }
  return {};
}

struct RepairCostReport {
  std::size_t tampered_index = 0;
  std::size_t blocks_remined = 0;
  std::uint64_t total_hash_attempts = 0;
  std::vector<std::uint64_t> per_block_attempts;
};

struct TamperRepair {
  BlockChainState repaired;
  RepairCostReport report;
};

/// What rewriting history costs: replaces the merkle root at block_index,
/// then re-mines that block and every later one, re-linking as it goes. The
/// input chain is left untouched; the repaired copy comes back with the
/// bill. blocks_remined is always length − block_index.
inline TamperRepair tamper_and_repair(const BlockChainState& chain, std::size_t block_index,
                                      const Digest& new_merkle_root) {
  if (block_index >= chain.blocks.size()) throw std::out_of_range("block index outside chain");
  TamperRepair result{chain, {}};
  result.report.tampered_index = block_index;
  result.repaired.blocks[block_index].merkle_root = new_merkle_root;
  Digest prev = block_index == 0 ? Digest{} : block_hash(result.repaired.blocks[block_index - 1]);
  for (std::size_t i = block_index; i < result.repaired.blocks.size(); ++i) {
    MinedBlock mined =
        mine_block(result.repaired.blocks[i].merkle_root, prev, chain.difficulty_bits);
    result.repaired.blocks[i] = mined.block;
    result.report.per_block_attempts.push_back(mined.attempts);
    result.report.total_hash_attempts += mined.attempts;
    ++result.report.blocks_remined;
    prev = block_hash(result.repaired.blocks[i]);
  }
  return result;
}

}  // namespace phylink
