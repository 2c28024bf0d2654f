#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "phylink/sha256.hpp"

namespace phylink {

inline Digest hash_pair(const Digest& left, const Digest& right) {
  Sha256 h;
  h.update(left);
  h.update(right);
  return h.finish();
}

enum class Side : std::uint8_t { Left, Right };

/// One rung of an inclusion proof: the sibling digest and which side of the
/// running hash it sits on.
struct ProofStep {
  Digest sibling;
  Side side;

  friend bool operator==(const ProofStep&, const ProofStep&) = default;
};

using MerkleProof = std::vector<ProofStep>;

/// Binary hash tree over a bundle of leaf digests. A level with an odd node
/// count promotes its last node unchanged; nothing is duplicated.
class MerkleTree {
 public:
  explicit MerkleTree(std::vector<Digest> leaves) {
    if (leaves.empty()) throw std::invalid_argument("empty bundle: merkle tree needs leaves");
    levels_.push_back(std::move(leaves));
    while (levels_.back().size() > 1) {
      const auto& below = levels_.back();
      std::vector<Digest> above;
      above.reserve((below.size() + 1) / 2);
      for (std::size_t i = 0; i + 1 < below.size(); i += 2)
        above.push_back(hash_pair(below[i], below[i + 1]));
      if (below.size() % 2 == 1) above.push_back(below.back());
      levels_.push_back(std::move(above));
    }
  }

  std::size_t leaf_count() const { return levels_.front().size(); }
  const std::vector<Digest>& leaves() const { return levels_.front(); }
  const Digest& root() const { return levels_.back().front(); }

  /// Sibling path from the given leaf up to the root. Promotion levels add
  /// no step, so proofs over non-power-of-two bundles are simply shorter.
  MerkleProof proof(std::size_t leaf_index) const {
    if (leaf_index >= leaf_count()) throw std::out_of_range("leaf index outside bundle");
    MerkleProof path;
    std::size_t i = leaf_index;
    for (std::size_t level = 0; level + 1 < levels_.size(); ++level) {
      const auto& nodes = levels_[level];
      bool promoted = (nodes.size() % 2 == 1) && (i == nodes.size() - 1);
      if (promoted) {
        i = nodes.size() / 2;  // carried up unchanged, lands after all the pairs
      } else {
        std::size_t sib = i ^ 1;
        path.push_back({nodes[sib], i % 2 == 0 ? Side::Right : Side::Left});
        i /= 2;
      }
    }
    return path;
  }

 private:
  std::vector<std::vector<Digest>> levels_;
};

inline Digest merkle_root(const std::vector<Digest>& leaves) { return MerkleTree(leaves).root(); }

inline bool verify_proof(const Digest& leaf, const MerkleProof& proof, const Digest& root) {
  Digest h = leaf;
  for (const ProofStep& step : proof)
    h = step.side == Side::Left ? hash_pair(step.sibling, h) : hash_pair(h, step.sibling);
  return h == root;
}

}  // namespace phylink
