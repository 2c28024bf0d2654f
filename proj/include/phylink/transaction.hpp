#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "phylink/keys.hpp"
#include "phylink/sha256.hpp"

namespace phylink {

/// Placeholder where a genesis unit carries no inherited signature.
struct GenesisMarker {
  friend bool operator==(const GenesisMarker&, const GenesisMarker&) = default;
};

using PrevSignature = std::variant<GenesisMarker, Signature>;

inline constexpr std::uint8_t kGenesisTag = 0x00;

/// One link of an ownership chain: the owner's logical address, the hash
/// handed over by the previous node, and the previous owner's signature.
struct TransactionUnit {
  PublicKey public_key;
  Digest prev_hash;  // all zero for genesis
  PrevSignature prev_signature;

  friend bool operator==(const TransactionUnit&, const TransactionUnit&) = default;
};

inline Bytes serialize(const TransactionUnit& unit) {
  Bytes out;
  detail::put_block(out, serialize(unit.public_key));
  out.insert(out.end(), unit.prev_hash.bytes.begin(), unit.prev_hash.bytes.end());
  if (std::holds_alternative<GenesisMarker>(unit.prev_signature)) {
    detail::put_block(out, Bytes{kGenesisTag});
  } else {
    detail::put_block(out, serialize(std::get<Signature>(unit.prev_signature)));
  }
  return out;
}

inline TransactionUnit deserialize_transaction(const Bytes& bytes) {
  detail::ByteReader r{bytes};
  TransactionUnit unit;
  unit.public_key = deserialize_public_key(r.block());
  Bytes h = r.raw(32);
  std::copy(h.begin(), h.end(), unit.prev_hash.bytes.begin());
  Bytes sig = r.block();
  if (sig.size() == 1 && sig[0] == kGenesisTag) {
    unit.prev_signature = GenesisMarker{};
  } else {
    unit.prev_signature = deserialize_signature(sig);
  }
  if (!r.done()) throw std::invalid_argument("trailing bytes after transaction unit");
  return unit;
}

/// Digest of the canonical unit bytes. The previous signature is part of the
/// input, so each hash commits to the entire history behind it.
inline Digest unit_hash(const TransactionUnit& unit) { return sha256(serialize(unit)); }

/// Both genesis traits present: zero hash and marker signature. One without
/// the other is malformed, not merely non-genesis.
inline bool is_genesis_form(const TransactionUnit& unit) {
  return unit.prev_hash.is_zero() && std::holds_alternative<GenesisMarker>(unit.prev_signature);
}

inline bool is_half_genesis(const TransactionUnit& unit) {
  return !is_genesis_form(unit) &&
         (unit.prev_hash.is_zero() || std::holds_alternative<GenesisMarker>(unit.prev_signature));
}

/// A device-side endpoint: the unit it currently owns plus the secret key
/// authorized to transfer it onward.
struct LogicalNode {
  TransactionUnit unit;
  KeyMaterial secret_key;
};

inline LogicalNode make_genesis(const KeyMaterial& key) {
  return LogicalNode{TransactionUnit{public_key_of(key), Digest{}, GenesisMarker{}}, key};
}

/// What the sender actually signs: the recipient's address concatenated with
/// the handed-over hash. Binding the recipient prevents redirecting a signed
/// transfer to a different key.
inline Digest transfer_message(const PublicKey& recipient, const Digest& handed_hash) {
  Sha256 h;
  h.update(serialize(recipient));
  h.update(handed_hash);
  return h.finish();
}

/// Hands ownership to `recipient`: hashes the sender's unit, signs
/// (recipient ∥ hash) with the sender's secret key, and emits the
/// recipient's new unit.
inline TransactionUnit transfer(const LogicalNode& sender, const PublicKey& recipient) {
  if (public_key_of(sender.secret_key) != sender.unit.public_key)
    throw std::invalid_argument("sender node inconsistent: secret key does not match unit owner");
  Digest h = unit_hash(sender.unit);
  Signature sig = sign(transfer_message(recipient, h), sender.secret_key);
  return TransactionUnit{recipient, h, sig};
}

enum class LinkCheck : std::uint8_t {
  Accept,
  Reject,     // signature does not verify under the sender's key
  Malformed,  // half-genesis unit or signature components out of range
};

/// Checks that `unit` was issued by the holder of `sender_public_key`:
/// the embedded signature must verify over (unit owner ∥ handed hash).
/// A well-formed genesis unit is accepted as a chain root.
inline LinkCheck check_link(const PublicKey& sender_public_key, const TransactionUnit& unit) {
  if (is_genesis_form(unit)) return LinkCheck::Accept;
  if (is_half_genesis(unit)) return LinkCheck::Malformed;
  VerifyStatus vs = verify(transfer_message(unit.public_key, unit.prev_hash),
                           std::get<Signature>(unit.prev_signature), sender_public_key);
  if (vs == VerifyStatus::Malformed) return LinkCheck::Malformed;
  return vs == VerifyStatus::Accept ? LinkCheck::Accept : LinkCheck::Reject;
}

inline bool verify_link(const PublicKey& sender_public_key, const TransactionUnit& unit) {
  return check_link(sender_public_key, unit) == LinkCheck::Accept;
}

/// Full transfer history, oldest first; entry 0 must be genesis-rooted.
using TransferRecord = std::vector<TransactionUnit>;

struct HistoryCheck {
  bool valid = true;
  std::size_t first_bad_index = 0;  // earliest broken link, when !valid
  std::string reason;

  explicit operator bool() const { return valid; }
};

inline HistoryCheck history_failure(std::size_t index, std::string reason) {
  return HistoryCheck{false, index, std::move(reason)};
}

/// Walks the record from genesis forward, recomputing every handed-over
/// hash and verifying every signature against the previous owner's key.
inline HistoryCheck verify_history(const TransferRecord& record) {
  if (record.empty()) throw std::invalid_argument("empty history");
  if (!is_genesis_form(record[0])) {
    if (is_half_genesis(record[0]))
      return history_failure(0, "malformed genesis: zero hash and marker must appear together");
    return history_failure(0, "record does not start at a genesis unit");
  }
  for (std::size_t i = 1; i < record.size(); ++i) {
    if (record[i].prev_hash != unit_hash(record[i - 1]))
      return history_failure(i, "handed-over hash does not match the previous unit");
    switch (check_link(record[i - 1].public_key, record[i])) {
      case LinkCheck::Accept:
        break;
      case LinkCheck::Reject:
        return history_failure(i, "previous owner's signature does not verify");
      case LinkCheck::Malformed:
        return history_failure(i, "malformed unit inside record");
    }
  }
  return {};
}

}  // namespace phylink
