#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <variant>

#include "phylink/chip.hpp"
#include "phylink/hex.hpp"
#include "phylink/keys.hpp"
#include "phylink/rng.hpp"
#include "phylink/transaction.hpp"

namespace phylink {

/// How a key pair is derived from a chip: RSA prime offsets or an ElGamal
/// group. Re-running the derivation with the same parameters on the same
/// chip must reproduce the identical pair.
struct RsaDerivation {
  BigInt offset1 = 3;
  BigInt offset2 = 7;
  BigInt e = kDefaultRsaExponent;

  friend bool operator==(const RsaDerivation&, const RsaDerivation&) = default;
};

struct ElgamalDerivation {
  BigInt p;
  BigInt g;

  friend bool operator==(const ElgamalDerivation&, const ElgamalDerivation&) = default;
};

inline ElgamalDerivation desk_elgamal_derivation() {
  ElgamalPublicKey grp = desk_elgamal_group();
  return {grp.p, grp.g};
}

using KeyDerivation = std::variant<RsaDerivation, ElgamalDerivation>;

/// The on-device identity unit: the chip's ID, the derivation recipe, and
/// the key pair that recipe produced. Keys are regenerated from the chip,
/// never persisted.
struct IdCore {
  ChipId chip_id;
  KeyDerivation derivation;
  KeyMaterial key;
  bool primes_erased = false;

  PublicKey public_key() const { return public_key_of(key); }
  Scheme scheme() const { return scheme_of(key); }
};

/// Builds an ID core by reading the chip and feeding the ID to the key
/// generator. Enrollment-grade reads must be noise-free; a process with
/// read noise cannot anchor a stable identity.
inline IdCore make_id_core(const Chip& chip, const FabProcess& process,
                           const KeyDerivation& derivation) {
  if (process.stability != 1.0)
    throw std::invalid_argument("id core requires a noise-free read (stability 1.0)");
  IdCore core;
  core.chip_id = read_chip_id(chip, process);
  core.derivation = derivation;
  if (const auto* rsa = std::get_if<RsaDerivation>(&derivation)) {
    core.key = derive_rsa_keypair(core.chip_id, rsa->offset1, rsa->offset2, rsa->e);
  } else {
    const auto& eg = std::get<ElgamalDerivation>(derivation);
    core.key = derive_elgamal_keypair(core.chip_id, eg.p, eg.g);
  }
  return core;
}

/// Drops the generating primes once the secret exponent exists; d and n are
/// all that signing needs. Idempotent.
inline IdCore erase_primes(IdCore core) {
  auto* rsa = std::get_if<RsaKeyMaterial>(&core.key);
  if (!rsa) throw std::invalid_argument("prime erasure applies only to rsa cores");
  rsa->p.reset();
  rsa->q.reset();
  core.primes_erased = true;
  return core;
}

inline constexpr std::uint64_t kMacMask = 0xFFFFFFFFFFFFull;  // 48 bits

/// A network device: the physical chip, its chip-bound identity, its current
/// position in the transfer chain, and a legacy MAC address that anyone can
/// rewrite and no check ever trusts.
struct DeviceNode {
  Chip chip;
  IdCore id_core;
  LogicalNode logical_node;
  std::uint64_t mac_address = 0;

  PublicKey public_key() const { return id_core.public_key(); }
};

inline DeviceNode make_device(const Chip& chip, const FabProcess& process,
                              const KeyDerivation& derivation, std::uint64_t mac_address) {
  DeviceNode dev;
  dev.chip = chip;
  dev.id_core = make_id_core(chip, process, derivation);
  dev.logical_node = make_genesis(dev.id_core.key);
  dev.mac_address = mac_address & kMacMask;
  return dev;
}

/// Transfers through the link layer. The unit that comes out is a plain
/// transaction unit — byte-identical to one produced without any chip
/// involvement, which is what keeps chip-bound devices ledger-compatible.
inline TransactionUnit link_transfer(const DeviceNode& sender, const DeviceNode& recipient) {
  return transfer(sender.logical_node, recipient.public_key());
}

struct EnrollmentRecord {
  Digest chip_commitment;  // sha256 of the chip id bits; never the bits themselves
  std::string metadata;

  friend bool operator==(const EnrollmentRecord&, const EnrollmentRecord&) = default;
};

/// Verifier-side table mapping logical addresses to enrollment records,
/// plus the nonce memory that blunts replays.
struct Registry {
  std::map<std::string, EnrollmentRecord> entries;  // key: hex of serialized public key
  std::set<std::string> seen_nonces;                // hex of consumed challenge nonces

  friend bool operator==(const Registry&, const Registry&) = default;
};

inline std::string registry_key(const PublicKey& pk) { return to_hex(serialize(pk)); }

inline bool is_enrolled(const Registry& reg, const PublicKey& pk) {
  return reg.entries.count(registry_key(pk)) != 0;
}

inline Registry enroll(Registry reg, const DeviceNode& device, std::string metadata = {}) {
  std::string key = registry_key(device.public_key());
  if (reg.entries.count(key)) throw std::invalid_argument("duplicate enrollment");
  reg.entries.emplace(std::move(key),
                      EnrollmentRecord{chip_id_digest(device.id_core.chip_id), std::move(metadata)});
  return reg;
}

using ChallengeNonce = std::array<std::uint8_t, 32>;

inline ChallengeNonce challenge(std::uint64_t verifier_rng_seed) {
  SplitMix64 rng(verifier_rng_seed);
  ChallengeNonce nonce;
  for (auto& b : nonce) b = static_cast<std::uint8_t>(rng.next() >> 56);
  return nonce;
}

/// What a responder signs: the fresh nonce bound to the address it claims.
inline Digest auth_message(const ChallengeNonce& nonce, const PublicKey& claimed) {
  Sha256 h;
  h.update(nonce.data(), nonce.size());
  h.update(serialize(claimed));
  return h.finish();
}

struct ChallengeResponse {
  ChallengeNonce challenge_nonce{};
  Signature response_signature;
};

inline ChallengeResponse respond(const DeviceNode& device, const ChallengeNonce& nonce) {
  return {nonce, sign(auth_message(nonce, device.public_key()), device.id_core.key)};
}

/// Wire form for the simulator's log:
/// nonce (32) || serialized claimed key (u32-BE length prefixed) || signature bytes.
inline Bytes wire_bytes(const ChallengeResponse& cr, const PublicKey& claimed) {
  Bytes out(cr.challenge_nonce.begin(), cr.challenge_nonce.end());
  detail::put_block(out, serialize(claimed));
  Bytes sig = serialize(cr.response_signature);
  out.insert(out.end(), sig.begin(), sig.end());
  return out;
}

enum class AuthOutcome : std::uint8_t {
  Accept,
  UnknownAddress,  // claimed key never enrolled
  Replay,          // nonce already consumed at this verifier
  BadSignature,    // response does not verify under the claimed key
};

inline bool accepted(AuthOutcome o) { return o == AuthOutcome::Accept; }

inline const char* auth_outcome_name(AuthOutcome o) {
  switch (o) {
    case AuthOutcome::Accept: return "accept";
    case AuthOutcome::UnknownAddress: return "reject:unknown-address";
    case AuthOutcome::Replay: return "reject:replay";
    case AuthOutcome::BadSignature: return "reject:bad-signature";
  }
  return "?";
}

/// Accepts only a fresh nonce whose response verifies under an enrolled
/// claimed key. The MAC address plays no part: a device lacking the chip
/// (hence the secret key) has nothing that can pass the signature check.
inline AuthOutcome authenticate(Registry& reg, const PublicKey& claimed_public_key,
                                const ChallengeNonce& nonce, const ChallengeResponse& response) {
  if (!is_enrolled(reg, claimed_public_key)) return AuthOutcome::UnknownAddress;
  std::string nonce_hex = to_hex(nonce.data(), nonce.size());
  if (!reg.seen_nonces.insert(nonce_hex).second) return AuthOutcome::Replay;
  VerifyStatus vs =
      verify(auth_message(nonce, claimed_public_key), response.response_signature,
             claimed_public_key);
  return vs == VerifyStatus::Accept ? AuthOutcome::Accept : AuthOutcome::BadSignature;
}

}  // namespace phylink
