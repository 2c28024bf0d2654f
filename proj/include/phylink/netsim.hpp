#pragma once

#include <chrono>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "phylink/blockchain.hpp"
#include "phylink/chip.hpp"
#include "phylink/link.hpp"
#include "phylink/rng.hpp"
#include "phylink/transaction.hpp"

namespace phylink {

enum class EventKind : std::uint8_t { Transfer = 0, Spoof = 1, Tamper = 2, Mine = 3 };

inline const char* event_kind_name(EventKind k) {
  switch (k) {
    case EventKind::Transfer: return "transfer";
    case EventKind::Spoof: return "spoof";
    case EventKind::Tamper: return "tamper";
    case EventKind::Mine: return "mine";
  }
  return "?";
}

inline EventKind event_kind_from_name(const std::string& name) {
  if (name == "transfer") return EventKind::Transfer;
  if (name == "spoof") return EventKind::Spoof;
  if (name == "tamper") return EventKind::Tamper;
  if (name == "mine") return EventKind::Mine;
  throw std::invalid_argument("unknown event kind: " + name);
}

/// One scheduled simulation event. Only the fields its kind uses are
/// meaningful; the rest stay zero so every event has one fixed byte layout.
struct SimEvent {
  std::uint64_t tick = 0;
  EventKind kind = EventKind::Transfer;
  std::uint64_t sender = 0;         // transfer: device handing the asset on
  std::uint64_t recipient = 0;      // transfer: device receiving it
  std::uint64_t victim = 0;         // spoof: device whose address is claimed
  std::uint64_t attacker_chip = 0;  // spoof: chip index of the imposter
  std::uint64_t block_index = 0;    // tamper: target block; mine: position appended
  std::uint64_t leaves = 0;         // mine: bundle size
  Digest tamper_root{};             // tamper: forged merkle root

  friend bool operator==(const SimEvent&, const SimEvent&) = default;
};

/// Canonical fixed-width encoding, used for the report's event digest so
/// that any change to any recorded event is observable.
inline Bytes event_bytes(const SimEvent& ev) {
  Bytes out;
  out.reserve(8 * 7 + 1 + 32);
  auto put_u64 = [&out](std::uint64_t v) {
    for (int shift = 56; shift >= 0; shift -= 8)
      out.push_back(static_cast<std::uint8_t>(v >> shift));
  };
  put_u64(ev.tick);
  out.push_back(static_cast<std::uint8_t>(ev.kind));
  put_u64(ev.sender);
  put_u64(ev.recipient);
  put_u64(ev.victim);
  put_u64(ev.attacker_chip);
  put_u64(ev.block_index);
  put_u64(ev.leaves);
  out.insert(out.end(), ev.tamper_root.bytes.begin(), ev.tamper_root.bytes.end());
  return out;
}

struct AttackMix {
  std::uint64_t spoof_attempts = 0;
  std::uint64_t tamper_attempts = 0;

  friend bool operator==(const AttackMix&, const AttackMix&) = default;
};

struct ScenarioConfig {
  std::uint64_t n_devices = 16;
  std::uint64_t n_transactions = 100;
  std::uint64_t bundle_size = 256;  // transactions bunched per block
  unsigned difficulty_bits = 12;
  AttackMix attack_mix;
  std::uint64_t master_seed = 1;
  std::string scenario_name = "default";
  Scheme scheme = Scheme::Elgamal;
  std::size_t id_bits = 256;

  friend bool operator==(const ScenarioConfig&, const ScenarioConfig&) = default;
};

/// Device population whose chips replace SSD cache-controller memories;
/// behaviorally identical to the default population, differently labeled.
inline ScenarioConfig ssd_controller_scenario(std::uint64_t master_seed) {
  ScenarioConfig cfg;
  cfg.scenario_name = "ssd-controller";
  cfg.n_devices = 16;
  cfg.n_transactions = 200;
  cfg.bundle_size = 64;
  cfg.difficulty_bits = 12;
  cfg.attack_mix = {25, 5};
  cfg.master_seed = master_seed;
  return cfg;
}

inline void validate_config(const ScenarioConfig& cfg) {
  if (cfg.n_devices < 1) throw std::invalid_argument("config: need at least one device");
  if (cfg.bundle_size < 1) throw std::invalid_argument("config: bundle_size must be >= 1");
  if (cfg.difficulty_bits > 32)
    throw std::invalid_argument("config: difficulty above 32 bits is not simulable");
  if (cfg.n_transactions > 0 && cfg.n_devices < 2)
    throw std::invalid_argument("config: transfers need at least two devices");
  if (cfg.attack_mix.tamper_attempts > 0 && cfg.n_transactions == 0)
    throw std::invalid_argument("config: tampering needs a ledger, so schedule transactions");
  if (cfg.id_bits == 0) throw std::invalid_argument("config: id_bits must be positive");
}

struct SimReport {
  std::uint64_t transfers_ok = 0;
  std::uint64_t spoofs_attempted = 0;
  std::uint64_t spoofs_accepted = 0;
  std::uint64_t tampers_attempted = 0;
  std::uint64_t tampers_detected = 0;
  std::uint64_t blocks_mined = 0;
  std::uint64_t total_hash_attempts = 0;
  Digest final_tip_hash{};
  Digest events_digest{};
  double wall_time_ms = 0.0;  // informational only

  // wall time varies run to run and carries no simulation meaning, so it is
  // excluded from comparisons (and from the persisted report format).
  friend bool operator==(const SimReport& a, const SimReport& b) {
    return a.transfers_ok == b.transfers_ok && a.spoofs_attempted == b.spoofs_attempted &&
           a.spoofs_accepted == b.spoofs_accepted && a.tampers_attempted == b.tampers_attempted &&
           a.tampers_detected == b.tampers_detected && a.blocks_mined == b.blocks_mined &&
           a.total_hash_attempts == b.total_hash_attempts &&
           a.final_tip_hash == b.final_tip_hash && a.events_digest == b.events_digest;
  }
};

struct SimOutcome {
  SimReport report;
  std::vector<SimEvent> events;
  BlockChainState ledger;
  Registry registry;
};

namespace detail {

// Seed-stream tags: every independent random stream hangs off master_seed
// by a distinct index, so adding streams never perturbs existing ones.
inline constexpr std::uint64_t kSimFabStream = 0;
inline constexpr std::uint64_t kSimScheduleStream = 1;
inline constexpr std::uint64_t kSimDrawStream = 2;
inline constexpr std::uint64_t kSimChallengeStream = 3;
inline constexpr std::uint64_t kSimMacStream = 4;

/// Executes events against the simulated world. run_scenario decides the
/// events and feeds them through; replay feeds recorded ones and lets the
/// consistency checks reject logs that no honest run could have produced.
class SimEngine {
 public:
  explicit SimEngine(const ScenarioConfig& cfg) : cfg_(cfg) {
    validate_config(cfg);
    fab_ = FabProcess{static_cast<std::uint32_t>(cfg.id_bits),
                      derive_seed(cfg.master_seed, kSimFabStream), 1.0};
    if (cfg.scheme == Scheme::Rsa) {
      derivation_ = RsaDerivation{};
    } else {
      derivation_ = desk_elgamal_derivation();
    }
    SplitMix64 mac_rng(derive_seed(cfg.master_seed, kSimMacStream));
    for (std::uint64_t i = 0; i < cfg.n_devices; ++i) {
      Chip chip = fabricate_chip(fab_, i);
      DeviceNode dev = make_device(chip, fab_, derivation_, mac_rng.next() & kMacMask);
      registry_ = enroll(std::move(registry_), dev, cfg.scenario_name);
      devices_.push_back(std::move(dev));
    }
    chain_.difficulty_bits = cfg.difficulty_bits;
    if (cfg.n_transactions > 0) {
      record_.push_back(devices_[0].logical_node.unit);
      holder_ = 0;
    }
  }

  // -- event appliers; each records the event and updates the report --

  void apply(const SimEvent& ev) {
    SimEvent copy = ev;
    copy.tick = tick_++;
    switch (ev.kind) {
      case EventKind::Transfer: do_transfer(copy); break;
      case EventKind::Spoof: do_spoof(copy); break;
      case EventKind::Mine: do_mine(copy); break;
      case EventKind::Tamper: do_tamper(copy); break;
    }
    events_acc_.update(event_bytes(copy));
    events_.push_back(copy);
  }

  bool bundle_full() const { return leaf_buffer_.size() >= cfg_.bundle_size; }
  bool bundle_pending() const { return !leaf_buffer_.empty(); }
  std::uint64_t pending_leaves() const { return leaf_buffer_.size(); }
  std::uint64_t next_block_index() const { return chain_.length(); }
  std::uint64_t current_holder() const { return holder_; }
  std::uint64_t spoofs_so_far() const { return report_.spoofs_attempted; }
  const ScenarioConfig& config() const { return cfg_; }

  SimOutcome finish(double wall_time_ms) {
    report_.final_tip_hash = chain_.tip_hash();
    Sha256 acc = events_acc_;
    report_.events_digest = acc.finish();
    report_.wall_time_ms = wall_time_ms;
    return SimOutcome{report_, std::move(events_), std::move(chain_), std::move(registry_)};
  }

 private:
  void do_transfer(const SimEvent& ev) {
    if (ev.sender != holder_)
      throw std::runtime_error("event log inconsistent: transfer from a non-holder");
    if (ev.recipient >= devices_.size() || ev.recipient == ev.sender)
      throw std::runtime_error("event log inconsistent: bad transfer recipient");
    const DeviceNode& from = devices_[ev.sender];
    const DeviceNode& to = devices_[ev.recipient];
    LogicalNode sender_node{record_.back(), from.id_core.key};
    TransactionUnit unit = transfer(sender_node, to.public_key());
    if (verify_link(from.public_key(), unit)) {
      ++report_.transfers_ok;
      record_.push_back(unit);
      leaf_buffer_.push_back(unit_hash(unit));
      holder_ = ev.recipient;
    }
  }

  void do_spoof(const SimEvent& ev) {
    if (ev.victim >= devices_.size())
      throw std::runtime_error("event log inconsistent: spoof victim out of range");
    // The imposter holds a real chip — just not the victim's — clones the
    // victim's MAC, claims the victim's logical address, and answers the
    // challenge with the only secret key its own chip can derive.
    Chip attacker_chip = fabricate_chip(fab_, ev.attacker_chip);
    IdCore attacker_core = make_id_core(attacker_chip, fab_, derivation_);
    const PublicKey victim_pk = devices_[ev.victim].public_key();
    ChallengeNonce nonce = challenge(
        derive_seed(derive_seed(cfg_.master_seed, kSimChallengeStream), report_.spoofs_attempted));
    ChallengeResponse response{nonce, sign(auth_message(nonce, victim_pk), attacker_core.key)};
    AuthOutcome outcome = authenticate(registry_, victim_pk, nonce, response);
    ++report_.spoofs_attempted;
    if (accepted(outcome)) ++report_.spoofs_accepted;
  }

  void do_mine(const SimEvent& ev) {
    if (ev.leaves != leaf_buffer_.size())
      throw std::runtime_error("event log inconsistent: mine event leaf count mismatch");
    if (ev.block_index != chain_.length())
      throw std::runtime_error("event log inconsistent: mine event block index mismatch");
    if (leaf_buffer_.empty())
      throw std::runtime_error("event log inconsistent: mine event with empty bundle");
    chain_ = append_block(chain_, leaf_buffer_);
    report_.total_hash_attempts += chain_.blocks.back().nonce + 1;  // ascending scan from 0
    ++report_.blocks_mined;
    leaf_buffer_.clear();
  }

  void do_tamper(const SimEvent& ev) {
    if (ev.block_index >= chain_.length())
      throw std::runtime_error("event log inconsistent: tamper target out of range");
    if (!published_tip_) published_tip_ = chain_.tip_hash();
    // The attacker rewrites one block's merkle root without paying for any
    // re-mining. Detection: the chain no longer validates, or its tip hash
    // no longer matches the tip every verifier already holds.
    BlockChainState doctored = chain_;
    doctored.blocks[ev.block_index].merkle_root = ev.tamper_root;
    bool detected = !validate_chain(doctored).valid || doctored.tip_hash() != *published_tip_;
    ++report_.tampers_attempted;
    if (detected) ++report_.tampers_detected;
  }

  ScenarioConfig cfg_;
  FabProcess fab_;
  KeyDerivation derivation_;
  std::vector<DeviceNode> devices_;
  Registry registry_;
  TransferRecord record_;
  std::uint64_t holder_ = 0;
  BlockChainState chain_;
  std::vector<Digest> leaf_buffer_;
  std::optional<Digest> published_tip_;
  SimReport report_;
  std::vector<SimEvent> events_;
  Sha256 events_acc_;
  std::uint64_t tick_ = 0;
};

}  // namespace detail

/// Runs a full scenario: fabricate and enroll the population, pass one
/// asset around with the scheduled transfers, interleave spoof attempts,
/// bundle verified transfers into mined blocks, then launch the tamper
/// attempts against the finished ledger. Pure function of the config.
inline SimOutcome run_scenario(const ScenarioConfig& cfg) {
  auto t0 = std::chrono::steady_clock::now();
  detail::SimEngine engine(cfg);

  // Transfers and spoofs interleave in a seed-determined order; tampering
  // needs the finished ledger, so those attempts run after the final block.
  std::vector<EventKind> schedule;
  schedule.reserve(cfg.n_transactions + cfg.attack_mix.spoof_attempts);
  schedule.insert(schedule.end(), cfg.n_transactions, EventKind::Transfer);
  schedule.insert(schedule.end(), cfg.attack_mix.spoof_attempts, EventKind::Spoof);
  SplitMix64 shuffle_rng(derive_seed(cfg.master_seed, detail::kSimScheduleStream));
  for (std::size_t i = schedule.size(); i > 1; --i)
    std::swap(schedule[i - 1], schedule[shuffle_rng.below(i)]);

  SplitMix64 draw(derive_seed(cfg.master_seed, detail::kSimDrawStream));
  std::uint64_t attacker_chip_next = cfg.n_devices;  // never collides with honest chips
  for (EventKind kind : schedule) {
    SimEvent ev;
    ev.kind = kind;
    if (kind == EventKind::Transfer) {
      ev.sender = engine.current_holder();
      ev.recipient = draw.below(cfg.n_devices - 1);
      if (ev.recipient >= ev.sender) ++ev.recipient;  // uniform over the others
    } else {
      ev.victim = draw.below(cfg.n_devices);
      ev.attacker_chip = attacker_chip_next++;
    }
    engine.apply(ev);
    if (engine.bundle_full()) {
      SimEvent mine;
      mine.kind = EventKind::Mine;
      mine.leaves = engine.pending_leaves();
      mine.block_index = engine.next_block_index();
      engine.apply(mine);
    }
  }
  if (engine.bundle_pending()) {
    SimEvent mine;
    mine.kind = EventKind::Mine;
    mine.leaves = engine.pending_leaves();
    mine.block_index = engine.next_block_index();
    engine.apply(mine);
  }
  for (std::uint64_t t = 0; t < cfg.attack_mix.tamper_attempts; ++t) {
    SimEvent ev;
    ev.kind = EventKind::Tamper;
    ev.block_index = draw.below(engine.next_block_index());
    Bytes root = draw.bytes(32);
    std::copy(root.begin(), root.end(), ev.tamper_root.bytes.begin());
    engine.apply(ev);
  }

  double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  return engine.finish(ms);
}

/// Re-executes a recorded event sequence under the same config. An honest
/// log reproduces the original report field for field; a doctored one either
/// yields a different report or trips an engine consistency check.
inline SimOutcome replay(const ScenarioConfig& cfg, const std::vector<SimEvent>& events) {
  auto t0 = std::chrono::steady_clock::now();
  detail::SimEngine engine(cfg);
  for (std::size_t i = 0; i < events.size(); ++i) {
    if (events[i].tick != i)
      throw std::runtime_error("event log inconsistent: tick sequence broken");
    engine.apply(events[i]);
  }
  double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  return engine.finish(ms);
}

}  // namespace phylink
