// Acceptance gate: one check per shipped claim, one PASS/FAIL line each.
// Exits nonzero if any criterion fails. Values marked as frozen were
// computed from independent oracles (trial division, extended Euclid over
// int64, naive repeated multiplication) before the library existed.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "helpers.hpp"
#include "oracles.hpp"
#include "phylink/phylink.hpp"

using namespace phylink;

namespace {

struct Gate {
  int failures = 0;

  void run(int number, const std::string& label, const std::function<void(std::ostringstream&)>& body) {
    std::ostringstream detail;
    bool ok = true;
    try {
      body(detail);
    } catch (const std::exception& e) {
      ok = false;
      detail << " unexpected exception: " << e.what();
    }
    if (!detail.str().empty()) ok = false;
    std::printf("%s criterion %d: %s%s\n", ok ? "PASS" : "FAIL", number, label.c_str(),
                detail.str().c_str());
    if (!ok) ++failures;
  }
};

#define EXPECT(cond, message)                 \
  do {                                        \
    if (!(cond)) out << " [" << message << "]"; \
  } while (0)

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Digest digest_of(const std::string& s) { return sha256(s); }

// ---- criterion bodies ----

void criterion_retention(std::ostringstream& out) {
  auto t0 = std::chrono::steady_clock::now();
  FabProcess process{256, 20240801, 1.0};
  RetentionReport report = retention_experiment(process, 1116, AgingModel{});
  double elapsed = seconds_since(t0);
  EXPECT(report.per_chip_mismatches.size() == 1116, "population size wrong");
  EXPECT(report.inconsistent_chips == 0,
         "expected 0 inconsistent chips, got " << report.inconsistent_chips);
  EXPECT(report.total_mismatched_bits == 0,
         "expected 0 mismatched bits, got " << report.total_mismatched_bits);
  EXPECT(elapsed < 10.0, "took " << elapsed << " s, budget 10 s");
}

void criterion_collision(std::ostringstream& out) {
  auto t0 = std::chrono::steady_clock::now();
  double info = information_quantity_log10(3461788);
  double coll = collision_probability_log10(3461788, 1000000000000ULL, CollisionMode::PaperLinear);
  double elapsed = seconds_since(t0);
  EXPECT(std::abs(info - 1042102.0) <= 1.0, "information quantity log10 = " << info);
  EXPECT(std::abs(coll - -1042090.0) <= 1.0, "collision probability log10 = " << coll);
  EXPECT(elapsed < 1.0, "took " << elapsed << " s, budget 1 s");
}

void criterion_pow_statistics(std::ostringstream& out) {
  auto t0 = std::chrono::steady_clock::now();

  double total16 = 0;
  for (int i = 0; i < 50; ++i)
    total16 += static_cast<double>(
        mine_block(digest_of("pow-sample-16-" + std::to_string(i)), Digest{}, 16).attempts);
  double mean16 = total16 / 50.0;
  EXPECT(mean16 >= 45875.0 && mean16 <= 85197.0,
         "difficulty-16 mean attempts " << mean16 << " outside [45875, 85197]");

  double total12 = 0;
  for (int i = 0; i < 200; ++i)
    total12 += static_cast<double>(
        mine_block(digest_of("pow-sample-12-" + std::to_string(i)), Digest{}, 12).attempts);
  double mean12 = total12 / 200.0;
  EXPECT(mean12 >= 2867.0 && mean12 <= 5325.0,
         "difficulty-12 mean attempts " << mean12 << " outside [2867, 5325]");

  double elapsed = seconds_since(t0);
  EXPECT(elapsed < 60.0, "took " << elapsed << " s, budget 60 s");
}

void criterion_tamper_cascade(std::ostringstream& out) {
  auto t0 = std::chrono::steady_clock::now();
  BlockChainState chain;
  chain.difficulty_bits = 12;
  for (int b = 0; b < 10; ++b) {
    std::vector<Digest> leaves;
    for (int l = 0; l < 4; ++l)
      leaves.push_back(digest_of("cascade-leaf-" + std::to_string(b) + "-" + std::to_string(l)));
    chain = append_block(chain, leaves);
  }
  EXPECT(validate_chain(chain).valid, "fixture chain invalid");

  for (std::size_t i = 0; i < 10; ++i) {
    Digest forged = digest_of("cascade-forged-" + std::to_string(i));
    TamperRepair repair = tamper_and_repair(chain, i, forged);
    EXPECT(repair.report.blocks_remined == 10 - i,
           "index " << i << ": blocks_remined " << repair.report.blocks_remined << " != "
                    << (10 - i));
    EXPECT(validate_chain(repair.repaired).valid, "index " << i << ": repair did not validate");

    BlockChainState unrepaired = chain;
    unrepaired.blocks[i].merkle_root = forged;
    ChainCheck check = validate_chain(unrepaired);
    EXPECT(!check.valid, "index " << i << ": unrepaired tamper not flagged");
    EXPECT(check.first_bad_block == i,
           "index " << i << ": flagged at block " << check.first_bad_block);
  }
  double elapsed = seconds_since(t0);
  EXPECT(elapsed < 30.0, "took " << elapsed << " s, budget 30 s");
}

void criterion_crypto_oracles(std::ostringstream& out) {
  // RSA small example, with d recomputed through the independent
  // extended-Euclid oracle over int64.
  RsaKeyMaterial rsa_small = derive_rsa_keypair(testutil::chip_id_of(40, 8), 3, 7);
  EXPECT(rsa_small.p.value() == 43, "p = " << rsa_small.p.value());
  EXPECT(rsa_small.q.value() == 47, "q = " << rsa_small.q.value());
  EXPECT(rsa_small.n == 2021, "n = " << rsa_small.n);
  EXPECT(rsa_small.d == 1433, "d = " << rsa_small.d);
  EXPECT(oracle::mod_inverse64(65537 % 1932, 1932) == 1433, "egcd oracle disagrees");
  EXPECT((rsa_small.e * rsa_small.d) % 1932 == 1, "e*d mod phi != 1");

  // ElGamal small example against the repeated-multiplication oracle.
  ElgamalKeyMaterial eg_small = elgamal_keypair_from_hash_value(37, 23, 5);
  EXPECT(eg_small.x == 15, "x = " << eg_small.x);
  EXPECT(eg_small.y == 19, "y = " << eg_small.y);
  EXPECT(oracle::naive_mod_pow(5, 15, 23) == 19, "exponentiation oracle disagrees");

  // Desk-scale round trips: keys derived from 256-bit chip ids.
  FabProcess proc{256, 777, 1.0};
  ChipId id_a = read_chip_id(fabricate_chip(proc, 0), proc);
  ChipId id_b = read_chip_id(fabricate_chip(proc, 1), proc);
  RsaKeyMaterial rsa = derive_rsa_keypair(id_a, 3, 7);
  ElgamalPublicKey grp = desk_elgamal_group();
  ElgamalKeyMaterial eg = derive_elgamal_keypair(id_b, grp.p, grp.g);

  SplitMix64 rng(888);
  int rsa_ok = 0, eg_ok = 0;
  Digest last{};
  for (int i = 0; i < 100; ++i) {
    Digest d = testutil::random_digest(rng);
    if (accepted(verify(d, sign(d, rsa), PublicKey{rsa.public_key()}))) ++rsa_ok;
    if (accepted(verify(d, sign(d, eg), PublicKey{eg.public_key()}))) ++eg_ok;
    last = d;
  }
  EXPECT(rsa_ok == 100, "rsa round-trips " << rsa_ok << "/100");
  EXPECT(eg_ok == 100, "elgamal round-trips " << eg_ok << "/100");

  // Single-bit perturbations of a signed digest: all 256 rejected, per scheme.
  Signature rsa_sig = sign(last, rsa);
  Signature eg_sig = sign(last, eg);
  int rejected = 0;
  for (int bit = 0; bit < 256; ++bit) {
    Digest flipped = last;
    flipped.bytes[bit / 8] ^= static_cast<std::uint8_t>(1u << (bit % 8));
    bool r1 = verify(flipped, rsa_sig, PublicKey{rsa.public_key()}) == VerifyStatus::Reject;
    bool r2 = verify(flipped, eg_sig, PublicKey{eg.public_key()}) == VerifyStatus::Reject;
    if (r1 && r2) ++rejected;
  }
  EXPECT(rejected == 256, "perturbations rejected " << rejected << "/256");
}

void criterion_chain_soundness(std::ostringstream& out) {
  SplitMix64 rng(20240816);

  // Key rings: mostly small RSA for speed, with desk ElGamal in the mix.
  std::vector<KeyMaterial> ring;
  for (int i = 0; i < 6; ++i) ring.push_back(testutil::toy_rsa(9000 + i));
  ring.push_back(KeyMaterial{testutil::desk_elgamal(9100)});
  ring.push_back(KeyMaterial{testutil::desk_elgamal(9101)});

  std::vector<TransferRecord> chains;
  int valid_chains = 0;
  for (int c = 0; c < 50; ++c) {
    std::size_t units = 2 + rng.below(49);  // chain length <= 50 (units, genesis included)
    TransferRecord record;
    std::size_t owner = rng.below(ring.size());
    LogicalNode node = make_genesis(ring[owner]);
    record.push_back(node.unit);
    while (record.size() < units) {
      std::size_t next = rng.below(ring.size() - 1);
      if (next >= owner) ++next;
      TransactionUnit unit = transfer(node, public_key_of(ring[next]));
      record.push_back(unit);
      node = LogicalNode{unit, ring[next]};
      owner = next;
    }
    if (verify_history(record).valid) ++valid_chains;
    chains.push_back(std::move(record));
  }
  EXPECT(valid_chains == 50, "honest chains valid " << valid_chains << "/50");

  // 500 single-bit tampers at hops >= 1. (A genesis unit names only its own
  // owner; a flip there is the first hop's forgery and is caught at hop 1,
  // so the sampler starts at the first signed hop.)
  int detected_in_bound = 0;
  for (int t = 0; t < 500; ++t) {
    const TransferRecord& original = chains[rng.below(chains.size())];
    TransferRecord doctored = original;
    std::size_t hop = 1 + rng.below(doctored.size() - 1);
    Bytes bytes = serialize(doctored[hop]);
    std::size_t bit = rng.below(bytes.size() * 8);
    bytes[bit / 8] ^= static_cast<std::uint8_t>(1u << (bit % 8));
    bool counted = false;
    try {
      doctored[hop] = deserialize_transaction(bytes);
      HistoryCheck check = verify_history(doctored);
      counted = !check.valid && check.first_bad_index <= hop;
    } catch (const std::exception&) {
      counted = true;  // tampered bytes failed to parse at all
    }
    if (counted) ++detected_in_bound;
  }
  EXPECT(detected_in_bound == 500, "tampers detected in bound " << detected_in_bound << "/500");
}

void criterion_spoofing_protection(std::ostringstream& out) {
  std::uint64_t spoofs_attempted = 0, spoofs_accepted = 0;
  std::uint64_t tampers_attempted = 0, tampers_detected = 0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    ScenarioConfig cfg;
    cfg.n_devices = 8;
    cfg.n_transactions = 40;
    cfg.bundle_size = 16;
    cfg.difficulty_bits = 8;
    cfg.attack_mix.spoof_attempts = 50;          // 20 seeds x 50 = 1000 spoofs
    cfg.attack_mix.tamper_attempts = seed <= 10 ? 5 : 0;  // 50 tampers total
    cfg.master_seed = seed;
    cfg.scheme = Scheme::Elgamal;
    SimReport report = run_scenario(cfg).report;
    spoofs_attempted += report.spoofs_attempted;
    spoofs_accepted += report.spoofs_accepted;
    tampers_attempted += report.tampers_attempted;
    tampers_detected += report.tampers_detected;
  }
  EXPECT(spoofs_attempted == 1000, "spoofs attempted " << spoofs_attempted);
  EXPECT(spoofs_accepted == 0, "spoofs accepted " << spoofs_accepted);
  EXPECT(tampers_attempted == 50, "tampers attempted " << tampers_attempted);
  EXPECT(tampers_detected == 50, "tampers detected " << tampers_detected << "/50");

  // MAC-rewrite invariance: the same challenge traffic, every MAC rewritten.
  FabProcess proc{256, 31415, 1.0};
  std::vector<DeviceNode> original;
  Registry reg_template;
  for (std::uint64_t i = 0; i < 5; ++i) {
    DeviceNode dev =
        make_device(fabricate_chip(proc, i), proc, desk_elgamal_derivation(), 0x100000 + i);
    reg_template = enroll(std::move(reg_template), dev);
    original.push_back(std::move(dev));
  }
  std::vector<DeviceNode> rewritten = original;
  SplitMix64 mac_rng(2718);
  for (DeviceNode& dev : rewritten) dev.mac_address = mac_rng.next() & kMacMask;

  auto outcomes = [&](const std::vector<DeviceNode>& devices) {
    Registry reg = reg_template;  // fresh nonce memory, same enrollments
    std::vector<AuthOutcome> seen;
    for (int t = 0; t < 30; ++t) {
      ChallengeNonce nonce = challenge(600000 + t);
      const DeviceNode& claimed = devices[t % devices.size()];
      if (t % 3 == 2) {
        // Imposter: a fresh chip answers for the claimed address.
        DeviceNode imposter = make_device(fabricate_chip(proc, 50 + t), proc,
                                          desk_elgamal_derivation(), claimed.mac_address);
        ChallengeResponse forged{nonce,
                                 sign(auth_message(nonce, claimed.public_key()), imposter.id_core.key)};
        seen.push_back(authenticate(reg, claimed.public_key(), nonce, forged));
      } else {
        seen.push_back(authenticate(reg, claimed.public_key(), nonce, respond(claimed, nonce)));
      }
    }
    return seen;
  };
  std::vector<AuthOutcome> a = outcomes(original);
  std::vector<AuthOutcome> b = outcomes(rewritten);
  EXPECT(a == b, "outcomes changed under MAC rewrites");
  bool honest_ok = true, imposters_blocked = true;
  for (std::size_t t = 0; t < a.size(); ++t) {
    if (t % 3 == 2)
      imposters_blocked = imposters_blocked && a[t] == AuthOutcome::BadSignature;
    else
      honest_ok = honest_ok && a[t] == AuthOutcome::Accept;
  }
  EXPECT(honest_ok, "an honest response was rejected");
  EXPECT(imposters_blocked, "an imposter response was not rejected as a bad signature");
}

void criterion_compatibility(std::ostringstream& out) {
  FabProcess proc{256, 161803, 1.0};
  for (const KeyDerivation& derivation :
       {KeyDerivation{RsaDerivation{}}, KeyDerivation{desk_elgamal_derivation()}}) {
    DeviceNode a = make_device(fabricate_chip(proc, 0), proc, derivation, 0xa0);
    DeviceNode b = make_device(fabricate_chip(proc, 1), proc, derivation, 0xb0);
    DeviceNode c = make_device(fabricate_chip(proc, 2), proc, derivation, 0xc0);

    // Byte-level fixture: the link layer's unit against the plain
    // transaction API fed the same key material.
    TransactionUnit via_link = link_transfer(a, b);
    TransactionUnit via_plain = transfer(LogicalNode{a.logical_node.unit, a.id_core.key},
                                         public_key_of(b.id_core.key));
    EXPECT(serialize(via_link) == serialize(via_plain), "link and plain bytes diverge");

    // The chip-agnostic verifier path: parse from bytes, then verify.
    TransactionUnit reparsed = deserialize_transaction(serialize(via_link));
    EXPECT(reparsed == via_link, "reparse changed the unit");
    EXPECT(verify_link(a.public_key(), reparsed), "link unit failed chip-agnostic verification");

    // A multi-hop record built purely through the link layer verifies.
    TransferRecord record{a.logical_node.unit, via_link};
    DeviceNode b_holding = b;
    b_holding.logical_node = LogicalNode{via_link, b.id_core.key};
    record.push_back(link_transfer(b_holding, c));
    EXPECT(verify_history(record).valid, "link-built record failed verify_history");
  }
}

void criterion_determinism(std::ostringstream& out) {
  // Chip dumps: same process, two reads, identical text.
  FabProcess proc{256, 271828, 1.0};
  ChipId id = read_chip_id(fabricate_chip(proc, 0), proc);
  std::string dump = emit_chip_dump(id);
  EXPECT(dump == emit_chip_dump(read_chip_id(fabricate_chip(proc, 0), proc)),
         "chip dump not reproducible");
  EXPECT(parse_chip_dump(dump) == id, "chip dump round trip changed bits");

  // Key JSON: parse(dump) == original and dump(parse(dump)) == dump.
  KeyMaterial key{derive_rsa_keypair(id, 3, 7)};
  std::string key_text = key_to_json(key).dump(2);
  EXPECT(key_from_json(ordered_json::parse(key_text)) == key, "key json round trip changed key");
  EXPECT(key_to_json(key_from_json(ordered_json::parse(key_text))).dump(2) == key_text,
         "key json not bit-stable");

  // Full scenario artifacts across two identical runs.
  ScenarioConfig cfg;
  cfg.n_devices = 6;
  cfg.n_transactions = 30;
  cfg.bundle_size = 8;
  cfg.difficulty_bits = 8;
  cfg.attack_mix = {10, 3};
  cfg.master_seed = 99;
  cfg.scheme = Scheme::Elgamal;
  SimOutcome run1 = run_scenario(cfg);
  SimOutcome run2 = run_scenario(cfg);
  EXPECT(run1.report == run2.report, "reports differ across identical runs");
  EXPECT(write_ledger(run1.ledger) == write_ledger(run2.ledger), "ledgers differ across runs");
  EXPECT(write_event_log(cfg, run1.events) == write_event_log(cfg, run2.events),
         "event logs differ across runs");
  EXPECT(write_registry(run1.registry) == write_registry(run2.registry),
         "registries differ across runs");
  EXPECT(report_to_json(run1.report).dump() == report_to_json(run2.report).dump(),
         "report json differs across runs");

  // Every persisted format round-trips bit-exactly on real artifacts.
  std::string ledger_text = write_ledger(run1.ledger);
  EXPECT(write_ledger(parse_ledger(ledger_text)) == ledger_text, "ledger round trip unstable");
  std::string events_text = write_event_log(cfg, run1.events);
  ParsedEventLog parsed_events = parse_event_log(events_text);
  EXPECT(write_event_log(parsed_events.config, parsed_events.events) == events_text,
         "event log round trip unstable");
  std::string registry_text = write_registry(run1.registry);
  EXPECT(write_registry(parse_registry(registry_text)) == registry_text,
         "registry round trip unstable");
  std::string report_text = report_to_json(run1.report).dump(2);
  EXPECT(report_to_json(report_from_json(ordered_json::parse(report_text))).dump(2) == report_text,
         "report round trip unstable");

  // Transfer record format on a real record.
  KeyMaterial k2{derive_rsa_keypair(read_chip_id(fabricate_chip(proc, 1), proc), 3, 7)};
  TransferRecord record{make_genesis(key).unit};
  record.push_back(transfer(LogicalNode{record[0], key}, public_key_of(k2)));
  std::string record_text = write_record(record);
  EXPECT(write_record(parse_record(record_text)) == record_text, "record round trip unstable");
}

}  // namespace

int main() {
  Gate gate;
  gate.run(1, "simulated retention: 1116 chips, zero-noise model, no mismatches",
           criterion_retention);
  gate.run(2, "collision arithmetic at id_bits 3461788, population 10^12", criterion_collision);
  gate.run(3, "proof-of-work attempt statistics at difficulties 16 and 12",
           criterion_pow_statistics);
  gate.run(4, "tamper cascade: repair cost is exactly the remaining chain length",
           criterion_tamper_cascade);
  gate.run(5, "key schemes against independent small-number oracles", criterion_crypto_oracles);
  gate.run(6, "chain soundness: honest chains verify, bit tampers localize", criterion_chain_soundness);
  gate.run(7, "spoofing protection: 1000 spoofs rejected, 50 tampers detected, MAC irrelevant",
           criterion_spoofing_protection);
  gate.run(8, "link-layer units are byte-compatible with the plain chain format",
           criterion_compatibility);
  gate.run(9, "determinism and bit-exact round trips for every persisted format",
           criterion_determinism);

  if (gate.failures > 0) {
    std::printf("%d of 9 criteria failed\n", gate.failures);
    return 1;
  }
  std::printf("all 9 criteria passed\n");
  return 0;
}
