// phylink: chip-identity blockchain toolkit.
//
// Subcommands cover the full pipeline: fabricate simulated chips, derive
// chip-bound key pairs, build signed transfer records, bundle them into a
// mined ledger, verify and tamper-test ledgers, reproduce the retention and
// collision figures, and run the device-network simulator.
//
// Exit codes: 0 success, 1 verification failure, 2 usage or input error.

#include <cinttypes>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "phylink/phylink.hpp"

namespace fs = std::filesystem;
using namespace phylink;

namespace {

constexpr int kOk = 0;
constexpr int kVerifyFailure = 1;
constexpr int kUsageError = 2;

std::string chip_file_name(std::uint64_t index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "chip-%04" PRIu64 ".txt", index);
  return buf;
}

// ---- fabricate ----

struct FabricateArgs {
  std::uint32_t id_bits = 256;
  std::uint64_t count = 1;
  std::uint64_t seed = 0;
  std::string out_dir;
};

int run_fabricate(const FabricateArgs& a) {
  FabProcess process{a.id_bits, a.seed, 1.0};
  std::vector<Chip> chips = fabricate_run(process, a.count);
  fs::create_directories(a.out_dir);
  for (const Chip& chip : chips) {
    ChipId id = read_chip_id(chip, process);
    fs::path path = fs::path(a.out_dir) / chip_file_name(chip.chip_index);
    write_text_file(path.string(), emit_chip_dump(id));
    std::cout << "wrote " << path.string() << "\n";
  }
  return kOk;
}

// ---- derive-keys ----

struct DeriveArgs {
  std::string chip_file;
  std::string scheme = "rsa";
  std::uint64_t offset1 = 3;
  std::uint64_t offset2 = 7;
  std::uint64_t exponent = 65537;
  std::string group_p_hex;
  std::string group_g_hex = "2";
  std::string out_file;
  bool no_secret = false;
  bool erase_primes_flag = false;
};

int run_derive_keys(const DeriveArgs& a) {
  ChipId id = parse_chip_dump(read_text_file(a.chip_file));
  KeyMaterial key;
  if (a.scheme == "rsa") {
    if (!offsets_mutually_coprime(a.offset1, a.offset2))
      std::cerr << "warning: offsets " << a.offset1 << " and " << a.offset2
                << " share a factor; mutually coprime offsets are preferred\n";
    RsaKeyMaterial rsa = derive_rsa_keypair(id, a.offset1, a.offset2, a.exponent);
    if (a.erase_primes_flag) {
      rsa.p.reset();
      rsa.q.reset();
    }
    key = rsa;
  } else {
    BigInt p = a.group_p_hex.empty() ? desk_elgamal_group().p : bigint_from_hex(a.group_p_hex);
    BigInt g = bigint_from_hex(a.group_g_hex);
    key = derive_elgamal_keypair(id, p, g);
  }
  write_text_file(a.out_file, key_to_json(key, !a.no_secret).dump(2) + "\n");
  std::cout << "wrote " << a.out_file << "\n";
  return kOk;
}

// ---- transfer ----

struct TransferArgs {
  std::string record_file;
  std::string sender_key_file;
  std::string recipient_key_file;
  std::string key_file;  // --genesis mode
  std::string out_file;
  bool genesis = false;
};

int run_transfer(const TransferArgs& a) {
  if (a.genesis) {
    KeyMaterial key = key_from_json(ordered_json::parse(read_text_file(a.key_file)));
    TransferRecord record{make_genesis(key).unit};
    write_text_file(a.out_file, write_record(record));
    std::cout << "wrote " << a.out_file << " (genesis)\n";
    return kOk;
  }
  TransferRecord record = parse_record(read_text_file(a.record_file));
  if (record.empty()) {
    std::cerr << "error: record has no units\n";
    return kUsageError;
  }
  KeyMaterial sender_key = key_from_json(ordered_json::parse(read_text_file(a.sender_key_file)));
  PublicKey recipient = public_key_from_json(ordered_json::parse(read_text_file(a.recipient_key_file)));
  if (public_key_of(sender_key) != record.back().public_key) {
    std::cerr << "verification failure: sender key does not own the record tip\n";
    return kVerifyFailure;
  }
  LogicalNode sender{record.back(), sender_key};
  record.push_back(transfer(sender, recipient));
  write_text_file(a.out_file, write_record(record));
  std::cout << "wrote " << a.out_file << " (" << record.size() << " units)\n";
  return kOk;
}

// ---- mine ----

struct MineArgs {
  std::string record_file;
  std::uint64_t bundle_size = 256;
  unsigned difficulty = kDefaultDifficultyBits;
  std::string out_file;
};

int run_mine(const MineArgs& a) {
  TransferRecord record = parse_record(read_text_file(a.record_file));
  BlockChainState chain;
  chain.difficulty_bits = a.difficulty;
  std::vector<Digest> leaves;
  for (const TransactionUnit& u : record) {
    leaves.push_back(unit_hash(u));
    if (leaves.size() == a.bundle_size) {
      chain = append_block(chain, leaves);
      leaves.clear();
    }
  }
  if (!leaves.empty()) chain = append_block(chain, leaves);
  for (std::size_t i = 0; i < chain.blocks.size(); ++i)
    std::cout << "block " << i << ": nonce=" << chain.blocks[i].nonce
              << " attempts=" << chain.blocks[i].nonce + 1 << "\n";
  write_text_file(a.out_file, write_ledger(chain));
  std::cout << "wrote " << a.out_file << " (" << chain.blocks.size() << " blocks)\n";
  return kOk;
}

// ---- verify ----

struct VerifyArgs {
  std::string chain_file;
  std::string record_file;
};

// File-level ledger check: the chain rules plus each stored bundle actually
// hashing to its block's merkle root (the file claims the bundles; hold it
// to that claim).
int run_verify(const VerifyArgs& a) {
  if (!a.chain_file.empty()) {
    BlockChainState chain = parse_ledger(read_text_file(a.chain_file));
    Digest expected_prev{};
    for (std::size_t i = 0; i < chain.blocks.size(); ++i) {
      const Block& b = chain.blocks[i];
      std::string reason;
      if (b.prev_block_hash != expected_prev)
        reason = "previous-block hash mismatch";
      else if (!meets_difficulty(block_hash(b), chain.difficulty_bits))
        reason = "block hash misses the difficulty target";
      else if (chain.bundles[i].empty())
        reason = "empty bundle";
      else if (b.merkle_root != merkle_root(chain.bundles[i]))
        reason = "merkle root does not match stored bundle";
      if (!reason.empty()) {
        std::cout << "invalid: first_bad_block=" << i << " (" << reason << ")\n";
        return kVerifyFailure;
      }
      expected_prev = block_hash(b);
    }
    std::cout << "valid (" << chain.blocks.size() << " blocks)\n";
    return kOk;
  }
  TransferRecord record = parse_record(read_text_file(a.record_file));
  HistoryCheck check = verify_history(record);
  if (!check.valid) {
    std::cout << "invalid: first_bad_index=" << check.first_bad_index << " (" << check.reason
              << ")\n";
    return kVerifyFailure;
  }
  std::cout << "valid (" << record.size() << " units)\n";
  return kOk;
}

// ---- tamper-demo ----

struct TamperArgs {
  std::string chain_file;
  std::size_t index = 0;
  std::string out_file;
};

int run_tamper_demo(const TamperArgs& a) {
  BlockChainState chain = parse_ledger(read_text_file(a.chain_file));
  if (a.index >= chain.length()) {
    std::cerr << "error: index " << a.index << " outside the " << chain.length()
              << "-block ledger\n";
    return kUsageError;
  }
  // Deterministic forged root: the hash of the original, guaranteed distinct.
  const Digest& original = chain.blocks[a.index].merkle_root;
  Digest forged = sha256(original.bytes.data(), original.bytes.size());
  TamperRepair result = tamper_and_repair(chain, a.index, forged);

  BlockChainState unrepaired = chain;
  unrepaired.blocks[a.index].merkle_root = forged;
  ChainCheck detection = validate_chain(unrepaired);
  std::cout << "unrepaired chain: "
            << (detection.valid ? std::string("valid")
                                : "invalid at block " + std::to_string(detection.first_bad_block))
            << "\n";
  std::cout << "tampered_index=" << result.report.tampered_index << "\n";
  std::cout << "blocks_remined=" << result.report.blocks_remined << "\n";
  std::cout << "total_hash_attempts=" << result.report.total_hash_attempts << "\n";
  for (std::size_t i = 0; i < result.report.per_block_attempts.size(); ++i)
    std::cout << "block " << a.index + i << ": attempts=" << result.report.per_block_attempts[i]
              << "\n";
  if (!a.out_file.empty()) {
    result.repaired.bundles[a.index].clear();  // forged root has no honest bundle
    result.repaired.bundles[a.index].push_back(forged);
    write_text_file(a.out_file, write_ledger(result.repaired));
    std::cout << "wrote " << a.out_file << "\n";
  }
  return kOk;
}

// ---- retention ----

struct RetentionArgs {
  std::uint64_t chips = 1116;
  std::uint32_t id_bits = 256;
  std::uint64_t seed = 0;
  double flip_probability = 0.0;
  double temp_c = 125.0;
  double hours = 168.0;
};

int run_retention(const RetentionArgs& a) {
  FabProcess process{a.id_bits, a.seed, 1.0};
  AgingModel model{a.temp_c, a.hours, a.flip_probability};
  RetentionReport report = retention_experiment(process, a.chips, model);
  std::cout << "chips                 " << a.chips << "\n";
  std::cout << "id_bits               " << a.id_bits << "\n";
  std::cout << "aging                 " << a.temp_c << " C / " << a.hours << " h\n";
  std::cout << "inconsistent_chips    " << report.inconsistent_chips << "\n";
  std::cout << "total_mismatched_bits " << report.total_mismatched_bits << "\n";
  return kOk;
}

// ---- collision ----

struct CollisionArgs {
  std::uint64_t id_bits = 3461788;
  std::uint64_t population = 1000000000000ull;
  std::string mode = "paper-linear";
};

int run_collision(const CollisionArgs& a) {
  CollisionMode mode;
  if (a.mode == "paper-linear") {
    mode = CollisionMode::PaperLinear;
  } else if (a.mode == "birthday") {
    mode = CollisionMode::Birthday;
  } else {
    std::cerr << "error: unknown mode '" << a.mode << "' (paper-linear | birthday)\n";
    return kUsageError;
  }
  double info = information_quantity_log10(a.id_bits);
  double coll = collision_probability_log10(a.id_bits, a.population, mode);
  std::printf("id_bits                     %" PRIu64 "\n", a.id_bits);
  std::printf("population                  %" PRIu64 "\n", a.population);
  std::printf("information_quantity_log10  %.2f\n", info);
  std::printf("collision_probability_log10 %.2f\n", coll);
  return kOk;
}

// ---- simulate ----

struct SimulateArgs {
  ScenarioConfig cfg;
  std::string scheme = "elgamal";
  std::string preset;
  std::string events_out;
  std::string report_out;
  std::string ledger_out;
  std::string registry_out;
};

int run_simulate(SimulateArgs& a, const CLI::App* cmd) {
  if (!a.preset.empty()) {
    if (a.preset != "ssd-controller") {
      std::cerr << "error: unknown preset '" << a.preset << "'\n";
      return kUsageError;
    }
    ScenarioConfig preset = ssd_controller_scenario(a.cfg.master_seed);
    // Explicit flags override the preset's defaults.
    if (!cmd->count("--devices")) a.cfg.n_devices = preset.n_devices;
    if (!cmd->count("--transactions")) a.cfg.n_transactions = preset.n_transactions;
    if (!cmd->count("--bundle-size")) a.cfg.bundle_size = preset.bundle_size;
    if (!cmd->count("--difficulty")) a.cfg.difficulty_bits = preset.difficulty_bits;
    if (!cmd->count("--spoofs")) a.cfg.attack_mix.spoof_attempts = preset.attack_mix.spoof_attempts;
    if (!cmd->count("--tampers"))
      a.cfg.attack_mix.tamper_attempts = preset.attack_mix.tamper_attempts;
    a.cfg.scenario_name = preset.scenario_name;
  }
  a.cfg.scheme = scheme_from_string(a.scheme);
  SimOutcome out = run_scenario(a.cfg);
  std::cout << summary_table(out.report);
  if (!a.events_out.empty()) write_text_file(a.events_out, write_event_log(a.cfg, out.events));
  if (!a.report_out.empty()) write_text_file(a.report_out, report_to_json(out.report).dump(2) + "\n");
  if (!a.ledger_out.empty()) write_text_file(a.ledger_out, write_ledger(out.ledger));
  if (!a.registry_out.empty()) write_text_file(a.registry_out, write_registry(out.registry));
  return kOk;
}

// ---- replay ----

struct ReplayArgs {
  std::string events_file;
  std::string report_out;
  std::string expect_file;
};

int run_replay(const ReplayArgs& a) {
  ParsedEventLog log = parse_event_log(read_text_file(a.events_file));
  SimOutcome out = replay(log.config, log.events);
  std::cout << summary_table(out.report);
  if (!a.report_out.empty()) write_text_file(a.report_out, report_to_json(out.report).dump(2) + "\n");
  if (!a.expect_file.empty()) {
    SimReport expected = report_from_json(ordered_json::parse(read_text_file(a.expect_file)));
    if (!(expected == out.report)) {
      std::cerr << "verification failure: replayed report differs from expected report\n";
      return kVerifyFailure;
    }
    std::cout << "replay matches expected report\n";
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"chip-identity blockchain toolkit"};
  app.require_subcommand(1);

  FabricateArgs fab;
  CLI::App* fab_cmd = app.add_subcommand("fabricate", "generate simulated chip-ID dump files");
  fab_cmd->add_option("--id-bits", fab.id_bits, "bits per chip ID")->capture_default_str();
  fab_cmd->add_option("--count", fab.count, "number of chips")->capture_default_str();
  fab_cmd->add_option("--seed", fab.seed, "fabrication seed")->capture_default_str();
  fab_cmd->add_option("--out", fab.out_dir, "output directory")->required();

  DeriveArgs der;
  CLI::App* der_cmd = app.add_subcommand("derive-keys", "derive a key pair from a chip dump");
  der_cmd->add_option("--chip", der.chip_file, "chip dump file")->required();
  der_cmd->add_option("--scheme", der.scheme, "rsa | elgamal")->capture_default_str();
  der_cmd->add_option("--offset1", der.offset1, "rsa: offset for p scan")->capture_default_str();
  der_cmd->add_option("--offset2", der.offset2, "rsa: offset for q scan")->capture_default_str();
  der_cmd->add_option("--exponent", der.exponent, "rsa: public exponent")->capture_default_str();
  der_cmd->add_option("--group-p", der.group_p_hex, "elgamal: prime modulus (hex), default desk group");
  der_cmd->add_option("--group-g", der.group_g_hex, "elgamal: generator (hex)")->capture_default_str();
  der_cmd->add_flag("--no-secret", der.no_secret, "write only the public half");
  der_cmd->add_flag("--erase-primes", der.erase_primes_flag, "rsa: drop p and q from the output");
  der_cmd->add_option("--out", der.out_file, "output key JSON file")->required();

  TransferArgs tra;
  CLI::App* tra_cmd = app.add_subcommand("transfer", "start or extend a signed transfer record");
  tra_cmd->add_flag("--genesis", tra.genesis, "start a new record owned by --key");
  tra_cmd->add_option("--key", tra.key_file, "genesis: owner key JSON");
  tra_cmd->add_option("--record", tra.record_file, "existing record file");
  tra_cmd->add_option("--sender-key", tra.sender_key_file, "tip owner's key JSON (with secret)");
  tra_cmd->add_option("--recipient-key", tra.recipient_key_file, "recipient key JSON (public ok)");
  tra_cmd->add_option("--out", tra.out_file, "output record file")->required();

  MineArgs mine;
  CLI::App* mine_cmd = app.add_subcommand("mine", "bundle a record into a mined block ledger");
  mine_cmd->add_option("--record", mine.record_file, "transfer record file")->required();
  mine_cmd->add_option("--bundle-size", mine.bundle_size, "transactions per block")->capture_default_str();
  mine_cmd->add_option("--difficulty", mine.difficulty, "leading zero bits")->capture_default_str();
  mine_cmd->add_option("--out", mine.out_file, "output ledger file")->required();

  VerifyArgs ver;
  CLI::App* ver_cmd = app.add_subcommand("verify", "verify a ledger or a transfer record");
  ver_cmd->add_option("--chain", ver.chain_file, "ledger file");
  ver_cmd->add_option("--record", ver.record_file, "transfer record file");

  TamperArgs tam;
  CLI::App* tam_cmd = app.add_subcommand("tamper-demo", "tamper with a block and price the repair");
  tam_cmd->add_option("--chain", tam.chain_file, "ledger file")->required();
  tam_cmd->add_option("--index", tam.index, "block to tamper with")->required();
  tam_cmd->add_option("--out", tam.out_file, "write the re-mined ledger here");

  RetentionArgs ret;
  CLI::App* ret_cmd = app.add_subcommand("retention", "age chips and count readout mismatches");
  ret_cmd->add_option("--chips", ret.chips, "population size")->capture_default_str();
  ret_cmd->add_option("--id-bits", ret.id_bits, "bits per chip ID")->capture_default_str();
  ret_cmd->add_option("--seed", ret.seed, "fabrication seed")->capture_default_str();
  ret_cmd->add_option("--flip-probability", ret.flip_probability, "per-bit aging flip probability")
      ->capture_default_str();
  ret_cmd->add_option("--temp", ret.temp_c, "aging temperature, C")->capture_default_str();
  ret_cmd->add_option("--hours", ret.hours, "aging duration, h")->capture_default_str();

  CollisionArgs col;
  CLI::App* col_cmd = app.add_subcommand("collision", "ID-space and collision arithmetic (log domain)");
  col_cmd->add_option("--id-bits", col.id_bits, "bits per chip ID")->capture_default_str();
  col_cmd->add_option("--population", col.population, "number of chips")->capture_default_str();
  col_cmd->add_option("--mode", col.mode, "paper-linear | birthday")->capture_default_str();

  SimulateArgs sim;
  CLI::App* sim_cmd = app.add_subcommand("simulate", "run a device-network scenario");
  sim_cmd->add_option("--devices", sim.cfg.n_devices, "device population")->capture_default_str();
  sim_cmd->add_option("--transactions", sim.cfg.n_transactions, "scheduled transfers")->capture_default_str();
  sim_cmd->add_option("--bundle-size", sim.cfg.bundle_size, "transactions per block")->capture_default_str();
  sim_cmd->add_option("--difficulty", sim.cfg.difficulty_bits, "leading zero bits")->capture_default_str();
  sim_cmd->add_option("--spoofs", sim.cfg.attack_mix.spoof_attempts, "spoof attempts")->capture_default_str();
  sim_cmd->add_option("--tampers", sim.cfg.attack_mix.tamper_attempts, "tamper attempts")->capture_default_str();
  sim_cmd->add_option("--seed", sim.cfg.master_seed, "master seed")->capture_default_str();
  sim_cmd->add_option("--scenario", sim.cfg.scenario_name, "scenario label")->capture_default_str();
  sim_cmd->add_option("--scheme", sim.scheme, "rsa | elgamal")->capture_default_str();
  sim_cmd->add_option("--id-bits", sim.cfg.id_bits, "bits per chip ID")->capture_default_str();
  sim_cmd->add_option("--preset", sim.preset, "named scenario preset (ssd-controller)");
  sim_cmd->add_option("--events-out", sim.events_out, "write the event log here");
  sim_cmd->add_option("--report-out", sim.report_out, "write the report JSON here");
  sim_cmd->add_option("--ledger-out", sim.ledger_out, "write the mined ledger here");
  sim_cmd->add_option("--registry-out", sim.registry_out, "write the enrollment registry here");

  ReplayArgs rep;
  CLI::App* rep_cmd = app.add_subcommand("replay", "re-execute a recorded event log");
  rep_cmd->add_option("--events", rep.events_file, "event log file")->required();
  rep_cmd->add_option("--report-out", rep.report_out, "write the replayed report JSON here");
  rep_cmd->add_option("--expect", rep.expect_file, "report JSON the replay must reproduce");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kOk : kUsageError;
  }

  try {
    if (app.got_subcommand(fab_cmd)) return run_fabricate(fab);
    if (app.got_subcommand(der_cmd)) return run_derive_keys(der);
    if (app.got_subcommand(tra_cmd)) {
      if (tra.genesis && tra.key_file.empty()) {
        std::cerr << "error: --genesis needs --key\n";
        return kUsageError;
      }
      if (!tra.genesis &&
          (tra.record_file.empty() || tra.sender_key_file.empty() || tra.recipient_key_file.empty())) {
        std::cerr << "error: transfer needs --record, --sender-key and --recipient-key\n";
        return kUsageError;
      }
      return run_transfer(tra);
    }
    if (app.got_subcommand(mine_cmd)) return run_mine(mine);
    if (app.got_subcommand(ver_cmd)) {
      if (ver.chain_file.empty() == ver.record_file.empty()) {
        std::cerr << "error: verify needs exactly one of --chain or --record\n";
        return kUsageError;
      }
      return run_verify(ver);
    }
    if (app.got_subcommand(tam_cmd)) return run_tamper_demo(tam);
    if (app.got_subcommand(ret_cmd)) return run_retention(ret);
    if (app.got_subcommand(col_cmd)) return run_collision(col);
    if (app.got_subcommand(sim_cmd)) return run_simulate(sim, sim_cmd);
    if (app.got_subcommand(rep_cmd)) return run_replay(rep);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsageError;
  }
  return kUsageError;
}
