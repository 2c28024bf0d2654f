#pragma once

#include <cstdint>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "phylink/bitstring.hpp"
#include "phylink/blockchain.hpp"
#include "phylink/chip.hpp"
#include "phylink/keys.hpp"
#include "phylink/link.hpp"
#include "phylink/netsim.hpp"
#include "phylink/transaction.hpp"

namespace phylink {

using ordered_json = nlohmann::ordered_json;

// Format version tags. Every persisted file opens with one, except the chip
// dump whose format is fixed as bare bit lines.
inline constexpr const char* kLedgerFormat = "phylink-ledger/1";
inline constexpr const char* kRecordFormat = "phylink-record/1";
inline constexpr const char* kRegistryFormat = "phylink-registry/1";
inline constexpr const char* kEventsFormat = "phylink-events/1";
inline constexpr const char* kReportFormat = "phylink-report/1";
inline constexpr const char* kKeyFormat = "phylink-key/1";

// ---- plain file helpers ----

inline std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write file: " + path);
  out << content;
  if (!out) throw std::runtime_error("write failed: " + path);
}

// ---- chip dump: '0'/'1' characters, 64 per line ----

inline std::string emit_chip_dump(const ChipId& id) {
  std::string out;
  out.reserve(id.bits.size() + id.bits.size() / 64 + 1);
  for (std::size_t i = 0; i < id.bits.size(); ++i) {
    out.push_back(id.bits.bit(i) ? '1' : '0');
    if ((i + 1) % 64 == 0) out.push_back('\n');
  }
  if (id.bits.size() % 64 != 0) out.push_back('\n');
  return out;
}

inline ChipId parse_chip_dump(const std::string& text) {
  std::vector<bool> bits;
  bits.reserve(text.size());
  std::size_t line = 1, col = 1;
  for (char c : text) {
    if (c == '\n') {
      ++line;
      col = 1;
      continue;
    }
    if (c != '0' && c != '1') {
      std::ostringstream msg;
      msg << "chip dump parse error at line " << line << ", column " << col
          << ": unexpected character";
      throw std::invalid_argument(msg.str());
    }
    bits.push_back(c == '1');
    ++col;
  }
  if (bits.empty()) throw std::invalid_argument("empty chip dump");
  Bitstring bs(bits.size());
  for (std::size_t i = 0; i < bits.size(); ++i) bs.set_bit(i, bits[i]);
  return ChipId{std::move(bs)};
}

// ---- key material JSON ----

inline std::string scheme_to_string(Scheme s) { return scheme_name(s); }

inline Scheme scheme_from_string(const std::string& s) {
  if (s == "rsa") return Scheme::Rsa;
  if (s == "elgamal") return Scheme::Elgamal;
  throw std::invalid_argument("unknown scheme: " + s);
}

inline ordered_json public_key_to_json(const PublicKey& pk) {
  ordered_json j;
  j["format"] = kKeyFormat;
  j["scheme"] = scheme_to_string(scheme_of(pk));
  ordered_json pub;
  if (const auto* rsa = std::get_if<RsaPublicKey>(&pk)) {
    pub["e"] = bigint_to_hex(rsa->e);
    pub["n"] = bigint_to_hex(rsa->n);
  } else {
    const auto& eg = std::get<ElgamalPublicKey>(pk);
    pub["p"] = bigint_to_hex(eg.p);
    pub["g"] = bigint_to_hex(eg.g);
    pub["y"] = bigint_to_hex(eg.y);
  }
  j["public"] = std::move(pub);
  return j;
}

inline ordered_json key_to_json(const KeyMaterial& key, bool include_secret = true) {
  ordered_json j = public_key_to_json(public_key_of(key));
  if (!include_secret) return j;
  ordered_json sec;
  if (const auto* rsa = std::get_if<RsaKeyMaterial>(&key)) {
    sec["d"] = bigint_to_hex(rsa->d);
    if (rsa->p) sec["p"] = bigint_to_hex(*rsa->p);
    if (rsa->q) sec["q"] = bigint_to_hex(*rsa->q);
  } else {
    sec["x"] = bigint_to_hex(std::get<ElgamalKeyMaterial>(key).x);
  }
  j["secret"] = std::move(sec);
  return j;
}

inline void check_format(const ordered_json& j, const char* expected) {
  if (!j.contains("format") || !j["format"].is_string())
    throw std::invalid_argument("missing format tag");
  std::string got = j["format"].get<std::string>();
  if (got != expected)
    throw std::invalid_argument("format version mismatch: expected " + std::string(expected) +
                                ", found " + got);
}

inline PublicKey public_key_from_json(const ordered_json& j) {
  check_format(j, kKeyFormat);
  Scheme s = scheme_from_string(j.at("scheme").get<std::string>());
  const ordered_json& pub = j.at("public");
  if (s == Scheme::Rsa)
    return RsaPublicKey{bigint_from_hex(pub.at("e").get<std::string>()),
                        bigint_from_hex(pub.at("n").get<std::string>())};
  return ElgamalPublicKey{bigint_from_hex(pub.at("p").get<std::string>()),
                          bigint_from_hex(pub.at("g").get<std::string>()),
                          bigint_from_hex(pub.at("y").get<std::string>())};
}

inline KeyMaterial key_from_json(const ordered_json& j) {
  PublicKey pk = public_key_from_json(j);
  if (!j.contains("secret")) throw std::invalid_argument("key file lacks secret components");
  const ordered_json& sec = j.at("secret");
  if (const auto* rsa = std::get_if<RsaPublicKey>(&pk)) {
    RsaKeyMaterial key;
    key.e = rsa->e;
    key.n = rsa->n;
    key.d = bigint_from_hex(sec.at("d").get<std::string>());
    if (sec.contains("p")) key.p = bigint_from_hex(sec.at("p").get<std::string>());
    if (sec.contains("q")) key.q = bigint_from_hex(sec.at("q").get<std::string>());
    return key;
  }
  const auto& eg = std::get<ElgamalPublicKey>(pk);
  ElgamalKeyMaterial key;
  key.p = eg.p;
  key.g = eg.g;
  key.y = eg.y;
  key.x = bigint_from_hex(sec.at("x").get<std::string>());
  return key;
}

// ---- transfer record: JSON-lines, one unit per line ----

inline std::string signature_block_hex(const TransactionUnit& unit) {
  if (std::holds_alternative<GenesisMarker>(unit.prev_signature))
    return to_hex(Bytes{kGenesisTag});
  return to_hex(serialize(std::get<Signature>(unit.prev_signature)));
}

inline std::string write_record(const TransferRecord& record) {
  ordered_json header;
  header["format"] = kRecordFormat;
  header["units"] = record.size();
  std::string out = header.dump() + "\n";
  for (const TransactionUnit& u : record) {
    ordered_json j;
    j["public_key"] = to_hex(serialize(u.public_key));
    j["prev_hash"] = u.prev_hash.hex();
    j["prev_signature"] = signature_block_hex(u);
    out += j.dump() + "\n";
  }
  return out;
}

namespace detail {

inline std::vector<std::string> split_lines(const std::string& text) {
  std::vector<std::string> lines;
  std::string cur;
  for (char c : text) {
    if (c == '\n') {
      lines.push_back(std::move(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (!cur.empty()) lines.push_back(std::move(cur));
  return lines;
}

inline TransactionUnit unit_from_json(const ordered_json& j) {
  TransactionUnit u;
  u.public_key = deserialize_public_key(from_hex(j.at("public_key").get<std::string>()));
  u.prev_hash = Digest::from_hex(j.at("prev_hash").get<std::string>());
  Bytes sig = from_hex(j.at("prev_signature").get<std::string>());
  if (sig.size() == 1 && sig[0] == kGenesisTag) {
    u.prev_signature = GenesisMarker{};
  } else {
    u.prev_signature = deserialize_signature(sig);
  }
  return u;
}

}  // namespace detail

inline TransferRecord parse_record(const std::string& text) {
  std::vector<std::string> lines = detail::split_lines(text);
  if (lines.empty()) throw std::invalid_argument("empty record file");
  ordered_json header = ordered_json::parse(lines[0]);
  check_format(header, kRecordFormat);
  std::size_t declared = header.at("units").get<std::size_t>();
  if (lines.size() - 1 != declared)
    throw std::invalid_argument("record file truncated or padded: unit count mismatch");
  TransferRecord record;
  for (std::size_t i = 1; i < lines.size(); ++i)
    record.push_back(detail::unit_from_json(ordered_json::parse(lines[i])));
  return record;
}

// ---- block ledger: JSON-lines with difficulty header ----

inline std::string write_ledger(const BlockChainState& chain) {
  ordered_json header;
  header["format"] = kLedgerFormat;
  header["difficulty_bits"] = chain.difficulty_bits;
  header["blocks"] = chain.blocks.size();
  std::string out = header.dump() + "\n";
  for (std::size_t i = 0; i < chain.blocks.size(); ++i) {
    const Block& b = chain.blocks[i];
    ordered_json j;
    j["merkle_root"] = b.merkle_root.hex();
    j["nonce"] = b.nonce;
    j["prev_block_hash"] = b.prev_block_hash.hex();
    ordered_json bundle = ordered_json::array();
    for (const Digest& leaf : chain.bundles[i]) bundle.push_back(leaf.hex());
    j["bundle"] = std::move(bundle);
    out += j.dump() + "\n";
  }
  return out;
}

inline BlockChainState parse_ledger(const std::string& text) {
  std::vector<std::string> lines = detail::split_lines(text);
  if (lines.empty()) throw std::invalid_argument("empty ledger file");
  ordered_json header = ordered_json::parse(lines[0]);
  check_format(header, kLedgerFormat);
  BlockChainState chain;
  chain.difficulty_bits = header.at("difficulty_bits").get<unsigned>();
  std::size_t declared = header.at("blocks").get<std::size_t>();
  if (lines.size() - 1 != declared)
    throw std::invalid_argument("ledger file truncated or padded: block count mismatch");
  for (std::size_t i = 1; i < lines.size(); ++i) {
    ordered_json j = ordered_json::parse(lines[i]);
    Block b;
    b.merkle_root = Digest::from_hex(j.at("merkle_root").get<std::string>());
    b.nonce = j.at("nonce").get<std::uint64_t>();
    b.prev_block_hash = Digest::from_hex(j.at("prev_block_hash").get<std::string>());
    std::vector<Digest> bundle;
    for (const auto& leaf : j.at("bundle")) bundle.push_back(Digest::from_hex(leaf.get<std::string>()));
    chain.blocks.push_back(b);
    chain.bundles.push_back(std::move(bundle));
  }
  return chain;
}

// ---- registry JSON ----

inline std::string write_registry(const Registry& reg) {
  ordered_json j;
  j["format"] = kRegistryFormat;
  ordered_json entries = ordered_json::array();
  for (const auto& [key, rec] : reg.entries) {
    ordered_json e;
    e["public_key"] = key;
    e["chip_commitment"] = rec.chip_commitment.hex();
    e["metadata"] = rec.metadata;
    entries.push_back(std::move(e));
  }
  j["entries"] = std::move(entries);
  return j.dump(2) + "\n";
}

inline Registry parse_registry(const std::string& text) {
  ordered_json j = ordered_json::parse(text);
  check_format(j, kRegistryFormat);
  Registry reg;
  for (const auto& e : j.at("entries")) {
    EnrollmentRecord rec;
    rec.chip_commitment = Digest::from_hex(e.at("chip_commitment").get<std::string>());
    rec.metadata = e.at("metadata").get<std::string>();
    reg.entries.emplace(e.at("public_key").get<std::string>(), std::move(rec));
  }
  return reg;
}

// ---- scenario config and simulation report JSON ----

inline ordered_json config_to_json(const ScenarioConfig& cfg) {
  ordered_json j;
  j["n_devices"] = cfg.n_devices;
  j["n_transactions"] = cfg.n_transactions;
  j["bundle_size"] = cfg.bundle_size;
  j["difficulty_bits"] = cfg.difficulty_bits;
  j["spoof_attempts"] = cfg.attack_mix.spoof_attempts;
  j["tamper_attempts"] = cfg.attack_mix.tamper_attempts;
  j["master_seed"] = cfg.master_seed;
  j["scenario_name"] = cfg.scenario_name;
  j["scheme"] = scheme_to_string(cfg.scheme);
  j["id_bits"] = cfg.id_bits;
  return j;
}

inline ScenarioConfig config_from_json(const ordered_json& j) {
  ScenarioConfig cfg;
  cfg.n_devices = j.at("n_devices").get<std::uint64_t>();
  cfg.n_transactions = j.at("n_transactions").get<std::uint64_t>();
  cfg.bundle_size = j.at("bundle_size").get<std::uint64_t>();
  cfg.difficulty_bits = j.at("difficulty_bits").get<unsigned>();
  cfg.attack_mix.spoof_attempts = j.at("spoof_attempts").get<std::uint64_t>();
  cfg.attack_mix.tamper_attempts = j.at("tamper_attempts").get<std::uint64_t>();
  cfg.master_seed = j.at("master_seed").get<std::uint64_t>();
  cfg.scenario_name = j.at("scenario_name").get<std::string>();
  cfg.scheme = scheme_from_string(j.at("scheme").get<std::string>());
  cfg.id_bits = j.at("id_bits").get<std::size_t>();
  return cfg;
}

inline ordered_json report_to_json(const SimReport& r) {
  ordered_json j;
  j["format"] = kReportFormat;
  j["transfers_ok"] = r.transfers_ok;
  j["spoofs_attempted"] = r.spoofs_attempted;
  j["spoofs_accepted"] = r.spoofs_accepted;
  j["tampers_attempted"] = r.tampers_attempted;
  j["tampers_detected"] = r.tampers_detected;
  j["blocks_mined"] = r.blocks_mined;
  j["total_hash_attempts"] = r.total_hash_attempts;
  j["final_tip_hash"] = r.final_tip_hash.hex();
  j["events_digest"] = r.events_digest.hex();
  return j;
}

inline SimReport report_from_json(const ordered_json& j) {
  check_format(j, kReportFormat);
  SimReport r;
  r.transfers_ok = j.at("transfers_ok").get<std::uint64_t>();
  r.spoofs_attempted = j.at("spoofs_attempted").get<std::uint64_t>();
  r.spoofs_accepted = j.at("spoofs_accepted").get<std::uint64_t>();
  r.tampers_attempted = j.at("tampers_attempted").get<std::uint64_t>();
  r.tampers_detected = j.at("tampers_detected").get<std::uint64_t>();
  r.blocks_mined = j.at("blocks_mined").get<std::uint64_t>();
  r.total_hash_attempts = j.at("total_hash_attempts").get<std::uint64_t>();
  r.final_tip_hash = Digest::from_hex(j.at("final_tip_hash").get<std::string>());
  r.events_digest = Digest::from_hex(j.at("events_digest").get<std::string>());
  return r;
}

/// Plain-text rendering of a report (deterministic; no wall time).
inline std::string summary_table(const SimReport& r) {
  std::ostringstream out;
  auto row = [&out](const char* label, const std::string& value) {
    out << label;
    for (std::size_t i = std::string(label).size(); i < 22; ++i) out << ' ';
    out << value << "\n";
  };
  row("transfers_ok", std::to_string(r.transfers_ok));
  row("spoofs_attempted", std::to_string(r.spoofs_attempted));
  row("spoofs_accepted", std::to_string(r.spoofs_accepted));
  row("tampers_attempted", std::to_string(r.tampers_attempted));
  row("tampers_detected", std::to_string(r.tampers_detected));
  row("blocks_mined", std::to_string(r.blocks_mined));
  row("total_hash_attempts", std::to_string(r.total_hash_attempts));
  row("final_tip_hash", r.final_tip_hash.hex());
  row("events_digest", r.events_digest.hex());
  return out.str();
}

// ---- event log: JSON-lines with config-bearing header ----

inline ordered_json event_to_json(const SimEvent& ev) {
  ordered_json j;
  j["tick"] = ev.tick;
  j["kind"] = event_kind_name(ev.kind);
  switch (ev.kind) {
    case EventKind::Transfer:
      j["sender"] = ev.sender;
      j["recipient"] = ev.recipient;
      break;
    case EventKind::Spoof:
      j["victim"] = ev.victim;
      j["attacker_chip"] = ev.attacker_chip;
      break;
    case EventKind::Tamper:
      j["block_index"] = ev.block_index;
      j["tamper_root"] = ev.tamper_root.hex();
      break;
    case EventKind::Mine:
      j["block_index"] = ev.block_index;
      j["leaves"] = ev.leaves;
      break;
  }
  return j;
}

inline SimEvent event_from_json(const ordered_json& j) {
  SimEvent ev;
  ev.tick = j.at("tick").get<std::uint64_t>();
  ev.kind = event_kind_from_name(j.at("kind").get<std::string>());
  switch (ev.kind) {
    case EventKind::Transfer:
      ev.sender = j.at("sender").get<std::uint64_t>();
      ev.recipient = j.at("recipient").get<std::uint64_t>();
      break;
    case EventKind::Spoof:
      ev.victim = j.at("victim").get<std::uint64_t>();
      ev.attacker_chip = j.at("attacker_chip").get<std::uint64_t>();
      break;
    case EventKind::Tamper:
      ev.block_index = j.at("block_index").get<std::uint64_t>();
      ev.tamper_root = Digest::from_hex(j.at("tamper_root").get<std::string>());
      break;
    case EventKind::Mine:
      ev.block_index = j.at("block_index").get<std::uint64_t>();
      ev.leaves = j.at("leaves").get<std::uint64_t>();
      break;
  }
  return ev;
}

inline std::string write_event_log(const ScenarioConfig& cfg, const std::vector<SimEvent>& events) {
  ordered_json header;
  header["format"] = kEventsFormat;
  header["config"] = config_to_json(cfg);
  header["event_count"] = events.size();
  std::string out = header.dump() + "\n";
  for (const SimEvent& ev : events) out += event_to_json(ev).dump() + "\n";
  return out;
}

struct ParsedEventLog {
  ScenarioConfig config;
  std::vector<SimEvent> events;
};

inline ParsedEventLog parse_event_log(const std::string& text) {
  std::vector<std::string> lines = detail::split_lines(text);
  if (lines.empty()) throw std::invalid_argument("empty event log");
  ordered_json header = ordered_json::parse(lines[0]);
  check_format(header, kEventsFormat);
  ParsedEventLog log;
  log.config = config_from_json(header.at("config"));
  std::size_t declared = header.at("event_count").get<std::size_t>();
  if (lines.size() - 1 != declared)
    throw std::invalid_argument("event log truncated or padded: event count mismatch");
  for (std::size_t i = 1; i < lines.size(); ++i)
    log.events.push_back(event_from_json(ordered_json::parse(lines[i])));
  return log;
}

}  // namespace phylink
