#include <catch2/catch_amalgamated.hpp>

#include <filesystem>

#include "helpers.hpp"
#include "phylink/io.hpp"

using namespace phylink;

TEST_CASE("chip dumps are 64-character bit lines that round-trip") {
  FabProcess proc{256, 808, 1.0};
  ChipId id = read_chip_id(fabricate_chip(proc, 0), proc);
  std::string dump = emit_chip_dump(id);

  // 256 bits -> 4 lines of 64 characters, each newline-terminated.
  REQUIRE(dump.size() == 256 + 4);
  CHECK(dump[64] == '\n');
  CHECK(dump.back() == '\n');
  CHECK(dump.find_first_not_of("01\n") == std::string::npos);
  CHECK(parse_chip_dump(dump) == id);
}

TEST_CASE("chip dumps handle widths that are not line multiples") {
  FabProcess proc{100, 809, 1.0};
  ChipId id = read_chip_id(fabricate_chip(proc, 1), proc);
  std::string dump = emit_chip_dump(id);
  REQUIRE(dump.size() == 100 + 2);  // 64 + newline + 36 + newline
  CHECK(parse_chip_dump(dump) == id);
}

TEST_CASE("chip dump round-trips across a population of random widths") {
  SplitMix64 rng(810);
  for (int i = 0; i < 300; ++i) {
    std::size_t nbits = 8 + rng.below(500);
    Bitstring bits = Bitstring::random(nbits, rng);
    ChipId id{bits};
    CHECK(parse_chip_dump(emit_chip_dump(id)) == id);
  }
}

TEST_CASE("chip dump parser reports the offending position") {
  CHECK_THROWS_AS(parse_chip_dump(""), std::invalid_argument);
  CHECK_THROWS_AS(parse_chip_dump("\n\n"), std::invalid_argument);
  try {
    parse_chip_dump("0101\n010x01\n");
    FAIL("expected a parse error");
  } catch (const std::invalid_argument& e) {
    std::string msg = e.what();
    CHECK(msg.find("line 2") != std::string::npos);
    CHECK(msg.find("column 4") != std::string::npos);
  }
}

TEST_CASE("key json round-trips with and without secrets") {
  RsaKeyMaterial rsa = testutil::toy_rsa(1);
  ElgamalKeyMaterial eg = testutil::desk_elgamal(1);

  for (KeyMaterial key : {KeyMaterial{rsa}, KeyMaterial{eg}}) {
    ordered_json with_secret = key_to_json(key);
    CHECK(with_secret.at("format") == kKeyFormat);
    KeyMaterial back = key_from_json(with_secret);
    CHECK(back == key);

    ordered_json public_only = key_to_json(key, false);
    CHECK_FALSE(public_only.contains("secret"));
    CHECK(public_key_from_json(public_only) == public_key_of(key));
    CHECK_THROWS_AS(key_from_json(public_only), std::invalid_argument);
  }

  // Erased primes survive the round trip as absent fields.
  RsaKeyMaterial wiped = rsa;
  wiped.p.reset();
  wiped.q.reset();
  ordered_json j = key_to_json(KeyMaterial{wiped});
  CHECK_FALSE(j.at("secret").contains("p"));
  KeyMaterial back = key_from_json(j);
  CHECK(back == KeyMaterial{wiped});
}

TEST_CASE("key json values are lowercase hex strings") {
  ordered_json j = key_to_json(KeyMaterial{testutil::toy_rsa(2)});
  std::string n = j.at("public").at("n").get<std::string>();
  CHECK(n.find_first_not_of("0123456789abcdef") == std::string::npos);
}

TEST_CASE("format version mismatches are called out by name") {
  ordered_json j = key_to_json(KeyMaterial{testutil::toy_rsa(3)});
  j["format"] = "phylink-key/2";
  try {
    public_key_from_json(j);
    FAIL("expected a format error");
  } catch (const std::invalid_argument& e) {
    std::string msg = e.what();
    CHECK(msg.find("phylink-key/1") != std::string::npos);
    CHECK(msg.find("phylink-key/2") != std::string::npos);
  }
  j.erase("format");
  CHECK_THROWS_AS(public_key_from_json(j), std::invalid_argument);
}

namespace {

TransferRecord sample_record() {
  KeyMaterial a = testutil::toy_rsa(4);
  KeyMaterial b = KeyMaterial{testutil::desk_elgamal(4)};
  KeyMaterial c = testutil::toy_rsa(5);
  TransferRecord record;
  LogicalNode node = make_genesis(a);
  record.push_back(node.unit);
  for (const KeyMaterial* next : {&b, &c, &b}) {
    TransactionUnit unit = transfer(node, public_key_of(*next));
    record.push_back(unit);
    node = LogicalNode{unit, *next};
  }
  return record;
}

}  // namespace

TEST_CASE("transfer records round-trip bit-exactly") {
  TransferRecord record = sample_record();
  std::string text = write_record(record);
  TransferRecord parsed = parse_record(text);
  CHECK(parsed == record);
  CHECK(write_record(parsed) == text);  // re-serialization is stable
  CHECK(verify_history(parsed).valid);
}

TEST_CASE("record files declare their unit count and reject truncation") {
  std::string text = write_record(sample_record());
  std::vector<std::string> lines;
  std::string cur;
  for (char ch : text) {
    if (ch == '\n') { lines.push_back(cur); cur.clear(); } else { cur.push_back(ch); }
  }
  REQUIRE(lines.size() == 5);  // header + 4 units

  std::string truncated = lines[0] + "\n" + lines[1] + "\n" + lines[2] + "\n";
  CHECK_THROWS_AS(parse_record(truncated), std::invalid_argument);

  std::string padded = text + lines[4] + "\n";
  CHECK_THROWS_AS(parse_record(padded), std::invalid_argument);

  CHECK_THROWS_AS(parse_record(""), std::invalid_argument);
}

TEST_CASE("ledgers round-trip bit-exactly with their bundles") {
  BlockChainState chain;
  chain.difficulty_bits = 8;
  SplitMix64 rng(811);
  for (int b = 0; b < 3; ++b) {
    std::vector<Digest> leaves;
    for (int i = 0; i <= b; ++i) leaves.push_back(testutil::random_digest(rng));
    chain = append_block(chain, leaves);
  }

  std::string text = write_ledger(chain);
  BlockChainState parsed = parse_ledger(text);
  CHECK(parsed == chain);
  CHECK(write_ledger(parsed) == text);
  CHECK(validate_chain(parsed).valid);

  // Truncation trips the declared block count.
  std::string cut = text.substr(0, text.rfind('{'));
  CHECK_THROWS_AS(parse_ledger(cut), std::invalid_argument);
  // Wrong format tag.
  std::string retagged = text;
  retagged.replace(retagged.find("phylink-ledger/1"), 16, "phylink-ledger/9");
  CHECK_THROWS_AS(parse_ledger(retagged), std::invalid_argument);
}

TEST_CASE("registries round-trip their entries") {
  FabProcess proc{128, 812, 1.0};
  Registry reg;
  for (std::uint64_t i = 0; i < 4; ++i) {
    DeviceNode dev = make_device(fabricate_chip(proc, i), proc, RsaDerivation{}, 0x1000 + i);
    reg = enroll(std::move(reg), dev, "unit " + std::to_string(i));
  }
  std::string text = write_registry(reg);
  Registry parsed = parse_registry(text);
  CHECK(parsed.entries == reg.entries);
  CHECK(write_registry(parsed) == text);
  // Nonce memory is runtime state, not part of the persisted registry.
  CHECK(parsed.seen_nonces.empty());
}

TEST_CASE("scenario configs round-trip through json") {
  ScenarioConfig cfg;
  cfg.n_devices = 9;
  cfg.n_transactions = 77;
  cfg.bundle_size = 32;
  cfg.difficulty_bits = 10;
  cfg.attack_mix = {5, 3};
  cfg.master_seed = 123456789;
  cfg.scenario_name = "round-trip";
  cfg.scheme = Scheme::Rsa;
  cfg.id_bits = 96;
  CHECK(config_from_json(config_to_json(cfg)) == cfg);
}

TEST_CASE("simulation reports round-trip through json") {
  ScenarioConfig cfg;
  cfg.n_devices = 4;
  cfg.n_transactions = 10;
  cfg.bundle_size = 4;
  cfg.difficulty_bits = 8;
  cfg.attack_mix = {3, 2};
  cfg.master_seed = 5;
  cfg.id_bits = 64;
  cfg.scheme = Scheme::Rsa;
  SimReport report = run_scenario(cfg).report;
  ordered_json j = report_to_json(report);
  CHECK(j.at("format") == kReportFormat);
  SimReport back = report_from_json(j);
  CHECK(back == report);

  std::string table = summary_table(report);
  CHECK(table.find("spoofs_accepted") != std::string::npos);
  CHECK(table.find(report.final_tip_hash.hex()) != std::string::npos);
}

TEST_CASE("event logs round-trip bit-exactly") {
  ScenarioConfig cfg;
  cfg.n_devices = 4;
  cfg.n_transactions = 12;
  cfg.bundle_size = 4;
  cfg.difficulty_bits = 8;
  cfg.attack_mix = {4, 2};
  cfg.master_seed = 6;
  cfg.id_bits = 64;
  cfg.scheme = Scheme::Rsa;
  SimOutcome out = run_scenario(cfg);

  std::string text = write_event_log(cfg, out.events);
  ParsedEventLog parsed = parse_event_log(text);
  CHECK(parsed.config == cfg);
  CHECK(parsed.events == out.events);
  CHECK(write_event_log(parsed.config, parsed.events) == text);

  // Dropping the last line breaks the declared count.
  std::string cut = text.substr(0, text.rfind('{') );
  CHECK_THROWS_AS(parse_event_log(cut), std::invalid_argument);
}

TEST_CASE("text files write and read back verbatim") {
  namespace fs = std::filesystem;
  fs::path dir = fs::temp_directory_path() / "phylink-io-test";
  fs::create_directories(dir);
  std::string path = (dir / "blob.txt").string();
  std::string payload = "line one\nline two\n\x01\x02 binary-ish\n";
  write_text_file(path, payload);
  CHECK(read_text_file(path) == payload);
  CHECK_THROWS_AS(read_text_file((dir / "missing.txt").string()), std::runtime_error);
  fs::remove_all(dir);
}
