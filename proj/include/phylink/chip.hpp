#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "phylink/bitstring.hpp"
#include "phylink/rng.hpp"

namespace phylink {

/// Parameters of a simulated fabrication run. The real chips draw their
/// identification codes from manufacturing randomness; here a seeded
/// generator stands in, so the same (fab_seed, chip_index) always yields
/// the same latent bits. A hardware source could replace fabricate_run
/// without touching anything downstream.
struct FabProcess {
  std::uint32_t id_bits = 256;
  std::uint64_t fab_seed = 0;
  double stability = 1.0;  // per-bit probability a cell reads back consistently

  void check() const {
    if (id_bits < 8) throw std::invalid_argument("id_bits must be >= 8");
    if (stability < 0.0 || stability > 1.0) throw std::invalid_argument("stability must be in [0,1]");
  }
};

struct Chip {
  std::uint64_t chip_index = 0;
  Bitstring true_id;
  double aging_hours = 0.0;
  double aging_temp_c = 0.0;
};

/// One readout of a chip's identification code.
struct ChipId {
  Bitstring bits;

  friend bool operator==(const ChipId&, const ChipId&) = default;
};

/// Accelerated-aging stress applied to a chip. The measured chips came back
/// bit-identical after 125 C / 168 h, so the default flip probability is 0;
/// nonzero values are for robustness experiments only.
struct AgingModel {
  double temp_c = 125.0;
  double duration_hours = 168.0;
  double flip_probability = 0.0;

  void check() const {
    if (duration_hours <= 0.0) throw std::invalid_argument("duration_hours must be positive");
    if (flip_probability < 0.0 || flip_probability > 1.0)
      throw std::invalid_argument("flip_probability must be in [0,1]");
  }
};

namespace detail {
// Stream tags keep the fabricate / read / age streams disjoint even when the
// caller passes equal seeds.
inline constexpr std::uint64_t kFabStream = 0x66616200;
inline constexpr std::uint64_t kReadStream = 0x72656100;
inline constexpr std::uint64_t kAgeStream = 0x61676500;

inline SplitMix64 chip_stream(std::uint64_t tag, std::uint64_t seed, std::uint64_t chip_index) {
  return SplitMix64(mix64(tag ^ mix64(seed)) ^ mix64(chip_index + 1));
}
}  // namespace detail

inline Chip fabricate_chip(const FabProcess& process, std::uint64_t chip_index) {
  process.check();
  SplitMix64 rng = detail::chip_stream(detail::kFabStream, process.fab_seed, chip_index);
  Chip chip;
  chip.chip_index = chip_index;
  chip.true_id = Bitstring::random(process.id_bits, rng);
  return chip;
}

inline std::vector<Chip> fabricate_run(const FabProcess& process, std::uint64_t count) {
  process.check();
  if (count == 0) throw std::invalid_argument("empty fabrication run");
  std::vector<Chip> chips;
  chips.reserve(count);
  for (std::uint64_t i = 0; i < count; ++i) chips.push_back(fabricate_chip(process, i));
  return chips;
}

/// Reads the identification code. Each bit reports faithfully with
/// probability process.stability and flips otherwise; with stability 1.0
/// the readout equals the latent bits exactly.
inline ChipId read_chip_id(const Chip& chip, const FabProcess& process,
                           std::uint64_t read_seed = 0) {
  process.check();
  Bitstring bits = chip.true_id;
  if (process.stability < 1.0) {
    SplitMix64 rng = detail::chip_stream(detail::kReadStream, read_seed, chip.chip_index);
    double flip_p = 1.0 - process.stability;
    for (std::size_t i = 0; i < bits.size(); ++i)
      if (rng.bernoulli(flip_p)) bits.flip(i);
  }
  return ChipId{std::move(bits)};
}

/// Applies the stress model: flips each latent bit with the model's flip
/// probability and records the exposure.
inline Chip apply_aging(const Chip& chip, const AgingModel& model, std::uint64_t age_seed) {
  model.check();
  Chip aged = chip;
  aged.aging_hours += model.duration_hours;
  aged.aging_temp_c = model.temp_c;
  if (model.flip_probability > 0.0) {
    SplitMix64 rng = detail::chip_stream(detail::kAgeStream, age_seed, chip.chip_index);
    for (std::size_t i = 0; i < aged.true_id.size(); ++i)
      if (rng.bernoulli(model.flip_probability)) aged.true_id.flip(i);
  }
  return aged;
}

struct RetentionSeeds {
  std::uint64_t read_before = 1;
  std::uint64_t age = 2;
  std::uint64_t read_after = 3;
};

struct RetentionReport {
  std::vector<std::uint64_t> per_chip_mismatches;
  std::uint64_t inconsistent_chips = 0;
  std::uint64_t total_mismatched_bits = 0;
};

/// Read, age, re-read every chip of a fresh run and count bit mismatches
/// between the two readouts.
inline RetentionReport retention_experiment(const FabProcess& process, std::uint64_t n_chips,
                                            const AgingModel& model, const RetentionSeeds& seeds = {}) {
  if (n_chips == 0) throw std::invalid_argument("retention experiment needs at least one chip");
  model.check();
  RetentionReport report;
  report.per_chip_mismatches.reserve(n_chips);
  for (std::uint64_t i = 0; i < n_chips; ++i) {
    Chip chip = fabricate_chip(process, i);
    ChipId before = read_chip_id(chip, process, seeds.read_before);
    Chip aged = apply_aging(chip, model, seeds.age);
    ChipId after = read_chip_id(aged, process, seeds.read_after);
    std::uint64_t mismatches = hamming_distance(before.bits, after.bits);
    report.per_chip_mismatches.push_back(mismatches);
    if (mismatches > 0) ++report.inconsistent_chips;
    report.total_mismatched_bits += mismatches;
  }
  return report;
}

/// log10 of the number of distinct IDs an id_bits-wide code can take.
/// Stays in the log domain: the interesting populations (10^1,042,102 for a
/// 4Gbit-line process) are far beyond any integer type.
inline double information_quantity_log10(std::uint64_t id_bits) {
  if (id_bits < 1) throw std::invalid_argument("id_bits must be >= 1");
  return static_cast<double>(id_bits) * std::log10(2.0);
}

enum class CollisionMode {
  PaperLinear,  // n / S: the estimate the reported -1,042,090 figure matches
  Birthday,     // n(n-1)/2 / S: the pairwise bound
};

/// log10 of the probability that a population of n_chips contains two equal
/// IDs, under the chosen estimate.
inline double collision_probability_log10(std::uint64_t id_bits, std::uint64_t n_chips,
                                          CollisionMode mode) {
  if (id_bits < 1) throw std::invalid_argument("id_bits must be >= 1");
  if (n_chips < 2) throw std::invalid_argument("degenerate population: need at least two chips");
  double log_space = static_cast<double>(id_bits) * std::log10(2.0);
  double n = static_cast<double>(n_chips);
  switch (mode) {
    case CollisionMode::PaperLinear:
      return std::log10(n) - log_space;
    case CollisionMode::Birthday:
      return std::log10(n) + std::log10(n - 1.0) - std::log10(2.0) - log_space;
  }
  throw std::logic_error("unknown collision mode");
}

}  // namespace phylink
