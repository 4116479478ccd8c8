#pragma once

// Seeded sampling of protocol runs and comparison against the exact values.
//
// Trial i draws from rng::child(seed, i), so results are identical for any
// number of workers. run_trials_serial is the single-threaded reference;
// run_trials spreads trials over OpenMP threads and must agree with it exactly.

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "tele/analysis.hpp"
#include "tele/protocol.hpp"

namespace tele::mc {

using protocol::ProtocolConfig;
using protocol::UnknownQubit;

inline constexpr std::uint64_t kMaxTrials = 1'000'000'000;
inline constexpr double kZThreshold = 4.0;

struct TrialConfig {
  std::uint64_t n_trials = 1;
  std::uint64_t seed = 0;
  UnknownQubit phi;
  ProtocolConfig protocol;

  void validate() const;
};

// Outcome class of one run. `leaf` is BOB_PHI0..3, ABANDONED or EXHAUSTED.
struct OutcomeClass {
  int bits = 0;
  int copies = 0;
  std::string leaf;

  auto operator<=>(const OutcomeClass&) const = default;
};

struct Estimate {
  std::string name;
  double value = 0.0;
  double std_error = 0.0;
  // Sample size behind the estimate.
  std::uint64_t n = 0;
  // Binomial estimates only: value = offset + scale * hits / n.
  bool binomial = false;
  double offset = 0.0;
  double scale = 1.0;
};

// Integer tallies only, so merging per-thread partials is order-independent.
struct TrialStats {
  std::uint64_t n_trials = 0;
  std::uint64_t seed = 0;
  std::map<OutcomeClass, std::uint64_t> counts;

  std::uint64_t bits_sum = 0;
  std::uint64_t bits_sq_sum = 0;
  std::uint64_t copies_sum = 0;
  std::uint64_t copies_sq_sum = 0;
  std::uint64_t completed = 0;
  std::uint64_t completed_bits_sum = 0;
  std::uint64_t completed_bits_sq_sum = 0;

  std::uint64_t first_stage_desired = 0;
  std::uint64_t first_stage_undesired = 0;
  std::uint64_t first_round_one_bit = 0;
  std::uint64_t end_to_end_one_bit = 0;
  std::uint64_t first_reset_attempts = 0;
  std::uint64_t first_reset_successes = 0;
  // first_chain_success_at[k]: first chain restored Bell on attempt k (index 0 unused).
  std::vector<std::uint64_t> first_chain_success_at;
  std::uint64_t reset_attempts = 0;
  std::uint64_t reset_successes = 0;
  std::array<std::uint64_t, 4> phi_counts{};
  std::uint64_t abandoned = 0;
  std::uint64_t exhausted = 0;

  // Worst fidelity of Bob's final state over completed runs (1 if none).
  double min_fidelity = 1.0;
  // Worst Bell overlap after a successful reset (1 if none).
  double min_bell_overlap = 1.0;

  void merge(const TrialStats& other);

  double mean_bits() const;
  double mean_copies() const;
  double empirical_one_bit_prob() const;

  // Every derived statistic with its standard error, in a fixed order.
  std::vector<Estimate> estimates() const;
};

TrialStats run_trials_serial(const TrialConfig& config);

// workers == 0 uses the OpenMP default.
TrialStats run_trials(const TrialConfig& config, int workers = 0);

struct ComparisonRow {
  std::string statistic;
  double analytic = 0.0;
  double empirical = 0.0;
  double std_error = 0.0;
  double z = 0.0;
  bool pass = false;
};

// Zero-variance rows pass only on equality (within 1e-12); others at |z| < 4.
ComparisonRow make_row(std::string statistic, double analytic, double empirical, double std_error);

struct ComparisonReport {
  double z_threshold = kZThreshold;
  std::vector<ComparisonRow> rows;

  bool all_pass() const;
};

// One row per statistic that has an exact counterpart under (phi, config).
// Throws ValidationError when max_resets exceeds the tree cap.
ComparisonReport compare(const TrialStats& stats, const UnknownQubit& phi,
                         const ProtocolConfig& config);

// --- bias experiment -------------------------------------------------------

struct BiasStats {
  std::uint64_t n_trials = 0;
  std::uint64_t seed = 0;
  std::uint64_t bob_zero = 0;
  std::uint64_t kept = 0;
  std::uint64_t kept_bob_zero = 0;
};

// Alice runs protocol::run_local, then Bob measures his qubit (one extra draw).
BiasStats run_bias_trials(std::uint64_t n_trials, std::uint64_t seed, const UnknownQubit& phi,
                          int max_resets, int workers = 0);

ComparisonReport compare_bias(const BiasStats& stats, const UnknownQubit& phi, int max_resets);

}  // namespace tele::mc
