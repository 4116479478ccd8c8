#include "tele/montecarlo.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <exception>

#include "tele/rng.hpp"

namespace tele::mc {

namespace {

using protocol::EventType;
using protocol::Strategy;
using protocol::Transcript;

TrialStats empty_stats(const TrialConfig& config) {
  TrialStats s;
  s.seed = config.seed;
  const int max_chain = config.protocol.strategy == Strategy::Conventional
                            ? 0
                            : config.protocol.max_resets;
  s.first_chain_success_at.assign(static_cast<std::size_t>(max_chain) + 1, 0);
  return s;
}

void record(TrialStats& s, const Transcript& t, bool exhausted) {
  ++s.n_trials;
  const auto bits = static_cast<std::uint64_t>(t.bits_sent);
  const auto copies = static_cast<std::uint64_t>(t.copies_consumed);
  s.bits_sum += bits;
  s.bits_sq_sum += bits * bits;
  s.copies_sum += copies;
  s.copies_sq_sum += copies * copies;

  std::string leaf;
  if (exhausted) {
    leaf = "EXHAUSTED";
    ++s.exhausted;
  } else if (t.abandoned()) {
    leaf = "ABANDONED";
    ++s.abandoned;
  } else {
    const int idx = protocol::bob_phi_index(t);
    leaf = "BOB_PHI" + std::to_string(idx);
    ++s.phi_counts[static_cast<std::size_t>(idx)];
    ++s.completed;
    s.completed_bits_sum += bits;
    s.completed_bits_sq_sum += bits * bits;
    if (t.bits_sent == 1) ++s.end_to_end_one_bit;
    s.min_fidelity = std::min(s.min_fidelity, t.fidelity.value_or(0.0));
  }
  ++s.counts[OutcomeClass{t.bits_sent, t.copies_consumed, leaf}];

  bool first_stage_seen = false;
  bool first_reset_seen = false;
  for (const auto& e : t.events) {
    if (e.type == EventType::Stage1) {
      if (!first_stage_seen) {
        first_stage_seen = true;
        ++(*e.outcome == 0 ? s.first_stage_desired : s.first_stage_undesired);
      } else {
        first_reset_seen = true;
      }
    } else if (e.type == EventType::ResetAttempt) {
      ++s.reset_attempts;
      if (*e.success) {
        ++s.reset_successes;
        s.min_bell_overlap = std::min(s.min_bell_overlap, e.bell_overlap.value_or(0.0));
      }
      if (!first_reset_seen) {
        first_reset_seen = true;
        ++s.first_reset_attempts;
        if (*e.success) ++s.first_reset_successes;
      }
    }
  }

  const auto fr = protocol::first_round(t);
  if (fr != protocol::FirstRound::Failed) ++s.first_round_one_bit;
  const int at = protocol::first_chain_success_attempt(t);
  if (at > 0) ++s.first_chain_success_at.at(static_cast<std::size_t>(at));
}

void run_one(const TrialConfig& config, std::uint64_t index, TrialStats& local) {
  auto stream = rng::child(config.seed, index);
  const protocol::DrawFn draw = [&stream] { return stream.uniform(); };
  try {
    record(local, protocol::run_teleport(config.phi, config.protocol, draw), false);
  } catch (const protocol::ResourceExhausted& ex) {
    record(local, ex.transcript(), true);
  }
}

Estimate proportion(std::string name, std::uint64_t hits, std::uint64_t n) {
  Estimate e{std::move(name), 0.0, 0.0, n};
  e.binomial = true;
  if (n == 0) return e;
  e.value = static_cast<double>(hits) / static_cast<double>(n);
  e.std_error = std::sqrt(e.value * (1.0 - e.value) / static_cast<double>(n));
  return e;
}

Estimate sample_mean(std::string name, std::uint64_t sum, std::uint64_t sq_sum, std::uint64_t n) {
  Estimate e{std::move(name), 0.0, 0.0, n};
  if (n == 0) return e;
  const double dn = static_cast<double>(n);
  e.value = static_cast<double>(sum) / dn;
  if (n > 1) {
    const double var =
        std::max(0.0, (static_cast<double>(sq_sum) - dn * e.value * e.value) / (dn - 1.0));
    e.std_error = std::sqrt(var / dn);
  }
  return e;
}

template <typename Stats, typename Body>
Stats parallel_trials(std::uint64_t n, int workers, Stats total, const Body& body) {
  const int threads = workers > 0 ? workers : omp_get_max_threads();
  std::exception_ptr failure;
  const auto count = static_cast<std::int64_t>(n);
#pragma omp parallel num_threads(threads)
  {
    Stats local = total;
    try {
#pragma omp for schedule(static)
      for (std::int64_t i = 0; i < count; ++i) {
        body(static_cast<std::uint64_t>(i), local);
      }
    } catch (...) {
#pragma omp critical(tele_mc_failure)
      if (!failure) failure = std::current_exception();
    }
#pragma omp critical(tele_mc_merge)
    total.merge(local);
  }
  if (failure) std::rethrow_exception(failure);
  return total;
}

}  // namespace

void TrialConfig::validate() const {
  if (n_trials < 1 || n_trials > kMaxTrials) {
    throw ValidationError("n_trials must be in [1, 1e9], got " + std::to_string(n_trials));
  }
  protocol::UnknownQubit::make(phi.a, phi.b);
  protocol.validate();
}

void TrialStats::merge(const TrialStats& o) {
  n_trials += o.n_trials;
  for (const auto& [k, v] : o.counts) counts[k] += v;
  bits_sum += o.bits_sum;
  bits_sq_sum += o.bits_sq_sum;
  copies_sum += o.copies_sum;
  copies_sq_sum += o.copies_sq_sum;
  completed += o.completed;
  completed_bits_sum += o.completed_bits_sum;
  completed_bits_sq_sum += o.completed_bits_sq_sum;
  first_stage_desired += o.first_stage_desired;
  first_stage_undesired += o.first_stage_undesired;
  first_round_one_bit += o.first_round_one_bit;
  end_to_end_one_bit += o.end_to_end_one_bit;
  first_reset_attempts += o.first_reset_attempts;
  first_reset_successes += o.first_reset_successes;
  if (first_chain_success_at.size() < o.first_chain_success_at.size()) {
    first_chain_success_at.resize(o.first_chain_success_at.size(), 0);
  }
  for (std::size_t k = 0; k < o.first_chain_success_at.size(); ++k) {
    first_chain_success_at[k] += o.first_chain_success_at[k];
  }
  reset_attempts += o.reset_attempts;
  reset_successes += o.reset_successes;
  for (std::size_t i = 0; i < 4; ++i) phi_counts[i] += o.phi_counts[i];
  abandoned += o.abandoned;
  exhausted += o.exhausted;
  min_fidelity = std::min(min_fidelity, o.min_fidelity);
  min_bell_overlap = std::min(min_bell_overlap, o.min_bell_overlap);
}

double TrialStats::mean_bits() const {
  return n_trials ? static_cast<double>(bits_sum) / static_cast<double>(n_trials) : 0.0;
}

double TrialStats::mean_copies() const {
  return n_trials ? static_cast<double>(copies_sum) / static_cast<double>(n_trials) : 0.0;
}

double TrialStats::empirical_one_bit_prob() const {
  return n_trials ? static_cast<double>(first_round_one_bit) / static_cast<double>(n_trials)
                  : 0.0;
}

std::vector<Estimate> TrialStats::estimates() const {
  std::vector<Estimate> out;
  out.push_back(proportion("p_stage1_desired", first_stage_desired, n_trials));
  out.push_back(proportion("p_first_reset_success", first_reset_successes, first_reset_attempts));
  out.push_back(proportion("one_bit_prob", first_round_one_bit, n_trials));
  // First round charged 1 bit when it reaches a one-bit-capable state, else 2.
  {
    auto cost = proportion("first_round_cost", first_round_one_bit, n_trials);
    cost.value = 2.0 - cost.value;
    cost.offset = 2.0;
    cost.scale = -1.0;
    out.push_back(cost);
  }
  out.push_back(proportion("end_to_end_one_bit_prob", end_to_end_one_bit, n_trials));
  out.push_back(sample_mean("mean_bits", bits_sum, bits_sq_sum, n_trials));
  out.push_back(
      sample_mean("mean_bits_completed", completed_bits_sum, completed_bits_sq_sum, completed));
  out.push_back(sample_mean("mean_copies", copies_sum, copies_sq_sum, n_trials));
  for (std::size_t i = 0; i < 4; ++i) {
    out.push_back(proportion("p_phi" + std::to_string(i), phi_counts[i], n_trials));
  }
  out.push_back(proportion("p_abandoned", abandoned, n_trials));
  out.push_back(proportion("p_exhausted", exhausted, n_trials));
  for (std::size_t k = 1; k < first_chain_success_at.size(); ++k) {
    out.push_back(proportion("p_need_k_resets_" + std::to_string(k), first_chain_success_at[k],
                             first_stage_undesired));
  }
  return out;
}

TrialStats run_trials_serial(const TrialConfig& config) {
  config.validate();
  TrialStats stats = empty_stats(config);
  for (std::uint64_t i = 0; i < config.n_trials; ++i) run_one(config, i, stats);
  return stats;
}

TrialStats run_trials(const TrialConfig& config, int workers) {
  config.validate();
  return parallel_trials(config.n_trials, workers, empty_stats(config),
                         [&config](std::uint64_t i, TrialStats& local) {
                           run_one(config, i, local);
                         });
}

ComparisonRow make_row(std::string statistic, double analytic, double empirical,
                       double std_error) {
  ComparisonRow row{std::move(statistic), analytic, empirical, std_error, 0.0, false};
  const double diff = empirical - analytic;
  if (std_error > 0.0) {
    row.z = diff / std_error;
    row.pass = std::abs(row.z) < kZThreshold;
  } else {
    row.z = 0.0;
    row.pass = std::abs(diff) <= 1e-12;
  }
  return row;
}

bool ComparisonReport::all_pass() const {
  return std::all_of(rows.begin(), rows.end(), [](const auto& r) { return r.pass; });
}

namespace {

// All-or-nothing samples have zero sample variance; test them against the
// binomial spread implied by the analytic value instead.
ComparisonRow row_for(const Estimate& e, double analytic) {
  double se = e.std_error;
  if (se == 0.0 && e.binomial && e.n > 0) {
    const double p = (analytic - e.offset) / e.scale;
    if (p > 0.0 && p < 1.0) {
      se = std::abs(e.scale) * std::sqrt(p * (1.0 - p) / static_cast<double>(e.n));
    }
  }
  return make_row(e.name, analytic, e.value, se);
}

}  // namespace

ComparisonReport compare(const TrialStats& stats, const UnknownQubit& phi,
                         const ProtocolConfig& config) {
  const auto tree = analysis::build_tree(phi, config);
  const auto totals = analysis::summarize(tree);
  const bool resets_possible = config.strategy != Strategy::Conventional && config.max_resets > 0;

  std::map<std::string, double> analytic;
  analytic["p_stage1_desired"] = analysis::kStageOneDesired;
  if (totals.first_reset_success) analytic["p_first_reset_success"] = *totals.first_reset_success;
  analytic["one_bit_prob"] = totals.first_round_one_bit;
  if (config.strategy != Strategy::Conventional) {
    const bool single_reset = config.strategy == Strategy::ResetRetry &&
                              config.max_resets == 1 && !config.copies_available;
    analytic["first_round_cost"] =
        single_reset ? analysis::entropy_ht(phi) : 2.0 - totals.first_round_one_bit;
  }
  analytic["end_to_end_one_bit_prob"] = totals.end_to_end_one_bit;
  analytic["mean_bits"] = totals.mean_bits;
  analytic["mean_bits_completed"] = totals.mean_bits_completed;
  analytic["mean_copies"] = totals.mean_copies;
  for (std::size_t i = 0; i < 4; ++i) analytic["p_phi" + std::to_string(i)] = totals.phi_probs[i];
  analytic["p_abandoned"] = totals.abandoned;
  analytic["p_exhausted"] = totals.exhausted;
  if (resets_possible && config.strategy == Strategy::ResetRetry && !config.copies_available) {
    for (int k = 1; k <= config.max_resets; ++k) {
      analytic["p_need_k_resets_" + std::to_string(k)] = analysis::p_need_k_resets(phi, k);
    }
  }

  ComparisonReport report;
  for (const auto& est : stats.estimates()) {
    const auto it = analytic.find(est.name);
    if (it == analytic.end() || est.n == 0) continue;
    report.rows.push_back(row_for(est, it->second));
  }
  return report;
}

namespace {

void record_bias(BiasStats& s, const protocol::LocalRun& run, int bob_outcome) {
  ++s.n_trials;
  if (bob_outcome == 0) ++s.bob_zero;
  if (run.kept) {
    ++s.kept;
    if (bob_outcome == 0) ++s.kept_bob_zero;
  }
}

}  // namespace

BiasStats run_bias_trials(std::uint64_t n_trials, std::uint64_t seed, const UnknownQubit& phi,
                          int max_resets, int workers) {
  if (n_trials < 1 || n_trials > kMaxTrials) {
    throw ValidationError("n_trials must be in [1, 1e9], got " + std::to_string(n_trials));
  }
  if (max_resets < 0) throw ValidationError("max_resets must be >= 0");
  struct Partial {
    BiasStats s;
    void merge(const Partial& o) {
      s.n_trials += o.s.n_trials;
      s.bob_zero += o.s.bob_zero;
      s.kept += o.s.kept;
      s.kept_bob_zero += o.s.kept_bob_zero;
    }
  };
  Partial init;
  init.s.seed = seed;
  auto total = parallel_trials(n_trials, workers, init, [&](std::uint64_t i, Partial& local) {
    auto stream = rng::child(seed, i);
    const protocol::DrawFn draw = [&stream] { return stream.uniform(); };
    const auto run = protocol::run_local(phi, max_resets, draw);
    const auto [rec, _] = sv::measure(run.pair.state, 1, draw());
    record_bias(local.s, run, rec.outcome);
  });
  return total.s;
}

ComparisonReport compare_bias(const BiasStats& stats, const UnknownQubit& phi, int max_resets) {
  const auto exact = analysis::bias_figures(phi, max_resets);
  ComparisonReport report;
  const auto add = [&](std::string name, double analytic, std::uint64_t hits, std::uint64_t n) {
    if (n == 0) return;
    report.rows.push_back(row_for(proportion(std::move(name), hits, n), analytic));
  };
  add("bob_p0_unconditioned", exact.unconditioned_p0, stats.bob_zero, stats.n_trials);
  add("keep_fraction", exact.keep_fraction, stats.kept, stats.n_trials);
  add("bob_p0_post_selected", exact.post_selected_p0, stats.kept_bob_zero, stats.kept);
  return report;
}

}  // namespace tele::mc
