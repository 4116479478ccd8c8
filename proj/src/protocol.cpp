#include "tele/protocol.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace tele::protocol {

namespace {

constexpr double kFormTolerance = 1e-9;
constexpr double kAncillaTolerance = 1e-6;

// Alice's qubit first, Bob's second.
sv::PureState form_state(PairForm form, Amplitude a_k, Amplitude b_k) {
  constexpr double r = std::numbers::sqrt2 / 2.0;
  switch (form) {
    case PairForm::Bell:
      return sv::PureState(2, {r, 0.0, 0.0, r});
    case PairForm::Desired:
      return sv::PureState::trusted(2, {a_k, 0.0, 0.0, b_k});
    case PairForm::Undesired:
      return sv::PureState::trusted(2, {b_k, 0.0, 0.0, a_k});
  }
  throw std::logic_error("unknown pair form");
}

void check_form(const SharedPair& pair) {
  const double ov = sv::overlap_up_to_phase(pair.state, form_state(pair.form, pair.a_k, pair.b_k));
  if (ov < 1.0 - kFormTolerance) {
    throw std::logic_error(std::string("shared pair does not match declared form ") +
                           to_string(pair.form));
  }
}

void require_form(const SharedPair& pair, PairForm want, const char* op) {
  if (pair.form != want) {
    throw ProtocolOrderError(std::string(op) + " requires a " + to_string(want) +
                             " pair, got " + to_string(pair.form));
  }
}

Event copy_event() { return Event{EventType::CopyConsumed}; }

Event bit_event(std::string purpose) {
  Event e{EventType::ClassicalBitSent};
  e.purpose = std::move(purpose);
  return e;
}

void append(Transcript& t, std::vector<Event> events) {
  for (auto& e : events) {
    if (e.type == EventType::ClassicalBitSent) ++t.bits_sent;
    if (e.type == EventType::CopyConsumed) ++t.copies_consumed;
    t.events.push_back(std::move(e));
  }
}

}  // namespace

UnknownQubit UnknownQubit::make(Amplitude a, Amplitude b) {
  const double n2 = std::norm(a) + std::norm(b);
  if (!std::isfinite(n2) || std::abs(n2 - 1.0) > sv::kInputNormTolerance) {
    throw ValidationError("|a|^2 + |b|^2 = " + std::to_string(n2) + " is not 1 within 1e-9");
  }
  return UnknownQubit{a, b};
}

sv::PureState UnknownQubit::as_state() const { return sv::make_qubit(a, b); }

bool Transcript::abandoned() const {
  return !events.empty() && events.back().type == EventType::Abandoned;
}

void ProtocolConfig::validate() const {
  if (max_resets < 0) throw ConfigError("max_resets must be >= 0");
  if (copies_available && *copies_available < 1) {
    throw ConfigError("copies_available must be >= 1");
  }
  if (!amplitudes_known && max_resets > 1 && strategy == Strategy::ResetRetry) {
    throw ConfigError(
        "resets beyond the first need the amplitudes of phi; max_resets must be <= 1 when "
        "they are unknown");
  }
}

ResourceExhausted::ResourceExhausted(Transcript partial)
    : Error("copies of phi exhausted after " + std::to_string(partial.copies_consumed)),
      partial_(std::move(partial)) {}

SharedPair make_bell() {
  SharedPair p{form_state(PairForm::Bell, 0.0, 0.0).with_labels({"A", "B"}), PairForm::Bell};
  constexpr double r = std::numbers::sqrt2 / 2.0;
  p.a_k = r;
  p.b_k = r;
  return p;
}

StepResult stage_one(const UnknownQubit& phi, const SharedPair& pair, double draw) {
  require_form(pair, PairForm::Bell, "stage_one");
  // (phi, A, B)
  auto joint = sv::tensor(phi.as_state().with_labels({"phi"}), pair.state.with_labels({"A", "B"}));
  joint = sv::apply_cnot(joint, 0, 1);
  auto [rec, collapsed] = sv::measure(joint, 1, draw);
  auto reduced = sv::drop_qubit(collapsed, 1);

  Event e{EventType::Stage1};
  e.outcome = rec.outcome;
  e.probability = rec.probability;

  SharedPair out{reduced, PairForm::Desired, 0, phi.a, phi.b};
  if (rec.outcome == 1) {
    out.state = sv::apply_gate(reduced, sv::Gate::X, 0);
    out.form = PairForm::Undesired;
  }
  check_form(out);
  return {std::move(out), {copy_event(), e}};
}

StepResult conventional_correction(const SharedPair& pair) {
  require_form(pair, PairForm::Undesired, "conventional_correction");
  SharedPair out = pair;
  out.state = sv::apply_gate(sv::apply_gate(pair.state, sv::Gate::X, 0), sv::Gate::X, 1);
  out.form = PairForm::Desired;
  check_form(out);
  return {std::move(out), {Event{EventType::XCorrection}, bit_event("x-correction")}};
}

StageTwoResult stage_two(const SharedPair& pair, double draw) {
  require_form(pair, PairForm::Desired, "stage_two");
  auto rotated = sv::apply_gate(pair.state, sv::Gate::H, 0);
  auto [rec, collapsed] = sv::measure(rotated, 0, draw);
  auto bob = sv::drop_qubit(collapsed, 0);
  if (rec.outcome == 1) bob = sv::apply_gate(bob, sv::Gate::Z, 0);

  Event e{EventType::Stage2};
  e.outcome = rec.outcome;
  e.probability = rec.probability;
  return {std::move(bob), {e, bit_event("stage-two outcome")}};
}

UnknownQubit next_chain_amplitudes(Amplitude a_k, Amplitude b_k) {
  const Amplitude a2 = a_k * a_k;
  const Amplitude b2 = b_k * b_k;
  const double norm = std::sqrt(std::norm(a2) + std::norm(b2));
  return UnknownQubit{a2 / norm, b2 / norm};
}

StepResult reset_attempt(const SharedPair& pair, const UnknownQubit& ancilla, double draw) {
  require_form(pair, PairForm::Undesired, "reset_attempt");
  if (std::abs(ancilla.a - pair.a_k) > kAncillaTolerance ||
      std::abs(ancilla.b - pair.b_k) > kAncillaTolerance) {
    throw AncillaMismatchError("reset ancilla does not match chain amplitudes at depth " +
                               std::to_string(pair.chain_depth));
  }
  // (l, A, B)
  auto joint =
      sv::tensor(ancilla.as_state().with_labels({"l"}), pair.state.with_labels({"A", "B"}));
  joint = sv::apply_cnot(joint, 0, 1);
  auto [rec, collapsed] = sv::measure(joint, 1, draw);
  auto reduced = sv::drop_qubit(collapsed, 1);

  Event e{EventType::ResetAttempt};
  e.k = pair.chain_depth;
  e.outcome = rec.outcome;
  e.probability = rec.probability;
  e.success = rec.outcome == 0;
  e.alice_qubit = "l";

  if (rec.outcome == 0) {
    SharedPair out = make_bell();
    out.state = reduced;
    check_form(out);
    e.bell_overlap = sv::overlap_up_to_phase(reduced, make_bell().state);
    return {std::move(out), {copy_event(), e}};
  }
  const auto next = next_chain_amplitudes(pair.a_k, pair.b_k);
  SharedPair out{sv::apply_gate(reduced, sv::Gate::X, 0), PairForm::Undesired,
                 pair.chain_depth + 1, next.a, next.b};
  check_form(out);
  return {std::move(out), {copy_event(), e}};
}

namespace {

class Runner {
 public:
  Runner(const UnknownQubit& phi, const ProtocolConfig& config, const DrawFn& next_draw)
      : phi_(phi), config_(config), next_draw_(next_draw) {
    transcript_.strategy = config.strategy;
  }

  Transcript run() {
    int budget = config_.strategy == Strategy::Conventional ? 0 : config_.max_resets;
    SharedPair pair = make_bell();
    for (;;) {
      pair = do_stage_one(pair);
      if (pair.form == PairForm::Desired) {
        if (config_.strategy == Strategy::Conventional) {
          append(transcript_, {bit_event("stage-one report")});
        }
        return finish(pair);
      }
      if (config_.strategy == Strategy::Conventional) return correct_and_finish(pair);

      // Reset chain.
      bool restored = false;
      while (!restored) {
        if (budget == 0) return exhausted_budget(pair);
        const int k = pair.chain_depth;
        if (k >= 1 && !config_.amplitudes_known) {
          throw ConfigError("reset at chain depth >= 1 needs known amplitudes");
        }
        const UnknownQubit ancilla = k == 0 ? phi_ : UnknownQubit{pair.a_k, pair.b_k};
        take_copy();
        auto step = reset_attempt(pair, ancilla, draw());
        --budget;
        append(transcript_, std::move(step.events));
        pair = std::move(step.pair);
        if (pair.form == PairForm::Bell) {
          restored = true;
        } else if (config_.strategy == Strategy::AbandonOnFail) {
          return abandon();
        }
      }
    }
  }

 private:
  double draw() { return next_draw_(); }

  void take_copy() {
    if (config_.copies_available && transcript_.copies_consumed >= *config_.copies_available) {
      throw ResourceExhausted(transcript_);
    }
  }

  SharedPair do_stage_one(const SharedPair& pair) {
    take_copy();
    auto step = stage_one(phi_, pair, draw());
    append(transcript_, std::move(step.events));
    return std::move(step.pair);
  }

  Transcript finish(const SharedPair& pair) {
    auto result = stage_two(pair, draw());
    append(transcript_, std::move(result.events));
    transcript_.fidelity = sv::overlap_up_to_phase(result.bob_state, phi_.as_state());
    transcript_.bob_final = std::move(result.bob_state);
    return std::move(transcript_);
  }

  Transcript correct_and_finish(const SharedPair& pair) {
    auto step = conventional_correction(pair);
    append(transcript_, std::move(step.events));
    return finish(step.pair);
  }

  Transcript abandon() {
    append(transcript_, {Event{EventType::Abandoned}});
    return std::move(transcript_);
  }

  Transcript exhausted_budget(const SharedPair& pair) {
    if (config_.strategy == Strategy::AbandonOnFail) return abandon();
    if (pair.chain_depth == 0) return correct_and_finish(pair);
    // The pair now carries (a_k, b_k) != (a, b): swap in a fresh Bell pair and
    // fall back to two-bit teleportation.
    append(transcript_, {Event{EventType::PairReplaced}});
    SharedPair fresh = do_stage_one(make_bell());
    if (fresh.form == PairForm::Desired) {
      append(transcript_, {bit_event("stage-one report")});
      return finish(fresh);
    }
    return correct_and_finish(fresh);
  }

  const UnknownQubit& phi_;
  const ProtocolConfig& config_;
  const DrawFn& next_draw_;
  Transcript transcript_;
};

}  // namespace

Transcript run_teleport(const UnknownQubit& phi, const ProtocolConfig& config,
                        const DrawFn& next_draw) {
  config.validate();
  return Runner(phi, config, next_draw).run();
}

Transcript run_teleport(const UnknownQubit& phi, const ProtocolConfig& config,
                        std::span<const double> draws) {
  std::size_t pos = 0;
  DrawFn next = [&]() {
    if (pos >= draws.size()) {
      throw ValidationError("run_teleport: draw sequence exhausted after " +
                            std::to_string(draws.size()) + " draws");
    }
    return draws[pos++];
  };
  return run_teleport(phi, config, next);
}

LocalRun run_local(const UnknownQubit& phi, int max_resets, const DrawFn& next_draw) {
  if (max_resets < 0) throw ValidationError("run_local: max_resets must be >= 0");
  LocalRun out{make_bell()};
  int budget = max_resets;
  for (;;) {
    out.pair = stage_one(phi, out.pair, next_draw()).pair;
    if (out.pair.form == PairForm::Desired) {
      out.kept = true;
      return out;
    }
    while (out.pair.form == PairForm::Undesired) {
      if (budget == 0) return out;
      const UnknownQubit ancilla =
          out.pair.chain_depth == 0 ? phi : UnknownQubit{out.pair.a_k, out.pair.b_k};
      out.pair = reset_attempt(out.pair, ancilla, next_draw()).pair;
      --budget;
      ++out.resets;
    }
  }
}

FirstRound first_round(const Transcript& t) {
  bool undesired = false;
  for (const auto& e : t.events) {
    if (e.type == EventType::Stage1) {
      if (undesired) return FirstRound::Failed;
      if (*e.outcome == 0) return FirstRound::Desired;
      undesired = true;
    } else if (e.type == EventType::ResetAttempt) {
      if (*e.success) return FirstRound::ResetRestored;
    } else if (undesired && e.type != EventType::CopyConsumed) {
      return FirstRound::Failed;
    }
  }
  return FirstRound::Failed;
}

int first_chain_success_attempt(const Transcript& t) {
  int attempts = 0;
  bool seen_stage1 = false;
  for (const auto& e : t.events) {
    if (e.type == EventType::Stage1) {
      if (seen_stage1) return 0;
      seen_stage1 = true;
    } else if (e.type == EventType::ResetAttempt) {
      ++attempts;
      if (*e.success) return attempts;
    }
  }
  return 0;
}

int bob_phi_index(const Transcript& t) {
  if (!t.completed()) return -1;
  bool undesired_path = false;
  int stage2_outcome = 0;
  for (const auto& e : t.events) {
    if (e.type == EventType::XCorrection || e.type == EventType::PairReplaced) {
      undesired_path = true;
    } else if (e.type == EventType::Stage2) {
      stage2_outcome = *e.outcome;
    }
  }
  return (undesired_path ? 2 : 0) + stage2_outcome;
}

const char* to_string(Strategy s) {
  switch (s) {
    case Strategy::Conventional:
      return "conventional";
    case Strategy::ResetRetry:
      return "reset-retry";
    case Strategy::AbandonOnFail:
      return "abandon";
  }
  return "?";
}

const char* to_string(EventType e) {
  switch (e) {
    case EventType::Stage1:
      return "STAGE1";
    case EventType::ResetAttempt:
      return "RESET_ATTEMPT";
    case EventType::XCorrection:
      return "X_CORRECTION";
    case EventType::Stage2:
      return "STAGE2";
    case EventType::ClassicalBitSent:
      return "CLASSICAL_BIT_SENT";
    case EventType::CopyConsumed:
      return "COPY_CONSUMED";
    case EventType::Abandoned:
      return "ABANDONED";
    case EventType::PairReplaced:
      return "PAIR_REPLACED";
  }
  return "?";
}

const char* to_string(PairForm f) {
  switch (f) {
    case PairForm::Bell:
      return "BELL";
    case PairForm::Desired:
      return "DESIRED";
    case PairForm::Undesired:
      return "UNDESIRED";
  }
  return "?";
}

std::optional<Strategy> parse_strategy(const std::string& name) {
  if (name == "conventional") return Strategy::Conventional;
  if (name == "reset-retry") return Strategy::ResetRetry;
  if (name == "abandon") return Strategy::AbandonOnFail;
  return std::nullopt;
}

}  // namespace tele::protocol
