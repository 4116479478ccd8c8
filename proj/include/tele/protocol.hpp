#pragma once

// Teleportation as a two-stage state machine, with the local reset procedure
// that restores the shared Bell pair from the undesired stage-one form.
//
// A shared pair is always held as a 2-qubit state with Alice's physical qubit
// at index 0 and Bob's at index 1.

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tele/statevec.hpp"

namespace tele::protocol {

using sv::Amplitude;

// |phi> = a|0> + b|1>. Also used for the reset ancilla c|0> + d|1>.
struct UnknownQubit {
  Amplitude a;
  Amplitude b;

  // Throws ValidationError unless |a|^2 + |b|^2 is 1 within 1e-9.
  static UnknownQubit make(Amplitude a, Amplitude b);

  double ab_squared() const { return std::norm(a) * std::norm(b); }
  sv::PureState as_state() const;
};

enum class PairForm { Bell, Desired, Undesired };

// Bell:      (|00> + |11>)/sqrt2
// Desired:   a_k|00> + b_k|11>
// Undesired: a_k|11> + b_k|00>
struct SharedPair {
  sv::PureState state;
  PairForm form;
  int chain_depth = 0;
  Amplitude a_k{};
  Amplitude b_k{};
};

enum class Strategy { Conventional, ResetRetry, AbandonOnFail };

enum class EventType {
  Stage1,
  ResetAttempt,
  XCorrection,
  Stage2,
  ClassicalBitSent,
  CopyConsumed,
  Abandoned,
  PairReplaced,
};

struct Event {
  EventType type;
  std::optional<int> k = {};
  std::optional<int> outcome = {};
  std::optional<double> probability = {};
  std::optional<bool> success = {};
  // For ClassicalBitSent: what the bit reports.
  std::string purpose = {};
  // For a successful ResetAttempt: overlap of the restored pair with the Bell state.
  std::optional<double> bell_overlap = {};
  // Alice's qubit after a reset is the ancilla ("l"); recorded on ResetAttempt.
  std::string alice_qubit = {};
};

struct Transcript {
  Strategy strategy = Strategy::Conventional;
  std::vector<Event> events;
  int bits_sent = 0;
  int copies_consumed = 0;
  std::optional<sv::PureState> bob_final;
  // overlap_up_to_phase(bob_final, phi); unset when the run did not complete.
  std::optional<double> fidelity;

  bool completed() const { return bob_final.has_value(); }
  bool abandoned() const;
};

struct ProtocolConfig {
  Strategy strategy = Strategy::ResetRetry;
  // Total reset attempts allowed in one run. Ignored by Conventional.
  int max_resets = 1;
  // Copies of |phi> Alice holds; unset means unlimited.
  std::optional<int> copies_available;
  bool amplitudes_known = true;

  // Throws ConfigError on negative budgets, zero copies, or more than one
  // reset with unknown amplitudes.
  void validate() const;
};

// Thrown when a run needs another copy of |phi> and none is left.
class ResourceExhausted : public Error {
 public:
  explicit ResourceExhausted(Transcript partial);
  const Transcript& transcript() const { return partial_; }

 private:
  Transcript partial_;
};

struct StepResult {
  SharedPair pair;
  std::vector<Event> events;
};

struct StageTwoResult {
  sv::PureState bob_state;
  std::vector<Event> events;
};

SharedPair make_bell();

// Consumes one copy of phi. Outcome 0 leaves a|00> + b|11> over (phi, B);
// outcome 1 is followed by Alice's local X, leaving a|11> + b|00>.
StepResult stage_one(const UnknownQubit& phi, const SharedPair& pair, double draw);

// Bi-local X on both qubits, announced with one classical bit.
StepResult conventional_correction(const SharedPair& pair);

// Hadamard-basis termination; Bob applies Z when told the outcome was 1.
// Always charges exactly one classical bit.
StageTwoResult stage_two(const SharedPair& pair, double draw);

// One reset attempt on an undesired pair with chain amplitudes (a_k, b_k).
// The ancilla must equal (a_k, b_k) within 1e-6.
StepResult reset_attempt(const SharedPair& pair, const UnknownQubit& ancilla, double draw);

// Next chain amplitudes after a failed reset: (a^2, b^2) renormalised.
UnknownQubit next_chain_amplitudes(Amplitude a_k, Amplitude b_k);

using DrawFn = std::function<double()>;

// Walks one root-to-leaf path. One draw per measurement, in event order.
// Throws ResourceExhausted (carrying the partial transcript) when copies run out.
Transcript run_teleport(const UnknownQubit& phi, const ProtocolConfig& config,
                        const DrawFn& next_draw);

// As above over a fixed draw sequence; ValidationError if it runs short.
Transcript run_teleport(const UnknownQubit& phi, const ProtocolConfig& config,
                        std::span<const double> draws);

// Alice's side only, no classical channel: stage one, then resets (up to
// max_resets in total, amplitudes known) until the pair is desired or the
// budget is spent. `kept` is true when the final pair is in desired form.
struct LocalRun {
  SharedPair pair;
  bool kept = false;
  int resets = 0;
};
LocalRun run_local(const UnknownQubit& phi, int max_resets, const DrawFn& next_draw);

// --- transcript classification -------------------------------------------

// How the first round (first stage one plus the reset chain that follows it)
// ended: desired form, restored Bell pair, or neither.
enum class FirstRound { Desired, ResetRestored, Failed };
FirstRound first_round(const Transcript& t);

// Number of reset attempts in the first chain when it ended in a success,
// 0 otherwise.
int first_chain_success_attempt(const Transcript& t);

// Bob's pre-correction state class for a completed run: 0/1 when the final
// stage two came from an uncorrected desired pair, 2/3 when the run went
// through a correction or a conventional fallback. -1 when not completed.
int bob_phi_index(const Transcript& t);

const char* to_string(Strategy s);
const char* to_string(EventType e);
const char* to_string(PairForm f);
std::optional<Strategy> parse_strategy(const std::string& name);

}  // namespace tele::protocol
