#pragma once

// Minimal dense pure-state simulator.
//
// Qubit 0 is the leftmost symbol of a ket, so for |q0 q1 q2> the basis index
// is q0*4 + q1*2 + q2. States are values: every operation returns a new state.

#include <complex>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "tele/errors.hpp"

namespace tele::sv {

using Amplitude = std::complex<double>;

inline constexpr int kMaxQubits = 8;
inline constexpr double kInputNormTolerance = 1e-9;
inline constexpr double kInternalTolerance = 1e-12;

enum class Gate { X, Z, H };

struct MeasurementRecord {
  int qubit = 0;
  int outcome = 0;
  // Pre-measurement probability of `outcome`.
  double probability = 0.0;
};

class PureState {
 public:
  // Validates length, finiteness and norm (within kInputNormTolerance).
  // Labels, when given, must have one entry per qubit.
  PureState(int n_qubits, std::vector<Amplitude> amps,
            std::vector<std::string> labels = {});

  // Skips the norm check. For kernels whose output is unitary by construction.
  static PureState trusted(int n_qubits, std::vector<Amplitude> amps,
                           std::vector<std::string> labels = {});

  int n_qubits() const { return n_qubits_; }
  std::size_t dim() const { return amps_.size(); }
  std::span<const Amplitude> amps() const { return amps_; }
  const Amplitude& operator[](std::size_t i) const { return amps_[i]; }
  const std::vector<std::string>& labels() const { return labels_; }

  double norm_squared() const;

  // Copy with new role tags ("l", "A", "B", "phi", "ancilla", ...).
  PureState with_labels(std::vector<std::string> labels) const;

  // Bit mask selecting `qubit` inside a basis index.
  std::size_t mask(int qubit) const { return std::size_t{1} << (n_qubits_ - 1 - qubit); }

 private:
  PureState() = default;

  int n_qubits_ = 0;
  std::vector<Amplitude> amps_;
  std::vector<std::string> labels_;
};

// Computational basis state |basis_index> on n qubits.
PureState make_state(int n, std::size_t basis_index);

// Single-qubit state a|0> + b|1>.
PureState make_qubit(Amplitude a, Amplitude b);

PureState apply_gate(const PureState& state, Gate gate, int qubit);
PureState apply_cnot(const PureState& state, int control, int target);

double outcome_probability(const PureState& state, int qubit, int outcome);

// Outcome 0 iff draw < P(0). draw must lie in [0, 1]; 1.0 forces outcome 1.
// Returns the renormalised projection; throws DegenerateCollapseError when the
// selected outcome has probability below kInternalTolerance.
std::pair<MeasurementRecord, PureState> measure(const PureState& state, int qubit,
                                                double draw);

// |<s1|s2>|, equal to 1 exactly when the states agree up to a global phase.
double overlap_up_to_phase(const PureState& s1, const PureState& s2);

// s1 (x) s2; qubits of s1 come first.
PureState tensor(const PureState& s1, const PureState& s2);

// Removes a qubit that is in a definite basis value (e.g. just measured).
// Throws ValidationError if the qubit is still in superposition.
PureState drop_qubit(const PureState& state, int qubit);

const char* gate_name(Gate gate);

}  // namespace tele::sv
