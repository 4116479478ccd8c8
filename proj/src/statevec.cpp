#include "tele/statevec.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>

namespace tele::sv {

namespace {

void check_qubit(const PureState& state, int qubit, const char* what) {
  if (qubit < 0 || qubit >= state.n_qubits()) {
    throw ValidationError(std::string(what) + ": qubit index " + std::to_string(qubit) +
                          " out of range for " + std::to_string(state.n_qubits()) +
                          "-qubit state");
  }
}

void check_shape(int n_qubits, std::size_t n_amps, const std::vector<std::string>& labels) {
  if (n_qubits < 1 || n_qubits > kMaxQubits) {
    throw ValidationError("qubit count " + std::to_string(n_qubits) + " outside [1, " +
                          std::to_string(kMaxQubits) + "]");
  }
  if (n_amps != (std::size_t{1} << n_qubits)) {
    throw ValidationError("amplitude count " + std::to_string(n_amps) + " != 2^" +
                          std::to_string(n_qubits));
  }
  if (!labels.empty() && labels.size() != static_cast<std::size_t>(n_qubits)) {
    throw ValidationError("label count does not match qubit count");
  }
}

}  // namespace

PureState::PureState(int n_qubits, std::vector<Amplitude> amps, std::vector<std::string> labels)
    : n_qubits_(n_qubits), amps_(std::move(amps)), labels_(std::move(labels)) {
  check_shape(n_qubits_, amps_.size(), labels_);
  for (const auto& a : amps_) {
    if (!std::isfinite(a.real()) || !std::isfinite(a.imag())) {
      throw ValidationError("non-finite amplitude");
    }
  }
  const double n2 = norm_squared();
  if (std::abs(n2 - 1.0) > kInputNormTolerance) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "state norm^2 = %.17g deviates from 1 by more than 1e-9", n2);
    throw ValidationError(buf);
  }
}

PureState PureState::trusted(int n_qubits, std::vector<Amplitude> amps,
                             std::vector<std::string> labels) {
  check_shape(n_qubits, amps.size(), labels);
  PureState s;
  s.n_qubits_ = n_qubits;
  s.amps_ = std::move(amps);
  s.labels_ = std::move(labels);
  return s;
}

double PureState::norm_squared() const {
  double total = 0.0;
  for (const auto& a : amps_) total += std::norm(a);
  return total;
}

PureState PureState::with_labels(std::vector<std::string> labels) const {
  return trusted(n_qubits_, amps_, std::move(labels));
}

PureState make_state(int n, std::size_t basis_index) {
  if (n < 1 || n > kMaxQubits) {
    throw ValidationError("make_state: n = " + std::to_string(n) + " outside [1, 8]");
  }
  const std::size_t dim = std::size_t{1} << n;
  if (basis_index >= dim) {
    throw ValidationError("make_state: basis index " + std::to_string(basis_index) +
                          " >= 2^" + std::to_string(n));
  }
  std::vector<Amplitude> amps(dim);
  amps[basis_index] = 1.0;
  return PureState::trusted(n, std::move(amps));
}

PureState make_qubit(Amplitude a, Amplitude b) { return PureState(1, {a, b}); }

PureState apply_gate(const PureState& state, Gate gate, int qubit) {
  check_qubit(state, qubit, "apply_gate");
  const std::size_t m = state.mask(qubit);
  const auto in = state.amps();
  std::vector<Amplitude> out(in.begin(), in.end());
  constexpr double r = std::numbers::sqrt2 / 2.0;
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (i & m) continue;
    const std::size_t j = i | m;
    switch (gate) {
      case Gate::X:
        out[i] = in[j];
        out[j] = in[i];
        break;
      case Gate::Z:
        out[j] = -in[j];
        break;
      case Gate::H:
        out[i] = r * (in[i] + in[j]);
        out[j] = r * (in[i] - in[j]);
        break;
    }
  }
  return PureState::trusted(state.n_qubits(), std::move(out), state.labels());
}

PureState apply_cnot(const PureState& state, int control, int target) {
  check_qubit(state, control, "apply_cnot");
  check_qubit(state, target, "apply_cnot");
  if (control == target) throw ValidationError("apply_cnot: control == target");
  const std::size_t cm = state.mask(control);
  const std::size_t tm = state.mask(target);
  const auto in = state.amps();
  std::vector<Amplitude> out(in.size());
  for (std::size_t i = 0; i < in.size(); ++i) {
    out[(i & cm) ? (i ^ tm) : i] = in[i];
  }
  return PureState::trusted(state.n_qubits(), std::move(out), state.labels());
}

double outcome_probability(const PureState& state, int qubit, int outcome) {
  check_qubit(state, qubit, "outcome_probability");
  if (outcome != 0 && outcome != 1) throw ValidationError("outcome must be 0 or 1");
  const std::size_t m = state.mask(qubit);
  const std::size_t want = outcome ? m : 0;
  double p = 0.0;
  for (std::size_t i = 0; i < state.dim(); ++i) {
    if ((i & m) == want) p += std::norm(state[i]);
  }
  return p;
}

std::pair<MeasurementRecord, PureState> measure(const PureState& state, int qubit, double draw) {
  check_qubit(state, qubit, "measure");
  if (!(draw >= 0.0 && draw <= 1.0)) {
    throw ValidationError("measure: draw " + std::to_string(draw) + " outside [0, 1]");
  }
  const double p0 = outcome_probability(state, qubit, 0);
  const int outcome = draw < p0 ? 0 : 1;
  const double p = outcome == 0 ? p0 : outcome_probability(state, qubit, 1);
  if (p < kInternalTolerance) {
    throw DegenerateCollapseError("measure: outcome " + std::to_string(outcome) + " of qubit " +
                                  std::to_string(qubit) + " has probability " +
                                  std::to_string(p));
  }
  const std::size_t m = state.mask(qubit);
  const std::size_t want = outcome ? m : 0;
  const double scale = 1.0 / std::sqrt(p);
  std::vector<Amplitude> out(state.dim());
  for (std::size_t i = 0; i < out.size(); ++i) {
    if ((i & m) == want) out[i] = state[i] * scale;
  }
  return {MeasurementRecord{qubit, outcome, p},
          PureState::trusted(state.n_qubits(), std::move(out), state.labels())};
}

double overlap_up_to_phase(const PureState& s1, const PureState& s2) {
  if (s1.dim() != s2.dim()) {
    throw ValidationError("overlap_up_to_phase: dimension mismatch " + std::to_string(s1.dim()) +
                          " vs " + std::to_string(s2.dim()));
  }
  Amplitude inner = 0.0;
  for (std::size_t i = 0; i < s1.dim(); ++i) inner += std::conj(s1[i]) * s2[i];
  return std::abs(inner);
}

PureState tensor(const PureState& s1, const PureState& s2) {
  const int n = s1.n_qubits() + s2.n_qubits();
  if (n > kMaxQubits) throw ValidationError("tensor: result exceeds 8 qubits");
  std::vector<Amplitude> out(s1.dim() * s2.dim());
  for (std::size_t i = 0; i < s1.dim(); ++i) {
    for (std::size_t j = 0; j < s2.dim(); ++j) out[i * s2.dim() + j] = s1[i] * s2[j];
  }
  std::vector<std::string> labels;
  if (!s1.labels().empty() && !s2.labels().empty()) {
    labels = s1.labels();
    labels.insert(labels.end(), s2.labels().begin(), s2.labels().end());
  }
  return PureState::trusted(n, std::move(out), std::move(labels));
}

PureState drop_qubit(const PureState& state, int qubit) {
  check_qubit(state, qubit, "drop_qubit");
  if (state.n_qubits() == 1) throw ValidationError("drop_qubit: cannot drop the only qubit");
  const double p0 = outcome_probability(state, qubit, 0);
  int value;
  if (p0 >= 1.0 - kInternalTolerance) {
    value = 0;
  } else if (p0 <= kInternalTolerance) {
    value = 1;
  } else {
    throw ValidationError("drop_qubit: qubit " + std::to_string(qubit) +
                          " is not in a definite basis state");
  }
  const int n = state.n_qubits();
  const int low_bits = n - 1 - qubit;
  const std::size_t low_mask = (std::size_t{1} << low_bits) - 1;
  std::vector<Amplitude> out(state.dim() / 2);
  for (std::size_t r = 0; r < out.size(); ++r) {
    const std::size_t high = (r & ~low_mask) << 1;
    const std::size_t full = high | (static_cast<std::size_t>(value) << low_bits) | (r & low_mask);
    out[r] = state[full];
  }
  std::vector<std::string> labels = state.labels();
  if (!labels.empty()) labels.erase(labels.begin() + qubit);
  return PureState::trusted(n - 1, std::move(out), std::move(labels));
}

const char* gate_name(Gate gate) {
  switch (gate) {
    case Gate::X:
      return "X";
    case Gate::Z:
      return "Z";
    case Gate::H:
      return "H";
  }
  return "?";
}

}  // namespace tele::sv
