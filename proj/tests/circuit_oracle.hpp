#pragma once

// Brute-force re-derivation of the decision tree for tests. Shares nothing
// with the library's physics: its own dense vectors (qubit q is bit q, the
// opposite order to statevec), no renormalisation, so a branch's absolute
// probability is just its squared norm. Reset ancillas are read off the
// actual post-failure state rather than from the recursion formula.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <optional>
#include <vector>

#include "tele/analysis.hpp"

namespace oracle {

using C = std::complex<double>;
using tele::analysis::NodeLabel;
using tele::analysis::TruncationReason;
using tele::protocol::ProtocolConfig;
using tele::protocol::Strategy;

struct Vec {
  int n = 0;
  std::vector<C> amp;

  double norm2() const {
    double s = 0;
    for (const auto& x : amp) s += std::norm(x);
    return s;
  }
};

inline Vec kron(const Vec& lo, const Vec& hi) {
  // `lo` takes the low qubit indices.
  Vec out{lo.n + hi.n, std::vector<C>(lo.amp.size() * hi.amp.size())};
  for (std::size_t h = 0; h < hi.amp.size(); ++h) {
    for (std::size_t l = 0; l < lo.amp.size(); ++l) {
      out.amp[h * lo.amp.size() + l] = lo.amp[l] * hi.amp[h];
    }
  }
  return out;
}

inline Vec x(Vec v, int q) {
  for (std::size_t i = 0; i < v.amp.size(); ++i) {
    if (i & (1u << q)) std::swap(v.amp[i], v.amp[i ^ (1u << q)]);
  }
  return v;
}

inline Vec z(Vec v, int q) {
  for (std::size_t i = 0; i < v.amp.size(); ++i) {
    if (i & (1u << q)) v.amp[i] = -v.amp[i];
  }
  return v;
}

inline Vec h(Vec v, int q) {
  const double r = 1 / std::sqrt(2.0);
  for (std::size_t i = 0; i < v.amp.size(); ++i) {
    if (i & (1u << q)) continue;
    const C a0 = v.amp[i], a1 = v.amp[i | (1u << q)];
    v.amp[i] = r * (a0 + a1);
    v.amp[i | (1u << q)] = r * (a0 - a1);
  }
  return v;
}

inline Vec cnot(Vec v, int c, int t) {
  for (std::size_t i = 0; i < v.amp.size(); ++i) {
    if ((i & (1u << c)) && !(i & (1u << t))) std::swap(v.amp[i], v.amp[i | (1u << t)]);
  }
  return v;
}

// Unnormalised branch with qubit q fixed to `bit`, then q removed.
inline Vec project_out(const Vec& v, int q, int bit) {
  Vec out{v.n - 1, std::vector<C>(v.amp.size() / 2)};
  for (std::size_t i = 0; i < v.amp.size(); ++i) {
    if (static_cast<int>((i >> q) & 1u) != bit) continue;
    const std::size_t low = i & ((1u << q) - 1);
    const std::size_t high = (i >> (q + 1)) << q;
    out.amp[high | low] = v.amp[i];
  }
  return out;
}

// |<bell|v>|^2 / <v|v> for a 2-qubit v.
inline double bell_overlap(const Vec& v) {
  const C ip = (v.amp[0] + v.amp[3]) / std::sqrt(2.0);
  return std::norm(ip) / v.norm2();
}

inline double fidelity(const Vec& bob, C a, C b) {
  const C ip = std::conj(a) * bob.amp[0] + std::conj(b) * bob.amp[1];
  return std::norm(ip) / bob.norm2();
}

struct Node {
  NodeLabel label = NodeLabel::Root;
  TruncationReason reason = TruncationReason::None;
  double probability = 1.0;
  int bits = 0;
  int copies = 0;
  // Leaves only: Bob's state against phi after his corrections.
  std::optional<double> bob_fidelity;
  // ResetSuccess only: overlap of the restored pair with the Bell state.
  std::optional<double> bell_overlap;
  std::vector<Node> children;
};

// Arms below this mass are dropped, matching the library's omission of
// zero-probability arms up to rounding.
inline constexpr double kNegligible = 1e-24;

class Enumerator {
 public:
  Enumerator(C a, C b, const ProtocolConfig& config) : a_(a), b_(b), config_(config) {}

  Node run() {
    Node root;
    const Vec bell{2, {1 / std::sqrt(2.0), 0, 0, 1 / std::sqrt(2.0)}};
    const int budget = config_.strategy == Strategy::Conventional ? 0 : config_.max_resets;
    stage_one(root, bell, budget);
    return root;
  }

 private:
  // Pair qubits: 0 = Alice, 1 = Bob.
  Vec phi() const { return Vec{1, {a_, b_}}; }

  bool copy_left(const Node& at) const {
    return !config_.copies_available || at.copies < *config_.copies_available;
  }

  static Node child(const Node& parent, NodeLabel label, double probability) {
    Node c;
    c.label = label;
    c.probability = probability;
    c.bits = parent.bits;
    c.copies = parent.copies;
    return c;
  }

  static void truncate(Node& at, TruncationReason reason) {
    Node t = child(at, NodeLabel::Truncated, at.probability);
    t.reason = reason;
    at.children.push_back(t);
  }

  static void keep(Node& parent, Node c) {
    if (c.probability > kNegligible) parent.children.push_back(std::move(c));
  }

  // Teleports phi over `pair`; returns the two unnormalised post-stage-one
  // branches (qubits: 0 = phi's holder, 1 = Bob), outcome-1 branch already
  // carrying Alice's local X.
  std::array<Vec, 2> stage_one_branches(const Vec& pair) const {
    // Qubits: 0 = phi, 1 = Alice's half, 2 = Bob.
    Vec v = cnot(kron(phi(), pair), 0, 1);
    Vec d = project_out(v, 1, 0);
    Vec u = x(project_out(v, 1, 1), 0);
    return {d, u};
  }

  // Hadamard termination; Bob's Z on outcome 1.
  std::array<Vec, 2> stage_two_branches(const Vec& pair) const {
    Vec v = h(pair, 0);
    return {project_out(v, 0, 0), z(project_out(v, 0, 1), 0)};
  }

  void leaves(Node& at, const Vec& pair, int offset, int extra_bits) {
    const auto br = stage_two_branches(pair);
    for (int s = 0; s < 2; ++s) {
      Node leaf = child(at, static_cast<NodeLabel>(static_cast<int>(NodeLabel::BobPhi0) + offset + s),
                        br[s].norm2());
      leaf.bits += 1 + extra_bits;
      leaf.bob_fidelity = fidelity(br[s], a_, b_);
      keep(at, std::move(leaf));
    }
  }

  void stage_one(Node& at, const Vec& pair, int budget) {
    if (!copy_left(at)) return truncate(at, TruncationReason::CopiesExhausted);
    const auto br = stage_one_branches(pair);

    Node desired = child(at, NodeLabel::Desired, br[0].norm2());
    desired.copies += 1;
    if (config_.strategy == Strategy::Conventional) desired.bits += 1;
    if (desired.probability > kNegligible) leaves(desired, br[0], 0, 0);
    keep(at, std::move(desired));

    Node undesired = child(at, NodeLabel::Undesired, br[1].norm2());
    undesired.copies += 1;
    if (undesired.probability > kNegligible) undesired_pair(undesired, br[1], budget, 0);
    keep(at, std::move(undesired));
  }

  void undesired_pair(Node& at, const Vec& pair, int budget, int depth) {
    if (config_.strategy == Strategy::Conventional || (budget == 0 && depth == 0 &&
                                                      config_.strategy == Strategy::ResetRetry)) {
      return leaves(at, x(x(pair, 0), 1), 2, 1);
    }
    if (budget == 0) {
      if (config_.strategy == Strategy::AbandonOnFail) {
        return truncate(at, TruncationReason::Abandoned);
      }
      return replace_pair(at);
    }
    if (!copy_left(at)) return truncate(at, TruncationReason::CopiesExhausted);

    // Undesired form c|11> + d|00>: the ancilla is c|0> + d|1>, normalised.
    const double nrm = std::sqrt(pair.norm2());
    const Vec ancilla{1, {pair.amp[3] / nrm, pair.amp[0] / nrm}};
    // Qubits: 0 = ancilla, 1 = Alice's half, 2 = Bob.
    const Vec v = cnot(kron(ancilla, pair), 0, 1);
    const Vec success = project_out(v, 1, 0);
    const Vec fail = x(project_out(v, 1, 1), 0);

    Node ok = child(at, NodeLabel::ResetSuccess, success.norm2());
    ok.copies += 1;
    if (ok.probability > kNegligible) ok.bell_overlap = bell_overlap(success);
    if (ok.probability > kNegligible) stage_one(ok, success, budget - 1);
    keep(at, std::move(ok));

    if (config_.strategy == Strategy::AbandonOnFail) {
      Node gone = child(at, NodeLabel::Truncated, fail.norm2());
      gone.copies += 1;
      gone.reason = TruncationReason::Abandoned;
      keep(at, std::move(gone));
      return;
    }
    Node next = child(at, NodeLabel::Undesired, fail.norm2());
    next.copies += 1;
    if (next.probability > kNegligible) undesired_pair(next, fail, budget - 1, depth + 1);
    keep(at, std::move(next));
  }

  // Fresh Bell pair and a conventional two-bit teleport of a fresh copy; the
  // four stage outcomes fold into the phi2/phi3 leaves by stage-two outcome.
  void replace_pair(Node& at) {
    if (!copy_left(at)) return truncate(at, TruncationReason::CopiesExhausted);
    const Vec bell{2, {1 / std::sqrt(2.0), 0, 0, 1 / std::sqrt(2.0)}};
    const auto br = stage_one_branches(bell);
    for (int s = 0; s < 2; ++s) {
      double mass = 0;
      double worst = 1;
      for (int o = 0; o < 2; ++o) {
        const Vec corrected = o == 0 ? br[0] : x(x(br[1], 0), 1);
        const auto fin = stage_two_branches(corrected);
        mass += fin[s].norm2();
        worst = std::min(worst, fidelity(fin[s], a_, b_));
      }
      Node leaf = child(at, s == 0 ? NodeLabel::BobPhi2 : NodeLabel::BobPhi3,
                        at.probability * mass);
      leaf.bits += 2;
      leaf.copies += 1;
      leaf.bob_fidelity = worst;
      keep(at, std::move(leaf));
    }
  }

  C a_, b_;
  const ProtocolConfig& config_;
};

inline Node enumerate(C a, C b, const ProtocolConfig& config) {
  return Enumerator(a, b, config).run();
}

}  // namespace oracle
