#pragma once

// Closed-form probabilities and costs of teleportation with reset, plus an
// exact enumeration of the decision tree the protocol walks.

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "tele/protocol.hpp"

namespace tele::analysis {

using protocol::Amplitude;
using protocol::ProtocolConfig;
using protocol::Strategy;
using protocol::UnknownQubit;

// Probability that stage one leaves the pair in the desired form.
inline constexpr double kStageOneDesired = 0.5;

struct ResetChainEntry {
  int k = 0;
  Amplitude a_k;
  Amplitude b_k;
  // 2|a_k b_k|^2
  double p_success = 0.0;
};

struct ResetChain {
  std::vector<ResetChainEntry> entries;
  // |a| or |b| is zero: every reset fails.
  bool degenerate = false;
};

// entries[0] is (a, b, 2|ab|^2); entries[k+1] squares and renormalises entries[k].
ResetChain reset_recursion(const UnknownQubit& phi, int depth);

// Expected classical bits when a successful first reset counts as a one-bit
// outcome and a failure as two: 1.5 - |ab|^2, always within [1.25, 1.5].
double entropy_ht(const UnknownQubit& phi);

// Probability that the first round reaches a one-bit-capable state: desired
// form at stage one, or a Bell pair restored by the reset chain that follows
// (at most max_resets attempts). 1/2 at max_resets 0, 1/2 + |ab|^2 at 1.
double one_bit_probability(const UnknownQubit& phi, int max_resets);

// prod_{j<k-1} (1 - P(R_j)) * P(R_{k-1}); k >= 1.
double p_need_k_resets(const UnknownQubit& phi, int k);

// Mean stage-one attempts after a successful reset (geometric in the 1/2
// desired probability).
double expected_attempts_given_reset_success();

// --- decision tree ----------------------------------------------------------

enum class NodeLabel {
  Root,
  Desired,
  Undesired,
  ResetSuccess,
  BobPhi0,
  BobPhi1,
  BobPhi2,
  BobPhi3,
  Truncated,
};

enum class TruncationReason { None, Abandoned, CopiesExhausted };

struct DecisionTreeNode {
  NodeLabel label = NodeLabel::Root;
  // Chain depth for Undesired nodes.
  int k = 0;
  // Probability of the arm leading here from the parent (1 for the root).
  double arm_probability = 1.0;
  // Absolute probability of reaching this node.
  double probability = 1.0;
  int bits_on_path = 0;
  int copies_on_path = 0;
  int resets_remaining = 0;
  TruncationReason reason = TruncationReason::None;
  std::vector<DecisionTreeNode> children;

  bool is_leaf() const { return children.empty(); }
};

inline constexpr int kMaxTreeResets = 16;

// Exact enumeration of every path the protocol can take under `config`.
// Zero-probability arms are omitted. Throws ValidationError when max_resets
// exceeds kMaxTreeResets.
DecisionTreeNode build_tree(const UnknownQubit& phi, const ProtocolConfig& config);
DecisionTreeNode build_tree(const UnknownQubit& phi, int max_resets, Strategy strategy);

struct TreeTotals {
  double leaf_mass = 0.0;
  std::array<double, 4> phi_probs{};
  double abandoned = 0.0;
  double exhausted = 0.0;
  double mean_bits = 0.0;
  // Mean bits over completed paths only.
  double mean_bits_completed = 0.0;
  double mean_copies = 0.0;
  // Mass of completed paths that sent exactly one bit.
  double end_to_end_one_bit = 0.0;
  // Mass of the first round ending desired or with a restored Bell pair.
  double first_round_one_bit = 0.0;
  // P(first reset succeeds | first stage one undesired); unset without resets.
  std::optional<double> first_reset_success;
};

TreeTotals summarize(const DecisionTreeNode& root);

// Read off the BOB_PHI leaves.
std::array<double, 4> phi_state_probabilities(const UnknownQubit& phi, int max_resets,
                                              Strategy strategy);

// --- no-communication bias ---------------------------------------------------

enum class Conditioning { Unconditioned, PostSelectedOnDesired };

struct BiasFigures {
  double unconditioned_p0 = 0.0;
  double post_selected_p0 = 0.0;
  // Mass of Alice's runs that end with the pair in desired form.
  double keep_fraction = 0.0;
};

// Alice runs stage one and up to max_resets resets, never talking to Bob, and
// stops at the first desired outcome or when the budget is spent. Bob then
// measures his qubit in the computational basis.
BiasFigures bias_figures(const UnknownQubit& phi, int max_resets);
double bob_marginal(const UnknownQubit& phi, int max_resets, Conditioning conditioning);

// --- summary -----------------------------------------------------------------

struct CostSummary {
  double h_t = 0.0;
  double one_bit_prob = 0.0;
  double expected_copies = 0.0;
  std::array<double, 4> phi_probs{};
  double expected_attempts_given_reset_success = 2.0;
  double mean_bits = 0.0;
  double end_to_end_one_bit_prob = 0.0;
};

CostSummary cost_summary(const UnknownQubit& phi, const ProtocolConfig& config);

const char* to_string(NodeLabel label);
const char* to_string(TruncationReason reason);

}  // namespace tele::analysis
