#include "tele/analysis.hpp"

#include <cmath>
#include <stdexcept>

namespace tele::analysis {

namespace {

double p_success(Amplitude a, Amplitude b) { return 2.0 * std::norm(a) * std::norm(b); }

class TreeBuilder {
 public:
  TreeBuilder(const UnknownQubit& phi, const ProtocolConfig& config)
      : config_(config),
        chain_(reset_recursion(phi, std::max(config.max_resets, 0))) {}

  DecisionTreeNode build() {
    DecisionTreeNode root;
    root.label = NodeLabel::Root;
    root.resets_remaining =
        config_.strategy == Strategy::Conventional ? 0 : config_.max_resets;
    expand_stage_one(root);
    return root;
  }

 private:
  bool copy_available(const DecisionTreeNode& at) const {
    return !config_.copies_available || at.copies_on_path < *config_.copies_available;
  }

  static DecisionTreeNode child(const DecisionTreeNode& parent, NodeLabel label, double arm) {
    DecisionTreeNode c;
    c.label = label;
    c.arm_probability = arm;
    c.probability = parent.probability * arm;
    c.bits_on_path = parent.bits_on_path;
    c.copies_on_path = parent.copies_on_path;
    c.resets_remaining = parent.resets_remaining;
    c.k = parent.k;
    return c;
  }

  static void add(DecisionTreeNode& parent, DecisionTreeNode c) {
    if (c.arm_probability > 0.0) parent.children.push_back(std::move(c));
  }

  static void truncate(DecisionTreeNode& at, TruncationReason reason) {
    auto t = child(at, NodeLabel::Truncated, 1.0);
    t.reason = reason;
    add(at, std::move(t));
  }

  // ROOT or RESET_SUCCESS: a Bell pair is shared and a fresh copy goes in.
  void expand_stage_one(DecisionTreeNode& at) {
    if (!copy_available(at)) return truncate(at, TruncationReason::CopiesExhausted);
    auto desired = child(at, NodeLabel::Desired, kStageOneDesired);
    desired.copies_on_path += 1;
    desired.k = 0;
    if (config_.strategy == Strategy::Conventional) desired.bits_on_path += 1;
    expand_stage_two(desired, 0);
    add(at, std::move(desired));

    auto undesired = child(at, NodeLabel::Undesired, 1.0 - kStageOneDesired);
    undesired.copies_on_path += 1;
    undesired.k = 0;
    expand_undesired(undesired);
    add(at, std::move(undesired));
  }

  // Stage two on a desired pair; `offset` 0 for the phi0/phi1 leaves, 2 for phi2/phi3.
  void expand_stage_two(DecisionTreeNode& at, int offset, int extra_bits = 0) {
    for (int outcome = 0; outcome < 2; ++outcome) {
      auto leaf = child(at, static_cast<NodeLabel>(static_cast<int>(NodeLabel::BobPhi0) +
                                                   offset + outcome),
                        0.5);
      leaf.bits_on_path += 1 + extra_bits;
      add(at, std::move(leaf));
    }
  }

  void expand_undesired(DecisionTreeNode& at) {
    if (config_.strategy == Strategy::Conventional) return expand_stage_two(at, 2, 1);
    if (at.resets_remaining == 0) {
      if (config_.strategy == Strategy::AbandonOnFail) {
        return truncate(at, TruncationReason::Abandoned);
      }
      if (at.k == 0) return expand_stage_two(at, 2, 1);
      // Fresh pair, conventional two-bit teleportation.
      if (!copy_available(at)) return truncate(at, TruncationReason::CopiesExhausted);
      for (int outcome = 0; outcome < 2; ++outcome) {
        auto leaf = child(at, outcome == 0 ? NodeLabel::BobPhi2 : NodeLabel::BobPhi3, 0.5);
        leaf.bits_on_path += 2;
        leaf.copies_on_path += 1;
        add(at, std::move(leaf));
      }
      return;
    }
    if (at.k >= 1 && !config_.amplitudes_known) {
      throw ConfigError("reset at chain depth >= 1 needs known amplitudes");
    }
    if (!copy_available(at)) return truncate(at, TruncationReason::CopiesExhausted);

    const double p = chain_.entries.at(static_cast<std::size_t>(at.k)).p_success;
    auto success = child(at, NodeLabel::ResetSuccess, p);
    success.copies_on_path += 1;
    success.resets_remaining -= 1;
    success.k = 0;
    if (success.arm_probability > 0.0) expand_stage_one(success);
    add(at, std::move(success));

    if (config_.strategy == Strategy::AbandonOnFail) {
      auto gone = child(at, NodeLabel::Truncated, 1.0 - p);
      gone.copies_on_path += 1;
      gone.resets_remaining -= 1;
      gone.reason = TruncationReason::Abandoned;
      add(at, std::move(gone));
      return;
    }
    auto failed = child(at, NodeLabel::Undesired, 1.0 - p);
    failed.copies_on_path += 1;
    failed.resets_remaining -= 1;
    failed.k = at.k + 1;
    if (failed.arm_probability > 0.0) expand_undesired(failed);
    add(at, std::move(failed));
  }

  const ProtocolConfig& config_;
  ResetChain chain_;
};

void accumulate(const DecisionTreeNode& node, TreeTotals& totals) {
  if (!node.is_leaf()) {
    for (const auto& c : node.children) accumulate(c, totals);
    return;
  }
  const double p = node.probability;
  totals.leaf_mass += p;
  totals.mean_bits += p * node.bits_on_path;
  totals.mean_copies += p * node.copies_on_path;
  switch (node.label) {
    case NodeLabel::BobPhi0:
    case NodeLabel::BobPhi1:
    case NodeLabel::BobPhi2:
    case NodeLabel::BobPhi3: {
      const int idx = static_cast<int>(node.label) - static_cast<int>(NodeLabel::BobPhi0);
      totals.phi_probs[static_cast<std::size_t>(idx)] += p;
      totals.mean_bits_completed += p * node.bits_on_path;
      if (node.bits_on_path == 1) totals.end_to_end_one_bit += p;
      break;
    }
    case NodeLabel::Truncated:
      if (node.reason == TruncationReason::Abandoned) {
        totals.abandoned += p;
      } else {
        totals.exhausted += p;
      }
      break;
    default:
      throw std::logic_error("decision tree leaf with non-terminal label");
  }
}

// Reset-success mass along the first chain hanging off the root's undesired arm.
double first_chain_restored(const DecisionTreeNode& undesired) {
  double mass = 0.0;
  for (const auto& c : undesired.children) {
    if (c.label == NodeLabel::ResetSuccess) mass += c.probability;
    if (c.label == NodeLabel::Undesired) mass += first_chain_restored(c);
  }
  return mass;
}

struct BiasAccumulator {
  const ResetChain& chain;
  double a_sq;
  double p0 = 0.0;
  double kept = 0.0;
  double kept_p0 = 0.0;

  void root(int budget, double mass) {
    const double desired = mass * kStageOneDesired;
    kept += desired;
    kept_p0 += desired * a_sq;
    p0 += desired * a_sq;
    undesired(0, budget, mass * (1.0 - kStageOneDesired));
  }

  // Undesired pair a_k|11> + b_k|00>: Bob reads 0 with probability |b_k|^2.
  void undesired(int k, int budget, double mass) {
    if (mass == 0.0) return;
    const auto& e = chain.entries.at(static_cast<std::size_t>(k));
    if (budget == 0) {
      p0 += mass * std::norm(e.b_k);
      return;
    }
    root(budget - 1, mass * e.p_success);
    undesired(k + 1, budget - 1, mass * (1.0 - e.p_success));
  }
};

}  // namespace

ResetChain reset_recursion(const UnknownQubit& phi, int depth) {
  if (depth < 0) throw ValidationError("reset_recursion: depth must be >= 0");
  if (phi.a == 0.0 && phi.b == 0.0) throw ValidationError("reset_recursion: a = b = 0");
  ResetChain chain;
  chain.degenerate = phi.a == 0.0 || phi.b == 0.0;
  Amplitude a = phi.a;
  Amplitude b = phi.b;
  for (int k = 0; k <= depth; ++k) {
    chain.entries.push_back({k, a, b, p_success(a, b)});
    const auto next = protocol::next_chain_amplitudes(a, b);
    a = next.a;
    b = next.b;
  }
  return chain;
}

double entropy_ht(const UnknownQubit& phi) {
  const double ab2 = phi.ab_squared();
  return (0.5 + ab2) * 1.0 + (0.5 - ab2) * 2.0;
}

double one_bit_probability(const UnknownQubit& phi, int max_resets) {
  if (max_resets < 0) throw ValidationError("one_bit_probability: max_resets must be >= 0");
  const auto chain = reset_recursion(phi, max_resets);
  double all_fail = 1.0;
  for (int k = 0; k < max_resets; ++k) {
    all_fail *= 1.0 - chain.entries[static_cast<std::size_t>(k)].p_success;
  }
  return kStageOneDesired + (1.0 - kStageOneDesired) * (1.0 - all_fail);
}

double p_need_k_resets(const UnknownQubit& phi, int k) {
  if (k < 1) throw ValidationError("p_need_k_resets: k must be >= 1");
  const auto chain = reset_recursion(phi, k - 1);
  double p = chain.entries[static_cast<std::size_t>(k - 1)].p_success;
  for (int j = 0; j < k - 1; ++j) p *= 1.0 - chain.entries[static_cast<std::size_t>(j)].p_success;
  return p;
}

double expected_attempts_given_reset_success() { return 1.0 / kStageOneDesired; }

DecisionTreeNode build_tree(const UnknownQubit& phi, const ProtocolConfig& config) {
  config.validate();
  if (config.max_resets > kMaxTreeResets) {
    throw ValidationError("build_tree: max_resets " + std::to_string(config.max_resets) +
                          " exceeds " + std::to_string(kMaxTreeResets));
  }
  return TreeBuilder(phi, config).build();
}

DecisionTreeNode build_tree(const UnknownQubit& phi, int max_resets, Strategy strategy) {
  ProtocolConfig config;
  config.strategy = strategy;
  config.max_resets = max_resets;
  return build_tree(phi, config);
}

TreeTotals summarize(const DecisionTreeNode& root) {
  TreeTotals totals;
  accumulate(root, totals);
  const double completed =
      totals.phi_probs[0] + totals.phi_probs[1] + totals.phi_probs[2] + totals.phi_probs[3];
  totals.mean_bits_completed = completed > 0.0 ? totals.mean_bits_completed / completed : 0.0;
  for (const auto& c : root.children) {
    if (c.label == NodeLabel::Desired) totals.first_round_one_bit += c.probability;
    if (c.label == NodeLabel::Undesired) {
      totals.first_round_one_bit += first_chain_restored(c);
      bool attempted = false;
      double success = 0.0;
      for (const auto& r : c.children) {
        if (r.label == NodeLabel::ResetSuccess) {
          attempted = true;
          success = r.arm_probability;
        } else if (r.label == NodeLabel::Undesired ||
                   (r.reason == TruncationReason::Abandoned &&
                    r.copies_on_path > c.copies_on_path)) {
          attempted = true;
        }
      }
      if (attempted) totals.first_reset_success = success;
    }
  }
  return totals;
}

std::array<double, 4> phi_state_probabilities(const UnknownQubit& phi, int max_resets,
                                              Strategy strategy) {
  return summarize(build_tree(phi, max_resets, strategy)).phi_probs;
}

BiasFigures bias_figures(const UnknownQubit& phi, int max_resets) {
  if (max_resets < 0) throw ValidationError("bias_figures: max_resets must be >= 0");
  const auto chain = reset_recursion(phi, max_resets);
  BiasAccumulator acc{chain, std::norm(phi.a)};
  acc.root(max_resets, 1.0);
  BiasFigures out;
  out.unconditioned_p0 = acc.p0;
  out.keep_fraction = acc.kept;
  out.post_selected_p0 = acc.kept > 0.0 ? acc.kept_p0 / acc.kept : 0.0;
  return out;
}

double bob_marginal(const UnknownQubit& phi, int max_resets, Conditioning conditioning) {
  const auto f = bias_figures(phi, max_resets);
  return conditioning == Conditioning::Unconditioned ? f.unconditioned_p0 : f.post_selected_p0;
}

CostSummary cost_summary(const UnknownQubit& phi, const ProtocolConfig& config) {
  const auto totals = summarize(build_tree(phi, config));
  CostSummary s;
  s.h_t = entropy_ht(phi);
  s.one_bit_prob = totals.first_round_one_bit;
  s.expected_copies = totals.mean_copies;
  s.phi_probs = totals.phi_probs;
  s.expected_attempts_given_reset_success = expected_attempts_given_reset_success();
  s.mean_bits = totals.mean_bits;
  s.end_to_end_one_bit_prob = totals.end_to_end_one_bit;
  return s;
}

const char* to_string(NodeLabel label) {
  switch (label) {
    case NodeLabel::Root:
      return "ROOT";
    case NodeLabel::Desired:
      return "DESIRED";
    case NodeLabel::Undesired:
      return "UNDESIRED";
    case NodeLabel::ResetSuccess:
      return "RESET_SUCCESS";
    case NodeLabel::BobPhi0:
      return "BOB_PHI0";
    case NodeLabel::BobPhi1:
      return "BOB_PHI1";
    case NodeLabel::BobPhi2:
      return "BOB_PHI2";
    case NodeLabel::BobPhi3:
      return "BOB_PHI3";
    case NodeLabel::Truncated:
      return "TRUNCATED";
  }
  return "?";
}

const char* to_string(TruncationReason reason) {
  switch (reason) {
    case TruncationReason::None:
      return "none";
    case TruncationReason::Abandoned:
      return "abandoned";
    case TruncationReason::CopiesExhausted:
      return "copies-exhausted";
  }
  return "?";
}

}  // namespace tele::analysis
