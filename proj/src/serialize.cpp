#include "tele/serialize.hpp"

#include <cstdio>
#include <sstream>

namespace tele::io {

namespace {

const mc::ComparisonRow* find_row(const mc::ComparisonReport* report, const std::string& name) {
  if (!report) return nullptr;
  for (const auto& row : report->rows) {
    if (row.statistic == name) return &row;
  }
  return nullptr;
}

ordered_json amplitude_pair(sv::Amplitude a, sv::Amplitude b) {
  return {{"re0", a.real()}, {"im0", a.imag()}, {"re1", b.real()}, {"im1", b.imag()}};
}

void write_dot_node(std::ostream& out, const analysis::DecisionTreeNode& node, int& next_id,
                    int parent) {
  const int id = next_id++;
  std::string label = analysis::to_string(node.label);
  if (node.label == analysis::NodeLabel::Undesired) label += " k=" + std::to_string(node.k);
  if (node.label == analysis::NodeLabel::Truncated) {
    label += std::string(" (") + analysis::to_string(node.reason) + ")";
  }
  label += "\\np=" + format_double(node.probability);
  if (node.is_leaf()) {
    label += "\\nbits=" + std::to_string(node.bits_on_path) +
             " copies=" + std::to_string(node.copies_on_path);
  }
  out << "  n" << id << " [label=\"" << label << "\"" << (node.is_leaf() ? ", shape=box" : "")
      << "];\n";
  if (parent >= 0) {
    out << "  n" << parent << " -> n" << id << " [label=\"" << format_double(node.arm_probability)
        << "\"];\n";
  }
  for (const auto& child : node.children) write_dot_node(out, child, next_id, id);
}

}  // namespace

std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

ordered_json to_json(const protocol::UnknownQubit& phi) { return amplitude_pair(phi.a, phi.b); }

ordered_json to_json(const protocol::ProtocolConfig& config) {
  ordered_json j;
  j["strategy"] = protocol::to_string(config.strategy);
  j["max_resets"] = config.max_resets;
  j["copies_available"] =
      config.copies_available ? ordered_json(*config.copies_available) : ordered_json(nullptr);
  j["amplitudes_known"] = config.amplitudes_known;
  return j;
}

ordered_json to_json(const protocol::Transcript& t) {
  ordered_json events = ordered_json::array();
  for (const auto& e : t.events) {
    ordered_json ej;
    ej["type"] = protocol::to_string(e.type);
    if (e.k) ej["k"] = *e.k;
    if (e.outcome) ej["outcome"] = *e.outcome;
    if (e.probability) ej["probability"] = *e.probability;
    if (e.success) ej["success"] = *e.success;
    if (!e.purpose.empty()) ej["purpose"] = e.purpose;
    if (e.bell_overlap) ej["bell_overlap"] = *e.bell_overlap;
    if (!e.alice_qubit.empty()) ej["alice_qubit"] = e.alice_qubit;
    events.push_back(std::move(ej));
  }
  ordered_json j;
  j["strategy"] = protocol::to_string(t.strategy);
  j["events"] = std::move(events);
  j["bits_sent"] = t.bits_sent;
  j["copies_consumed"] = t.copies_consumed;
  if (t.bob_final) {
    j["bob_final"] = amplitude_pair((*t.bob_final)[0], (*t.bob_final)[1]);
    j["fidelity"] = t.fidelity.value_or(0.0);
  } else {
    j["bob_final"] = nullptr;
    j["fidelity"] = nullptr;
  }
  return j;
}

ordered_json to_json(const analysis::DecisionTreeNode& node) {
  ordered_json j;
  j["label"] = analysis::to_string(node.label);
  if (node.label == analysis::NodeLabel::Undesired) j["k"] = node.k;
  j["arm_probability"] = node.arm_probability;
  j["probability"] = node.probability;
  j["bits"] = node.bits_on_path;
  j["copies"] = node.copies_on_path;
  j["resets_remaining"] = node.resets_remaining;
  if (node.label == analysis::NodeLabel::Truncated) {
    j["reason"] = analysis::to_string(node.reason);
  }
  ordered_json children = ordered_json::array();
  for (const auto& c : node.children) children.push_back(to_json(c));
  j["children"] = std::move(children);
  return j;
}

ordered_json tree_document(const protocol::UnknownQubit& phi, const protocol::ProtocolConfig& config,
                           const analysis::DecisionTreeNode& root) {
  const auto totals = analysis::summarize(root);
  ordered_json j;
  j["phi"] = to_json(phi);
  j["config"] = to_json(config);
  j["leaf_mass"] = totals.leaf_mass;
  j["one_bit_prob"] = totals.first_round_one_bit;
  j["end_to_end_one_bit_prob"] = totals.end_to_end_one_bit;
  j["phi_probs"] = totals.phi_probs;
  j["root"] = to_json(root);
  return j;
}

std::string to_dot(const analysis::DecisionTreeNode& root) {
  std::ostringstream out;
  out << "digraph decision_tree {\n  node [fontname=\"Helvetica\"];\n";
  int next_id = 0;
  write_dot_node(out, root, next_id, -1);
  out << "}\n";
  return out.str();
}

ordered_json analysis_document(const protocol::UnknownQubit& phi,
                               const protocol::ProtocolConfig& config, int depth) {
  const auto summary = analysis::cost_summary(phi, config);
  const auto chain = analysis::reset_recursion(phi, depth);

  ordered_json reset_chain = ordered_json::array();
  for (const auto& e : chain.entries) {
    reset_chain.push_back({{"k", e.k},
                           {"a_k", {{"re", e.a_k.real()}, {"im", e.a_k.imag()}}},
                           {"b_k", {{"re", e.b_k.real()}, {"im", e.b_k.imag()}}},
                           {"p_success", e.p_success}});
  }
  ordered_json p_need = ordered_json::array({0.0});
  for (int k = 1; k <= depth; ++k) p_need.push_back(analysis::p_need_k_resets(phi, k));

  ordered_json j;
  j["phi"] = to_json(phi);
  j["config"] = to_json(config);
  j["h_t"] = summary.h_t;
  j["one_bit_prob"] = summary.one_bit_prob;
  j["end_to_end_one_bit_prob"] = summary.end_to_end_one_bit_prob;
  j["mean_bits"] = summary.mean_bits;
  j["expected_copies"] = summary.expected_copies;
  j["reset_chain"] = std::move(reset_chain);
  j["degenerate_chain"] = chain.degenerate;
  j["p_need_k_resets"] = std::move(p_need);
  j["phi_probs"] = summary.phi_probs;
  j["expected_attempts_given_reset_success"] = summary.expected_attempts_given_reset_success;
  return j;
}

ordered_json to_json(const mc::TrialStats& stats, const mc::ComparisonReport* report) {
  ordered_json counts = ordered_json::array();
  for (const auto& [cls, n] : stats.counts) {
    counts.push_back({{"bits", cls.bits}, {"copies", cls.copies}, {"leaf", cls.leaf}, {"count", n}});
  }
  ordered_json estimates = ordered_json::array();
  for (const auto& e : stats.estimates()) {
    ordered_json ej{{"statistic", e.name}, {"value", e.value}, {"stderr", e.std_error}, {"n", e.n}};
    if (const auto* row = find_row(report, e.name)) {
      ej["analytic"] = row->analytic;
      ej["z"] = row->z;
      ej["pass"] = row->pass;
    }
    estimates.push_back(std::move(ej));
  }
  ordered_json j;
  j["n_trials"] = stats.n_trials;
  j["seed"] = stats.seed;
  j["mean_bits"] = stats.mean_bits();
  j["mean_copies"] = stats.mean_copies();
  j["one_bit_prob"] = stats.empirical_one_bit_prob();
  j["counts"] = std::move(counts);
  j["phi_counts"] = stats.phi_counts;
  j["abandoned"] = stats.abandoned;
  j["exhausted"] = stats.exhausted;
  j["reset_attempts"] = stats.reset_attempts;
  j["reset_successes"] = stats.reset_successes;
  j["min_fidelity"] = stats.min_fidelity;
  j["min_bell_overlap"] = stats.min_bell_overlap;
  j["estimates"] = std::move(estimates);
  if (report) j["all_pass"] = report->all_pass();
  return j;
}

std::string to_csv(const mc::TrialStats& stats, const mc::ComparisonReport* report) {
  std::ostringstream out;
  out << "statistic,analytic,empirical,stderr,z,pass\r\n";
  for (const auto& e : stats.estimates()) {
    const auto* row = find_row(report, e.name);
    out << csv_field(e.name) << ',' << (row ? format_double(row->analytic) : "") << ','
        << format_double(e.value) << ',' << format_double(e.std_error) << ','
        << (row ? format_double(row->z) : "") << ',' << (row ? (row->pass ? "true" : "false") : "")
        << "\r\n";
  }
  return out.str();
}

ordered_json to_json(const mc::ComparisonReport& report) {
  ordered_json rows = ordered_json::array();
  for (const auto& r : report.rows) {
    rows.push_back({{"statistic", r.statistic},
                    {"analytic", r.analytic},
                    {"empirical", r.empirical},
                    {"stderr", r.std_error},
                    {"z", r.z},
                    {"pass", r.pass}});
  }
  return {{"z_threshold", report.z_threshold}, {"all_pass", report.all_pass()}, {"rows", rows}};
}

std::string to_csv(const mc::ComparisonReport& report) {
  std::ostringstream out;
  out << "statistic,analytic,empirical,stderr,z,pass\r\n";
  for (const auto& r : report.rows) {
    out << csv_field(r.statistic) << ',' << format_double(r.analytic) << ','
        << format_double(r.empirical) << ',' << format_double(r.std_error) << ','
        << format_double(r.z) << ',' << (r.pass ? "true" : "false") << "\r\n";
  }
  return out.str();
}

ordered_json bias_document(const protocol::UnknownQubit& phi, int max_resets,
                           const mc::BiasStats& stats, const mc::ComparisonReport& check) {
  const auto exact = analysis::bias_figures(phi, max_resets);
  const auto ratio = [](std::uint64_t num, std::uint64_t den) {
    return den ? ordered_json(static_cast<double>(num) / static_cast<double>(den))
               : ordered_json(nullptr);
  };
  ordered_json j;
  j["phi"] = to_json(phi);
  j["max_resets"] = max_resets;
  j["unconditioned_bob_p0"] = exact.unconditioned_p0;
  j["post_selected_bob_p0"] = exact.post_selected_p0;
  j["keep_fraction"] = exact.keep_fraction;
  j["empirical"] = {{"n_trials", stats.n_trials},
                    {"seed", stats.seed},
                    {"unconditioned_bob_p0", ratio(stats.bob_zero, stats.n_trials)},
                    {"post_selected_bob_p0", ratio(stats.kept_bob_zero, stats.kept)},
                    {"keep_fraction", ratio(stats.kept, stats.n_trials)}};
  j["check"] = to_json(check);
  return j;
}

}  // namespace tele::io
