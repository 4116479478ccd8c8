#pragma once

// JSON, CSV and DOT renderings of the library's result types. JSON numbers use
// nlohmann's shortest round-trip form; CSV and DOT numbers use %.17g.

#include <string>

#include <json.hpp>

#include "tele/analysis.hpp"
#include "tele/montecarlo.hpp"

namespace tele::io {

using nlohmann::ordered_json;

std::string format_double(double x);

// RFC 4180 field: quoted only when it holds a comma, quote or line break.
std::string csv_field(const std::string& s);

ordered_json to_json(const protocol::UnknownQubit& phi);
ordered_json to_json(const protocol::ProtocolConfig& config);
ordered_json to_json(const protocol::Transcript& t);

ordered_json to_json(const analysis::DecisionTreeNode& node);
// Tree document: the inputs, the leaf mass and the nested root node.
ordered_json tree_document(const protocol::UnknownQubit& phi, const protocol::ProtocolConfig& config,
                           const analysis::DecisionTreeNode& root);
std::string to_dot(const analysis::DecisionTreeNode& root);

// Cost summary for `config` plus the reset chain and p_need_k_resets listed
// to `depth`. p_need_k_resets[k] is indexed by k, with [0] = 0.
ordered_json analysis_document(const protocol::UnknownQubit& phi,
                               const protocol::ProtocolConfig& config, int depth);

// With a report, each estimate also carries its analytic value, z and pass.
ordered_json to_json(const mc::TrialStats& stats, const mc::ComparisonReport* report = nullptr);
// Same columns as the comparison CSV; analytic, z and pass stay empty for
// estimates without an exact counterpart.
std::string to_csv(const mc::TrialStats& stats, const mc::ComparisonReport* report = nullptr);

ordered_json to_json(const mc::ComparisonReport& report);
std::string to_csv(const mc::ComparisonReport& report);

ordered_json bias_document(const protocol::UnknownQubit& phi, int max_resets,
                           const mc::BiasStats& stats, const mc::ComparisonReport& check);

}  // namespace tele::io
