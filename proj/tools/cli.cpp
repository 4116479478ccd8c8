#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <optional>
#include <ostream>
#include <random>
#include <sstream>

#include <CLI11.hpp>

#include "tele/rng.hpp"
#include "tele/serialize.hpp"

namespace tele::cli {

namespace {

using nlohmann::ordered_json;
using protocol::ProtocolConfig;
using protocol::Strategy;
using protocol::UnknownQubit;

constexpr double kCliNormTolerance = 1e-6;

struct Options {
  double a_re = 0, a_im = 0, b_re = 0, b_im = 0;
  double theta = 0, phase = 0;
  std::uint64_t trials = 100000;
  std::uint64_t seed = 0;
  int max_resets = 1;
  int depth = 8;
  int copies = 0;
  int workers = 0;
  int trace = 0;
  bool unknown_amplitudes = false;
  std::string strategy = "reset-retry";
  std::string format = "json";
  std::string out_path;
  double inject_error = 0.0;

  std::vector<CLI::Option*> cartesian;
  std::vector<CLI::Option*> polar;
  std::vector<CLI::Option*> seed_opts;
  std::vector<CLI::Option*> copies_opts;
};

class UsageError : public Error {
 public:
  using Error::Error;
};

bool any_given(const std::vector<CLI::Option*>& opts) {
  return std::any_of(opts.begin(), opts.end(), [](const CLI::Option* o) { return o->count() > 0; });
}

UnknownQubit amplitudes(const Options& o) {
  const bool cart = any_given(o.cartesian);
  const bool pol = any_given(o.polar);
  if (cart && pol) {
    throw UsageError("give either --a-re/--a-im/--b-re/--b-im or --theta/--phase, not both");
  }
  if (!cart && !pol) {
    throw UsageError("amplitudes required: --a-re/--a-im/--b-re/--b-im or --theta/--phase");
  }
  sv::Amplitude a, b;
  if (cart) {
    a = {o.a_re, o.a_im};
    b = {o.b_re, o.b_im};
  } else {
    a = std::cos(o.theta / 2);
    b = std::polar(1.0, o.phase) * std::sin(o.theta / 2);
  }
  const double norm = std::norm(a) + std::norm(b);
  if (!std::isfinite(norm) || std::abs(norm - 1.0) > kCliNormTolerance) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "amplitudes not normalized: |a|^2+|b|^2 = " << norm << " (deviation " << norm - 1.0
        << ", tolerance 1e-6)";
    throw ValidationError(msg.str());
  }
  const double scale = 1.0 / std::sqrt(norm);
  return UnknownQubit::make(a * scale, b * scale);
}

ProtocolConfig protocol_config(const Options& o) {
  ProtocolConfig c;
  const auto s = protocol::parse_strategy(o.strategy);
  if (!s) throw UsageError("unknown strategy '" + o.strategy + "'");
  c.strategy = *s;
  c.max_resets = o.max_resets;
  if (any_given(o.copies_opts)) c.copies_available = o.copies;
  c.amplitudes_known = !o.unknown_amplitudes;
  c.validate();
  return c;
}

void require_format(const Options& o, std::initializer_list<const char*> allowed) {
  for (const char* f : allowed) {
    if (o.format == f) return;
  }
  throw UsageError("format '" + o.format + "' not supported by this command");
}

std::uint64_t resolve_seed(const Options& o, std::ostream& err) {
  if (any_given(o.seed_opts)) return o.seed;
  std::random_device rd;
  const std::uint64_t seed = (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
  err << "seed: " << seed << "\n";
  return seed;
}

void emit(const Options& o, const std::string& text, std::ostream& out) {
  if (o.out_path.empty()) {
    out << text;
    return;
  }
  std::ofstream file(o.out_path, std::ios::binary);
  if (!file) throw UsageError("cannot open output file '" + o.out_path + "'");
  file << text;
  if (!file.flush()) throw UsageError("failed writing '" + o.out_path + "'");
}

std::string dump(const ordered_json& j) { return j.dump(2) + "\n"; }

int cmd_analyze(const Options& o, std::ostream& out) {
  require_format(o, {"json"});
  if (o.depth < 0 || o.depth > 64) throw UsageError("--depth must be in [0, 64]");
  const auto phi = amplitudes(o);
  emit(o, dump(io::analysis_document(phi, protocol_config(o), o.depth)), out);
  return kExitOk;
}

int cmd_simulate(const Options& o, std::ostream& out, std::ostream& err) {
  require_format(o, {"json", "csv"});
  const auto phi = amplitudes(o);
  const auto config = protocol_config(o);
  mc::TrialConfig tc{o.trials, resolve_seed(o, err), phi, config};
  tc.validate();
  const auto stats = mc::run_trials(tc, o.workers);
  std::optional<mc::ComparisonReport> report;
  if (config.strategy == Strategy::Conventional || config.max_resets <= analysis::kMaxTreeResets) {
    report = mc::compare(stats, phi, config);
  }
  const mc::ComparisonReport* rp = report ? &*report : nullptr;
  if (o.format == "csv") {
    emit(o, io::to_csv(stats, rp), out);
    return kExitOk;
  }
  auto doc = io::to_json(stats, rp);
  doc["phi"] = io::to_json(phi);
  doc["config"] = io::to_json(config);
  if (o.trace > 0) {
    ordered_json traces = ordered_json::array();
    const auto n = std::min<std::uint64_t>(static_cast<std::uint64_t>(o.trace), tc.n_trials);
    for (std::uint64_t i = 0; i < n; ++i) {
      auto stream = rng::child(tc.seed, i);
      const protocol::DrawFn draw = [&stream] { return stream.uniform(); };
      try {
        traces.push_back(io::to_json(protocol::run_teleport(phi, config, draw)));
      } catch (const protocol::ResourceExhausted& ex) {
        traces.push_back(io::to_json(ex.transcript()));
      }
    }
    doc["transcripts"] = std::move(traces);
  }
  emit(o, dump(doc), out);
  return kExitOk;
}

int cmd_tree(const Options& o, std::ostream& out) {
  require_format(o, {"json", "dot"});
  const auto phi = amplitudes(o);
  const auto config = protocol_config(o);
  const auto root = analysis::build_tree(phi, config);
  emit(o, o.format == "dot" ? io::to_dot(root) : dump(io::tree_document(phi, config, root)), out);
  return kExitOk;
}

int cmd_bias(const Options& o, std::ostream& out, std::ostream& err) {
  require_format(o, {"json"});
  if (o.max_resets < 0) throw UsageError("--max-resets must be >= 0");
  const auto phi = amplitudes(o);
  const auto stats = mc::run_bias_trials(o.trials, resolve_seed(o, err), phi, o.max_resets,
                                         o.workers);
  const auto check = mc::compare_bias(stats, phi, o.max_resets);
  emit(o, dump(io::bias_document(phi, o.max_resets, stats, check)), out);
  return kExitOk;
}

struct VerifyCase {
  std::string name;
  UnknownQubit phi;
  ProtocolConfig config;
  bool bias = false;
};

std::vector<VerifyCase> verify_matrix() {
  const double r = 1.0 / std::sqrt(2.0);
  const auto worked = UnknownQubit::make({0, r}, {0.5, 0.5});
  const auto plus = UnknownQubit::make(r, r);
  const auto tilted = UnknownQubit::make(std::sqrt(3.0) / 2, 0.5);
  const auto basis0 = UnknownQubit::make(1, 0);
  const auto polar = UnknownQubit::make(std::cos(0.55), std::polar(1.0, 0.7) * std::sin(0.55));
  const auto skewed = UnknownQubit::make(std::sqrt(0.9), std::sqrt(0.1));
  const auto cfg = [](Strategy s, int m, std::optional<int> copies = std::nullopt) {
    ProtocolConfig c;
    c.strategy = s;
    c.max_resets = m;
    c.copies_available = copies;
    return c;
  };
  return {
      {"worked/reset-retry/m1", worked, cfg(Strategy::ResetRetry, 1)},
      {"worked/abandon/m1", worked, cfg(Strategy::AbandonOnFail, 1)},
      {"worked/reset-retry/m2/copies3", worked, cfg(Strategy::ResetRetry, 2, 3)},
      {"plus/reset-retry/m3", plus, cfg(Strategy::ResetRetry, 3)},
      {"plus/conventional", plus, cfg(Strategy::Conventional, 0)},
      {"tilted/reset-retry/m2", tilted, cfg(Strategy::ResetRetry, 2)},
      {"basis0/reset-retry/m3", basis0, cfg(Strategy::ResetRetry, 3)},
      {"polar/reset-retry/m4", polar, cfg(Strategy::ResetRetry, 4)},
      {"skewed/bias/m1", skewed, cfg(Strategy::ResetRetry, 1), true},
      {"plus/bias/m2", plus, cfg(Strategy::ResetRetry, 2), true},
  };
}

int cmd_verify(const Options& o, std::ostream& out, std::ostream& err) {
  require_format(o, {"json", "csv"});
  if (o.trials < 1 || o.trials > mc::kMaxTrials) throw UsageError("--trials must be in [1, 1e9]");
  const std::uint64_t seed = any_given(o.seed_opts) ? o.seed : kVerifySeed;

  ordered_json cases = ordered_json::array();
  std::ostringstream csv;
  csv << "statistic,analytic,empirical,stderr,z,pass\r\n";
  std::vector<std::string> failures;
  std::uint64_t index = 0;
  for (const auto& vc : verify_matrix()) {
    const std::uint64_t case_seed = rng::mix64(seed ^ rng::mix64(++index));
    mc::ComparisonReport report;
    if (vc.bias) {
      const auto stats =
          mc::run_bias_trials(o.trials, case_seed, vc.phi, vc.config.max_resets, o.workers);
      report = mc::compare_bias(stats, vc.phi, vc.config.max_resets);
    } else {
      const auto stats = mc::run_trials({o.trials, case_seed, vc.phi, vc.config}, o.workers);
      report = mc::compare(stats, vc.phi, vc.config);
    }
    if (o.inject_error != 0.0) {
      for (auto& row : report.rows) {
        row = mc::make_row(row.statistic, row.analytic + o.inject_error, row.empirical,
                           row.std_error);
      }
    }
    for (const auto& row : report.rows) {
      const std::string name = vc.name + "/" + row.statistic;
      csv << io::csv_field(name) << ',' << io::format_double(row.analytic) << ','
          << io::format_double(row.empirical) << ',' << io::format_double(row.std_error) << ','
          << io::format_double(row.z) << ',' << (row.pass ? "true" : "false") << "\r\n";
      if (!row.pass) {
        failures.push_back(name + " analytic=" + io::format_double(row.analytic) +
                           " empirical=" + io::format_double(row.empirical) +
                           " z=" + io::format_double(row.z));
      }
    }
    auto cj = io::to_json(report);
    cj["case"] = vc.name;
    cj["phi"] = io::to_json(vc.phi);
    cj["config"] = io::to_json(vc.config);
    cj["n_trials"] = o.trials;
    cj["seed"] = case_seed;
    cases.push_back(std::move(cj));
  }

  if (o.format == "csv") {
    emit(o, csv.str(), out);
  } else {
    emit(o,
         dump({{"z_threshold", mc::kZThreshold},
               {"seed", seed},
               {"all_pass", failures.empty()},
               {"cases", cases}}),
         out);
  }
  for (const auto& f : failures) err << "FAIL " << f << "\n";
  return failures.empty() ? kExitOk : kExitVerifyFailed;
}

void add_amplitude_flags(CLI::App* cmd, Options& o) {
  o.cartesian.push_back(cmd->add_option("--a-re", o.a_re, "Re(a)"));
  o.cartesian.push_back(cmd->add_option("--a-im", o.a_im, "Im(a)"));
  o.cartesian.push_back(cmd->add_option("--b-re", o.b_re, "Re(b)"));
  o.cartesian.push_back(cmd->add_option("--b-im", o.b_im, "Im(b)"));
  o.polar.push_back(cmd->add_option("--theta", o.theta, "Bloch polar angle, a = cos(theta/2)"));
  o.polar.push_back(
      cmd->add_option("--phase", o.phase, "relative phase, b = e^{i phase} sin(theta/2)"));
}

void add_max_resets(CLI::App* cmd, Options& o) {
  cmd->add_option("--max-resets", o.max_resets, "total reset attempts per run")
      ->capture_default_str();
}

void add_protocol_flags(CLI::App* cmd, Options& o) {
  add_max_resets(cmd, o);
  cmd->add_option("--strategy", o.strategy, "conventional | reset-retry | abandon")
      ->capture_default_str();
  o.copies_opts.push_back(
      cmd->add_option("--copies", o.copies, "copies of phi available (default unlimited)"));
  cmd->add_flag("--unknown-amplitudes", o.unknown_amplitudes,
                "Alice cannot prepare chain ancillas (limits max-resets to 1)");
}

void add_common_flags(CLI::App* cmd, Options& o, const char* default_format) {
  o.format = default_format;
  cmd->add_option("--format", o.format, "output format")->capture_default_str();
  cmd->add_option("--out", o.out_path, "write the document here instead of stdout");
}

void add_sampling_flags(CLI::App* cmd, Options& o) {
  cmd->add_option("--trials", o.trials, "number of trials")->capture_default_str();
  o.seed_opts.push_back(
      cmd->add_option("--seed", o.seed, "RNG seed (generated and printed if absent)"));
  cmd->add_option("--workers", o.workers, "OpenMP threads (0 = default)")->capture_default_str();
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Teleportation with local reset: exact analysis and Monte Carlo checks",
               "teleport-reset"};
  app.require_subcommand(1);
  Options o;

  auto* analyze = app.add_subcommand("analyze", "closed-form costs and reset chain");
  auto* simulate = app.add_subcommand("simulate", "sample protocol runs");
  auto* tree = app.add_subcommand("tree", "exact decision tree");
  auto* bias = app.add_subcommand("bias", "no-communication bias experiment");
  auto* verify = app.add_subcommand("verify", "analytic vs empirical across a fixed matrix");

  // The state-taking subcommands bind the same Options; only one is ever parsed.
  for (auto* cmd : {analyze, simulate, tree, bias}) add_amplitude_flags(cmd, o);
  for (auto* cmd : {analyze, simulate, tree}) add_protocol_flags(cmd, o);
  add_max_resets(bias, o);
  add_common_flags(analyze, o, "json");
  analyze->add_option("--depth", o.depth, "reset chain entries to list")->capture_default_str();
  add_common_flags(simulate, o, "json");
  add_sampling_flags(simulate, o);
  simulate->add_option("--trace", o.trace, "include transcripts of the first N trials");
  add_common_flags(tree, o, "json");
  add_common_flags(bias, o, "json");
  add_sampling_flags(bias, o);

  Options v;
  add_common_flags(verify, v, "json");
  add_sampling_flags(verify, v);
  verify->add_option("--inject-analytic-error", v.inject_error)->group("");

  // CLI11 consumes arguments from the back.
  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(std::move(reversed));
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (analyze->parsed()) return cmd_analyze(o, out);
    if (simulate->parsed()) return cmd_simulate(o, out, err);
    if (tree->parsed()) return cmd_tree(o, out);
    if (bias->parsed()) return cmd_bias(o, out, err);
    return cmd_verify(v, out, err);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
}

}  // namespace tele::cli
