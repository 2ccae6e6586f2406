// catlab: experiment driver for the quantized cat-map toolkit.
//
//   catlab verify-axioms [--config FILE] [--out DIR] [--section.key=value ...]
//   catlab semiclassics | alf | cnt   (same options)
//   catlab report DIR
//
// Exit status: 0 all checks pass, 1 tolerance breach or numerical failure,
// 2 configuration error.

#include "catlab/error.hpp"
#include "catlab/experiments.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>

#include <functional>
#include <iostream>
#include <map>

namespace ex = catlab::experiments;
using catlab::ErrorCode;

namespace {

constexpr int kPass = 0;
constexpr int kBreach = 1;
constexpr int kConfig = 2;

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::NotHermitian:
    case ErrorCode::NoConvergence:
    case ErrorCode::NotPSD:
    case ErrorCode::InvalidState:
    case ErrorCode::SimplexViolation:
    case ErrorCode::DimensionMismatch:
    case ErrorCode::MissingDynamics:
    case ErrorCode::NotTrigPolynomial:
      return kBreach;
    default:
      return kConfig;
  }
}

struct SweepOptions {
  std::string config_file;
  std::string out_dir;
};

std::vector<std::string> overrides_from(const std::vector<std::string>& extras) {
  std::vector<std::string> out;
  for (const auto& arg : extras) {
    if (arg.rfind("--", 0) != 0 || arg.find('=') == std::string::npos) {
      throw catlab::Error(ErrorCode::ConfigError, fmt::format("unexpected argument '{}'", arg));
    }
    out.push_back(arg.substr(2));
  }
  return out;
}

int run_sweep(const SweepOptions& opt, const std::vector<std::string>& extras,
              const std::function<ex::CommandResult(const ex::ExperimentConfig&)>& command) {
  std::optional<std::filesystem::path> file;
  if (!opt.config_file.empty()) file = opt.config_file;
  ex::ExperimentConfig cfg = ex::load_config(file, overrides_from(extras));
  if (!opt.out_dir.empty()) cfg.output_dir = opt.out_dir;
  const ex::CommandResult result = command(cfg);
  ex::write_outputs(cfg, result, cfg.output_dir);
  for (const auto& b : result.breaches) std::cerr << "breach: " << b << "\n";
  std::cout << fmt::format("{}: {} ({} tables in {})\n", result.command, result.passed() ? "pass" : "FAIL",
                           result.tables.size(), cfg.output_dir);
  return result.passed() ? kPass : kBreach;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quantized cat-map experiments"};
  app.require_subcommand(1);

  const std::map<std::string, std::function<ex::CommandResult(const ex::ExperimentConfig&)>> sweeps{
      {"verify-axioms", ex::run_verify_axioms},
      {"semiclassics", ex::run_semiclassics},
      {"alf", ex::run_alf},
      {"cnt", ex::run_cnt}};
  const std::map<std::string, std::string> help{
      {"verify-axioms", "Coherent-state axioms, localization and Weyl algebra checks"},
      {"semiclassics", "Quantization limits and Egorov breaking time"},
      {"alf", "ALF entropy of the quantized partition against the classical entropy"},
      {"cnt", "CNT entropy bracket and classical refined entropies"}};

  std::map<std::string, SweepOptions> options;
  std::map<std::string, CLI::App*> subs;
  for (const auto& [name, fn] : sweeps) {
    auto* sub = app.add_subcommand(name, help.at(name));
    sub->allow_extras();
    sub->add_option("--config", options[name].config_file, "JSON configuration file");
    sub->add_option("--out", options[name].out_dir, "output directory (overrides output_dir)");
    sub->footer("Any parameter can be overridden with --section.key=value, e.g. --alf.k_max=2.");
    subs[name] = sub;
  }
  std::string report_dir;
  auto* report = app.add_subcommand("report", "Evaluate acceptance criteria on a results directory");
  report->add_option("dir", report_dir, "results directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kPass : kConfig;
  }

  try {
    if (report->parsed()) {
      const auto r = ex::run_report(report_dir);
      for (const auto& c : r.criteria) std::cout << fmt::format("{} {} {}\n", c.id, c.status, c.detail);
      return r.passed() ? kPass : kBreach;
    }
    for (const auto& [name, sub] : subs)
      if (sub->parsed()) return run_sweep(options[name], sub->remaining(), sweeps.at(name));
  } catch (const catlab::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kBreach;
  }
  return kConfig;
}
