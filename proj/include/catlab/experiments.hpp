#pragma once

// Experiment harness: configuration, sweeps, result tables and manifests.

#include <nlohmann/json.hpp>

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace catlab::experiments {

using Json = nlohmann::json;

struct SweepSettings {
  std::vector<std::int64_t> N_list;
  int k_max = 1;
};

struct ExperimentConfig {
  std::array<std::int64_t, 4> map{1, 1, 1, 2};
  int q_side = 2;
  std::optional<double> alpha;  // defaults to 1 / (2 log lambda)
  std::int64_t lattice = 4096;
  int subsample = 4;
  std::string output_dir = "results";
  std::uint64_t seed = 20240601;

  struct {
    std::vector<std::int64_t> N_list{2, 4, 8, 16, 32, 64, 128};
    int trials = 50;
    std::string fault = "none";  // "none" | "scale_fundamental"
  } verify;

  struct {
    std::vector<std::int64_t> N_list{32, 64, 128, 256, 512};
    std::vector<std::int64_t> roundtrip_N_list{8, 16, 32, 64, 128};
    int k_max = 6;
    double threshold = 0.1;
    std::string observable = "cos_x1";  // "cos_x1" | "left_half"
  } semiclassics;

  struct {
    std::vector<std::int64_t> N_list{32, 64, 128, 256};
    int k_max = 3;
    int gap_k_max = 3;
    std::int64_t saturation_N = 32;
    int saturation_k_max = 5;
    std::size_t max_chains = 4096;
    std::size_t max_entries = std::size_t{1} << 31;
  } alf;

  struct {
    std::vector<std::int64_t> N_list{32, 64, 128, 256};
    int k_max = 2;
    int classical_k = 8;
  } cnt;

  double alpha_value() const;
};

Json default_config_json();
Json to_json(const ExperimentConfig& cfg);
/// Schema validation; throws Error(ConfigError).
ExperimentConfig from_json(const Json& j);

/// Applies "a.b.c=value" overrides; value parsed as JSON, falling back to a
/// string. Unknown paths are a ConfigError.
void apply_override(Json& j, const std::string& assignment);

/// Defaults, then the file (if any), then overrides.
ExperimentConfig load_config(const std::optional<std::filesystem::path>& file,
                             const std::vector<std::string>& overrides);

/// SHA-256 hex digest of the canonical (sorted, compact) JSON dump.
std::string config_hash(const ExperimentConfig& cfg);

using Cell = std::variant<std::int64_t, double, std::string>;

class ResultTable {
 public:
  ResultTable() = default;
  ResultTable(std::string name, std::vector<std::string> columns);

  const std::string& name() const noexcept { return name_; }
  const std::vector<std::string>& columns() const noexcept { return columns_; }
  const std::vector<std::vector<Cell>>& rows() const noexcept { return rows_; }

  void add_row(std::vector<Cell> row);
  std::size_t column(const std::string& name) const;

  /// RFC 4180 CSV, doubles printed with 17 significant digits.
  std::string to_csv() const;
  void write_csv(const std::filesystem::path& file) const;
  /// Reads back a table; numeric-looking cells become numbers.
  static ResultTable read_csv(const std::filesystem::path& file);

  double number(std::size_t row, const std::string& column) const;
  std::string text(std::size_t row, const std::string& column) const;

 private:
  std::string name_;
  std::vector<std::string> columns_;
  std::vector<std::vector<Cell>> rows_;
};

/// Parses RFC 4180 text into records.
std::vector<std::vector<std::string>> parse_csv(const std::string& text);
std::string csv_escape(const std::string& field);

struct CommandResult {
  std::string command;
  std::vector<ResultTable> tables;
  std::vector<std::string> breaches;

  bool passed() const noexcept { return breaches.empty(); }
};

CommandResult run_verify_axioms(const ExperimentConfig& cfg);
CommandResult run_semiclassics(const ExperimentConfig& cfg);
CommandResult run_alf(const ExperimentConfig& cfg);
CommandResult run_cnt(const ExperimentConfig& cfg);

/// Writes every table as <dir>/<name>.csv and <dir>/<command>.manifest.json.
void write_outputs(const ExperimentConfig& cfg, const CommandResult& result, const std::filesystem::path& dir);

struct CriterionStatus {
  std::string id;
  std::string status;  // PASS | FAIL | MISSING
  std::string detail;
};

struct Report {
  std::vector<CriterionStatus> criteria;
  bool passed() const;
};

/// Evaluates the acceptance criteria on the tables found in dir and writes
/// summary.csv / summary.txt there. Throws MissingArtifacts when no table exists.
Report run_report(const std::filesystem::path& dir);

}  // namespace catlab::experiments
