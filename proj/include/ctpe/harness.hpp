#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "ctpe/optimizer.hpp"
#include "ctpe/stats.hpp"

namespace ctpe {

struct ExperimentConfig {
  std::string problem;
  // Per-constraint quantiles used to calibrate thresholds. Ignored when
  // explicit thresholds are given; the problem's defaults apply if both are empty.
  std::vector<double> gamma_true;
  std::vector<double> thresholds;
  std::vector<Mode> methods;
  int budget = 200;
  std::vector<std::uint64_t> seeds;
  int n_partial = 0;
  std::vector<std::size_t> cheap;
  std::filesystem::path out_dir;
  int n_init = 10;
  int n_samples = 24;
  std::size_t calibration_samples = 100000;
};

std::vector<std::uint64_t> seed_range(std::uint64_t base, std::size_t count);

// One line of a trajectory log.
struct LogRecord {
  std::string method;
  std::string setting;
  std::uint64_t seed = 0;
  int iteration = 0;  // 1-based evaluation count
  Config config;
  double objective = 0.0;
  std::vector<double> constraints;
  bool feasible = false;
  std::optional<double> best_feasible;

  friend bool operator==(const LogRecord&, const LogRecord&) = default;
};

nlohmann::json to_json(const LogRecord& rec);
LogRecord log_record_from_json(const nlohmann::json& doc);

struct RunRecord {
  std::string method;
  std::string setting;
  std::uint64_t seed = 0;
  // Best feasible objective after each evaluation; empty until one is found.
  std::vector<std::optional<double>> trace;
  std::optional<double> final_loss;
};

struct RunOutput {
  std::filesystem::path log_path;
  std::string setting;
  std::vector<double> thresholds;
  std::optional<double> oracle;
  std::vector<RunRecord> runs;
};

// Thresholds the config resolves to.
std::vector<double> resolve_thresholds(const ExperimentConfig& config);

// Runs every (method, seed) cell and writes <out_dir>/log.jsonl: one header
// line followed by one record per evaluation. Throws std::invalid_argument
// for bad names or parameters and std::runtime_error for I/O failures.
RunOutput run_experiment(const ExperimentConfig& config);

inline const std::vector<int> kCheckpoints = {50, 100, 150, 200};

struct Comparison {
  std::string reference;
  std::string other;
  int checkpoint = 0;
  WinLossTie wlt;
  // Signed-rank p-values over per-setting medians; empty when undefined.
  std::optional<double> p_other_better;
  std::optional<double> p_reference_better;
};

struct SettingTest {
  std::string setting;
  std::string other;
  int checkpoint = 0;
  std::optional<double> p_other_better;
  std::optional<double> p_reference_better;
};

struct Summary {
  std::vector<int> checkpoints;
  std::vector<std::string> settings;
  std::vector<std::string> methods;
  // medians[setting][method][checkpoint index]; +inf means no feasible point.
  std::map<std::string, std::map<std::string, std::vector<double>>> medians;
  std::vector<Comparison> comparisons;
  std::vector<SettingTest> setting_tests;
  // average_ranks[method][checkpoint index]
  std::map<std::string, std::vector<double>> average_ranks;
};

// Reads logs, writes medians.tsv, comparison.tsv, setting_tests.tsv,
// ranks.tsv and summary.json into out_dir. The first method seen in the logs
// is the reference for comparisons. Values are absolute percentage losses
// when the log carries an oracle, raw objectives otherwise.
Summary summarize(const std::vector<std::filesystem::path>& logs,
                  const std::filesystem::path& out_dir);

}  // namespace ctpe
