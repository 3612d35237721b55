#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "imbml/harness.hpp"

namespace imbml {

/// Everything a reproducible run needs. Defaults: 1000 trees, mtry 5, node
/// size 10, 10 hidden units, 100 iterations, 100 replications, 75/25 splits,
/// PDFOS balancing.
struct RunConfig {
  std::string data_csv;
  std::string schema_path;
  std::string output_dir = "out";
  std::uint64_t seed = 1;

  SyntheticConfig synthetic{318, 26, 91.0 / 318.0, {6, 18, 24}, 1.0, 1};

  std::string method = "pdfos";
  int smote_k = 5;
  bool smote_standardize = false;
  /// 0 selects the Silverman rule.
  double pdfos_bandwidth = 0.0;
  bool pdfos_ridge = true;
  bool snap_to_levels = false;

  int replications = 100;
  double train_fraction = 0.75;
  BalancePolicy balance = BalancePolicy::pre_split;
  double threshold = 0.5;
  /// Execution detail only; excluded from the config fingerprint.
  int threads = 1;

  IrlsOptions lr;
  ForestConfig rf;
  ForestTrainScoring rf_train_scoring = ForestTrainScoring::oob_class_inbag_score;
  NetConfig ann;

  std::vector<int> tune_k = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13, 14, 15};
  int tune_reps = 50;

  std::size_t top_k = 10;
  std::size_t rank_bins = 10;
};

std::string config_to_json(const RunConfig& cfg);
/// Unknown keys and out-of-range values raise InvalidConfig naming the field.
RunConfig config_from_json(std::string_view text);
RunConfig load_config(const std::string& path);
void validate(const RunConfig& cfg);

/// FNV-1a over the canonical JSON with execution-only fields removed.
std::string config_fingerprint(const RunConfig& cfg);

ResampleMethod resample_method(const RunConfig& cfg);
CvConfig cv_config(const RunConfig& cfg, BalancePolicy balance, std::vector<ModelKind> models);

// ---- report tables ------------------------------------------------------------

/// First line of every report: "# imbml <command> seed=<seed> config=<fingerprint>".
std::string report_header(const std::string& command, const RunConfig& cfg);

std::string oversampler_csv(const OversamplerComparison& table);
std::string oversampler_markdown(const OversamplerComparison& table);

/// One row per replication x model x split x metric.
std::string cv_replications_csv(const CvSummary& summary, const std::string& condition);
/// Train / Test / Ratio per model and metric.
std::string cv_summary_csv(const std::vector<std::pair<std::string, const CvSummary*>>& conditions);
std::string cv_summary_markdown(const std::string& model, const std::vector<std::pair<std::string, const CvSummary*>>& conditions);

/// Test-metric range and train/test ratio range per model (AUC listed apart).
std::string reliability_csv(const CvSummary& balanced);
std::string reliability_markdown(const CvSummary& balanced);

std::string importance_csv(const ImportanceTable& table);
std::string importance_markdown(const ImportanceTable& table);
std::string top_k_csv(const TopKReport& report);
std::string top_k_markdown(const TopKReport& report, const ConstructCoverage& coverage);
std::string rank_distribution_csv(const ImportanceTable& table, std::size_t bins);
std::string rank_distribution_markdown(const ImportanceTable& table, std::size_t bins);

std::string sweep_csv(const HiddenUnitSweep& sweep);
std::string sweep_summary_csv(const HiddenUnitSweep& sweep);

/// Names of the files written by run_full_study, in write order.
std::vector<std::string> full_study_files();

/// Runs the end-to-end study and writes the report bundle into cfg.output_dir.
/// Files are staged and moved into place only when every stage succeeds.
void run_full_study(const Dataset& ds, const RunConfig& cfg);

}  // namespace imbml
