#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "imbml/data.hpp"
#include "imbml/forest.hpp"
#include "imbml/importance.hpp"
#include "imbml/logistic.hpp"
#include "imbml/metrics.hpp"
#include "imbml/neuralnet.hpp"
#include "imbml/resampling.hpp"

namespace imbml {

enum class BalancePolicy { none, pre_split, within_train };
std::string to_string(BalancePolicy policy);
BalancePolicy parse_balance_policy(const std::string& text);

/// Which votes score the forest on its own training rows.
enum class ForestTrainScoring {
  /// Out-of-bag votes for classes, in-bag votes for AUC scores.
  oob_class_inbag_score,
  inbag,
  oob,
};
std::string to_string(ForestTrainScoring scoring);
ForestTrainScoring parse_forest_train_scoring(const std::string& text);

struct ModelSettings {
  IrlsOptions lr;
  ForestConfig rf;   // seed replaced per replication
  NetConfig ann;     // seed replaced per replication
  ForestTrainScoring rf_train_scoring = ForestTrainScoring::oob_class_inbag_score;
  double threshold = 0.5;
};

struct CvConfig {
  int replications = 100;
  double train_fraction = 0.75;
  BalancePolicy balance = BalancePolicy::pre_split;
  ResampleMethod method = PdfosMethod{};
  ResampleOptions resample_options;
  std::vector<ModelKind> models = {ModelKind::LR, ModelKind::RF, ModelKind::ANN};
  ModelSettings settings;
  std::uint64_t seed = 1;
  /// Worker threads for replications; 0 picks the hardware concurrency.
  int threads = 1;
};

void validate(const CvConfig& cfg);

struct Split {
  IndexList train;
  IndexList test;
};

/// Uniform random partition with |train| = floor(train_fraction * n).
Split mc_split(Eigen::Index n, double train_fraction, std::uint64_t rep_seed);

/// What a fitted model reports for one replication.
struct ModelEvaluation {
  GofReport train;
  GofReport test;
  /// Per-predictor importance ranks (1 = most important); may be empty.
  Vector ranks;
  /// Forward-selected predictors, for the logistic model.
  std::vector<std::size_t> selected;
};

using ModelRunner =
    std::function<ModelEvaluation(const Dataset& train, const Dataset& test, std::uint64_t seed)>;

struct ModelSpec {
  std::string name;
  std::uint64_t stream = 0;
  ModelRunner run;
};

ModelSpec builtin_model(ModelKind kind, const ModelSettings& settings);
std::vector<ModelSpec> builtin_models(const CvConfig& cfg);

struct ModelOutcome {
  std::string model;
  std::optional<ModelEvaluation> evaluation;
  /// Set when the fit failed; the replication still completes.
  std::string error;
};

struct ReplicationRecord {
  int index = 0;
  std::uint64_t seed = 0;
  Eigen::Index train_size = 0;
  Eigen::Index test_size = 0;
  Eigen::Index test_synthetic = 0;
  std::vector<ModelOutcome> outcomes;
};

/// Data after the policy's up-front step: balanced once for pre_split,
/// untouched otherwise.
struct PreparedData {
  Dataset data;
  std::vector<bool> synthetic_mask;
};

PreparedData prepare(const Dataset& ds, const CvConfig& cfg);

ReplicationRecord run_replication(const PreparedData& prepared, const CvConfig& cfg,
                                  const std::vector<ModelSpec>& models, int rep_index);
ReplicationRecord run_replication(const Dataset& ds, const CvConfig& cfg, int rep_index);

struct MetricSummary {
  std::optional<double> train_mean;
  std::optional<double> test_mean;
  /// train_mean / test_mean, only when test_mean > 0.
  std::optional<double> ratio;
  int train_count = 0;
  int test_count = 0;
  int train_skipped = 0;
  int test_skipped = 0;
};

struct ModelSummary {
  std::string model;
  std::map<Metric, MetricSummary> metrics;
  int failed_fits = 0;
};

struct CvSummary {
  std::vector<ModelSummary> models;
  std::vector<ReplicationRecord> records;

  const ModelSummary& at(const std::string& model) const;
};

CvSummary summarize(std::vector<ReplicationRecord> records, const std::vector<std::string>& model_names);

CvSummary run_crossval(const Dataset& ds, const CvConfig& cfg);
CvSummary run_crossval(const Dataset& ds, const CvConfig& cfg, const std::vector<ModelSpec>& models);

/// Per-replication importance collected from a cross-validation run.
ImportanceTable importance_table(const CvSummary& summary, const Dataset& ds);

// ---- oversampler comparison (single full-data fit per condition) ----------

struct OversamplerRow {
  std::string condition;  // "original" or method name
  std::optional<GofReport> report;
  Eigen::Index rows = 0;
  std::string error;
};

struct OversamplerComparison {
  std::vector<OversamplerRow> rows;
  /// Index of the best method by F1, then AUC; never the original row.
  std::optional<std::size_t> best;
};

OversamplerComparison compare_oversamplers(const Dataset& ds, const std::vector<ResampleMethod>& methods,
                                           const IrlsOptions& lr, std::uint64_t seed, double threshold = 0.5,
                                           const ResampleOptions& options = {});

// ---- hidden-unit sweep ----------------------------------------------------

struct HiddenUnitPoint {
  int k = 0;
  std::vector<double> train_oa;
  std::vector<double> test_oa;
};

struct HiddenUnitSweep {
  std::vector<HiddenUnitPoint> points;
};

/// For each k, `reps` Monte Carlo fits on fresh splits. Split r is shared across k.
HiddenUnitSweep tune_hidden_units(const Dataset& ds, const std::vector<int>& k_range, int reps, std::uint64_t seed,
                                  const NetConfig& base = {}, double train_fraction = 0.75, int threads = 1);

/// Smallest k for which at least `share` of replicates reach train OA >= `accuracy`.
std::optional<int> select_hidden_units(const HiddenUnitSweep& sweep, double accuracy = 0.9, double share = 0.5);

// ---- small statistics helpers ------------------------------------------------

std::array<double, 5> five_number_summary(std::vector<double> values);
double median(std::vector<double> values);
/// Spearman rank correlation with mid-ranks for ties.
double spearman(const Vector& a, const Vector& b);

/// Runs body(i) for i in [0, count) on up to `threads` workers.
void parallel_for(int count, int threads, const std::function<void(int)>& body);

}  // namespace imbml
