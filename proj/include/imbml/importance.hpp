#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "imbml/data.hpp"

namespace imbml {

enum class ModelKind { LR, RF, ANN };
inline constexpr ModelKind kAllModels[] = {ModelKind::LR, ModelKind::RF, ModelKind::ANN};
std::string to_string(ModelKind model);
ModelKind parse_model(const std::string& name);

/// Mid-ranks with rank 1 for the best score. Always sums to p(p+1)/2.
Vector scores_to_ranks(const Vector& scores, bool higher_is_better);

/// Elementwise mean of per-replication rank vectors (compensated summation).
Vector average_ranks(const std::vector<Vector>& rankings);

/// Per predictor, the number of fits whose selected set contains it.
std::vector<int> count_lr_significance(const std::vector<std::vector<std::size_t>>& selected_sets, std::size_t p);

struct ImportanceTable {
  std::vector<std::string> predictors;
  /// Optional; empty when the schema has no construct tags.
  std::vector<Construct> constructs;
  std::vector<int> lr_significance;
  std::map<ModelKind, Vector> average_rank;
  int replications = 0;
};

struct TopKEntry {
  std::string predictor;
  /// Empty when the table carried no construct tags.
  std::optional<Construct> construct;
  double average_rank = 0.0;
};

struct TopKReport {
  std::size_t k = 10;
  std::map<ModelKind, std::vector<TopKEntry>> lists;
  /// Predictors present in every model's list, in name order.
  std::vector<std::string> intersection;
};

/// Per model, the k smallest average ranks (ties by predictor name).
TopKReport top_k(const ImportanceTable& table, std::size_t k = 10);

struct ConstructCoverage {
  std::map<ModelKind, std::set<Construct>> covered;
  std::map<ModelKind, bool> all_hypotheses;
};

ConstructCoverage construct_coverage(const TopKReport& report);

struct RankDistribution {
  std::vector<double> bin_edges;     // bins + 1 edges over [1, p]
  std::vector<std::size_t> counts;   // bins
  /// Population variance of the average ranks. (p^2 - 1) / 12 when every
  /// replication agreed, 0 when all ranks collapsed to (p + 1) / 2.
  double dispersion = 0.0;
};

RankDistribution rank_distribution(const Vector& average_ranks, std::size_t bins);

}  // namespace imbml
