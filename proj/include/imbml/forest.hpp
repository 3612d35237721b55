#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "imbml/data.hpp"
#include "imbml/rng.hpp"

namespace imbml {

struct ForestConfig {
  int ntree = 1000;
  int mtry = 5;
  /// Nodes with fewer samples than this are not split.
  int min_node_size = 10;
  std::uint64_t seed = 1;
  /// Test hook: fit every tree on the identity sample instead of a bootstrap.
  bool bootstrap = true;

  bool operator==(const ForestConfig&) const = default;
};

/// Flat binary tree. Internal nodes hold (feature, threshold, children);
/// leaves hold class counts. Node 0 is the root.
struct Tree {
  struct Node {
    int feature = -1;  // -1 marks a leaf
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    int count0 = 0;
    int count1 = 0;

    bool is_leaf() const { return feature < 0; }
    /// Majority class; ties vote 1.
    int vote() const { return count1 >= count0 ? 1 : 0; }
    bool operator==(const Node&) const = default;
  };

  std::vector<Node> nodes;

  const Node& leaf_for(const Eigen::Ref<const Eigen::RowVectorXd>& x) const;
  int predict(const Eigen::Ref<const Eigen::RowVectorXd>& x) const { return leaf_for(x).vote(); }
  bool operator==(const Tree&) const = default;
};

struct TreeFitResult {
  Tree tree;
  /// Per-feature sum of (node size / sample size) * Gini decrease.
  Vector importance;
};

/// Grow one unpruned CART tree on x[sample]. mtry features are drawn
/// without replacement at each node; thresholds are midpoints between
/// consecutive distinct values.
TreeFitResult fit_tree(const Matrix& x, const Labels& y, std::span<const Eigen::Index> sample, int mtry,
                       int min_node_size, Rng& rng);

struct ForestFit {
  std::vector<Tree> trees;
  /// in_bag[t][i]: times row i was drawn for tree t.
  std::vector<std::vector<std::uint16_t>> in_bag;
  /// Accumulated weighted Gini decrease per feature over all trees.
  Vector gini_decrease;
  Eigen::Index n_features = 0;

  bool operator==(const ForestFit&) const = default;
};

ForestFit fit_forest(const Dataset& ds, const ForestConfig& cfg);
ForestFit fit_forest(const Matrix& x, const Labels& y, const ForestConfig& cfg);

struct ForestPrediction {
  Vector probability;
  Labels classes;
};

/// Probability = fraction of trees voting 1.
ForestPrediction predict_forest(const ForestFit& fit, const Matrix& x, double threshold = 0.5);

/// Out-of-bag votes for the training rows the forest was fitted on. Rows
/// that are in-bag for every tree fall back to all-tree votes.
ForestPrediction predict_forest_oob(const ForestFit& fit, const Matrix& x_train, double threshold = 0.5);

/// Mean decrease in Gini impurity: accumulated decrease divided by ntree.
Vector gini_importance(const ForestFit& fit);

}  // namespace imbml
