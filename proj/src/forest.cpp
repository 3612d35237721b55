#include "imbml/forest.hpp"

#include <algorithm>
#include <numeric>

#include "imbml/error.hpp"

namespace imbml {

namespace {

double gini(double c0, double c1) {
  const double n = c0 + c1;
  if (n <= 0.0) return 0.0;
  const double p1 = c1 / n;
  return 2.0 * p1 * (1.0 - p1);
}

struct SplitChoice {
  int feature = -1;
  double threshold = 0.0;
  double decrease = 0.0;
};

class TreeGrower {
 public:
  TreeGrower(const Matrix& x, const Labels& y, int mtry, int min_node_size, Rng& rng, double sample_size)
      : x_(x), y_(y), mtry_(mtry), min_node_size_(min_node_size), rng_(rng), sample_size_(sample_size),
        features_(static_cast<std::size_t>(x.cols())), importance_(Vector::Zero(x.cols())) {}

  void grow(std::vector<Eigen::Index>& rows, Tree& tree) {
    struct Pending {
      int node;
      std::size_t begin;
      std::size_t end;
    };
    tree.nodes.clear();
    tree.nodes.emplace_back();
    std::vector<Pending> stack{{0, 0, rows.size()}};
    while (!stack.empty()) {
      const Pending job = stack.back();
      stack.pop_back();
      std::span<Eigen::Index> node_rows(rows.data() + job.begin, job.end - job.begin);
      int c1 = 0;
      for (auto r : node_rows) c1 += y_[r];
      const int c0 = static_cast<int>(node_rows.size()) - c1;
      tree.nodes[static_cast<std::size_t>(job.node)].count0 = c0;
      tree.nodes[static_cast<std::size_t>(job.node)].count1 = c1;
      if (c0 == 0 || c1 == 0 || static_cast<int>(node_rows.size()) < min_node_size_) continue;

      const SplitChoice split = best_split(node_rows, c0, c1);
      if (split.feature < 0) continue;

      importance_[split.feature] += static_cast<double>(node_rows.size()) / sample_size_ * split.decrease;
      auto mid = std::stable_partition(node_rows.begin(), node_rows.end(), [&](Eigen::Index r) {
        return x_(r, split.feature) <= split.threshold;
      });
      const auto n_left = static_cast<std::size_t>(mid - node_rows.begin());

      const int left = static_cast<int>(tree.nodes.size());
      tree.nodes.emplace_back();
      tree.nodes.emplace_back();
      auto& node = tree.nodes[static_cast<std::size_t>(job.node)];
      node.feature = split.feature;
      node.threshold = split.threshold;
      node.left = left;
      node.right = left + 1;
      // Right pushed first so the left subtree is grown first.
      stack.push_back({left + 1, job.begin + n_left, job.end});
      stack.push_back({left, job.begin, job.begin + n_left});
    }
  }

  const Vector& importance() const { return importance_; }

 private:
  SplitChoice best_split(std::span<const Eigen::Index> rows, int c0, int c1) {
    const auto p = static_cast<std::size_t>(x_.cols());
    std::iota(features_.begin(), features_.end(), 0);
    const auto draws = static_cast<std::size_t>(std::min<int>(mtry_, static_cast<int>(p)));
    // Partial Fisher-Yates: the first `draws` entries are the sampled features.
    for (std::size_t d = 0; d < draws; ++d) {
      const auto pick = d + static_cast<std::size_t>(rng_.below(p - d));
      std::swap(features_[d], features_[pick]);
    }

    const double n = static_cast<double>(rows.size());
    const double parent = gini(c0, c1);
    SplitChoice best;
    values_.resize(rows.size());
    for (std::size_t d = 0; d < draws; ++d) {
      const int f = features_[d];
      for (std::size_t i = 0; i < rows.size(); ++i) values_[i] = {x_(rows[i], f), y_[rows[i]]};
      std::sort(values_.begin(), values_.end());
      double left0 = 0.0;
      double left1 = 0.0;
      for (std::size_t i = 0; i + 1 < values_.size(); ++i) {
        (values_[i].second == 1 ? left1 : left0) += 1.0;
        if (values_[i].first == values_[i + 1].first) continue;
        const double nl = left0 + left1;
        const double nr = n - nl;
        const double decrease =
            parent - nl / n * gini(left0, left1) - nr / n * gini(c0 - left0, c1 - left1);
        if (decrease > best.decrease + 1e-12) {
          best.feature = f;
          best.threshold = 0.5 * (values_[i].first + values_[i + 1].first);
          best.decrease = decrease;
        }
      }
    }
    return best;
  }

  const Matrix& x_;
  const Labels& y_;
  int mtry_;
  int min_node_size_;
  Rng& rng_;
  double sample_size_;
  std::vector<int> features_;
  std::vector<std::pair<double, int>> values_;
  Vector importance_;
};

void check_config(const ForestConfig& cfg, Eigen::Index p) {
  if (cfg.ntree < 1) throw Error(ErrorCode::InvalidConfig, "forest.ntree must be positive");
  if (cfg.mtry < 1 || cfg.mtry > p)
    throw Error(ErrorCode::InvalidConfig, "forest.mtry must lie in [1, p] (p = " + std::to_string(p) + ")");
  if (cfg.min_node_size < 1) throw Error(ErrorCode::InvalidConfig, "forest.min_node_size must be >= 1");
}

}  // namespace

const Tree::Node& Tree::leaf_for(const Eigen::Ref<const Eigen::RowVectorXd>& x) const {
  const Node* node = &nodes.front();
  while (!node->is_leaf())
    node = &nodes[static_cast<std::size_t>(x[node->feature] <= node->threshold ? node->left : node->right)];
  return *node;
}

TreeFitResult fit_tree(const Matrix& x, const Labels& y, std::span<const Eigen::Index> sample, int mtry,
                       int min_node_size, Rng& rng) {
  if (sample.empty()) throw Error(ErrorCode::EmptyData, "tree sample is empty");
  std::vector<Eigen::Index> rows(sample.begin(), sample.end());
  TreeGrower grower(x, y, mtry, min_node_size, rng, static_cast<double>(rows.size()));
  TreeFitResult result;
  grower.grow(rows, result.tree);
  result.importance = grower.importance();
  return result;
}

ForestFit fit_forest(const Dataset& ds, const ForestConfig& cfg) { return fit_forest(ds.features(), ds.labels(), cfg); }

ForestFit fit_forest(const Matrix& x, const Labels& y, const ForestConfig& cfg) {
  check_config(cfg, x.cols());
  if (y.size() != x.rows()) throw Error(ErrorCode::LengthMismatch, "feature rows and label count differ");
  const auto ones = y.sum();
  if (ones == 0 || ones == y.size()) throw Error(ErrorCode::DegenerateLabels, "random forest needs both classes");

  const Eigen::Index n = x.rows();
  ForestFit fit;
  fit.n_features = x.cols();
  fit.gini_decrease = Vector::Zero(x.cols());
  fit.trees.reserve(static_cast<std::size_t>(cfg.ntree));
  fit.in_bag.reserve(static_cast<std::size_t>(cfg.ntree));
  std::vector<Eigen::Index> sample(static_cast<std::size_t>(n));
  for (int t = 0; t < cfg.ntree; ++t) {
    // Each tree owns a substream keyed on its index.
    Rng rng(derive_seed(cfg.seed, static_cast<std::uint64_t>(t)));
    std::vector<std::uint16_t> counts(static_cast<std::size_t>(n), 0);
    for (Eigen::Index i = 0; i < n; ++i) {
      sample[static_cast<std::size_t>(i)] =
          cfg.bootstrap ? static_cast<Eigen::Index>(rng.below(static_cast<std::uint64_t>(n))) : i;
      ++counts[static_cast<std::size_t>(sample[static_cast<std::size_t>(i)])];
    }
    TreeFitResult grown = fit_tree(x, y, sample, cfg.mtry, cfg.min_node_size, rng);
    fit.gini_decrease += grown.importance;
    fit.trees.push_back(std::move(grown.tree));
    fit.in_bag.push_back(std::move(counts));
  }
  return fit;
}

ForestPrediction predict_forest(const ForestFit& fit, const Matrix& x, double threshold) {
  if (x.cols() != fit.n_features)
    throw Error(ErrorCode::ColumnMismatch, "forest expects " + std::to_string(fit.n_features) + " columns");
  ForestPrediction out{Vector::Zero(x.rows()), Labels()};
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    int votes = 0;
    for (const auto& tree : fit.trees) votes += tree.predict(x.row(i));
    out.probability[i] = static_cast<double>(votes) / static_cast<double>(fit.trees.size());
  }
  out.classes = (out.probability.array() >= threshold).cast<int>();
  return out;
}

ForestPrediction predict_forest_oob(const ForestFit& fit, const Matrix& x_train, double threshold) {
  if (x_train.cols() != fit.n_features)
    throw Error(ErrorCode::ColumnMismatch, "forest expects " + std::to_string(fit.n_features) + " columns");
  if (!fit.in_bag.empty() && static_cast<Eigen::Index>(fit.in_bag.front().size()) != x_train.rows())
    throw Error(ErrorCode::LengthMismatch, "out-of-bag prediction needs the training rows");
  ForestPrediction out{Vector::Zero(x_train.rows()), Labels()};
  for (Eigen::Index i = 0; i < x_train.rows(); ++i) {
    int votes = 0;
    int voters = 0;
    for (std::size_t t = 0; t < fit.trees.size(); ++t) {
      if (fit.in_bag[t][static_cast<std::size_t>(i)] != 0) continue;
      votes += fit.trees[t].predict(x_train.row(i));
      ++voters;
    }
    if (voters == 0) {
      for (const auto& tree : fit.trees) votes += tree.predict(x_train.row(i));
      voters = static_cast<int>(fit.trees.size());
    }
    out.probability[i] = static_cast<double>(votes) / static_cast<double>(voters);
  }
  out.classes = (out.probability.array() >= threshold).cast<int>();
  return out;
}

Vector gini_importance(const ForestFit& fit) {
  if (fit.trees.empty()) return Vector::Zero(fit.n_features);
  return fit.gini_decrease / static_cast<double>(fit.trees.size());
}

}  // namespace imbml
