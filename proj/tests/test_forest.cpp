#include "doctest.h"

#include <numeric>

#include "imbml/error.hpp"
#include "imbml/forest.hpp"
#include "imbml/rng.hpp"

using namespace imbml;

namespace {

IndexList identity(Eigen::Index n) {
  IndexList idx(static_cast<std::size_t>(n));
  std::iota(idx.begin(), idx.end(), 0);
  return idx;
}

}  // namespace

TEST_CASE("gini split on a hand-computed example") {
  // x = 1..6, y = 0 0 1 1 1 0. Weighted child impurity per threshold:
  // 1.5: 0.40  2.5: 0.25  3.5: 0.444  4.5: 0.50  5.5: 0.40, so the root cuts at 2.5
  // with decrease 0.5 - 0.25 = 0.25. The right node {1,1,1,0} then cuts at 5.5,
  // decrease 0.375 weighted by 4/6.
  Matrix x(6, 1);
  x << 1, 2, 3, 4, 5, 6;
  Labels y(6);
  y << 0, 0, 1, 1, 1, 0;
  Rng rng(1);
  const auto idx = identity(6);
  const TreeFitResult r = fit_tree(x, y, idx, 1, 1, rng);
  const auto& root = r.tree.nodes[0];
  CHECK(root.feature == 0);
  CHECK(root.threshold == 2.5);
  CHECK(r.importance[0] == doctest::Approx(0.25 + 4.0 / 6.0 * 0.375));
  // Leaves are pure, so total decrease equals the root impurity.
  CHECK(r.importance.sum() == doctest::Approx(0.5));
  for (Eigen::Index i = 0; i < 6; ++i) CHECK(r.tree.predict(x.row(i)) == y[i]);
}

TEST_CASE("nodes below min_node_size stay leaves") {
  Matrix x(6, 1);
  x << 1, 2, 3, 4, 5, 6;
  Labels y(6);
  y << 0, 0, 1, 1, 1, 0;
  Rng rng(1);
  const auto idx = identity(6);
  const TreeFitResult r = fit_tree(x, y, idx, 1, 10, rng);
  CHECK(r.tree.nodes.size() == 1);
  CHECK(r.tree.nodes[0].count0 == 3);
  CHECK(r.tree.nodes[0].vote() == 1);  // ties vote 1
  CHECK(r.importance.sum() == 0.0);
}

TEST_CASE("the more informative feature wins the root split") {
  Matrix x(8, 2);
  x << 1, 5, 2, 1, 3, 7, 4, 2, 5, 8, 6, 3, 7, 6, 8, 4;
  Labels y(8);
  y << 0, 0, 0, 0, 1, 1, 1, 1;
  Rng rng(3);
  const auto idx = identity(8);
  const TreeFitResult r = fit_tree(x, y, idx, 2, 1, rng);
  CHECK(r.tree.nodes[0].feature == 0);
  CHECK(r.tree.nodes[0].threshold == 4.5);
  CHECK(r.importance[1] == 0.0);
}

TEST_CASE("separable data: forest agrees with a 1-nearest-neighbour oracle") {
  Rng gen(5);
  const Eigen::Index n = 200;
  Matrix x(n, 3);
  Labels y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < 3; ++j) x(i, j) = gen.normal();
    y[i] = x(i, 0) > 0.0 ? 1 : 0;
  }
  // Points at least 0.3 away from the boundary: 1-NN is correct there
  Matrix q(100, 3);
  Labels truth(100);
  for (Eigen::Index i = 0; i < 100; ++i) {
    for (Eigen::Index j = 0; j < 3; ++j) q(i, j) = gen.normal();
    q(i, 0) = (i % 2 ? 1.0 : -1.0) * (0.3 + std::abs(q(i, 0)));
    Eigen::Index best = 0;
    (x.rowwise() - q.row(i)).rowwise().squaredNorm().minCoeff(&best);
    truth[i] = y[best];
  }
  ForestConfig cfg;
  cfg.ntree = 50;
  cfg.mtry = 3;
  cfg.min_node_size = 2;
  const ForestFit fit = fit_forest(x, y, cfg);
  const ForestPrediction pred = predict_forest(fit, q);
  CHECK((pred.classes.array() == truth.array()).count() >= 97);
  const Vector imp = gini_importance(fit);
  CHECK(imp[0] > 5 * imp[1]);
  CHECK(imp[0] > 5 * imp[2]);
}

TEST_CASE("forest determinism and seed sensitivity") {
  Rng gen(8);
  Matrix x(60, 4);
  Labels y(60);
  for (Eigen::Index i = 0; i < 60; ++i) {
    for (Eigen::Index j = 0; j < 4; ++j) x(i, j) = gen.normal();
    y[i] = gen.bernoulli(0.4) ? 1 : 0;
  }
  ForestConfig cfg;
  cfg.ntree = 20;
  cfg.mtry = 2;
  CHECK(fit_forest(x, y, cfg) == fit_forest(x, y, cfg));
  ForestConfig other = cfg;
  other.seed = 2;
  CHECK(!(fit_forest(x, y, other) == fit_forest(x, y, cfg)));
}

TEST_CASE("out-of-bag votes only use trees that did not see the row") {
  Rng gen(4);
  Matrix x(40, 2);
  Labels y(40);
  for (Eigen::Index i = 0; i < 40; ++i) {
    x(i, 0) = gen.normal();
    x(i, 1) = gen.normal();
    y[i] = gen.bernoulli(0.5) ? 1 : 0;
  }
  ForestConfig cfg;
  cfg.ntree = 30;
  cfg.mtry = 1;
  cfg.min_node_size = 1;
  const ForestFit fit = fit_forest(x, y, cfg);
  const ForestPrediction oob = predict_forest_oob(fit, x);
  for (Eigen::Index i = 0; i < 40; ++i) {
    int votes = 0, trees = 0;
    for (std::size_t t = 0; t < fit.trees.size(); ++t) {
      if (fit.in_bag[t][static_cast<std::size_t>(i)] > 0) continue;
      ++trees;
      votes += fit.trees[t].predict(x.row(i));
    }
    REQUIRE(trees > 0);
    CHECK(oob.probability[i] == doctest::Approx(static_cast<double>(votes) / trees));
  }
  // Each bootstrap draws n rows with replacement
  for (const auto& bag : fit.in_bag) CHECK(std::accumulate(bag.begin(), bag.end(), 0) == 40);
}

TEST_CASE("mtry outside [1, p] is rejected") {
  Matrix x = Matrix::Random(10, 3);
  Labels y = Labels::Zero(10);
  y.head(5).setOnes();
  ForestConfig cfg;
  cfg.mtry = 4;
  CHECK_THROWS_AS(fit_forest(x, y, cfg), Error);
  cfg.mtry = 0;
  CHECK_THROWS_AS(fit_forest(x, y, cfg), Error);
}
