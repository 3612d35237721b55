#include "doctest.h"

#include "imbml/error.hpp"
#include "imbml/metrics.hpp"
#include "imbml/rng.hpp"
#include "oracles.hpp"

using namespace imbml;

TEST_CASE("confusion counts and ratios by hand") {
  Labels truth(10), pred(10);
  truth << 1, 1, 1, 1, 0, 0, 0, 0, 0, 0;
  pred << 1, 1, 1, 0, 1, 0, 0, 0, 0, 0;
  const ConfusionMatrix cm = confusion(truth, pred);
  CHECK(cm == ConfusionMatrix{3, 1, 1, 5});
  const GofReport g = gof(cm);
  CHECK(*g.oa == 8.0 / 10.0);
  CHECK(*g.sensitivity == 3.0 / 4.0);
  CHECK(*g.precision == 3.0 / 4.0);
  CHECK(*g.specificity == 5.0 / 6.0);
  CHECK(*g.f1 == 6.0 / 8.0);
  CHECK(!g.auc);
}

TEST_CASE("undefined ratios stay empty") {
  const GofReport none_predicted = gof(ConfusionMatrix{0, 0, 4, 6});
  CHECK(!none_predicted.precision);
  CHECK(*none_predicted.sensitivity == 0.0);
  CHECK(!none_predicted.f1);
  const GofReport no_positives = gof(ConfusionMatrix{0, 2, 0, 8});
  CHECK(!no_positives.sensitivity);
  CHECK(*no_positives.precision == 0.0);
  CHECK(!no_positives.f1);
  const GofReport all_wrong = gof(ConfusionMatrix{0, 3, 2, 5});
  CHECK(*all_wrong.f1 == 0.0);
  CHECK_THROWS_AS(gof(ConfusionMatrix{0, 0, 0, 0}), Error);
}

TEST_CASE("classification threshold is inclusive") {
  Vector s(3);
  s << 0.49, 0.5, 0.51;
  const Labels c = classify(s, 0.5);
  CHECK(c[0] == 0);
  CHECK(c[1] == 1);
  CHECK(c[2] == 1);
}

TEST_CASE("auc: pair enumeration, roc trapezoid and the rank formula agree") {
  Rng rng(3);
  for (int trial = 0; trial < 100; ++trial) {
    const Eigen::Index n = 10 + static_cast<Eigen::Index>(rng.below(60));
    Labels y(n);
    Vector s(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      y[i] = i < 2 ? static_cast<int>(i) : (rng.bernoulli(0.35) ? 1 : 0);
      // coarse scores force many ties
      s[i] = trial % 2 ? std::round(rng.uniform() * 5) / 5 : rng.uniform() + 0.3 * y[i];
    }
    const double pairs = oracle::pairwise_auc(y, s);
    CHECK(std::abs(auc(y, s) - pairs) < 1e-12);
    CHECK(std::abs(trapezoid_area(roc_curve(y, s)) - pairs) < 1e-12);
  }
}

TEST_CASE("roc curve runs from origin to (1,1) monotonically") {
  Labels y(6);
  y << 1, 0, 1, 0, 1, 0;
  Vector s(6);
  s << 0.9, 0.8, 0.7, 0.7, 0.2, 0.1;
  const auto roc = roc_curve(y, s);
  CHECK(roc.front().fpr == 0.0);
  CHECK(roc.front().tpr == 0.0);
  CHECK(roc.back().fpr == 1.0);
  CHECK(roc.back().tpr == 1.0);
  for (std::size_t i = 1; i < roc.size(); ++i) {
    CHECK(roc[i].fpr >= roc[i - 1].fpr);
    CHECK(roc[i].tpr >= roc[i - 1].tpr);
  }
  CHECK(roc.size() == 6);  // origin + 5 distinct scores
}

TEST_CASE("auc of a single-class sample is an error; gof leaves it undefined") {
  Labels y = Labels::Ones(4);
  Vector s = Vector::LinSpaced(4, 0, 1);
  CHECK_THROWS_AS(auc(y, s), Error);
  const GofReport g = gof(confusion(y, classify(s)), y, s);
  CHECK(!g.auc);
  CHECK(g.oa);
}

TEST_CASE("evaluate combines thresholding and auc") {
  Labels y(4);
  y << 0, 0, 1, 1;
  Vector p(4);
  p << 0.1, 0.6, 0.4, 0.9;
  const GofReport g = evaluate(y, p);
  CHECK(*g.oa == 0.5);
  CHECK(*g.auc == 0.75);
}

TEST_CASE("length mismatch is reported") {
  CHECK_THROWS_AS(confusion(Labels::Zero(3), Labels::Zero(4)), Error);
}
