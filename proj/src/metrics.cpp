#include "imbml/metrics.hpp"

#include <algorithm>
#include <numeric>

#include "imbml/error.hpp"

namespace imbml {

namespace {

std::optional<double> ratio(std::int64_t num, std::int64_t den) {
  if (den == 0) return std::nullopt;
  return static_cast<double>(num) / static_cast<double>(den);
}

void check_pair(const Labels& y_true, Eigen::Index other) {
  if (y_true.size() != other) throw Error(ErrorCode::LengthMismatch, "label and prediction lengths differ");
  if (y_true.size() == 0) throw Error(ErrorCode::LengthMismatch, "empty label vector");
}

void check_binary(const Labels& y) {
  for (Eigen::Index i = 0; i < y.size(); ++i)
    if (y[i] != 0 && y[i] != 1) throw Error(ErrorCode::NonBinary, "entry " + std::to_string(i) + " is not 0/1");
}

/// Indices sorted by descending score.
std::vector<Eigen::Index> order_desc(const Vector& scores) {
  std::vector<Eigen::Index> order(static_cast<std::size_t>(scores.size()));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return scores[a] > scores[b]; });
  return order;
}

void check_scores(const Labels& y_true, const Vector& scores) {
  check_pair(y_true, scores.size());
  check_binary(y_true);
  if (!scores.allFinite()) throw Error(ErrorCode::NonNumeric, "scores must be finite");
  const auto ones = y_true.sum();
  if (ones == 0 || ones == y_true.size()) throw Error(ErrorCode::SingleClass, "ROC needs both classes");
}

}  // namespace

ConfusionMatrix confusion(const Labels& y_true, const Labels& y_pred) {
  check_pair(y_true, y_pred.size());
  check_binary(y_true);
  check_binary(y_pred);
  ConfusionMatrix cm;
  for (Eigen::Index i = 0; i < y_true.size(); ++i) {
    if (y_true[i] == 1) {
      (y_pred[i] == 1 ? cm.tp : cm.fn) += 1;
    } else {
      (y_pred[i] == 1 ? cm.fp : cm.tn) += 1;
    }
  }
  return cm;
}

std::string_view to_string(Metric metric) {
  switch (metric) {
    case Metric::oa: return "OA";
    case Metric::sensitivity: return "Sensitivity";
    case Metric::precision: return "Precision";
    case Metric::specificity: return "Specificity";
    case Metric::f1: return "F1";
    case Metric::auc: return "AUC";
  }
  return "?";
}

std::optional<double> GofReport::get(Metric metric) const {
  switch (metric) {
    case Metric::oa: return oa;
    case Metric::sensitivity: return sensitivity;
    case Metric::precision: return precision;
    case Metric::specificity: return specificity;
    case Metric::f1: return f1;
    case Metric::auc: return auc;
  }
  return std::nullopt;
}

GofReport gof(const ConfusionMatrix& cm) {
  if (cm.tp < 0 || cm.fp < 0 || cm.fn < 0 || cm.tn < 0 || cm.total() < 1)
    throw Error(ErrorCode::LengthMismatch, "confusion matrix must hold at least one nonnegative count");
  GofReport r;
  r.oa = ratio(cm.tp + cm.tn, cm.total());
  r.sensitivity = ratio(cm.tp, cm.tp + cm.fn);
  r.precision = ratio(cm.tp, cm.tp + cm.fp);
  r.specificity = ratio(cm.tn, cm.tn + cm.fp);
  // F1 = 2 tp / (2 tp + fp + fn) equals the harmonic mean whenever both parts are defined.
  if (r.sensitivity && r.precision) r.f1 = ratio(2 * cm.tp, 2 * cm.tp + cm.fp + cm.fn);
  return r;
}

GofReport gof(const ConfusionMatrix& cm, const Labels& y_true, const Vector& scores) {
  GofReport r = gof(cm);
  const auto ones = y_true.sum();
  if (ones > 0 && ones < y_true.size()) r.auc = auc(y_true, scores);
  return r;
}

Labels classify(const Vector& scores, double threshold) {
  return (scores.array() >= threshold).cast<int>();
}

GofReport evaluate(const Labels& y_true, const Vector& probabilities, double threshold) {
  return gof(confusion(y_true, classify(probabilities, threshold)), y_true, probabilities);
}

double auc(const Labels& y_true, const Vector& scores) {
  check_scores(y_true, scores);
  const auto order = order_desc(scores);
  // Walk tied blocks from the top: each positive in a block beats every
  // negative below it and ties the negatives inside it.
  double concordant = 0.0;
  double n_pos = 0.0;
  double n_neg = 0.0;
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    double block_pos = 0.0;
    double block_neg = 0.0;
    while (j < order.size() && scores[order[j]] == scores[order[i]]) {
      (y_true[order[j]] == 1 ? block_pos : block_neg) += 1.0;
      ++j;
    }
    // Negatives in this block lose to every positive seen above it.
    concordant += block_neg * n_pos + 0.5 * block_neg * block_pos;
    n_pos += block_pos;
    n_neg += block_neg;
    i = j;
  }
  return concordant / (n_pos * n_neg);
}

std::vector<RocPoint> roc_curve(const Labels& y_true, const Vector& scores) {
  check_scores(y_true, scores);
  const auto order = order_desc(scores);
  const double n_pos = static_cast<double>(y_true.sum());
  const double n_neg = static_cast<double>(y_true.size()) - n_pos;
  std::vector<RocPoint> curve{{0.0, 0.0}};
  double tp = 0.0;
  double fp = 0.0;
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j < order.size() && scores[order[j]] == scores[order[i]]) {
      (y_true[order[j]] == 1 ? tp : fp) += 1.0;
      ++j;
    }
    curve.push_back({fp / n_neg, tp / n_pos});
    i = j;
  }
  return curve;
}

double trapezoid_area(const std::vector<RocPoint>& curve) {
  double area = 0.0;
  for (std::size_t i = 1; i < curve.size(); ++i)
    area += (curve[i].fpr - curve[i - 1].fpr) * 0.5 * (curve[i].tpr + curve[i - 1].tpr);
  return area;
}

}  // namespace imbml
