#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "imbml/data.hpp"

namespace imbml {

struct ConfusionMatrix {
  std::int64_t tp = 0;
  std::int64_t fp = 0;
  std::int64_t fn = 0;
  std::int64_t tn = 0;

  std::int64_t total() const { return tp + fp + fn + tn; }
  bool operator==(const ConfusionMatrix&) const = default;
};

ConfusionMatrix confusion(const Labels& y_true, const Labels& y_pred);

enum class Metric { oa, sensitivity, precision, specificity, f1, auc };
inline constexpr std::array<Metric, 6> kAllMetrics = {Metric::oa,          Metric::sensitivity, Metric::precision,
                                                      Metric::specificity, Metric::f1,          Metric::auc};
std::string_view to_string(Metric metric);

/// The six goodness-of-fit measures. An empty optional marks a ratio whose
/// denominator was zero; it is never coerced to 0.
struct GofReport {
  std::optional<double> oa;
  std::optional<double> sensitivity;
  std::optional<double> precision;
  std::optional<double> specificity;
  std::optional<double> f1;
  std::optional<double> auc;

  std::optional<double> get(Metric metric) const;
};

GofReport gof(const ConfusionMatrix& cm);
/// Adds AUC from scores; AUC stays undefined when y_true has a single class.
GofReport gof(const ConfusionMatrix& cm, const Labels& y_true, const Vector& scores);

/// Thresholded classes: score >= threshold is class 1.
Labels classify(const Vector& scores, double threshold = 0.5);

/// Evaluate probabilities against labels at a threshold.
GofReport evaluate(const Labels& y_true, const Vector& probabilities, double threshold = 0.5);

/// Mann-Whitney AUC with ties counted one half.
double auc(const Labels& y_true, const Vector& scores);

struct RocPoint {
  double fpr = 0.0;
  double tpr = 0.0;
};

/// Staircase from (0,0) to (1,1), one vertex per distinct score.
std::vector<RocPoint> roc_curve(const Labels& y_true, const Vector& scores);
double trapezoid_area(const std::vector<RocPoint>& curve);

}  // namespace imbml
