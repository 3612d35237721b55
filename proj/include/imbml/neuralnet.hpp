#pragma once

#include <cstdint>

#include "imbml/data.hpp"

namespace imbml {

struct NetConfig {
  int hidden_units = 10;
  int max_iter = 100;
  double init_range = 0.5;
  double weight_decay = 0.0;
  std::uint64_t seed = 1;

  bool operator==(const NetConfig&) const = default;
};

/// Weights of a one-hidden-layer sigmoid network. Row 0 of `input` and
/// entry 0 of `output` are the bias weights.
struct NetWeights {
  Matrix input;   // (p + 1) x k
  Vector output;  // k + 1

  Eigen::Index inputs() const { return input.rows() - 1; }
  Eigen::Index hidden() const { return input.cols(); }
  Eigen::Index size() const { return input.size() + output.size(); }

  Vector flatten() const;
  static NetWeights unflatten(const Vector& theta, Eigen::Index p, Eigen::Index k);
};

struct NetFit {
  NetWeights weights;
  /// Per-feature standardization learned at fit time.
  Eigen::RowVectorXd center;
  Eigen::RowVectorXd scale;
  double loss = 0.0;
  int iterations = 0;
  bool converged = false;
};

/// Cross-entropy summed over rows plus weight_decay * ||w||^2 (biases included).
double net_loss(const NetWeights& w, const Matrix& x, const Vector& y, double weight_decay);

/// Analytic gradient of net_loss by backpropagation.
NetWeights net_gradient(const NetWeights& w, const Matrix& x, const Vector& y, double weight_decay);

/// Output probabilities for already-standardized inputs.
Vector net_forward(const NetWeights& w, const Matrix& x);

/// Full-batch BFGS with Armijo backtracking; the loss never increases
/// between accepted iterates.
NetFit fit_net(const Dataset& ds, const NetConfig& cfg);
NetFit fit_net(const Matrix& x, const Labels& y, const NetConfig& cfg);

struct NetPrediction {
  Vector probability;
  Labels classes;
};

NetPrediction predict_net(const NetFit& fit, const Matrix& x, double threshold = 0.5);

/// Garson connection-weight shares over inputs; biases excluded, sums to 1.
Vector garson_importance(const NetWeights& w);
inline Vector garson_importance(const NetFit& fit) { return garson_importance(fit.weights); }

}  // namespace imbml
