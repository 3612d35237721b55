#include "imbml/neuralnet.hpp"

#include <cmath>

#include "imbml/error.hpp"
#include "imbml/rng.hpp"

namespace imbml {

namespace {

double sigmoid(double t) { return t >= 0 ? 1.0 / (1.0 + std::exp(-t)) : std::exp(t) / (1.0 + std::exp(t)); }
double softplus(double t) { return t > 0 ? t + std::log1p(std::exp(-t)) : std::log1p(std::exp(t)); }

struct Forward {
  Matrix hidden;      // n x k activations
  Vector activation;  // output pre-activation
};

Forward forward(const NetWeights& w, const Matrix& x) {
  Forward f;
  f.hidden = ((x * w.input.bottomRows(w.inputs())).rowwise() + w.input.row(0)).unaryExpr(&sigmoid);
  f.activation = (f.hidden * w.output.tail(w.hidden())).array() + w.output[0];
  return f;
}

// nnet-style stopping: absolute loss floor and relative decrease.
constexpr double kAbsTol = 1e-4;
constexpr double kRelTol = 1e-8;

}  // namespace

Vector NetWeights::flatten() const {
  Vector theta(size());
  theta << input.reshaped(), output;
  return theta;
}

NetWeights NetWeights::unflatten(const Vector& theta, Eigen::Index p, Eigen::Index k) {
  NetWeights w;
  w.input = theta.head((p + 1) * k).reshaped(p + 1, k);
  w.output = theta.tail(k + 1);
  return w;
}

double net_loss(const NetWeights& w, const Matrix& x, const Vector& y, double weight_decay) {
  const Forward f = forward(w, x);
  double loss = 0.0;
  for (Eigen::Index i = 0; i < y.size(); ++i) loss += softplus(f.activation[i]) - y[i] * f.activation[i];
  if (weight_decay > 0.0) loss += weight_decay * (w.input.squaredNorm() + w.output.squaredNorm());
  return loss;
}

NetWeights net_gradient(const NetWeights& w, const Matrix& x, const Vector& y, double weight_decay) {
  const Forward f = forward(w, x);
  const Vector delta_out = f.activation.unaryExpr(&sigmoid) - y;
  NetWeights g;
  g.output.resize(w.output.size());
  g.output[0] = delta_out.sum();
  g.output.tail(w.hidden()) = f.hidden.transpose() * delta_out;

  const Matrix delta_hidden = (delta_out * w.output.tail(w.hidden()).transpose()).cwiseProduct(
      f.hidden.cwiseProduct((1.0 - f.hidden.array()).matrix()));
  g.input.resize(w.input.rows(), w.input.cols());
  g.input.row(0) = delta_hidden.colwise().sum();
  g.input.bottomRows(w.inputs()) = x.transpose() * delta_hidden;

  if (weight_decay > 0.0) {
    g.input += 2.0 * weight_decay * w.input;
    g.output += 2.0 * weight_decay * w.output;
  }
  return g;
}

Vector net_forward(const NetWeights& w, const Matrix& x) { return forward(w, x).activation.unaryExpr(&sigmoid); }

NetFit fit_net(const Dataset& ds, const NetConfig& cfg) { return fit_net(ds.features(), ds.labels(), cfg); }

NetFit fit_net(const Matrix& x_raw, const Labels& labels, const NetConfig& cfg) {
  if (cfg.hidden_units < 1) throw Error(ErrorCode::InvalidConfig, "ann.hidden_units must be >= 1");
  if (cfg.max_iter < 1) throw Error(ErrorCode::InvalidConfig, "ann.max_iter must be >= 1");
  if (!(cfg.init_range > 0.0)) throw Error(ErrorCode::InvalidConfig, "ann.init_range must be positive");
  if (!(cfg.weight_decay >= 0.0)) throw Error(ErrorCode::InvalidConfig, "ann.weight_decay must be >= 0");
  if (labels.size() != x_raw.rows()) throw Error(ErrorCode::LengthMismatch, "feature rows and label count differ");
  const auto ones = labels.sum();
  if (ones == 0 || ones == labels.size()) throw Error(ErrorCode::DegenerateLabels, "neural network needs both classes");

  const Eigen::Index n = x_raw.rows();
  const Eigen::Index p = x_raw.cols();
  const Eigen::Index k = cfg.hidden_units;

  NetFit fit;
  fit.center = x_raw.colwise().mean();
  fit.scale = ((x_raw.rowwise() - fit.center).array().square().colwise().sum() / double(std::max<Eigen::Index>(n - 1, 1)))
                  .sqrt();
  fit.scale = (fit.scale.array() > 0.0).select(fit.scale, 1.0);
  const Matrix x = (x_raw.rowwise() - fit.center).array().rowwise() / fit.scale.array();
  const Vector y = labels.cast<double>();

  Rng rng(cfg.seed);
  Vector theta((p + 1) * k + k + 1);
  for (Eigen::Index i = 0; i < theta.size(); ++i) theta[i] = (2.0 * rng.uniform() - 1.0) * cfg.init_range;

  auto loss_at = [&](const Vector& t) { return net_loss(NetWeights::unflatten(t, p, k), x, y, cfg.weight_decay); };
  auto grad_at = [&](const Vector& t) {
    return net_gradient(NetWeights::unflatten(t, p, k), x, y, cfg.weight_decay).flatten();
  };

  double f = loss_at(theta);
  if (!std::isfinite(f)) throw Error(ErrorCode::NonFiniteLoss, "initial loss is not finite");
  Vector g = grad_at(theta);
  const Eigen::Index dim = theta.size();
  Matrix inv_hessian = Matrix::Identity(dim, dim);
  bool first_update = true;

  for (int iter = 1; iter <= cfg.max_iter; ++iter) {
    fit.iterations = iter;
    Vector direction = -(inv_hessian * g);
    double slope = g.dot(direction);
    if (!(slope < 0.0)) {
      inv_hessian.setIdentity();
      direction = -g;
      slope = -g.squaredNorm();
      first_update = true;
    }
    if (slope == 0.0) {
      fit.converged = true;
      break;
    }

    double step = 1.0;
    Vector next = theta + direction;
    double f_next = loss_at(next);
    int backtracks = 0;
    while (!(f_next <= f + 1e-4 * step * slope) && backtracks < 60) {
      step *= 0.2;
      ++backtracks;
      next = theta + step * direction;
      f_next = loss_at(next);
    }
    if (!std::isfinite(f_next)) throw Error(ErrorCode::NonFiniteLoss, "loss became non-finite during training");
    if (!(f_next <= f)) {
      if (first_update) {
        fit.converged = true;
        break;
      }
      // Stale curvature: restart from steepest descent.
      inv_hessian.setIdentity();
      first_update = true;
      continue;
    }

    const Vector g_next = grad_at(next);
    const Vector s = next - theta;
    const Vector dy = g_next - g;
    const double sy = s.dot(dy);
    const double f_prev = f;
    theta = next;
    f = f_next;
    g = g_next;

    if (f < kAbsTol || f_prev - f <= kRelTol * (std::abs(f) + kRelTol)) {
      fit.converged = true;
      break;
    }
    if (sy > 1e-12) {
      if (first_update) {
        inv_hessian *= sy / dy.squaredNorm();
        first_update = false;
      }
      const double rho = 1.0 / sy;
      const Vector hy = inv_hessian * dy;
      // Inverse BFGS update written as two rank-one corrections.
      inv_hessian += ((1.0 + rho * dy.dot(hy)) * rho) * (s * s.transpose()) -
                     rho * (hy * s.transpose() + s * hy.transpose());
    }
  }

  fit.weights = NetWeights::unflatten(theta, p, k);
  fit.loss = f;
  return fit;
}

NetPrediction predict_net(const NetFit& fit, const Matrix& x, double threshold) {
  if (x.cols() != fit.weights.inputs())
    throw Error(ErrorCode::ColumnMismatch, "network expects " + std::to_string(fit.weights.inputs()) + " columns");
  const Matrix standardized = (x.rowwise() - fit.center).array().rowwise() / fit.scale.array();
  NetPrediction out;
  out.probability = net_forward(fit.weights, standardized);
  out.classes = (out.probability.array() >= threshold).cast<int>();
  return out;
}

Vector garson_importance(const NetWeights& w) {
  const Eigen::Index p = w.inputs();
  const Eigen::Index k = w.hidden();
  const Matrix contrib = w.input.bottomRows(p).cwiseAbs() * w.output.tail(k).cwiseAbs().asDiagonal();
  Vector share = Vector::Zero(p);
  for (Eigen::Index h = 0; h < k; ++h) {
    const double total = contrib.col(h).sum();
    if (total > 0.0) share += contrib.col(h) / total;
  }
  const double sum = share.sum();
  if (!(sum > 0.0)) throw Error(ErrorCode::AllZeroWeights, "Garson shares undefined for an all-zero network");
  return share / sum;
}

}  // namespace imbml
