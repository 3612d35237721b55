#include "imbml/logistic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>

#include "imbml/error.hpp"
#include "imbml/importance.hpp"

namespace imbml {

namespace {

constexpr double kSaturation = 30.0;

double softplus(double t) { return t > 0 ? t + std::log1p(std::exp(-t)) : std::log1p(std::exp(t)); }

double inv_logit(double t) { return t >= 0 ? 1.0 / (1.0 + std::exp(-t)) : std::exp(t) / (1.0 + std::exp(t)); }

void require_both_classes(const Vector& y) {
  const double ones = y.sum();
  if (ones <= 0.0 || ones >= static_cast<double>(y.size()))
    throw Error(ErrorCode::DegenerateLabels, "logistic regression needs both classes");
}

Matrix with_intercept(const Matrix& x) {
  Matrix design(x.rows(), x.cols() + 1);
  design << Vector::Ones(x.rows()), x;
  return design;
}

}  // namespace

double logistic_log_likelihood(const Vector& eta, const Vector& y) {
  double ll = 0.0;
  for (Eigen::Index i = 0; i < eta.size(); ++i) ll += y[i] * eta[i] - softplus(eta[i]);
  return ll;
}

LogisticFit fit_irls(const Matrix& x, const Vector& y, const IrlsOptions& options) {
  if (x.rows() != y.size()) throw Error(ErrorCode::LengthMismatch, "design rows and label count differ");
  require_both_classes(y);
  if (x.rows() <= x.cols() + 1)
    throw Error(ErrorCode::TooSmall, "logistic regression needs n > q + 1 observations");

  const Matrix design = with_intercept(x);
  const Eigen::Index q = design.cols();
  Vector beta = Vector::Zero(q);
  Vector eta = Vector::Zero(design.rows());
  double ll = logistic_log_likelihood(eta, y);

  LogisticFit fit;
  for (int iter = 1; iter <= options.max_iter; ++iter) {
    fit.iterations = iter;
    const Vector mu = eta.unaryExpr(&inv_logit);
    const Vector w = mu.array() * (1.0 - mu.array());
    const Vector grad = design.transpose() * (y - mu);
    const Matrix hessian = design.transpose() * w.asDiagonal() * design;
    Vector step = hessian.ldlt().solve(grad);
    if (!step.allFinite()) {
      Matrix ridged = hessian;
      ridged.diagonal().array() += 1e-10 * std::max(1.0, hessian.diagonal().maxCoeff());
      step = ridged.ldlt().solve(grad);
      if (!step.allFinite()) break;
    }

    // Step-halving keeps the log-likelihood nondecreasing.
    double t = 1.0;
    Vector candidate = beta + step;
    Vector candidate_eta = design * candidate;
    double candidate_ll = logistic_log_likelihood(candidate_eta, y);
    int halvings = 0;
    while (!(candidate_ll >= ll) && halvings < 40) {
      t *= 0.5;
      ++halvings;
      candidate = beta + t * step;
      candidate_eta = design * candidate;
      candidate_ll = logistic_log_likelihood(candidate_eta, y);
    }
    if (!(candidate_ll >= ll)) {
      // No ascent possible along the Newton direction: at the optimum up to rounding.
      fit.converged = (t * step).cwiseAbs().maxCoeff() <= 1e-6;
      break;
    }
    const Vector change = t * step;
    beta = std::move(candidate);
    eta = std::move(candidate_eta);
    ll = candidate_ll;
    const Vector scale = beta.cwiseAbs().cwiseMax(1.0);
    if ((change.cwiseAbs().array() <= options.tol * scale.array()).all()) {
      fit.converged = true;
      break;
    }
  }

  const double max_eta = eta.cwiseAbs().maxCoeff();
  if (max_eta > kSaturation && !fit.converged) fit.separation = true;

  const Vector mu = eta.unaryExpr(&inv_logit);
  const Vector w = mu.array() * (1.0 - mu.array());
  const Matrix info = design.transpose() * w.asDiagonal() * design;
  Eigen::LDLT<Matrix> ldlt(info);
  Vector se = Vector::Constant(q, std::numeric_limits<double>::infinity());
  if (ldlt.info() == Eigen::Success) {
    const Matrix cov = ldlt.solve(Matrix::Identity(q, q));
    for (Eigen::Index j = 0; j < q; ++j)
      if (std::isfinite(cov(j, j)) && cov(j, j) > 0.0) se[j] = std::sqrt(cov(j, j));
  }

  fit.selected.resize(static_cast<std::size_t>(x.cols()));
  std::iota(fit.selected.begin(), fit.selected.end(), std::size_t{0});
  fit.intercept = beta[0];
  fit.coefficients = beta.tail(q - 1);
  fit.standard_errors = se.tail(q - 1);
  fit.log_likelihood = ll;
  fit.aic = 2.0 * static_cast<double>(q) - 2.0 * ll;
  return fit;
}

LogisticFit forward_select_aic(const Matrix& x, const Vector& y, const IrlsOptions& options) {
  if (x.cols() < 1) throw Error(ErrorCode::InvalidConfig, "forward selection needs at least one candidate");
  LogisticFit current = fit_irls(Matrix(x.rows(), 0), y, options);
  current.selected.clear();
  std::vector<bool> used(static_cast<std::size_t>(x.cols()), false);

  while (current.selected.size() < static_cast<std::size_t>(x.cols()) &&
         static_cast<Eigen::Index>(current.selected.size()) + 3 < x.rows()) {
    std::optional<LogisticFit> best;
    std::size_t best_column = 0;
    std::vector<std::size_t> columns = current.selected;
    columns.push_back(0);
    for (std::size_t j = 0; j < used.size(); ++j) {
      if (used[j]) continue;
      columns.back() = j;
      std::vector<Eigen::Index> idx(columns.begin(), columns.end());
      LogisticFit candidate = fit_irls(x(Eigen::all, idx), y, options);
      // Ties within 1e-9 keep the lower column index.
      if (!best || candidate.aic < best->aic - 1e-9) {
        best = std::move(candidate);
        best_column = j;
      }
    }
    if (!best || !(best->aic < current.aic)) break;
    used[best_column] = true;
    best->selected = current.selected;
    best->selected.push_back(best_column);
    current = std::move(*best);
  }
  return current;
}

LogisticFit forward_select_aic(const Dataset& ds, const IrlsOptions& options) {
  return forward_select_aic(ds.features(), ds.labels_real(), options);
}

Vector predict_proba(const LogisticFit& fit, const Matrix& x) {
  for (auto j : fit.selected)
    if (static_cast<Eigen::Index>(j) >= x.cols())
      throw Error(ErrorCode::ColumnMismatch, "predictor matrix lacks column " + std::to_string(j));
  Vector eta = Vector::Constant(x.rows(), fit.intercept);
  for (std::size_t s = 0; s < fit.selected.size(); ++s)
    eta += fit.coefficients[static_cast<Eigen::Index>(s)] * x.col(static_cast<Eigen::Index>(fit.selected[s]));
  return eta.unaryExpr(&inv_logit);
}

Vector wald_rank(const LogisticFit& fit, std::size_t p_total) {
  const auto k = fit.selected.size();
  Vector ranks = Vector::Constant(static_cast<Eigen::Index>(p_total),
                                  (static_cast<double>(k) + static_cast<double>(p_total) + 1.0) / 2.0);
  if (k == 0) return ranks;
  Vector abs_z(static_cast<Eigen::Index>(k));
  for (std::size_t s = 0; s < k; ++s) {
    const double z = fit.coefficients[static_cast<Eigen::Index>(s)] / fit.standard_errors[static_cast<Eigen::Index>(s)];
    abs_z[static_cast<Eigen::Index>(s)] = std::isfinite(z) ? std::abs(z) : 0.0;
  }
  const Vector within = scores_to_ranks(abs_z, true);
  for (std::size_t s = 0; s < k; ++s) ranks[static_cast<Eigen::Index>(fit.selected[s])] = within[static_cast<Eigen::Index>(s)];
  return ranks;
}

}  // namespace imbml
