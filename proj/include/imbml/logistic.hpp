#pragma once

#include <cstddef>
#include <vector>

#include "imbml/data.hpp"

namespace imbml {

struct IrlsOptions {
  int max_iter = 50;
  /// Stop when max_j |step_j| <= tol * max(1, |beta_j|).
  double tol = 1e-8;
};

struct LogisticFit {
  /// Column indices into the full predictor matrix, in entry order.
  std::vector<std::size_t> selected;
  double intercept = 0.0;
  Vector coefficients;
  Vector standard_errors;
  double log_likelihood = 0.0;
  double aic = 0.0;
  bool converged = false;
  /// Non-convergence with saturated linear predictors (|eta| > 30).
  bool separation = false;
  int iterations = 0;

  Vector z_scores() const { return coefficients.cwiseQuotient(standard_errors); }
};

/// Bernoulli log-likelihood of labels y under linear predictor eta.
double logistic_log_likelihood(const Vector& eta, const Vector& y);

/// Newton/IRLS with step-halving on every column of x plus an intercept.
LogisticFit fit_irls(const Matrix& x, const Vector& y, const IrlsOptions& options = {});

/// Greedy forward selection from the intercept-only model; each step adds the
/// candidate with the lowest AIC and stops when no addition lowers it.
LogisticFit forward_select_aic(const Matrix& x, const Vector& y, const IrlsOptions& options = {});
LogisticFit forward_select_aic(const Dataset& ds, const IrlsOptions& options = {});

/// Inverse-logit of intercept + x[:, selected] * coefficients.
Vector predict_proba(const LogisticFit& fit, const Matrix& x);

/// Rank 1..|selected| by descending Wald |z|; unselected predictors share the
/// mid-rank (|selected| + p_total + 1) / 2.
Vector wald_rank(const LogisticFit& fit, std::size_t p_total);

}  // namespace imbml
