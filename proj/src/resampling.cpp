#include "imbml/resampling.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "imbml/error.hpp"
#include "imbml/rng.hpp"

namespace imbml {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

}  // namespace

std::string method_name(const ResampleMethod& method) {
  return std::visit(overloaded{[](const SmoteMethod&) { return std::string("smote"); },
                               [](const RwoMethod&) { return std::string("rwo"); },
                               [](const PdfosMethod&) { return std::string("pdfos"); }},
                    method);
}

ResampleMethod parse_method(const std::string& name) {
  if (name == "smote") return SmoteMethod{};
  if (name == "rwo") return RwoMethod{};
  if (name == "pdfos") return PdfosMethod{};
  throw Error(ErrorCode::InvalidConfig, "unknown resampling method '" + name + "' (expected smote|rwo|pdfos)");
}

Matrix minority_rows(const Dataset& ds) {
  const int label = ds.minority_label();
  IndexList idx;
  for (Eigen::Index i = 0; i < ds.rows(); ++i)
    if (ds.labels()[i] == label) idx.push_back(i);
  return ds.features()(idx, Eigen::all);
}

Matrix sample_covariance(const Matrix& rows) {
  const Eigen::RowVectorXd mean = rows.colwise().mean();
  const Matrix centered = rows.rowwise() - mean;
  return (centered.transpose() * centered) / static_cast<double>(rows.rows() - 1);
}

double silverman_bandwidth(Eigen::Index m, Eigen::Index p) {
  const double pd = static_cast<double>(p);
  return std::pow(4.0 / ((pd + 2.0) * static_cast<double>(m)), 1.0 / (pd + 4.0));
}

Matrix smote(const Dataset& ds, Eigen::Index n_new, int k, std::uint64_t seed, bool standardize) {
  if (k < 1) throw Error(ErrorCode::InvalidConfig, "SMOTE k must be positive");
  const Matrix minority = minority_rows(ds);
  const Eigen::Index m = minority.rows();
  if (m <= k)
    throw Error(ErrorCode::TooFewMinority,
                "SMOTE needs more than k=" + std::to_string(k) + " minority rows, got " + std::to_string(m));
  if (n_new <= 0) return Matrix(0, ds.cols());

  Matrix metric_space = minority;
  if (standardize) {
    const Eigen::RowVectorXd mean = minority.colwise().mean();
    Eigen::RowVectorXd sd = ((minority.rowwise() - mean).array().square().colwise().sum() / double(m - 1)).sqrt();
    sd = (sd.array() > 0.0).select(sd, 1.0);
    metric_space = (minority.rowwise() - mean).array().rowwise() / sd.array();
  }

  // k nearest minority neighbours of every minority row; ties by lower index.
  std::vector<std::vector<Eigen::Index>> neighbours(static_cast<std::size_t>(m));
  std::vector<std::pair<double, Eigen::Index>> dist(static_cast<std::size_t>(m - 1));
  for (Eigen::Index i = 0; i < m; ++i) {
    std::size_t c = 0;
    for (Eigen::Index j = 0; j < m; ++j)
      if (j != i) dist[c++] = {(metric_space.row(i) - metric_space.row(j)).squaredNorm(), j};
    std::partial_sort(dist.begin(), dist.begin() + k, dist.end());
    auto& nn = neighbours[static_cast<std::size_t>(i)];
    for (int t = 0; t < k; ++t) nn.push_back(dist[static_cast<std::size_t>(t)].second);
  }

  Rng rng(seed);
  Matrix out(n_new, ds.cols());
  for (Eigen::Index r = 0; r < n_new; ++r) {
    const auto i = static_cast<Eigen::Index>(rng.below(static_cast<std::uint64_t>(m)));
    const Eigen::Index nn = neighbours[static_cast<std::size_t>(i)][rng.below(static_cast<std::uint64_t>(k))];
    const double u = rng.uniform();
    out.row(r) = minority.row(i) + u * (minority.row(nn) - minority.row(i));
  }
  return out;
}

Matrix rwo(const Dataset& ds, Eigen::Index n_new, std::uint64_t seed) {
  const Matrix minority = minority_rows(ds);
  const Eigen::Index m = minority.rows();
  if (m < 2) throw Error(ErrorCode::TooFewMinority, "RWO needs at least 2 minority rows");
  if (n_new <= 0) return Matrix(0, ds.cols());

  const Eigen::RowVectorXd mean = minority.colwise().mean();
  const Eigen::RowVectorXd sd =
      ((minority.rowwise() - mean).array().square().colwise().sum() / static_cast<double>(m - 1)).sqrt();
  const Eigen::RowVectorXd step = sd / std::sqrt(static_cast<double>(m));

  Rng rng(seed);
  Matrix out(n_new, ds.cols());
  for (Eigen::Index r = 0; r < n_new; ++r) {
    const auto i = static_cast<Eigen::Index>(rng.below(static_cast<std::uint64_t>(m)));
    for (Eigen::Index j = 0; j < ds.cols(); ++j) out(r, j) = minority(i, j) - rng.normal() * step[j];
  }
  return out;
}

Matrix pdfos(const Dataset& ds, Eigen::Index n_new, const Bandwidth& bandwidth, std::uint64_t seed, bool ridge) {
  const Matrix minority = minority_rows(ds);
  const Eigen::Index m = minority.rows();
  const Eigen::Index p = ds.cols();
  if (m <= p)
    throw Error(ErrorCode::TooFewMinority,
                "PDFOS needs more minority rows (" + std::to_string(m) + ") than features (" + std::to_string(p) + ")");
  const double h = std::visit(overloaded{[&](const SilvermanBandwidth&) { return silverman_bandwidth(m, p); },
                                         [](const FixedBandwidth& f) { return f.h; }},
                              bandwidth);
  if (!(h > 0.0)) throw Error(ErrorCode::InvalidConfig, "PDFOS bandwidth must be positive");

  Matrix cov = sample_covariance(minority);
  Eigen::LLT<Matrix> llt(cov);
  if (llt.info() != Eigen::Success && ridge) {
    const double scale = cov.trace() / static_cast<double>(p);
    cov.diagonal().array() += 1e-8 * (scale > 0.0 ? scale : 1.0);
    llt.compute(cov);
  }
  if (llt.info() != Eigen::Success)
    throw Error(ErrorCode::SingularCovariance, "minority covariance is not positive definite");
  if (n_new <= 0) return Matrix(0, p);
  const Matrix lower = llt.matrixL();

  Rng rng(seed);
  Matrix out(n_new, p);
  Vector z(p);
  for (Eigen::Index r = 0; r < n_new; ++r) {
    const auto i = static_cast<Eigen::Index>(rng.below(static_cast<std::uint64_t>(m)));
    for (Eigen::Index j = 0; j < p; ++j) z[j] = rng.normal();
    out.row(r) = minority.row(i) + h * (lower * z).transpose();
  }
  return out;
}

Matrix oversample(const Dataset& ds, const ResampleMethod& method, Eigen::Index n_new, std::uint64_t seed) {
  return std::visit(
      overloaded{[&](const SmoteMethod& s) { return smote(ds, n_new, s.k, seed, s.standardize); },
                 [&](const RwoMethod&) { return rwo(ds, n_new, seed); },
                 [&](const PdfosMethod& pm) { return pdfos(ds, n_new, pm.bandwidth, seed, pm.ridge); }},
      method);
}

void snap_to_levels(Matrix& rows, const std::vector<FeatureSpec>& specs) {
  for (Eigen::Index j = 0; j < rows.cols(); ++j) {
    const auto& levels = specs[static_cast<std::size_t>(j)].levels;
    if (levels.empty()) continue;
    for (Eigen::Index i = 0; i < rows.rows(); ++i) {
      const double v = rows(i, j);
      auto it = std::lower_bound(levels.begin(), levels.end(), v);
      if (it == levels.end()) {
        rows(i, j) = levels.back();
      } else if (it != levels.begin() && v - *(it - 1) <= *it - v) {
        rows(i, j) = *(it - 1);
      } else {
        rows(i, j) = *it;
      }
    }
  }
}

Eigen::Index BalancedDataset::synthetic_count() const {
  return std::count(synthetic_mask.begin(), synthetic_mask.end(), true);
}

BalancedDataset balance_to_parity(const Dataset& ds, const ResampleMethod& method, std::uint64_t seed,
                                  const ResampleOptions& options) {
  if (!ds.has_both_classes()) throw Error(ErrorCode::DegenerateLabels, "balancing needs both classes");
  const Eigen::Index n0 = ds.count(0);
  const Eigen::Index n1 = ds.count(1);
  const std::vector<bool> none(static_cast<std::size_t>(ds.rows()), false);
  if (n0 == n1) return {ds, none, method, seed};

  const int minority = n1 < n0 ? 1 : 0;
  const Eigen::Index n_new = std::abs(n0 - n1);
  Matrix synthetic = oversample(ds, method, n_new, seed);
  if (options.snap_to_levels) snap_to_levels(synthetic, ds.specs());

  Matrix x(ds.rows() + n_new, ds.cols());
  x << ds.features(), synthetic;
  Labels y(ds.rows() + n_new);
  y << ds.labels(), Labels::Constant(n_new, minority);
  std::vector<bool> mask = none;
  mask.resize(static_cast<std::size_t>(ds.rows() + n_new), true);
  return {Dataset(std::move(x), std::move(y), ds.specs(), ds.name()), std::move(mask), method, seed};
}

}  // namespace imbml
