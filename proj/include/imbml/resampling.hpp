#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "imbml/data.hpp"

namespace imbml {

struct SmoteMethod {
  int k = 5;
  /// Measure neighbour distances on per-feature standardized minority codes.
  bool standardize = false;
  bool operator==(const SmoteMethod&) const = default;
};

struct RwoMethod {
  bool operator==(const RwoMethod&) const = default;
};

struct SilvermanBandwidth {
  bool operator==(const SilvermanBandwidth&) const = default;
};
struct FixedBandwidth {
  double h = 1.0;
  bool operator==(const FixedBandwidth&) const = default;
};
using Bandwidth = std::variant<SilvermanBandwidth, FixedBandwidth>;

struct PdfosMethod {
  Bandwidth bandwidth = SilvermanBandwidth{};
  /// Retry a failed Cholesky once with a trace-scaled diagonal ridge.
  bool ridge = true;
  bool operator==(const PdfosMethod&) const = default;
};

/// Open set of oversamplers; new methods are new alternatives.
using ResampleMethod = std::variant<SmoteMethod, RwoMethod, PdfosMethod>;

std::string method_name(const ResampleMethod& method);
ResampleMethod parse_method(const std::string& name);

struct ResampleOptions {
  /// Snap synthetic values of binary/ordinal features to the nearest level.
  bool snap_to_levels = false;
};

/// Rows of synthetic minority samples, one per output row.
Matrix smote(const Dataset& ds, Eigen::Index n_new, int k, std::uint64_t seed, bool standardize = false);
Matrix rwo(const Dataset& ds, Eigen::Index n_new, std::uint64_t seed);
Matrix pdfos(const Dataset& ds, Eigen::Index n_new, const Bandwidth& bandwidth, std::uint64_t seed,
             bool ridge = true);

/// Multivariate Silverman rule (4 / ((p + 2) m))^(1 / (p + 4)).
double silverman_bandwidth(Eigen::Index m, Eigen::Index p);

/// Minority-class rows (in original order) and their unbiased covariance.
Matrix minority_rows(const Dataset& ds);
Matrix sample_covariance(const Matrix& rows);

Matrix oversample(const Dataset& ds, const ResampleMethod& method, Eigen::Index n_new, std::uint64_t seed);

void snap_to_levels(Matrix& rows, const std::vector<FeatureSpec>& specs);

struct BalancedDataset {
  Dataset dataset;
  std::vector<bool> synthetic_mask;
  ResampleMethod method;
  std::uint64_t seed = 0;

  Eigen::Index synthetic_count() const;
};

/// Appends (majority - minority) synthetic minority rows after the original rows.
BalancedDataset balance_to_parity(const Dataset& ds, const ResampleMethod& method, std::uint64_t seed,
                                  const ResampleOptions& options = {});

}  // namespace imbml
