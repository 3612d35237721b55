#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace imbml {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Labels = Eigen::VectorXi;
using IndexList = std::vector<Eigen::Index>;

enum class FeatureKind { binary, ordinal, count, continuous };
enum class Pooling { none, max, sum };
enum class Construct { control, H1, H2, H3, H4, H5 };

std::string_view to_string(FeatureKind kind);
std::string_view to_string(Pooling pooling);
std::string_view to_string(Construct construct);
FeatureKind parse_feature_kind(std::string_view text);
Pooling parse_pooling(std::string_view text);
Construct parse_construct(std::string_view text);

struct FeatureSpec {
  std::string name;
  FeatureKind kind = FeatureKind::continuous;
  /// Permitted codes, strictly increasing. Required for binary ({0,1}) and ordinal.
  std::vector<double> levels;
  Pooling pooling = Pooling::none;
  Construct construct = Construct::control;

  bool is_discrete_coded() const {
    return kind == FeatureKind::binary || kind == FeatureKind::ordinal;
  }
  bool operator==(const FeatureSpec&) const = default;
};

/// Throws InvalidSchema when the kind/levels invariants do not hold.
void validate(const FeatureSpec& spec);

struct Schema {
  std::vector<FeatureSpec> features;
  std::string label_column = "label";

  bool operator==(const Schema&) const = default;
};

Schema read_schema(const std::string& path);
void write_schema(const Schema& schema, const std::string& path);
std::string schema_to_json(const Schema& schema);
Schema schema_from_json(std::string_view text);

/// Immutable feature matrix plus binary labels. The constructor checks
/// finiteness, label values and shape; level membership is checked
/// separately because oversampled rows may legitimately leave the level set.
class Dataset {
 public:
  Dataset() = default;
  Dataset(Matrix features, Labels labels, std::vector<FeatureSpec> specs, std::string name = {});

  Eigen::Index rows() const { return features_.rows(); }
  Eigen::Index cols() const { return features_.cols(); }
  const Matrix& features() const { return features_; }
  const Labels& labels() const { return labels_; }
  Vector labels_real() const { return labels_.cast<double>(); }
  const std::vector<FeatureSpec>& specs() const { return specs_; }
  const std::string& name() const { return name_; }

  Eigen::Index count(int label) const { return (labels_.array() == label).count(); }
  bool has_both_classes() const { return count(0) > 0 && count(1) > 0; }
  /// Label of the smaller class; ties resolve to 1.
  int minority_label() const { return count(1) <= count(0) ? 1 : 0; }

  Dataset subset(std::span<const Eigen::Index> indices) const;
  std::vector<std::string> feature_names() const;

  /// Throws BadLevel naming the first offending row and column.
  void check_levels() const;

 private:
  Matrix features_;
  Labels labels_;
  std::vector<FeatureSpec> specs_;
  std::string name_;
};

/// Reads a header-first CSV and validates it against the schema.
Dataset load_dataset(const std::string& csv_path, const std::string& schema_path);
Dataset load_dataset(const std::string& csv_path, const Schema& schema);
Dataset parse_dataset_csv(std::string_view text, const Schema& schema, std::string name = {});

/// Writes features followed by the label column, and optionally extra
/// 0/1 columns (e.g. a synthetic-row mask). Values use shortest round-trip form.
std::string dataset_to_csv(const Dataset& ds, std::string_view label_column,
                           const std::vector<std::pair<std::string, std::vector<bool>>>& extra = {});
void save_dataset(const Dataset& ds, const std::string& path, std::string_view label_column,
                  const std::vector<std::pair<std::string, std::vector<bool>>>& extra = {});

// ---- trip-wise pooling ---------------------------------------------------

struct TripRecordSet {
  std::string respondent_id;
  /// One map per trip (at most four), field name to coded answer.
  std::vector<std::map<std::string, double>> trips;
};

std::map<std::string, double> pool_trip_fields(const TripRecordSet& records,
                                               const std::map<std::string, Pooling>& rule_per_field);

// ---- synthetic survey generator -----------------------------------------

struct SyntheticConfig {
  std::size_t n = 318;
  std::size_t p = 26;
  double target_minority_fraction = 91.0 / 318.0;
  /// Zero-based feature indices carrying the planted signal.
  std::vector<std::size_t> signal_features;
  double signal_strength = 0.0;
  std::uint64_t seed = 1;

  bool operator==(const SyntheticConfig&) const = default;
};

void validate(const SyntheticConfig& cfg);

/// The 26-predictor survey layout, truncated or cyclically extended to p.
std::vector<FeatureSpec> survey_schema(std::size_t p);

/// Planted features of the canonical benchmark: one H1, one H3, one H5 predictor.
std::vector<std::size_t> benchmark_signal_features();

/// Intercept such that the pilot-sample mean of sigmoid(alpha + s * S)
/// matches the target fraction. Exposed for testing.
double calibrate_intercept(const SyntheticConfig& cfg, const std::vector<FeatureSpec>& specs);

Dataset generate_synthetic(const SyntheticConfig& cfg);
Dataset generate_synthetic(const SyntheticConfig& cfg, const std::vector<FeatureSpec>& specs);

/// Analytic mean and standard deviation of a feature under the generator.
std::pair<double, double> generator_moments(const FeatureSpec& spec);

// ---- describe -------------------------------------------------------------

struct FeatureSummary {
  std::string name;
  FeatureKind kind = FeatureKind::continuous;
  std::map<double, std::size_t> frequencies;  // discrete kinds
  std::array<double, 5> five_number{};        // continuous: min, q1, median, q3, max
};

struct Description {
  std::size_t n0 = 0;
  std::size_t n1 = 0;
  std::vector<FeatureSummary> features;
};

Description describe(const Dataset& ds);
std::string to_text(const Description& description);

}  // namespace imbml
