#include "imbml/data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>
#include <sstream>

#include "json.hpp"

#include "imbml/error.hpp"
#include "imbml/rng.hpp"
#include "imbml/text.hpp"

namespace imbml {

namespace {

using nlohmann::json;

double parse_number(std::string_view cell, bool& ok) {
  while (!cell.empty() && (cell.front() == ' ' || cell.front() == '\t')) cell.remove_prefix(1);
  while (!cell.empty() && (cell.back() == ' ' || cell.back() == '\t')) cell.remove_suffix(1);
  if (!cell.empty() && cell.front() == '+') cell.remove_prefix(1);
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
  ok = !cell.empty() && ec == std::errc{} && ptr == cell.data() + cell.size() && std::isfinite(value);
  return value;
}

bool in_levels(const std::vector<double>& levels, double value) {
  return std::binary_search(levels.begin(), levels.end(), value);
}

}  // namespace

// ---- enums -----------------------------------------------------------------

std::string_view to_string(FeatureKind kind) {
  switch (kind) {
    case FeatureKind::binary: return "binary";
    case FeatureKind::ordinal: return "ordinal";
    case FeatureKind::count: return "count";
    case FeatureKind::continuous: return "continuous";
  }
  return "continuous";
}

std::string_view to_string(Pooling pooling) {
  switch (pooling) {
    case Pooling::none: return "none";
    case Pooling::max: return "max";
    case Pooling::sum: return "sum";
  }
  return "none";
}

std::string_view to_string(Construct construct) {
  switch (construct) {
    case Construct::control: return "control";
    case Construct::H1: return "H1";
    case Construct::H2: return "H2";
    case Construct::H3: return "H3";
    case Construct::H4: return "H4";
    case Construct::H5: return "H5";
  }
  return "control";
}

FeatureKind parse_feature_kind(std::string_view text) {
  for (auto kind : {FeatureKind::binary, FeatureKind::ordinal, FeatureKind::count, FeatureKind::continuous})
    if (to_string(kind) == text) return kind;
  throw Error(ErrorCode::InvalidSchema, "unknown feature kind '" + std::string(text) + "'");
}

Pooling parse_pooling(std::string_view text) {
  for (auto pooling : {Pooling::none, Pooling::max, Pooling::sum})
    if (to_string(pooling) == text) return pooling;
  throw Error(ErrorCode::InvalidSchema, "unknown pooling rule '" + std::string(text) + "'");
}

Construct parse_construct(std::string_view text) {
  for (auto c : {Construct::control, Construct::H1, Construct::H2, Construct::H3, Construct::H4, Construct::H5})
    if (to_string(c) == text) return c;
  throw Error(ErrorCode::InvalidSchema, "unknown construct '" + std::string(text) + "'");
}

void validate(const FeatureSpec& spec) {
  if (spec.name.empty()) throw Error(ErrorCode::InvalidSchema, "feature with empty name");
  const auto& lv = spec.levels;
  switch (spec.kind) {
    case FeatureKind::binary:
      if (lv != std::vector<double>{0.0, 1.0})
        throw Error(ErrorCode::InvalidSchema, "binary feature '" + spec.name + "' must have levels [0, 1]");
      break;
    case FeatureKind::ordinal:
      if (lv.size() < 2 || std::adjacent_find(lv.begin(), lv.end(), std::greater_equal<>()) != lv.end())
        throw Error(ErrorCode::InvalidSchema,
                    "ordinal feature '" + spec.name + "' needs >= 2 strictly increasing levels");
      break;
    case FeatureKind::count:
    case FeatureKind::continuous:
      if (!lv.empty()) throw Error(ErrorCode::InvalidSchema, "feature '" + spec.name + "' must not declare levels");
      break;
  }
}

// ---- schema ------------------------------------------------------------------

std::string schema_to_json(const Schema& schema) {
  json features = json::array();
  for (const auto& f : schema.features) {
    features.push_back({{"name", f.name},
                        {"kind", std::string(to_string(f.kind))},
                        {"levels", f.levels},
                        {"pooling", std::string(to_string(f.pooling))},
                        {"construct", std::string(to_string(f.construct))}});
  }
  json doc = {{"label_column", schema.label_column}, {"features", features}};
  return doc.dump(2) + "\n";
}

Schema schema_from_json(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidSchema, std::string("schema is not valid JSON: ") + e.what());
  }
  Schema schema;
  try {
    schema.label_column = doc.at("label_column").get<std::string>();
    for (const auto& f : doc.at("features")) {
      FeatureSpec spec;
      spec.name = f.at("name").get<std::string>();
      spec.kind = parse_feature_kind(f.at("kind").get<std::string>());
      if (f.contains("levels") && !f.at("levels").is_null()) spec.levels = f.at("levels").get<std::vector<double>>();
      spec.pooling = parse_pooling(f.value("pooling", std::string("none")));
      spec.construct = parse_construct(f.value("construct", std::string("control")));
      validate(spec);
      schema.features.push_back(std::move(spec));
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidSchema, std::string("schema field error: ") + e.what());
  }
  if (schema.features.empty()) throw Error(ErrorCode::InvalidSchema, "schema lists no features");
  if (schema.label_column.empty()) throw Error(ErrorCode::InvalidSchema, "empty label_column");
  return schema;
}

Schema read_schema(const std::string& path) { return schema_from_json(read_file(path)); }

void write_schema(const Schema& schema, const std::string& path) { write_file(path, schema_to_json(schema)); }

// ---- Dataset -------------------------------------------------------------------

Dataset::Dataset(Matrix features, Labels labels, std::vector<FeatureSpec> specs, std::string name)
    : features_(std::move(features)), labels_(std::move(labels)), specs_(std::move(specs)), name_(std::move(name)) {
  if (features_.rows() != labels_.size())
    throw Error(ErrorCode::LengthMismatch, "feature rows and label count differ");
  if (static_cast<std::size_t>(features_.cols()) != specs_.size())
    throw Error(ErrorCode::InvalidSchema, "feature columns and spec count differ");
  if (!features_.allFinite()) throw Error(ErrorCode::NonNumeric, "dataset contains non-finite values");
  for (Eigen::Index i = 0; i < labels_.size(); ++i)
    if (labels_[i] != 0 && labels_[i] != 1)
      throw Error(ErrorCode::NonBinary, "label at row " + std::to_string(i + 1) + " is not 0/1");
}

Dataset Dataset::subset(std::span<const Eigen::Index> indices) const {
  Matrix x(static_cast<Eigen::Index>(indices.size()), cols());
  Labels y(static_cast<Eigen::Index>(indices.size()));
  for (std::size_t r = 0; r < indices.size(); ++r) {
    x.row(static_cast<Eigen::Index>(r)) = features_.row(indices[r]);
    y[static_cast<Eigen::Index>(r)] = labels_[indices[r]];
  }
  return Dataset(std::move(x), std::move(y), specs_, name_);
}

std::vector<std::string> Dataset::feature_names() const {
  std::vector<std::string> names;
  names.reserve(specs_.size());
  for (const auto& s : specs_) names.push_back(s.name);
  return names;
}

void Dataset::check_levels() const {
  for (Eigen::Index j = 0; j < cols(); ++j) {
    const auto& spec = specs_[static_cast<std::size_t>(j)];
    if (!spec.is_discrete_coded()) continue;
    for (Eigen::Index i = 0; i < rows(); ++i) {
      if (!in_levels(spec.levels, features_(i, j)))
        throw Error(ErrorCode::BadLevel, "row " + std::to_string(i + 1) + ", column '" + spec.name + "': value " +
                                             format_shortest(features_(i, j)) + " is not a declared level");
    }
  }
}

// ---- CSV -----------------------------------------------------------------------

Dataset parse_dataset_csv(std::string_view text, const Schema& schema, std::string name) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (!line.empty() && line.front() != '#') lines.push_back(line);
    start = end + 1;
  }
  if (lines.empty()) throw Error(ErrorCode::EmptyData, "CSV has no header row");
  // Strip a UTF-8 byte-order mark.
  if (lines[0].size() >= 3 && lines[0].substr(0, 3) == "\xEF\xBB\xBF") lines[0].remove_prefix(3);

  const auto header = split_csv_line(lines[0]);
  auto column_of = [&](const std::string& col) -> std::size_t {
    auto it = std::find(header.begin(), header.end(), col);
    if (it == header.end()) throw Error(ErrorCode::MissingColumn, "column '" + col + "' not found in CSV header");
    return static_cast<std::size_t>(it - header.begin());
  };
  std::vector<std::size_t> feature_cols;
  for (const auto& spec : schema.features) feature_cols.push_back(column_of(spec.name));
  const std::size_t label_col = column_of(schema.label_column);

  const auto n = static_cast<Eigen::Index>(lines.size() - 1);
  if (n == 0) throw Error(ErrorCode::EmptyData, "CSV has a header but no data rows");
  const auto p = static_cast<Eigen::Index>(schema.features.size());
  Matrix x(n, p);
  Labels y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto cells = split_csv_line(lines[static_cast<std::size_t>(i) + 1]);
    if (cells.size() != header.size())
      throw Error(ErrorCode::MissingColumn, "row " + std::to_string(i + 1) + " has " + std::to_string(cells.size()) +
                                                " cells, header has " + std::to_string(header.size()));
    bool ok = false;
    for (Eigen::Index j = 0; j < p; ++j) {
      x(i, j) = parse_number(cells[feature_cols[static_cast<std::size_t>(j)]], ok);
      if (!ok)
        throw Error(ErrorCode::NonNumeric, "row " + std::to_string(i + 1) + ", column '" +
                                               schema.features[static_cast<std::size_t>(j)].name + "': '" +
                                               cells[feature_cols[static_cast<std::size_t>(j)]] + "'");
    }
    const double label = parse_number(cells[label_col], ok);
    if (!ok) throw Error(ErrorCode::NonNumeric, "row " + std::to_string(i + 1) + ", label column");
    if (label != 0.0 && label != 1.0)
      throw Error(ErrorCode::BadLevel, "row " + std::to_string(i + 1) + ", column '" + schema.label_column +
                                           "': label must be 0 or 1");
    y[i] = static_cast<int>(label);
  }
  Dataset ds(std::move(x), std::move(y), schema.features, std::move(name));
  ds.check_levels();
  return ds;
}

Dataset load_dataset(const std::string& csv_path, const Schema& schema) {
  return parse_dataset_csv(read_file(csv_path), schema, csv_path);
}

Dataset load_dataset(const std::string& csv_path, const std::string& schema_path) {
  return load_dataset(csv_path, read_schema(schema_path));
}

std::string dataset_to_csv(const Dataset& ds, std::string_view label_column,
                           const std::vector<std::pair<std::string, std::vector<bool>>>& extra) {
  std::string out;
  for (const auto& spec : ds.specs()) {
    out += spec.name;
    out += ',';
  }
  out += label_column;
  for (const auto& [col, values] : extra) {
    if (static_cast<Eigen::Index>(values.size()) != ds.rows())
      throw Error(ErrorCode::LengthMismatch, "extra column '" + col + "' has wrong length");
    out += ',';
    out += col;
  }
  out += '\n';
  for (Eigen::Index i = 0; i < ds.rows(); ++i) {
    for (Eigen::Index j = 0; j < ds.cols(); ++j) {
      out += format_shortest(ds.features()(i, j));
      out += ',';
    }
    out += std::to_string(ds.labels()[i]);
    for (const auto& [col, values] : extra) {
      out += values[static_cast<std::size_t>(i)] ? ",1" : ",0";
    }
    out += '\n';
  }
  return out;
}

void save_dataset(const Dataset& ds, const std::string& path, std::string_view label_column,
                  const std::vector<std::pair<std::string, std::vector<bool>>>& extra) {
  write_file(path, dataset_to_csv(ds, label_column, extra));
}

// ---- pooling -------------------------------------------------------------------

std::map<std::string, double> pool_trip_fields(const TripRecordSet& records,
                                               const std::map<std::string, Pooling>& rule_per_field) {
  if (records.trips.empty()) throw Error(ErrorCode::NoTrips, "respondent '" + records.respondent_id + "' has no trips");
  if (records.trips.size() > 4)
    throw Error(ErrorCode::InvalidSchema, "respondent '" + records.respondent_id + "' reports more than 4 trips");
  std::map<std::string, double> pooled;
  for (const auto& [field, rule] : rule_per_field) {
    if (rule == Pooling::none)
      throw Error(ErrorCode::InvalidSchema, "trip field '" + field + "' needs a max or sum rule");
    double acc = rule == Pooling::max ? -std::numeric_limits<double>::infinity() : 0.0;
    for (std::size_t t = 0; t < records.trips.size(); ++t) {
      auto it = records.trips[t].find(field);
      if (it == records.trips[t].end())
        throw Error(ErrorCode::MissingTripData,
                    "trip " + std::to_string(t + 1) + " of '" + records.respondent_id + "' lacks field '" + field + "'");
      acc = rule == Pooling::max ? std::max(acc, it->second) : acc + it->second;
    }
    pooled.emplace(field, acc);
  }
  return pooled;
}

// ---- synthetic generator ----------------------------------------------------------

namespace {

std::vector<double> ordinal_levels(int count) {
  std::vector<double> lv(static_cast<std::size_t>(count));
  std::iota(lv.begin(), lv.end(), 1.0);
  return lv;
}

FeatureSpec make_spec(std::string name, FeatureKind kind, int n_levels, Pooling pooling, Construct construct) {
  FeatureSpec spec{std::move(name), kind, {}, pooling, construct};
  if (kind == FeatureKind::binary) spec.levels = {0.0, 1.0};
  if (kind == FeatureKind::ordinal) spec.levels = ordinal_levels(n_levels);
  return spec;
}

const std::vector<FeatureSpec>& survey_template() {
  using K = FeatureKind;
  using P = Pooling;
  using C = Construct;
  static const std::vector<FeatureSpec> specs = {
      make_spec("gender", K::binary, 2, P::none, C::control),
      make_spec("age_group", K::ordinal, 5, P::none, C::control),
      make_spec("sm_accounts", K::count, 0, P::none, C::H1),
      make_spec("sm_account_privacy", K::binary, 2, P::none, C::H1),
      make_spec("sm_connections", K::ordinal, 5, P::none, C::H1),
      make_spec("sm_activity", K::ordinal, 5, P::none, C::H1),
      make_spec("sm_access", K::ordinal, 4, P::none, C::H1),
      make_spec("sm_frequency", K::ordinal, 5, P::none, C::H1),
      make_spec("discuss_trips_frequency", K::ordinal, 5, P::none, C::H2),
      make_spec("sm_sharing_attitude", K::ordinal, 5, P::none, C::H2),
      make_spec("sm_sharing_decision", K::ordinal, 3, P::none, C::H2),
      make_spec("selfie_stick", K::binary, 2, P::none, C::H4),
      make_spec("camera", K::binary, 2, P::none, C::H4),
      make_spec("sm_sharing_privacy", K::ordinal, 3, P::none, C::H2),
      make_spec("sm_content_sharing_type", K::ordinal, 4, P::none, C::H2),
      make_spec("sm_expected_response", K::ordinal, 5, P::none, C::H5),
      make_spec("trip_frequency", K::ordinal, 4, P::none, C::H3),
      make_spec("trip_duration", K::ordinal, 5, P::max, C::H3),
      make_spec("trip_nature", K::ordinal, 4, P::max, C::H3),
      make_spec("trip_nature_rationale", K::ordinal, 4, P::max, C::H3),
      make_spec("trip_photography_type", K::ordinal, 4, P::max, C::H4),
      make_spec("trip_photo_type_sharing", K::ordinal, 4, P::max, C::H4),
      make_spec("trip_photography_quantity", K::count, 0, P::sum, C::H4),
      make_spec("trip_photo_quantity_sharing", K::count, 0, P::sum, C::H4),
      make_spec("trip_photo_likes_received", K::count, 0, P::sum, C::H5),
      make_spec("trip_photo_general_response", K::ordinal, 4, P::max, C::H5),
  };
  return specs;
}

// Counts are Binomial(6, 0.35): small, right-skewed codes 0..6.
constexpr int kCountTrials = 6;
constexpr double kCountProb = 0.35;

double draw_feature(const FeatureSpec& spec, Rng& rng) {
  switch (spec.kind) {
    case FeatureKind::binary:
    case FeatureKind::ordinal:
      return spec.levels[rng.below(spec.levels.size())];
    case FeatureKind::count: {
      int hits = 0;
      for (int t = 0; t < kCountTrials; ++t) hits += rng.bernoulli(kCountProb) ? 1 : 0;
      return hits;
    }
    case FeatureKind::continuous:
      return rng.normal();
  }
  return 0.0;
}

double sigmoid(double t) { return t >= 0 ? 1.0 / (1.0 + std::exp(-t)) : std::exp(t) / (1.0 + std::exp(t)); }

constexpr std::size_t kPilotDraws = 200'000;
constexpr int kMaxBisection = 200;

}  // namespace

std::vector<FeatureSpec> survey_schema(std::size_t p) {
  const auto& base = survey_template();
  std::vector<FeatureSpec> specs;
  specs.reserve(p);
  for (std::size_t j = 0; j < p; ++j) {
    if (j < base.size()) {
      specs.push_back(base[j]);
      continue;
    }
    // Beyond the survey layout, cycle generic kinds so every kind is exercised.
    static constexpr FeatureKind kinds[] = {FeatureKind::continuous, FeatureKind::ordinal, FeatureKind::binary,
                                            FeatureKind::count};
    const FeatureKind kind = kinds[(j - base.size()) % 4];
    specs.push_back(make_spec("x" + std::to_string(j + 1), kind, 5, Pooling::none,
                              static_cast<Construct>((j - base.size()) % 6)));
  }
  return specs;
}

std::vector<std::size_t> benchmark_signal_features() { return {6, 18, 24}; }

std::pair<double, double> generator_moments(const FeatureSpec& spec) {
  switch (spec.kind) {
    case FeatureKind::binary:
    case FeatureKind::ordinal: {
      const double k = static_cast<double>(spec.levels.size());
      const double mean = std::accumulate(spec.levels.begin(), spec.levels.end(), 0.0) / k;
      double var = 0.0;
      for (double l : spec.levels) var += (l - mean) * (l - mean);
      return {mean, std::sqrt(var / k)};
    }
    case FeatureKind::count:
      return {kCountTrials * kCountProb, std::sqrt(kCountTrials * kCountProb * (1.0 - kCountProb))};
    case FeatureKind::continuous:
      return {0.0, 1.0};
  }
  return {0.0, 1.0};
}

void validate(const SyntheticConfig& cfg) {
  if (cfg.n == 0) throw Error(ErrorCode::InvalidConfig, "synthetic.n must be positive");
  if (cfg.p == 0) throw Error(ErrorCode::InvalidConfig, "synthetic.p must be positive");
  if (!(cfg.target_minority_fraction > 0.0 && cfg.target_minority_fraction < 0.5))
    throw Error(ErrorCode::InvalidConfig, "synthetic.target_minority_fraction must lie in (0, 0.5)");
  if (!(cfg.signal_strength >= 0.0) || !std::isfinite(cfg.signal_strength))
    throw Error(ErrorCode::InvalidConfig, "synthetic.signal_strength must be a nonnegative real");
  for (auto j : cfg.signal_features)
    if (j >= cfg.p) throw Error(ErrorCode::InvalidConfig, "synthetic.signal_features index out of range");
}

double calibrate_intercept(const SyntheticConfig& cfg, const std::vector<FeatureSpec>& specs) {
  // Pilot sample of the signal score S = sum of standardized signal features.
  Vector score = Vector::Zero(cfg.signal_strength > 0.0 ? static_cast<Eigen::Index>(kPilotDraws) : 1);
  if (cfg.signal_strength > 0.0) {
    Rng rng(derive_seed(cfg.seed, stream::kPilot));
    for (Eigen::Index d = 0; d < score.size(); ++d) {
      double s = 0.0;
      for (auto j : cfg.signal_features) {
        const auto [mean, sd] = generator_moments(specs[j]);
        s += (draw_feature(specs[j], rng) - mean) / sd;
      }
      score[d] = cfg.signal_strength * s;
    }
  }
  auto expected_fraction = [&](double alpha) {
    double acc = 0.0;
    for (Eigen::Index d = 0; d < score.size(); ++d) acc += sigmoid(alpha + score[d]);
    return acc / static_cast<double>(score.size());
  };
  double lo = -50.0;
  double hi = 50.0;
  const double target = cfg.target_minority_fraction;
  if (expected_fraction(lo) > target || expected_fraction(hi) < target)
    throw Error(ErrorCode::CalibrationFailure, "target fraction not bracketed by intercept range [-50, 50]");
  for (int step = 0; step < kMaxBisection; ++step) {
    const double mid = 0.5 * (lo + hi);
    (expected_fraction(mid) < target ? lo : hi) = mid;
    if (hi - lo < 1e-10) {
      const double alpha = 0.5 * (lo + hi);
      if (std::abs(expected_fraction(alpha) - target) > 0.005) break;
      return alpha;
    }
  }
  throw Error(ErrorCode::CalibrationFailure, "intercept bisection did not converge");
}

Dataset generate_synthetic(const SyntheticConfig& cfg) { return generate_synthetic(cfg, survey_schema(cfg.p)); }

Dataset generate_synthetic(const SyntheticConfig& cfg, const std::vector<FeatureSpec>& specs) {
  validate(cfg);
  if (specs.size() != cfg.p) throw Error(ErrorCode::InvalidConfig, "spec count differs from synthetic.p");
  for (const auto& s : specs) validate(s);

  const auto n = static_cast<Eigen::Index>(cfg.n);
  const auto p = static_cast<Eigen::Index>(cfg.p);
  Matrix x(n, p);
  Rng feature_rng(derive_seed(cfg.seed, stream::kFeatures));
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < p; ++j) x(i, j) = draw_feature(specs[static_cast<std::size_t>(j)], feature_rng);

  const double alpha = calibrate_intercept(cfg, specs);
  Labels y(n);
  Rng label_rng(derive_seed(cfg.seed, stream::kLabels));
  for (Eigen::Index i = 0; i < n; ++i) {
    double s = 0.0;
    for (auto j : cfg.signal_features) {
      const auto [mean, sd] = generator_moments(specs[j]);
      s += (x(i, static_cast<Eigen::Index>(j)) - mean) / sd;
    }
    y[i] = label_rng.bernoulli(sigmoid(alpha + cfg.signal_strength * s)) ? 1 : 0;
  }
  return Dataset(std::move(x), std::move(y), specs, "synthetic-" + std::to_string(cfg.seed));
}

// ---- describe --------------------------------------------------------------------

namespace {

double quantile_sorted(const std::vector<double>& v, double q) {
  // Linear interpolation between order statistics (type 7).
  const double h = q * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (h - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

}  // namespace

Description describe(const Dataset& ds) {
  Description d;
  d.n1 = static_cast<std::size_t>(ds.count(1));
  d.n0 = static_cast<std::size_t>(ds.count(0));
  for (Eigen::Index j = 0; j < ds.cols(); ++j) {
    const auto& spec = ds.specs()[static_cast<std::size_t>(j)];
    FeatureSummary fs{spec.name, spec.kind, {}, {}};
    if (spec.kind == FeatureKind::continuous) {
      std::vector<double> v(ds.features().col(j).begin(), ds.features().col(j).end());
      std::sort(v.begin(), v.end());
      if (!v.empty())
        fs.five_number = {v.front(), quantile_sorted(v, 0.25), quantile_sorted(v, 0.5), quantile_sorted(v, 0.75),
                          v.back()};
    } else {
      for (Eigen::Index i = 0; i < ds.rows(); ++i) ++fs.frequencies[ds.features()(i, j)];
    }
    d.features.push_back(std::move(fs));
  }
  return d;
}

std::string to_text(const Description& description) {
  std::ostringstream out;
  out << "classes: 0=" << description.n0 << " 1=" << description.n1 << "\n";
  for (const auto& f : description.features) {
    out << f.name << " (" << to_string(f.kind) << "):";
    if (f.kind == FeatureKind::continuous) {
      static constexpr const char* labels[] = {"min", "q1", "median", "q3", "max"};
      for (std::size_t q = 0; q < 5; ++q) out << ' ' << labels[q] << '=' << format_fixed(f.five_number[q], 4);
    } else {
      for (const auto& [level, count] : f.frequencies) out << ' ' << format_shortest(level) << ':' << count;
    }
    out << '\n';
  }
  return out.str();
}

}  // namespace imbml
