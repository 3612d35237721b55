#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <set>

#include "imbml/data.hpp"
#include "imbml/error.hpp"

using namespace imbml;

namespace {

Schema tiny_schema() {
  Schema s;
  s.features = {{"x1", FeatureKind::binary, {0, 1}, Pooling::none, Construct::H1},
                {"x2", FeatureKind::ordinal, {1, 2, 3}, Pooling::max, Construct::H3},
                {"x3", FeatureKind::continuous, {}, Pooling::none, Construct::control}};
  s.label_column = "asr";
  return s;
}

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an imbml::Error");
  return ErrorCode::Io;
}

}  // namespace

TEST_CASE("csv parse and round trip") {
  const Schema schema = tiny_schema();
  const std::string text = "x3,asr,x1,x2\n0.5,1,0,3\n-1.25,0,1,1\n2,0,1,2\n";
  const Dataset ds = parse_dataset_csv(text, schema);
  REQUIRE(ds.rows() == 3);
  REQUIRE(ds.cols() == 3);
  CHECK(ds.features()(0, 0) == 0);
  CHECK(ds.features()(0, 1) == 3);
  CHECK(ds.features()(1, 2) == -1.25);
  CHECK(ds.labels()[0] == 1);
  CHECK(ds.count(0) == 2);
  CHECK(ds.minority_label() == 1);

  const Dataset again = parse_dataset_csv(dataset_to_csv(ds, "asr"), schema);
  CHECK(again.features() == ds.features());
  CHECK(again.labels() == ds.labels());
}

TEST_CASE("csv values survive round trip bit for bit") {
  Schema schema;
  schema.features = {{"a", FeatureKind::continuous, {}, Pooling::none, Construct::control}};
  Matrix x(3, 1);
  x << 0.1, 1.0 / 3.0, -2.718281828459045e-7;
  Labels y(3);
  y << 0, 1, 0;
  const Dataset ds(x, y, schema.features);
  const Dataset back = parse_dataset_csv(dataset_to_csv(ds, "label"), schema);
  CHECK(back.features() == x);
}

TEST_CASE("csv errors carry codes") {
  const Schema schema = tiny_schema();
  CHECK(code_of([&] { parse_dataset_csv("x1,x2,asr\n0,1,1\n", schema); }) == ErrorCode::MissingColumn);
  CHECK(code_of([&] { parse_dataset_csv("x1,x2,x3,asr\n0,4,1,1\n", schema); }) == ErrorCode::BadLevel);
  CHECK(code_of([&] { parse_dataset_csv("x1,x2,x3,asr\n0,1,abc,1\n", schema); }) == ErrorCode::NonNumeric);
  CHECK(code_of([&] { parse_dataset_csv("x1,x2,x3,asr\n", schema); }) == ErrorCode::EmptyData);
  CHECK(code_of([&] { parse_dataset_csv("x1,x2,x3,asr\n0,1,1,2\n", schema); }) != ErrorCode::Io);
  CHECK(code_of([&] { load_dataset("/nonexistent/file.csv", schema); }) == ErrorCode::Io);
}

TEST_CASE("schema json round trip and validation") {
  const Schema schema = tiny_schema();
  CHECK(schema_from_json(schema_to_json(schema)) == schema);

  FeatureSpec bad{"b", FeatureKind::binary, {0, 2}, Pooling::none, Construct::control};
  CHECK(code_of([&] { validate(bad); }) == ErrorCode::InvalidSchema);
  FeatureSpec unsorted{"o", FeatureKind::ordinal, {3, 1}, Pooling::none, Construct::control};
  CHECK(code_of([&] { validate(unsorted); }) == ErrorCode::InvalidSchema);
}

TEST_CASE("trip pooling") {
  TripRecordSet r{"r1", {{{"photos", 2}, {"nature", 1}}, {{"photos", 5}, {"nature", 4}}, {{"photos", 1}, {"nature", 2}}}};
  const auto pooled = pool_trip_fields(r, {{"photos", Pooling::sum}, {"nature", Pooling::max}});
  CHECK(pooled.at("photos") == 8);
  CHECK(pooled.at("nature") == 4);

  TripRecordSet one{"r2", {{{"photos", 3}, {"nature", 2}}}};
  CHECK(pool_trip_fields(one, {{"photos", Pooling::sum}}).at("photos") == 3);

  TripRecordSet none{"r3", {}};
  CHECK(code_of([&] { pool_trip_fields(none, {{"photos", Pooling::sum}}); }) == ErrorCode::NoTrips);
  TripRecordSet gap{"r4", {{{"photos", 3}}, {{"nature", 1}}}};
  CHECK(code_of([&] { pool_trip_fields(gap, {{"photos", Pooling::sum}}); }) == ErrorCode::MissingTripData);
}

TEST_CASE("survey schema carries every construct") {
  const auto specs = survey_schema(26);
  REQUIRE(specs.size() == 26);
  std::set<Construct> seen;
  for (const auto& s : specs) {
    validate(s);
    seen.insert(s.construct);
  }
  for (auto c : {Construct::H1, Construct::H2, Construct::H3, Construct::H4, Construct::H5}) CHECK(seen.count(c) == 1);
  const auto signal = benchmark_signal_features();
  std::set<Construct> signal_constructs;
  for (auto j : signal) signal_constructs.insert(specs[j].construct);
  CHECK(signal_constructs.size() == signal.size());
}

TEST_CASE("generator: shape, levels, determinism") {
  SyntheticConfig cfg{318, 26, 91.0 / 318.0, benchmark_signal_features(), 1.0, 7};
  const Dataset a = generate_synthetic(cfg);
  const Dataset b = generate_synthetic(cfg);
  CHECK(a.rows() == 318);
  CHECK(a.cols() == 26);
  CHECK(a.features() == b.features());
  CHECK(a.labels() == b.labels());
  a.check_levels();
  cfg.seed = 8;
  CHECK(generate_synthetic(cfg).labels() != a.labels());
}

TEST_CASE("generator: positive count inside the binomial 99% interval") {
  // n = 318, pi = 91/318: mean 91, sd sqrt(318 pi (1 - pi)) = 8.06; 2.576 sd = 20.8
  const double pi = 91.0 / 318.0;
  const double sd = std::sqrt(318 * pi * (1 - pi));
  int inside = 0;
  for (std::uint64_t seed = 1; seed <= 40; ++seed) {
    SyntheticConfig cfg{318, 26, pi, benchmark_signal_features(), 1.0, seed};
    const auto positives = static_cast<double>(generate_synthetic(cfg).count(1));
    inside += std::abs(positives - 91.0) <= 2.576 * sd;
  }
  // 40 draws at 99% coverage: fewer than 37 inside has probability < 1e-4
  CHECK(inside >= 37);
}

TEST_CASE("generator: signal features correlate with the label, noise does not") {
  SyntheticConfig cfg{4000, 26, 91.0 / 318.0, benchmark_signal_features(), 1.0, 3};
  const Dataset ds = generate_synthetic(cfg);
  const Vector y = ds.labels_real();
  auto corr = [&](Eigen::Index j) {
    const Vector x = ds.features().col(j);
    const Vector xc = x.array() - x.mean();
    const Vector yc = y.array() - y.mean();
    return xc.dot(yc) / std::sqrt(xc.squaredNorm() * yc.squaredNorm());
  };
  // Under independence corr * sqrt(n) is ~N(0,1); 4.5 sd is the permutation-null bound
  const double bound = 4.5 / std::sqrt(4000.0);
  for (Eigen::Index j = 0; j < 26; ++j) {
    const bool signal = std::count(cfg.signal_features.begin(), cfg.signal_features.end(), std::size_t(j)) > 0;
    if (signal)
      CHECK(corr(j) > 0.15);
    else
      CHECK(std::abs(corr(j)) < bound);
  }
}

TEST_CASE("generator config validation") {
  SyntheticConfig cfg{318, 26, 1.5, {}, 0.0, 1};
  CHECK(code_of([&] { validate(cfg); }) == ErrorCode::InvalidConfig);
  cfg.target_minority_fraction = 0.3;
  cfg.signal_features = {30};
  CHECK(code_of([&] { validate(cfg); }) == ErrorCode::InvalidConfig);
}

TEST_CASE("describe counts") {
  const Schema schema = tiny_schema();
  const Dataset ds = parse_dataset_csv("x1,x2,x3,asr\n0,1,0.5,1\n1,1,1.5,0\n1,3,2.5,0\n1,2,3.5,1\n0,3,4.5,0\n", schema);
  const Description d = describe(ds);
  CHECK(d.n0 == 3);
  CHECK(d.n1 == 2);
  CHECK(d.features[0].frequencies.at(1.0) == 3);
  CHECK(d.features[1].frequencies.at(3.0) == 2);
  CHECK(d.features[2].five_number[2] == doctest::Approx(2.5));
  CHECK(d.features[2].five_number[0] == 0.5);
  CHECK(!to_text(d).empty());
}

TEST_CASE("subset keeps rows in order") {
  const Dataset ds = generate_synthetic(SyntheticConfig{50, 5, 0.3, {0}, 1.0, 2});
  const IndexList idx = {4, 0, 9};
  const Dataset sub = ds.subset(idx);
  CHECK(sub.rows() == 3);
  CHECK(sub.features().row(0) == ds.features().row(4));
  CHECK(sub.labels()[2] == ds.labels()[9]);
}
