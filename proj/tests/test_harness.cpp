#include "doctest.h"

#include <atomic>
#include <set>

#include "imbml/error.hpp"
#include "imbml/harness.hpp"
#include "oracles.hpp"

using namespace imbml;

namespace {

Dataset benchmark(std::uint64_t seed = 1) {
  return generate_synthetic(SyntheticConfig{318, 26, 91.0 / 318.0, benchmark_signal_features(), 1.0, seed});
}

CvConfig small_cv() {
  CvConfig cfg;
  cfg.replications = 4;
  cfg.settings.rf.ntree = 30;
  cfg.settings.ann.max_iter = 30;
  return cfg;
}

}  // namespace

TEST_CASE("monte carlo split is a partition of the requested size") {
  const Split s = mc_split(318, 0.75, 99);
  CHECK(s.train.size() == 238);
  CHECK(s.test.size() == 80);
  std::set<Eigen::Index> all(s.train.begin(), s.train.end());
  all.insert(s.test.begin(), s.test.end());
  CHECK(all.size() == 318);
  CHECK(*all.rbegin() == 317);
  const Split again = mc_split(318, 0.75, 99);
  CHECK(again.train == s.train);
  CHECK(mc_split(318, 0.75, 100).train != s.train);
}

TEST_CASE("pre-split balancing happens once, before the split") {
  const Dataset ds = benchmark();
  CvConfig cfg = small_cv();
  const PreparedData prepared = prepare(ds, cfg);
  CHECK(prepared.data.rows() == 2 * ds.count(0));
  cfg.balance = BalancePolicy::none;
  CHECK(prepare(ds, cfg).data.rows() == ds.rows());
}

TEST_CASE("within-train balancing keeps synthetic rows out of the test side") {
  const Dataset ds = benchmark();
  CvConfig cfg = small_cv();
  cfg.balance = BalancePolicy::within_train;
  cfg.models = {ModelKind::LR};
  for (int r = 0; r < 3; ++r) {
    const ReplicationRecord rec = run_replication(ds, cfg, r);
    CHECK(rec.test_synthetic == 0);
    CHECK(rec.test_size == ds.rows() - static_cast<Eigen::Index>(0.75 * ds.rows()));
  }
  cfg.balance = BalancePolicy::pre_split;
  Eigen::Index synthetic = 0;
  for (int r = 0; r < 3; ++r) synthetic += run_replication(ds, cfg, r).test_synthetic;
  CHECK(synthetic > 0);
}

TEST_CASE("serial and threaded cross-validation agree exactly") {
  const Dataset ds = benchmark();
  CvConfig cfg = small_cv();
  const CvSummary serial = run_crossval(ds, cfg);
  cfg.threads = 4;
  const CvSummary threaded = run_crossval(ds, cfg);
  REQUIRE(serial.records.size() == threaded.records.size());
  for (const auto& m : serial.models)
    for (auto metric : kAllMetrics) {
      CHECK(m.metrics.at(metric).train_mean == threaded.at(m.model).metrics.at(metric).train_mean);
      CHECK(m.metrics.at(metric).test_mean == threaded.at(m.model).metrics.at(metric).test_mean);
    }
  for (std::size_t r = 0; r < serial.records.size(); ++r)
    for (std::size_t m = 0; m < serial.records[r].outcomes.size(); ++m)
      CHECK(serial.records[r].outcomes[m].evaluation->ranks == threaded.records[r].outcomes[m].evaluation->ranks);
}

TEST_CASE("a failing model is recorded and the run continues") {
  const Dataset ds = benchmark();
  CvConfig cfg = small_cv();
  std::atomic<int> calls{0};
  ModelSpec flaky{"flaky", 99, [&](const Dataset& train, const Dataset& test, std::uint64_t) {
                    if (calls++ % 2 == 0) throw Error(ErrorCode::NonFiniteLoss, "boom");
                    ModelEvaluation e;
                    e.train = evaluate(train.labels(), Vector::Constant(train.rows(), 0.7));
                    e.test = evaluate(test.labels(), Vector::Constant(test.rows(), 0.7));
                    return e;
                  }};
  const CvSummary s = run_crossval(ds, cfg, {flaky});
  CHECK(s.at("flaky").failed_fits == 2);
  CHECK(s.at("flaky").metrics.at(Metric::oa).test_count == 2);
  int errors = 0;
  for (const auto& r : s.records) errors += !r.outcomes[0].error.empty();
  CHECK(errors == 2);
}

TEST_CASE("undefined metrics are skipped, not averaged as zero") {
  const Dataset ds = benchmark();
  CvConfig cfg = small_cv();
  ModelSpec all_negative{"neg", 98, [](const Dataset& train, const Dataset& test, std::uint64_t) {
                           ModelEvaluation e;
                           e.train = evaluate(train.labels(), Vector::Zero(train.rows()));
                           e.test = evaluate(test.labels(), Vector::Zero(test.rows()));
                           return e;
                         }};
  const CvSummary s = run_crossval(ds, cfg, {all_negative});
  const MetricSummary& precision = s.at("neg").metrics.at(Metric::precision);
  CHECK(!precision.test_mean);
  CHECK(precision.test_skipped == 4);
  CHECK(s.at("neg").metrics.at(Metric::specificity).test_mean == 1.0);
}

TEST_CASE("summary means are plain averages of the records") {
  const Dataset ds = benchmark();
  CvConfig cfg = small_cv();
  cfg.models = {ModelKind::LR};
  const CvSummary s = run_crossval(ds, cfg);
  double total = 0;
  for (const auto& r : s.records) total += *r.outcomes[0].evaluation->test.oa;
  CHECK(*s.at("LR").metrics.at(Metric::oa).test_mean == doctest::Approx(total / 4).epsilon(1e-15));
  const auto& oa = s.at("LR").metrics.at(Metric::oa);
  CHECK(*oa.ratio == doctest::Approx(*oa.train_mean / *oa.test_mean));
}

TEST_CASE("importance table ranks conserve the rank sum") {
  const Dataset ds = benchmark();
  const CvSummary s = run_crossval(ds, small_cv());
  for (const auto& r : s.records)
    for (const auto& o : r.outcomes) CHECK(o.evaluation->ranks.sum() == doctest::Approx(26.0 * 27.0 / 2.0).epsilon(1e-15));
  const ImportanceTable t = importance_table(s, ds);
  CHECK(t.predictors.size() == 26);
  CHECK(t.replications == 4);
  for (const auto& [model, ranks] : t.average_rank) CHECK(ranks.mean() == doctest::Approx(13.5).epsilon(1e-14));
  for (int c : t.lr_significance) CHECK(c <= 4);
}

TEST_CASE("oversampler comparison: balancing raises sensitivity") {
  const Dataset ds = benchmark();
  const auto table = compare_oversamplers(ds, {SmoteMethod{}, RwoMethod{}, PdfosMethod{}}, {}, 1);
  REQUIRE(table.rows.size() == 4);
  CHECK(table.rows[0].condition == "original");
  CHECK(table.rows[0].rows == 318);
  CHECK(table.rows[3].rows == 2 * ds.count(0));
  for (std::size_t i = 1; i < 4; ++i) CHECK(*table.rows[i].report->sensitivity > *table.rows[0].report->sensitivity);
  REQUIRE(table.best);
  CHECK(*table.best >= 1);
}

TEST_CASE("hidden-unit rule picks the first k meeting the accuracy share") {
  HiddenUnitSweep sweep;
  for (int k = 1; k <= 15; ++k) {
    HiddenUnitPoint p{k, {}, {}};
    for (int r = 0; r < 10; ++r) {
      // From k = 10 on, 6 of 10 replicates reach 0.9; before that only 4
      const bool high = r < (k >= 10 ? 6 : 4);
      p.train_oa.push_back(high ? 0.95 : 0.8);
      p.test_oa.push_back(0.7);
    }
    sweep.points.push_back(p);
  }
  CHECK(select_hidden_units(sweep) == 10);
  for (auto& p : sweep.points) std::fill(p.train_oa.begin(), p.train_oa.end(), 0.5);
  CHECK(!select_hidden_units(sweep));
}

TEST_CASE("hidden-unit sweep shares splits across k and is deterministic") {
  const Dataset ds = benchmark();
  NetConfig base;
  base.max_iter = 20;
  const auto a = tune_hidden_units(ds, {1, 2, 3}, 3, 5, base);
  const auto b = tune_hidden_units(ds, {1, 2, 3}, 3, 5, base, 0.75, 3);
  REQUIRE(a.points.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(a.points[i].train_oa == b.points[i].train_oa);
    CHECK(a.points[i].test_oa.size() == 3);
  }
}

TEST_CASE("spearman and summaries") {
  std::vector<double> a = {1, 2, 3, 4, 5, 6}, b = {2, 1, 4, 3, 6, 6};
  Vector va = Eigen::Map<Vector>(a.data(), 6), vb = Eigen::Map<Vector>(b.data(), 6);
  CHECK(spearman(va, vb) == doctest::Approx(oracle::spearman(a, b)).epsilon(1e-14));
  CHECK(spearman(va, va) == doctest::Approx(1.0));
  CHECK(spearman(va, -va) == doctest::Approx(-1.0));
  const auto f = five_number_summary({5, 1, 4, 2, 3});
  CHECK(f[0] == 1);
  CHECK(f[2] == 3);
  CHECK(f[4] == 5);
  CHECK(median({4, 1, 3, 2}) == 2.5);
}

TEST_CASE("parallel_for visits every index once") {
  std::vector<std::atomic<int>> hits(50);
  parallel_for(50, 4, [&](int i) { hits[static_cast<std::size_t>(i)]++; });
  for (auto& h : hits) CHECK(h.load() == 1);
}

TEST_CASE("cv config validation") {
  CvConfig cfg;
  cfg.train_fraction = 1.0;
  CHECK_THROWS_AS(validate(cfg), Error);
  cfg = CvConfig{};
  cfg.replications = 0;
  CHECK_THROWS_AS(validate(cfg), Error);
  CHECK(parse_balance_policy("within-train") == BalancePolicy::within_train);
  CHECK(to_string(BalancePolicy::pre_split) == "pre-split");
}
