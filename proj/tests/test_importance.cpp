#include "doctest.h"

#include <numeric>

#include "imbml/error.hpp"
#include "imbml/importance.hpp"
#include "imbml/rng.hpp"

using namespace imbml;

TEST_CASE("mid-ranks for ties, rank 1 is best") {
  Vector s(5);
  s << 0.3, 0.9, 0.3, 0.1, 0.3;
  const Vector r = scores_to_ranks(s, true);
  CHECK(r[1] == 1.0);
  CHECK(r[0] == 3.0);
  CHECK(r[2] == 3.0);
  CHECK(r[4] == 3.0);
  CHECK(r[3] == 5.0);
  const Vector low = scores_to_ranks(s, false);
  CHECK(low[3] == 1.0);
  CHECK(low[1] == 5.0);
}

TEST_CASE("rank sum is conserved for any score vector") {
  Rng rng(1);
  for (int t = 0; t < 200; ++t) {
    const Eigen::Index p = 1 + static_cast<Eigen::Index>(rng.below(30));
    Vector s(p);
    for (Eigen::Index j = 0; j < p; ++j) s[j] = std::round(rng.uniform() * 4);
    CHECK(scores_to_ranks(s, t % 2).sum() == static_cast<double>(p * (p + 1)) / 2.0);
  }
}

TEST_CASE("average ranks match brute-force summation") {
  Rng rng(2);
  std::vector<Vector> rankings;
  for (int t = 0; t < 1000; ++t) {
    Vector s(26);
    for (Eigen::Index j = 0; j < 26; ++j) s[j] = rng.uniform();
    rankings.push_back(scores_to_ranks(s, true));
  }
  const Vector avg = average_ranks(rankings);
  for (Eigen::Index j = 0; j < 26; ++j) {
    long double total = 0;
    for (const auto& r : rankings) total += r[j];
    CHECK(std::abs(avg[j] - static_cast<double>(total / 1000.0L)) < 1e-12);
  }
  CHECK(avg.mean() == doctest::Approx(13.5).epsilon(1e-15));
}

TEST_CASE("lr significance counts") {
  const auto c = count_lr_significance({{0, 2}, {2}, {}, {2, 3}}, 5);
  CHECK(c == std::vector<int>{1, 0, 3, 1, 0});
}

namespace {

ImportanceTable small_table() {
  ImportanceTable t;
  t.predictors = {"a", "b", "c", "d", "e"};
  t.constructs = {Construct::H1, Construct::H2, Construct::H3, Construct::H4, Construct::H5};
  t.average_rank[ModelKind::LR] = (Vector(5) << 1, 2, 3, 4, 5).finished();
  t.average_rank[ModelKind::RF] = (Vector(5) << 2, 1, 4, 4, 4).finished();
  t.average_rank[ModelKind::ANN] = (Vector(5) << 5, 2, 1, 3, 4).finished();
  t.replications = 1;
  return t;
}

}  // namespace

TEST_CASE("top-k lists, name tie-break and intersection") {
  const TopKReport r = top_k(small_table(), 3);
  const auto& rf = r.lists.at(ModelKind::RF);
  REQUIRE(rf.size() == 3);
  CHECK(rf[0].predictor == "b");
  CHECK(rf[1].predictor == "a");
  CHECK(rf[2].predictor == "c");  // c, d, e tie at 4; c wins by name
  CHECK(r.intersection == std::vector<std::string>{"b", "c"});
  CHECK_THROWS_AS(top_k(small_table(), 6), Error);
}

TEST_CASE("construct coverage") {
  const TopKReport r = top_k(small_table(), 3);
  const ConstructCoverage c = construct_coverage(r);
  CHECK(c.covered.at(ModelKind::LR) == std::set<Construct>{Construct::H1, Construct::H2, Construct::H3});
  CHECK(!c.all_hypotheses.at(ModelKind::LR));
  const ConstructCoverage full = construct_coverage(top_k(small_table(), 5));
  CHECK(full.all_hypotheses.at(ModelKind::ANN));

  ImportanceTable untagged = small_table();
  untagged.constructs.clear();
  try {
    construct_coverage(top_k(untagged, 2));
    FAIL("expected MissingConstructTags");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::MissingConstructTags);
  }
}

TEST_CASE("rank distribution dispersion at the two extremes") {
  const Vector spread = Vector::LinSpaced(26, 1, 26);
  const RankDistribution d = rank_distribution(spread, 5);
  CHECK(d.dispersion == doctest::Approx((26.0 * 26.0 - 1.0) / 12.0));
  CHECK(std::accumulate(d.counts.begin(), d.counts.end(), std::size_t{0}) == 26);
  CHECK(d.bin_edges.front() == 1.0);
  CHECK(d.bin_edges.back() == 26.0);
  const RankDistribution flat = rank_distribution(Vector::Constant(26, 13.5), 5);
  CHECK(flat.dispersion == 0.0);
}

TEST_CASE("model names parse case-insensitively") {
  CHECK(parse_model("rf") == ModelKind::RF);
  CHECK(parse_model("Ann") == ModelKind::ANN);
  CHECK(to_string(ModelKind::LR) == "LR");
  CHECK_THROWS_AS(parse_model("svm"), Error);
}
