#include "imbml/importance.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>

#include "imbml/error.hpp"

namespace imbml {

std::string to_string(ModelKind model) {
  switch (model) {
    case ModelKind::LR: return "LR";
    case ModelKind::RF: return "RF";
    case ModelKind::ANN: return "ANN";
  }
  return "?";
}

ModelKind parse_model(const std::string& name) {
  std::string upper = name;
  std::transform(upper.begin(), upper.end(), upper.begin(), [](unsigned char c) { return std::toupper(c); });
  for (auto m : kAllModels)
    if (to_string(m) == upper) return m;
  throw Error(ErrorCode::InvalidConfig, "unknown model '" + name + "' (expected lr|rf|ann)");
}

Vector scores_to_ranks(const Vector& scores, bool higher_is_better) {
  const auto p = static_cast<std::size_t>(scores.size());
  std::vector<Eigen::Index> order(p);
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) {
    return higher_is_better ? scores[a] > scores[b] : scores[a] < scores[b];
  });
  Vector ranks(scores.size());
  std::size_t i = 0;
  while (i < p) {
    std::size_t j = i;
    while (j + 1 < p && scores[order[j + 1]] == scores[order[i]]) ++j;
    // Positions i..j (0-based) share the mean of ranks i+1..j+1.
    const double mid = 0.5 * static_cast<double>(i + j + 2);
    for (std::size_t t = i; t <= j; ++t) ranks[order[t]] = mid;
    i = j + 1;
  }
  return ranks;
}

Vector average_ranks(const std::vector<Vector>& rankings) {
  if (rankings.empty()) throw Error(ErrorCode::LengthMismatch, "no rankings to average");
  const Eigen::Index p = rankings.front().size();
  Vector sum = Vector::Zero(p);
  Vector compensation = Vector::Zero(p);
  for (const auto& r : rankings) {
    if (r.size() != p) throw Error(ErrorCode::LengthMismatch, "rank vectors differ in length");
    // Neumaier summation per coordinate.
    for (Eigen::Index j = 0; j < p; ++j) {
      const double t = sum[j] + r[j];
      compensation[j] += std::abs(sum[j]) >= std::abs(r[j]) ? (sum[j] - t) + r[j] : (r[j] - t) + sum[j];
      sum[j] = t;
    }
  }
  return (sum + compensation) / static_cast<double>(rankings.size());
}

std::vector<int> count_lr_significance(const std::vector<std::vector<std::size_t>>& selected_sets, std::size_t p) {
  std::vector<int> counts(p, 0);
  for (const auto& set : selected_sets) {
    std::vector<bool> seen(p, false);
    for (auto j : set) {
      if (j >= p) throw Error(ErrorCode::LengthMismatch, "selected index out of range");
      if (!seen[j]) ++counts[j];
      seen[j] = true;
    }
  }
  return counts;
}

TopKReport top_k(const ImportanceTable& table, std::size_t k) {
  const std::size_t p = table.predictors.size();
  if (k > p) throw Error(ErrorCode::KTooLarge, "k=" + std::to_string(k) + " exceeds predictor count " + std::to_string(p));
  TopKReport report;
  report.k = k;
  std::map<std::string, int> membership;
  for (const auto& [model, ranks] : table.average_rank) {
    if (static_cast<std::size_t>(ranks.size()) != p) throw Error(ErrorCode::LengthMismatch, "rank vector length");
    std::vector<std::size_t> order(p);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](auto a, auto b) {
      const auto ra = ranks[static_cast<Eigen::Index>(a)];
      const auto rb = ranks[static_cast<Eigen::Index>(b)];
      return ra != rb ? ra < rb : table.predictors[a] < table.predictors[b];
    });
    auto& list = report.lists[model];
    for (std::size_t t = 0; t < k; ++t) {
      const auto j = order[t];
      std::optional<Construct> c;
      if (j < table.constructs.size()) c = table.constructs[j];
      list.push_back({table.predictors[j], c, ranks[static_cast<Eigen::Index>(j)]});
      ++membership[table.predictors[j]];
    }
  }
  for (const auto& [name, hits] : membership)
    if (hits == static_cast<int>(report.lists.size())) report.intersection.push_back(name);
  return report;
}

ConstructCoverage construct_coverage(const TopKReport& report) {
  static constexpr Construct kHypotheses[] = {Construct::H1, Construct::H2, Construct::H3, Construct::H4, Construct::H5};
  ConstructCoverage coverage;
  for (const auto& [model, list] : report.lists) {
    auto& covered = coverage.covered[model];
    for (const auto& e : list) {
      if (!e.construct)
        throw Error(ErrorCode::MissingConstructTags, "predictor '" + e.predictor + "' has no construct tag");
      covered.insert(*e.construct);
    }
    coverage.all_hypotheses[model] =
        std::all_of(std::begin(kHypotheses), std::end(kHypotheses), [&](Construct c) { return covered.count(c) > 0; });
  }
  return coverage;
}

RankDistribution rank_distribution(const Vector& average_ranks, std::size_t bins) {
  if (bins == 0) throw Error(ErrorCode::InvalidConfig, "rank histogram needs at least one bin");
  RankDistribution d;
  const auto p = static_cast<double>(average_ranks.size());
  const double lo = 1.0;
  const double hi = std::max(p, 1.0 + 1e-9);
  for (std::size_t b = 0; b <= bins; ++b) d.bin_edges.push_back(lo + (hi - lo) * static_cast<double>(b) / static_cast<double>(bins));
  d.counts.assign(bins, 0);
  for (Eigen::Index j = 0; j < average_ranks.size(); ++j) {
    const double t = (average_ranks[j] - lo) / (hi - lo);
    auto b = static_cast<std::size_t>(std::floor(t * static_cast<double>(bins)));
    ++d.counts[std::min(b, bins - 1)];
  }
  if (average_ranks.size() > 0) {
    const double mean = average_ranks.mean();
    d.dispersion = (average_ranks.array() - mean).square().mean();
  }
  return d;
}

}  // namespace imbml
