#include "imbml/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <numeric>
#include <thread>

#include "imbml/error.hpp"
#include "imbml/rng.hpp"

namespace imbml {

std::string to_string(BalancePolicy policy) {
  switch (policy) {
    case BalancePolicy::none: return "none";
    case BalancePolicy::pre_split: return "pre-split";
    case BalancePolicy::within_train: return "within-train";
  }
  return "none";
}

BalancePolicy parse_balance_policy(const std::string& text) {
  if (text == "none") return BalancePolicy::none;
  if (text == "pre-split" || text == "pre_split") return BalancePolicy::pre_split;
  if (text == "within-train" || text == "within_train") return BalancePolicy::within_train;
  throw Error(ErrorCode::InvalidConfig, "unknown balance policy '" + text + "' (expected pre-split|within-train|none)");
}

std::string to_string(ForestTrainScoring scoring) {
  switch (scoring) {
    case ForestTrainScoring::oob_class_inbag_score: return "oob-class-inbag-score";
    case ForestTrainScoring::inbag: return "inbag";
    case ForestTrainScoring::oob: return "oob";
  }
  return "inbag";
}

ForestTrainScoring parse_forest_train_scoring(const std::string& text) {
  for (auto s : {ForestTrainScoring::oob_class_inbag_score, ForestTrainScoring::inbag, ForestTrainScoring::oob})
    if (to_string(s) == text) return s;
  throw Error(ErrorCode::InvalidConfig, "unknown forest train scoring '" + text + "'");
}

void validate(const CvConfig& cfg) {
  if (cfg.replications < 1) throw Error(ErrorCode::InvalidConfig, "cv.replications must be >= 1");
  if (!(cfg.train_fraction > 0.0 && cfg.train_fraction < 1.0))
    throw Error(ErrorCode::InvalidConfig, "cv.train_fraction must lie in (0, 1)");
  if (cfg.threads < 0) throw Error(ErrorCode::InvalidConfig, "cv.threads must be >= 0");
}

Split mc_split(Eigen::Index n, double train_fraction, std::uint64_t rep_seed) {
  if (n < 4) throw Error(ErrorCode::TooSmall, "Monte Carlo split needs n >= 4");
  if (!(train_fraction > 0.0 && train_fraction < 1.0))
    throw Error(ErrorCode::InvalidConfig, "train_fraction must lie in (0, 1)");
  const auto n_train = static_cast<Eigen::Index>(std::floor(train_fraction * static_cast<double>(n)));
  if (n_train < 1 || n_train >= n) throw Error(ErrorCode::TooSmall, "split leaves an empty side");
  IndexList perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), Eigen::Index{0});
  Rng rng(rep_seed);
  for (std::size_t i = perm.size() - 1; i > 0; --i) std::swap(perm[i], perm[rng.below(i + 1)]);
  Split split;
  split.train.assign(perm.begin(), perm.begin() + n_train);
  split.test.assign(perm.begin() + n_train, perm.end());
  std::sort(split.train.begin(), split.train.end());
  std::sort(split.test.begin(), split.test.end());
  return split;
}

// ---- built-in models ------------------------------------------------------------

ModelSpec builtin_model(ModelKind kind, const ModelSettings& settings) {
  switch (kind) {
    case ModelKind::LR:
      return {"LR", stream::kLogistic, [settings](const Dataset& train, const Dataset& test, std::uint64_t) {
                const LogisticFit fit = forward_select_aic(train, settings.lr);
                ModelEvaluation e;
                e.train = evaluate(train.labels(), predict_proba(fit, train.features()), settings.threshold);
                e.test = evaluate(test.labels(), predict_proba(fit, test.features()), settings.threshold);
                e.ranks = wald_rank(fit, static_cast<std::size_t>(train.cols()));
                e.selected = fit.selected;
                return e;
              }};
    case ModelKind::RF:
      return {"RF", stream::kForest, [settings](const Dataset& train, const Dataset& test, std::uint64_t seed) {
                ForestConfig cfg = settings.rf;
                cfg.seed = seed;
                cfg.mtry = std::min<int>(cfg.mtry, static_cast<int>(train.cols()));
                const ForestFit fit = fit_forest(train, cfg);
                const ForestPrediction in_bag = predict_forest(fit, train.features(), settings.threshold);
                ModelEvaluation e;
                switch (settings.rf_train_scoring) {
                  case ForestTrainScoring::inbag:
                    e.train = evaluate(train.labels(), in_bag.probability, settings.threshold);
                    break;
                  case ForestTrainScoring::oob:
                    e.train = evaluate(train.labels(), predict_forest_oob(fit, train.features(), settings.threshold).probability,
                                       settings.threshold);
                    break;
                  case ForestTrainScoring::oob_class_inbag_score: {
                    const ForestPrediction oob = predict_forest_oob(fit, train.features(), settings.threshold);
                    e.train = gof(confusion(train.labels(), oob.classes), train.labels(), in_bag.probability);
                    break;
                  }
                }
                e.test = evaluate(test.labels(), predict_forest(fit, test.features(), settings.threshold).probability,
                                  settings.threshold);
                e.ranks = scores_to_ranks(gini_importance(fit), true);
                return e;
              }};
    case ModelKind::ANN:
      return {"ANN", stream::kNet, [settings](const Dataset& train, const Dataset& test, std::uint64_t seed) {
                NetConfig cfg = settings.ann;
                cfg.seed = seed;
                const NetFit fit = fit_net(train, cfg);
                ModelEvaluation e;
                e.train = evaluate(train.labels(), predict_net(fit, train.features()).probability, settings.threshold);
                e.test = evaluate(test.labels(), predict_net(fit, test.features()).probability, settings.threshold);
                e.ranks = scores_to_ranks(garson_importance(fit), true);
                return e;
              }};
  }
  throw Error(ErrorCode::InvalidConfig, "unknown model");
}

std::vector<ModelSpec> builtin_models(const CvConfig& cfg) {
  std::vector<ModelSpec> specs;
  for (auto kind : cfg.models) specs.push_back(builtin_model(kind, cfg.settings));
  return specs;
}

// ---- replications -------------------------------------------------------------------

PreparedData prepare(const Dataset& ds, const CvConfig& cfg) {
  validate(cfg);
  if (cfg.balance == BalancePolicy::pre_split) {
    BalancedDataset balanced =
        balance_to_parity(ds, cfg.method, derive_seed(cfg.seed, stream::kBalance), cfg.resample_options);
    return {std::move(balanced.dataset), std::move(balanced.synthetic_mask)};
  }
  return {ds, std::vector<bool>(static_cast<std::size_t>(ds.rows()), false)};
}

ReplicationRecord run_replication(const PreparedData& prepared, const CvConfig& cfg,
                                  const std::vector<ModelSpec>& models, int rep_index) {
  ReplicationRecord record;
  record.index = rep_index;
  record.seed = derive_seed(cfg.seed, static_cast<std::uint64_t>(rep_index));
  const Split split = mc_split(prepared.data.rows(), cfg.train_fraction, derive_seed(record.seed, stream::kSplit));
  for (auto i : split.test) record.test_synthetic += prepared.synthetic_mask[static_cast<std::size_t>(i)] ? 1 : 0;

  Dataset train = prepared.data.subset(split.train);
  const Dataset test = prepared.data.subset(split.test);
  std::string balance_error;
  if (cfg.balance == BalancePolicy::within_train) {
    try {
      train = balance_to_parity(train, cfg.method, derive_seed(record.seed, stream::kBalance), cfg.resample_options)
                  .dataset;
    } catch (const Error& e) {
      balance_error = e.what();
    }
  }
  record.train_size = train.rows();
  record.test_size = test.rows();

  for (const auto& model : models) {
    ModelOutcome outcome{model.name, std::nullopt, balance_error};
    if (balance_error.empty()) {
      try {
        outcome.evaluation = model.run(train, test, derive_seed(record.seed, model.stream));
      } catch (const Error& e) {
        outcome.error = e.what();
      }
    }
    record.outcomes.push_back(std::move(outcome));
  }
  return record;
}

ReplicationRecord run_replication(const Dataset& ds, const CvConfig& cfg, int rep_index) {
  return run_replication(prepare(ds, cfg), cfg, builtin_models(cfg), rep_index);
}

void parallel_for(int count, int threads, const std::function<void(int)>& body) {
  int workers = threads == 0 ? static_cast<int>(std::max(1u, std::thread::hardware_concurrency())) : threads;
  workers = std::max(1, std::min(workers, count));
  if (workers == 1) {
    for (int i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (int i = next++; i < count; i = next++) {
        try {
          body(i);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

namespace {

/// Neumaier-compensated running sum over replications in index order.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    compensation_ += std::abs(sum_) >= std::abs(x) ? (sum_ - t) + x : (x - t) + sum_;
    sum_ = t;
    ++count_;
  }
  int count() const { return count_; }
  std::optional<double> mean() const {
    if (count_ == 0) return std::nullopt;
    return (sum_ + compensation_) / count_;
  }

 private:
  double sum_ = 0.0;
  double compensation_ = 0.0;
  int count_ = 0;
};

}  // namespace

const ModelSummary& CvSummary::at(const std::string& model) const {
  for (const auto& m : models)
    if (m.model == model) return m;
  throw Error(ErrorCode::InvalidConfig, "no summary for model '" + model + "'");
}

CvSummary summarize(std::vector<ReplicationRecord> records, const std::vector<std::string>& model_names) {
  std::sort(records.begin(), records.end(), [](const auto& a, const auto& b) { return a.index < b.index; });
  CvSummary summary;
  for (const auto& name : model_names) {
    ModelSummary ms{name, {}, 0};
    for (auto metric : kAllMetrics) {
      CompensatedSum train;
      CompensatedSum test;
      MetricSummary s;
      for (const auto& rec : records) {
        for (const auto& out : rec.outcomes) {
          if (out.model != name || !out.evaluation) continue;
          if (auto v = out.evaluation->train.get(metric)) train.add(*v); else ++s.train_skipped;
          if (auto v = out.evaluation->test.get(metric)) test.add(*v); else ++s.test_skipped;
        }
      }
      s.train_mean = train.mean();
      s.test_mean = test.mean();
      s.train_count = train.count();
      s.test_count = test.count();
      if (s.train_mean && s.test_mean && *s.test_mean > 0.0) s.ratio = *s.train_mean / *s.test_mean;
      ms.metrics[metric] = s;
    }
    for (const auto& rec : records)
      for (const auto& out : rec.outcomes)
        if (out.model == name && !out.evaluation) ++ms.failed_fits;
    summary.models.push_back(std::move(ms));
  }
  summary.records = std::move(records);
  return summary;
}

CvSummary run_crossval(const Dataset& ds, const CvConfig& cfg) { return run_crossval(ds, cfg, builtin_models(cfg)); }

CvSummary run_crossval(const Dataset& ds, const CvConfig& cfg, const std::vector<ModelSpec>& models) {
  const PreparedData prepared = prepare(ds, cfg);
  std::vector<ReplicationRecord> records(static_cast<std::size_t>(cfg.replications));
  parallel_for(cfg.replications, cfg.threads, [&](int r) {
    records[static_cast<std::size_t>(r)] = run_replication(prepared, cfg, models, r);
  });
  std::vector<std::string> names;
  for (const auto& m : models) names.push_back(m.name);
  return summarize(std::move(records), names);
}

ImportanceTable importance_table(const CvSummary& summary, const Dataset& ds) {
  ImportanceTable table;
  table.predictors = ds.feature_names();
  for (const auto& spec : ds.specs()) table.constructs.push_back(spec.construct);
  table.replications = static_cast<int>(summary.records.size());
  std::map<ModelKind, std::vector<Vector>> per_model;
  std::vector<std::vector<std::size_t>> selected;
  for (const auto& rec : summary.records) {
    for (const auto& out : rec.outcomes) {
      if (!out.evaluation || out.evaluation->ranks.size() == 0) continue;
      const ModelKind kind = parse_model(out.model);
      per_model[kind].push_back(out.evaluation->ranks);
      if (kind == ModelKind::LR) selected.push_back(out.evaluation->selected);
    }
  }
  for (auto& [kind, ranks] : per_model) table.average_rank[kind] = average_ranks(ranks);
  table.lr_significance = count_lr_significance(selected, static_cast<std::size_t>(ds.cols()));
  return table;
}

// ---- oversampler comparison -------------------------------------------------------

OversamplerComparison compare_oversamplers(const Dataset& ds, const std::vector<ResampleMethod>& methods,
                                           const IrlsOptions& lr, std::uint64_t seed, double threshold,
                                           const ResampleOptions& options) {
  auto fit_and_score = [&](const Dataset& data) {
    const LogisticFit fit = forward_select_aic(data, lr);
    return evaluate(data.labels(), predict_proba(fit, data.features()), threshold);
  };
  OversamplerComparison out;
  {
    OversamplerRow row{"original", std::nullopt, ds.rows(), {}};
    try {
      row.report = fit_and_score(ds);
    } catch (const Error& e) {
      row.error = e.what();
    }
    out.rows.push_back(std::move(row));
  }
  const std::uint64_t balance_seed = derive_seed(seed, stream::kBalance);
  for (std::size_t m = 0; m < methods.size(); ++m) {
    OversamplerRow row{method_name(methods[m]), std::nullopt, 0, {}};
    try {
      const BalancedDataset balanced = balance_to_parity(ds, methods[m], derive_seed(balance_seed, m), options);
      row.rows = balanced.dataset.rows();
      row.report = fit_and_score(balanced.dataset);
    } catch (const Error& e) {
      row.error = e.what();
    }
    out.rows.push_back(std::move(row));
  }
  auto key = [](const GofReport& r) {
    return std::pair{r.f1.value_or(-1.0), r.auc.value_or(-1.0)};
  };
  for (std::size_t i = 1; i < out.rows.size(); ++i) {
    if (!out.rows[i].report) continue;
    if (!out.best || key(*out.rows[i].report) > key(*out.rows[*out.best].report)) out.best = i;
  }
  return out;
}

// ---- hidden-unit sweep -----------------------------------------------------------

HiddenUnitSweep tune_hidden_units(const Dataset& ds, const std::vector<int>& k_range, int reps, std::uint64_t seed,
                                  const NetConfig& base, double train_fraction, int threads) {
  if (k_range.empty()) throw Error(ErrorCode::InvalidConfig, "hidden-unit range is empty");
  if (reps < 1) throw Error(ErrorCode::InvalidConfig, "sweep needs at least one replicate");
  HiddenUnitSweep sweep;
  for (int k : k_range) sweep.points.push_back({k, std::vector<double>(static_cast<std::size_t>(reps), NAN),
                                                std::vector<double>(static_cast<std::size_t>(reps), NAN)});
  const int jobs = static_cast<int>(k_range.size()) * reps;
  parallel_for(jobs, threads, [&](int job) {
    const auto ki = static_cast<std::size_t>(job / reps);
    const auto r = static_cast<std::size_t>(job % reps);
    const std::uint64_t rep_seed = derive_seed(seed, r);
    const Split split = mc_split(ds.rows(), train_fraction, derive_seed(rep_seed, stream::kSplit));
    const Dataset train = ds.subset(split.train);
    const Dataset test = ds.subset(split.test);
    NetConfig cfg = base;
    cfg.hidden_units = k_range[ki];
    cfg.seed = derive_seed(derive_seed(rep_seed, stream::kNet), static_cast<std::uint64_t>(k_range[ki]));
    try {
      const NetFit fit = fit_net(train, cfg);
      sweep.points[ki].train_oa[r] = *gof(confusion(train.labels(), predict_net(fit, train.features()).classes)).oa;
      sweep.points[ki].test_oa[r] = *gof(confusion(test.labels(), predict_net(fit, test.features()).classes)).oa;
    } catch (const Error&) {
      // Left as NaN; summaries skip failed replicates.
    }
  });
  return sweep;
}

std::optional<int> select_hidden_units(const HiddenUnitSweep& sweep, double accuracy, double share) {
  for (const auto& point : sweep.points) {
    std::size_t hits = 0;
    for (double v : point.train_oa) hits += v >= accuracy ? 1 : 0;
    if (!point.train_oa.empty() && static_cast<double>(hits) >= share * static_cast<double>(point.train_oa.size()))
      return point.k;
  }
  return std::nullopt;
}

namespace {

std::vector<double> finite_sorted(std::vector<double> values) {
  values.erase(std::remove_if(values.begin(), values.end(), [](double v) { return !std::isfinite(v); }), values.end());
  std::sort(values.begin(), values.end());
  return values;
}

double quantile(const std::vector<double>& sorted, double q) {
  if (sorted.empty()) return NAN;
  const double h = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

}  // namespace

std::array<double, 5> five_number_summary(std::vector<double> values) {
  const auto v = finite_sorted(std::move(values));
  return {quantile(v, 0.0), quantile(v, 0.25), quantile(v, 0.5), quantile(v, 0.75), quantile(v, 1.0)};
}

double median(std::vector<double> values) { return quantile(finite_sorted(std::move(values)), 0.5); }

double spearman(const Vector& a, const Vector& b) {
  if (a.size() != b.size() || a.size() < 2) throw Error(ErrorCode::LengthMismatch, "spearman needs equal lengths >= 2");
  const Vector ra = scores_to_ranks(a, false);
  const Vector rb = scores_to_ranks(b, false);
  const Vector ca = ra.array() - ra.mean();
  const Vector cb = rb.array() - rb.mean();
  const double denom = std::sqrt(ca.squaredNorm() * cb.squaredNorm());
  return denom > 0.0 ? ca.dot(cb) / denom : 0.0;
}

}  // namespace imbml
