#include "imbml/study.hpp"

#include <algorithm>
#include <filesystem>
#include <sstream>

#include "imbml/error.hpp"
#include "imbml/text.hpp"
#include "json.hpp"

namespace imbml {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

void reject_unknown(const json& obj, const std::string& section, std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) throw Error(ErrorCode::InvalidConfig, "'" + section + "' must be an object");
  for (const auto& [key, value] : obj.items()) {
    if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; }))
      throw Error(ErrorCode::InvalidConfig, "unknown field '" + (section.empty() ? key : section + "." + key) + "'");
  }
}

template <class T>
void read_field(const json& obj, const std::string& section, const char* key, T& out) {
  if (!obj.contains(key)) return;
  try {
    out = obj.at(key).get<T>();
  } catch (const json::exception&) {
    throw Error(ErrorCode::InvalidConfig, "field '" + section + "." + key + "' has the wrong type");
  }
}

std::string fixed(const std::optional<double>& v, int decimals = 4) { return v ? format_fixed(*v, decimals) : "NA"; }

std::string csv_escape(std::string text) {
  if (text.find_first_of(",\"\n") == std::string::npos) return text;
  std::string out = "\"";
  for (char c : text) {
    if (c == '"') out += '"';
    out += c == '\n' ? ' ' : c;
  }
  return out + "\"";
}

json to_json_value(const RunConfig& cfg, bool include_execution) {
  json doc;
  doc["seed"] = cfg.seed;
  doc["data"] = {{"csv", cfg.data_csv}, {"schema", cfg.schema_path}};
  if (include_execution) doc["output_dir"] = cfg.output_dir;
  doc["synthetic"] = {{"n", cfg.synthetic.n},
                      {"p", cfg.synthetic.p},
                      {"target_minority_fraction", cfg.synthetic.target_minority_fraction},
                      {"signal_features", cfg.synthetic.signal_features},
                      {"signal_strength", cfg.synthetic.signal_strength}};
  doc["resampling"] = {{"method", cfg.method},
                       {"smote_k", cfg.smote_k},
                       {"smote_standardize", cfg.smote_standardize},
                       {"pdfos_bandwidth", cfg.pdfos_bandwidth},
                       {"pdfos_ridge", cfg.pdfos_ridge},
                       {"snap_to_levels", cfg.snap_to_levels}};
  doc["cv"] = {{"replications", cfg.replications},
               {"train_fraction", cfg.train_fraction},
               {"balance", to_string(cfg.balance)},
               {"threshold", cfg.threshold}};
  if (include_execution) doc["cv"]["threads"] = cfg.threads;
  doc["lr"] = {{"max_iter", cfg.lr.max_iter}, {"tol", cfg.lr.tol}};
  doc["rf"] = {{"ntree", cfg.rf.ntree},
               {"mtry", cfg.rf.mtry},
               {"min_node_size", cfg.rf.min_node_size},
               {"train_scoring", to_string(cfg.rf_train_scoring)}};
  doc["ann"] = {{"hidden_units", cfg.ann.hidden_units},
                {"max_iter", cfg.ann.max_iter},
                {"init_range", cfg.ann.init_range},
                {"weight_decay", cfg.ann.weight_decay}};
  doc["tune"] = {{"k", cfg.tune_k}, {"reps", cfg.tune_reps}};
  doc["importance"] = {{"top_k", cfg.top_k}, {"bins", cfg.rank_bins}};
  return doc;
}

}  // namespace

std::string config_to_json(const RunConfig& cfg) { return to_json_value(cfg, true).dump(2) + "\n"; }

RunConfig config_from_json(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::InvalidConfig, std::string("config is not valid JSON (") + e.what() + ")");
  }
  RunConfig cfg;
  reject_unknown(doc, "", {"seed", "data", "output_dir", "synthetic", "resampling", "cv", "lr", "rf", "ann", "tune",
                           "importance"});
  read_field(doc, "", "seed", cfg.seed);
  read_field(doc, "", "output_dir", cfg.output_dir);
  if (doc.contains("data")) {
    const auto& d = doc["data"];
    reject_unknown(d, "data", {"csv", "schema"});
    read_field(d, "data", "csv", cfg.data_csv);
    read_field(d, "data", "schema", cfg.schema_path);
  }
  if (doc.contains("synthetic")) {
    const auto& s = doc["synthetic"];
    reject_unknown(s, "synthetic", {"n", "p", "target_minority_fraction", "signal_features", "signal_strength"});
    read_field(s, "synthetic", "n", cfg.synthetic.n);
    read_field(s, "synthetic", "p", cfg.synthetic.p);
    read_field(s, "synthetic", "target_minority_fraction", cfg.synthetic.target_minority_fraction);
    read_field(s, "synthetic", "signal_features", cfg.synthetic.signal_features);
    read_field(s, "synthetic", "signal_strength", cfg.synthetic.signal_strength);
  }
  if (doc.contains("resampling")) {
    const auto& r = doc["resampling"];
    reject_unknown(r, "resampling",
                   {"method", "smote_k", "smote_standardize", "pdfos_bandwidth", "pdfos_ridge", "snap_to_levels"});
    read_field(r, "resampling", "method", cfg.method);
    read_field(r, "resampling", "smote_k", cfg.smote_k);
    read_field(r, "resampling", "smote_standardize", cfg.smote_standardize);
    read_field(r, "resampling", "pdfos_bandwidth", cfg.pdfos_bandwidth);
    read_field(r, "resampling", "pdfos_ridge", cfg.pdfos_ridge);
    read_field(r, "resampling", "snap_to_levels", cfg.snap_to_levels);
  }
  if (doc.contains("cv")) {
    const auto& c = doc["cv"];
    reject_unknown(c, "cv", {"replications", "train_fraction", "balance", "threshold", "threads"});
    read_field(c, "cv", "replications", cfg.replications);
    read_field(c, "cv", "train_fraction", cfg.train_fraction);
    std::string balance = to_string(cfg.balance);
    read_field(c, "cv", "balance", balance);
    cfg.balance = parse_balance_policy(balance);
    read_field(c, "cv", "threshold", cfg.threshold);
    read_field(c, "cv", "threads", cfg.threads);
  }
  if (doc.contains("lr")) {
    const auto& l = doc["lr"];
    reject_unknown(l, "lr", {"max_iter", "tol"});
    read_field(l, "lr", "max_iter", cfg.lr.max_iter);
    read_field(l, "lr", "tol", cfg.lr.tol);
  }
  if (doc.contains("rf")) {
    const auto& f = doc["rf"];
    reject_unknown(f, "rf", {"ntree", "mtry", "min_node_size", "train_scoring"});
    read_field(f, "rf", "ntree", cfg.rf.ntree);
    read_field(f, "rf", "mtry", cfg.rf.mtry);
    read_field(f, "rf", "min_node_size", cfg.rf.min_node_size);
    std::string scoring = to_string(cfg.rf_train_scoring);
    read_field(f, "rf", "train_scoring", scoring);
    cfg.rf_train_scoring = parse_forest_train_scoring(scoring);
  }
  if (doc.contains("ann")) {
    const auto& a = doc["ann"];
    reject_unknown(a, "ann", {"hidden_units", "max_iter", "init_range", "weight_decay"});
    read_field(a, "ann", "hidden_units", cfg.ann.hidden_units);
    read_field(a, "ann", "max_iter", cfg.ann.max_iter);
    read_field(a, "ann", "init_range", cfg.ann.init_range);
    read_field(a, "ann", "weight_decay", cfg.ann.weight_decay);
  }
  if (doc.contains("tune")) {
    const auto& t = doc["tune"];
    reject_unknown(t, "tune", {"k", "reps"});
    read_field(t, "tune", "k", cfg.tune_k);
    read_field(t, "tune", "reps", cfg.tune_reps);
  }
  if (doc.contains("importance")) {
    const auto& i = doc["importance"];
    reject_unknown(i, "importance", {"top_k", "bins"});
    read_field(i, "importance", "top_k", cfg.top_k);
    read_field(i, "importance", "bins", cfg.rank_bins);
  }
  validate(cfg);
  return cfg;
}

RunConfig load_config(const std::string& path) { return config_from_json(read_file(path)); }

void validate(const RunConfig& cfg) {
  SyntheticConfig synthetic = cfg.synthetic;
  synthetic.seed = cfg.seed;
  validate(synthetic);
  resample_method(cfg);
  if (cfg.smote_k < 1) throw Error(ErrorCode::InvalidConfig, "resampling.smote_k must be >= 1");
  if (cfg.pdfos_bandwidth < 0.0) throw Error(ErrorCode::InvalidConfig, "resampling.pdfos_bandwidth must be >= 0");
  if (cfg.replications < 1) throw Error(ErrorCode::InvalidConfig, "cv.replications must be >= 1");
  if (!(cfg.train_fraction > 0.0 && cfg.train_fraction < 1.0))
    throw Error(ErrorCode::InvalidConfig, "cv.train_fraction must lie in (0, 1)");
  if (!(cfg.threshold > 0.0 && cfg.threshold < 1.0)) throw Error(ErrorCode::InvalidConfig, "cv.threshold must lie in (0, 1)");
  if (cfg.threads < 0) throw Error(ErrorCode::InvalidConfig, "cv.threads must be >= 0");
  if (cfg.lr.max_iter < 1) throw Error(ErrorCode::InvalidConfig, "lr.max_iter must be >= 1");
  if (!(cfg.lr.tol > 0.0)) throw Error(ErrorCode::InvalidConfig, "lr.tol must be positive");
  if (cfg.rf.ntree < 1) throw Error(ErrorCode::InvalidConfig, "rf.ntree must be >= 1");
  if (cfg.rf.mtry < 1) throw Error(ErrorCode::InvalidConfig, "rf.mtry must be >= 1");
  if (cfg.rf.min_node_size < 1) throw Error(ErrorCode::InvalidConfig, "rf.min_node_size must be >= 1");
  if (cfg.ann.hidden_units < 1) throw Error(ErrorCode::InvalidConfig, "ann.hidden_units must be >= 1");
  if (cfg.ann.max_iter < 1) throw Error(ErrorCode::InvalidConfig, "ann.max_iter must be >= 1");
  if (!(cfg.ann.init_range > 0.0)) throw Error(ErrorCode::InvalidConfig, "ann.init_range must be positive");
  if (!(cfg.ann.weight_decay >= 0.0)) throw Error(ErrorCode::InvalidConfig, "ann.weight_decay must be >= 0");
  if (cfg.tune_k.empty()) throw Error(ErrorCode::InvalidConfig, "tune.k must not be empty");
  for (int k : cfg.tune_k)
    if (k < 1) throw Error(ErrorCode::InvalidConfig, "tune.k entries must be >= 1");
  if (cfg.tune_reps < 1) throw Error(ErrorCode::InvalidConfig, "tune.reps must be >= 1");
  if (cfg.top_k < 1) throw Error(ErrorCode::InvalidConfig, "importance.top_k must be >= 1");
  if (cfg.rank_bins < 1) throw Error(ErrorCode::InvalidConfig, "importance.bins must be >= 1");
}

std::string config_fingerprint(const RunConfig& cfg) { return hex64(fnv1a64(to_json_value(cfg, false).dump())); }

ResampleMethod resample_method(const RunConfig& cfg) {
  ResampleMethod method = parse_method(cfg.method);
  if (auto* s = std::get_if<SmoteMethod>(&method)) {
    s->k = cfg.smote_k;
    s->standardize = cfg.smote_standardize;
  }
  if (auto* pm = std::get_if<PdfosMethod>(&method)) {
    if (cfg.pdfos_bandwidth > 0.0) pm->bandwidth = FixedBandwidth{cfg.pdfos_bandwidth};
    pm->ridge = cfg.pdfos_ridge;
  }
  return method;
}

CvConfig cv_config(const RunConfig& cfg, BalancePolicy balance, std::vector<ModelKind> models) {
  CvConfig cv;
  cv.replications = cfg.replications;
  cv.train_fraction = cfg.train_fraction;
  cv.balance = balance;
  cv.method = resample_method(cfg);
  cv.resample_options.snap_to_levels = cfg.snap_to_levels;
  cv.models = std::move(models);
  cv.settings.lr = cfg.lr;
  cv.settings.rf = cfg.rf;
  cv.settings.ann = cfg.ann;
  cv.settings.rf_train_scoring = cfg.rf_train_scoring;
  cv.settings.threshold = cfg.threshold;
  cv.seed = cfg.seed;
  cv.threads = cfg.threads;
  return cv;
}

// ---- reports -------------------------------------------------------------------

std::string report_header(const std::string& command, const RunConfig& cfg) {
  return "# imbml " + command + " seed=" + std::to_string(cfg.seed) + " config=" + config_fingerprint(cfg) + "\n";
}

std::string oversampler_csv(const OversamplerComparison& table) {
  std::string out = "condition,rows,OA,Sensitivity,Precision,Specificity,F1,AUC,best,error\n";
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const auto& row = table.rows[i];
    out += row.condition + "," + std::to_string(row.rows);
    for (auto m : kAllMetrics) out += "," + (row.report ? fixed(row.report->get(m)) : std::string("NA"));
    out += std::string(",") + (table.best == i ? "1" : "0") + "," + csv_escape(row.error) + "\n";
  }
  return out;
}

std::string oversampler_markdown(const OversamplerComparison& table) {
  std::string out = "| Measure |";
  for (const auto& row : table.rows) out += " " + row.condition + (table.best && &row == &table.rows[*table.best] ? " (best)" : "") + " |";
  out += "\n|---|";
  for (std::size_t i = 0; i < table.rows.size(); ++i) out += "---|";
  out += "\n";
  for (auto m : kAllMetrics) {
    out += "| " + std::string(to_string(m)) + " |";
    for (const auto& row : table.rows) out += " " + (row.report ? fixed(row.report->get(m), 2) : std::string("NA")) + " |";
    out += "\n";
  }
  return out;
}

std::string cv_replications_csv(const CvSummary& summary, const std::string& condition) {
  std::string out = "condition,model,replication,split,metric,value\n";
  for (const auto& rec : summary.records) {
    for (const auto& o : rec.outcomes) {
      const std::string prefix = condition + "," + o.model + "," + std::to_string(rec.index) + ",";
      if (!o.evaluation) {
        out += prefix + "fit,error," + csv_escape(o.error) + "\n";
        continue;
      }
      for (const auto* side : {"train", "test"}) {
        const GofReport& r = std::string(side) == "train" ? o.evaluation->train : o.evaluation->test;
        for (auto m : kAllMetrics)
          out += prefix + side + "," + std::string(to_string(m)) + "," +
                 (r.get(m) ? format_shortest(*r.get(m)) : std::string("NA")) + "\n";
      }
    }
  }
  return out;
}

std::string cv_summary_csv(const std::vector<std::pair<std::string, const CvSummary*>>& conditions) {
  std::string out = "condition,model,metric,train,test,ratio,train_skipped,test_skipped,failed_fits\n";
  for (const auto& [condition, summary] : conditions) {
    for (const auto& ms : summary->models) {
      for (auto m : kAllMetrics) {
        const auto& s = ms.metrics.at(m);
        out += condition + "," + ms.model + "," + std::string(to_string(m)) + "," + fixed(s.train_mean) + "," +
               fixed(s.test_mean) + "," + fixed(s.ratio) + "," + std::to_string(s.train_skipped) + "," +
               std::to_string(s.test_skipped) + "," + std::to_string(ms.failed_fits) + "\n";
      }
    }
  }
  return out;
}

std::string cv_summary_markdown(const std::string& model,
                                const std::vector<std::pair<std::string, const CvSummary*>>& conditions) {
  std::string out = "| Measure |";
  std::string rule = "|---|";
  for (const auto& [condition, summary] : conditions) {
    out += " " + condition + " Train | " + condition + " Test | " + condition + " Ratio |";
    rule += "---|---|---|";
  }
  out += "\n" + rule + "\n";
  for (auto m : kAllMetrics) {
    out += "| " + std::string(to_string(m)) + " |";
    for (const auto& [condition, summary] : conditions) {
      const auto& s = summary->at(model).metrics.at(m);
      out += " " + fixed(s.train_mean, 2) + " | " + fixed(s.test_mean, 2) + " | " + fixed(s.ratio, 2) + " |";
    }
    out += "\n";
  }
  return out;
}

namespace {

struct ReliabilityRow {
  std::optional<double> test_min, test_max, ratio_min, ratio_max, auc_ratio;
};

ReliabilityRow reliability_row(const ModelSummary& ms) {
  ReliabilityRow row;
  auto widen = [](std::optional<double>& lo, std::optional<double>& hi, double v) {
    lo = lo ? std::min(*lo, v) : v;
    hi = hi ? std::max(*hi, v) : v;
  };
  for (auto m : kAllMetrics) {
    const auto& s = ms.metrics.at(m);
    if (s.test_mean) widen(row.test_min, row.test_max, *s.test_mean);
    if (m == Metric::auc) {
      row.auc_ratio = s.ratio;
    } else if (s.ratio) {
      widen(row.ratio_min, row.ratio_max, *s.ratio);
    }
  }
  return row;
}

}  // namespace

std::string reliability_csv(const CvSummary& balanced) {
  std::string out = "model,test_min,test_max,ratio_min,ratio_max,auc_ratio\n";
  for (const auto& ms : balanced.models) {
    const auto r = reliability_row(ms);
    out += ms.model + "," + fixed(r.test_min) + "," + fixed(r.test_max) + "," + fixed(r.ratio_min) + "," +
           fixed(r.ratio_max) + "," + fixed(r.auc_ratio) + "\n";
  }
  return out;
}

std::string reliability_markdown(const CvSummary& balanced) {
  std::string out = "| Model | Test accuracy range | Train/test ratio range | AUC ratio |\n|---|---|---|---|\n";
  for (const auto& ms : balanced.models) {
    const auto r = reliability_row(ms);
    out += "| " + ms.model + " | " + fixed(r.test_min, 2) + " - " + fixed(r.test_max, 2) + " | " + fixed(r.ratio_min, 2) +
           " - " + fixed(r.ratio_max, 2) + " | " + fixed(r.auc_ratio, 2) + " |\n";
  }
  return out;
}

namespace {

std::optional<double> rank_of(const ImportanceTable& table, ModelKind model, std::size_t j) {
  auto it = table.average_rank.find(model);
  if (it == table.average_rank.end()) return std::nullopt;
  return it->second[static_cast<Eigen::Index>(j)];
}

std::string construct_of(const ImportanceTable& table, std::size_t j) {
  return j < table.constructs.size() ? std::string(to_string(table.constructs[j])) : std::string("NA");
}

}  // namespace

std::string importance_csv(const ImportanceTable& table) {
  std::string out = "variable,construct,lr_significance,lr_importance,rf_importance,ann_importance\n";
  for (std::size_t j = 0; j < table.predictors.size(); ++j) {
    out += csv_escape(table.predictors[j]) + "," + construct_of(table, j) + "," +
           (j < table.lr_significance.size() ? std::to_string(table.lr_significance[j]) : std::string("NA"));
    for (auto m : kAllModels) out += "," + fixed(rank_of(table, m, j));
    out += "\n";
  }
  return out;
}

std::string importance_markdown(const ImportanceTable& table) {
  std::string out = "| Variable | LR significance | LR importance | RF importance | ANN importance |\n|---|---|---|---|---|\n";
  for (std::size_t j = 0; j < table.predictors.size(); ++j) {
    out += "| " + table.predictors[j] + " | " +
           (j < table.lr_significance.size() ? std::to_string(table.lr_significance[j]) : std::string("NA"));
    for (auto m : kAllModels) out += " | " + fixed(rank_of(table, m, j), 2);
    out += " |\n";
  }
  return out;
}

std::string top_k_csv(const TopKReport& report) {
  std::string out = "model,position,variable,construct,average_rank,in_intersection\n";
  for (const auto& [model, list] : report.lists) {
    for (std::size_t i = 0; i < list.size(); ++i) {
      const auto& e = list[i];
      const bool shared = std::binary_search(report.intersection.begin(), report.intersection.end(), e.predictor);
      out += to_string(model) + "," + std::to_string(i + 1) + "," + csv_escape(e.predictor) + "," +
             (e.construct ? std::string(to_string(*e.construct)) : std::string("NA")) + "," +
             format_fixed(e.average_rank, 4) + "," + (shared ? "1" : "0") + "\n";
    }
  }
  return out;
}

std::string top_k_markdown(const TopKReport& report, const ConstructCoverage& coverage) {
  std::string out = "| # |";
  std::string rule = "|---|";
  for (const auto& [model, list] : report.lists) {
    out += " " + to_string(model) + " |";
    rule += "---|";
  }
  out += "\n" + rule + "\n";
  for (std::size_t i = 0; i < report.k; ++i) {
    out += "| " + std::to_string(i + 1) + " |";
    for (const auto& [model, list] : report.lists) {
      const auto& e = list[i];
      out += " " + e.predictor + (e.construct ? " (" + std::string(to_string(*e.construct)) + ")" : "") + " |";
    }
    out += "\n";
  }
  out += "\nCommon to every list:";
  for (const auto& name : report.intersection) out += " " + name;
  out += "\n\nConstruct coverage:";
  for (const auto& [model, all] : coverage.all_hypotheses) out += " " + to_string(model) + (all ? "=all" : "=partial");
  return out + "\n";
}

std::string rank_distribution_csv(const ImportanceTable& table, std::size_t bins) {
  std::string out = "model,bin_lower,bin_upper,count,dispersion\n";
  for (const auto& [model, ranks] : table.average_rank) {
    const RankDistribution d = rank_distribution(ranks, bins);
    for (std::size_t b = 0; b < d.counts.size(); ++b)
      out += to_string(model) + "," + format_fixed(d.bin_edges[b], 4) + "," + format_fixed(d.bin_edges[b + 1], 4) + "," +
             std::to_string(d.counts[b]) + "," + format_fixed(d.dispersion, 6) + "\n";
  }
  return out;
}

std::string rank_distribution_markdown(const ImportanceTable& table, std::size_t bins) {
  std::string out = "| Model | Histogram | Dispersion |\n|---|---|---|\n";
  for (const auto& [model, ranks] : table.average_rank) {
    const RankDistribution d = rank_distribution(ranks, bins);
    std::string hist;
    for (auto c : d.counts) hist += (hist.empty() ? "" : " ") + std::to_string(c);
    out += "| " + to_string(model) + " | " + hist + " | " + format_fixed(d.dispersion, 2) + " |\n";
  }
  return out;
}

std::string sweep_csv(const HiddenUnitSweep& sweep) {
  std::string out = "k,replication,train_oa,test_oa\n";
  for (const auto& point : sweep.points)
    for (std::size_t r = 0; r < point.train_oa.size(); ++r)
      out += std::to_string(point.k) + "," + std::to_string(r) + "," + format_fixed(point.train_oa[r], 6) + "," +
             format_fixed(point.test_oa[r], 6) + "\n";
  return out;
}

std::string sweep_summary_csv(const HiddenUnitSweep& sweep) {
  std::string out =
      "k,train_min,train_q1,train_median,train_q3,train_max,test_min,test_q1,test_median,test_q3,test_max,"
      "train_share_ge_0.9\n";
  for (const auto& point : sweep.points) {
    out += std::to_string(point.k);
    for (double v : five_number_summary(point.train_oa)) out += "," + format_fixed(v, 4);
    for (double v : five_number_summary(point.test_oa)) out += "," + format_fixed(v, 4);
    const auto hits = std::count_if(point.train_oa.begin(), point.train_oa.end(), [](double v) { return v >= 0.9; });
    out += "," + format_fixed(static_cast<double>(hits) / static_cast<double>(point.train_oa.size()), 4) + "\n";
  }
  return out;
}

std::vector<std::string> full_study_files() {
  return {"oversamplers.csv", "cv_summary.csv", "reliability.csv",      "importance.csv",
          "top10.csv",               "rank_distribution.csv", "report.md"};
}

void run_full_study(const Dataset& ds, const RunConfig& cfg) {
  validate(cfg);
  const std::string header = report_header("full-study", cfg);
  const fs::path out_dir(cfg.output_dir);
  const fs::path staging = out_dir / (".staging-" + config_fingerprint(cfg));
  std::error_code ec;
  fs::create_directories(staging, ec);
  if (ec) throw Error(ErrorCode::Io, "cannot create '" + staging.string() + "': " + ec.message());

  auto stage = [&](const char* name, auto&& body) {
    try {
      return body();
    } catch (const Error& e) {
      fs::remove_all(staging, ec);
      std::string detail = e.what();
      const std::string prefix = std::string(to_string(e.code())) + ": ";
      if (detail.rfind(prefix, 0) == 0) detail.erase(0, prefix.size());
      throw Error(e.code(), std::string("stage '") + name + "': " + detail);
    } catch (...) {
      fs::remove_all(staging, ec);
      throw;
    }
  };

  const auto methods = std::vector<ResampleMethod>{
      resample_method([&] { RunConfig c = cfg; c.method = "smote"; return c; }()),
      resample_method([&] { RunConfig c = cfg; c.method = "rwo"; return c; }()),
      resample_method([&] { RunConfig c = cfg; c.method = "pdfos"; return c; }())};
  ResampleOptions options;
  options.snap_to_levels = cfg.snap_to_levels;

  const OversamplerComparison comparison =
      stage("compare", [&] { return compare_oversamplers(ds, methods, cfg.lr, cfg.seed, cfg.threshold, options); });
  const std::vector<ModelKind> models = {ModelKind::LR, ModelKind::RF, ModelKind::ANN};
  const CvSummary original =
      stage("crossval-original", [&] { return run_crossval(ds, cv_config(cfg, BalancePolicy::none, models)); });
  const CvSummary balanced =
      stage("crossval-balanced", [&] { return run_crossval(ds, cv_config(cfg, cfg.balance, models)); });
  const std::string balanced_label = cfg.balance == BalancePolicy::none ? "original" : "balanced";
  const ImportanceTable ranks = stage("importance", [&] { return importance_table(balanced, ds); });
  const TopKReport top = stage("top-k", [&] { return top_k(ranks, std::min(cfg.top_k, ranks.predictors.size())); });
  const ConstructCoverage coverage = stage("coverage", [&] { return construct_coverage(top); });

  const std::vector<std::pair<std::string, const CvSummary*>> conditions = {{"original", &original},
                                                                           {balanced_label, &balanced}};
  std::ostringstream md;
  md << "<!-- " << header.substr(2, header.size() - 3) << " -->\n";
  md << "# Study report\n\n";
  md << "Scoring rules: LR = Wald |z| among AIC forward-selected predictors (mid-rank for the rest); "
        "RF = mean decrease in Gini impurity; ANN = Garson connection-weight shares.\n";
  md << "Balance policy: " << to_string(cfg.balance) << " (" << cfg.method << "), replications: " << cfg.replications
     << ", train fraction: " << format_shortest(cfg.train_fraction) << ".\n\n";
  md << "## Logistic regression fitted to original and oversampled data\n\n" << oversampler_markdown(comparison) << "\n";
  for (auto m : models)
    md << "## " << to_string(m) << " Monte Carlo cross-validation\n\n" << cv_summary_markdown(to_string(m), conditions) << "\n";
  md << "## Accuracy and reliability on " << balanced_label << " data\n\n" << reliability_markdown(balanced) << "\n";
  md << "## Average importance ranks\n\n" << importance_markdown(ranks) << "\n";
  md << "## Top " << top.k << " predictors\n\n" << top_k_markdown(top, coverage) << "\n";
  md << "## Distribution of average ranks\n\n" << rank_distribution_markdown(ranks, cfg.rank_bins);

  stage("write", [&] {
    write_file((staging / "oversamplers.csv").string(), header + oversampler_csv(comparison));
    write_file((staging / "cv_summary.csv").string(), header + cv_summary_csv(conditions));
    write_file((staging / "reliability.csv").string(), header + reliability_csv(balanced));
    write_file((staging / "importance.csv").string(), header + importance_csv(ranks));
    write_file((staging / "top10.csv").string(), header + top_k_csv(top));
    write_file((staging / "rank_distribution.csv").string(), header + rank_distribution_csv(ranks, cfg.rank_bins));
    write_file((staging / "report.md").string(), md.str());
    for (const auto& name : full_study_files()) {
      fs::rename(staging / name, out_dir / name, ec);
      if (ec) throw Error(ErrorCode::Io, "cannot move '" + name + "' into place: " + ec.message());
    }
    fs::remove_all(staging, ec);
    return 0;
  });
}

}  // namespace imbml
