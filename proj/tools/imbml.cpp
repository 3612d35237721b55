// imbml: command-line front end for the oversampling / model comparison pipeline.
//
// Exit codes: 0 ok, 2 invalid input or configuration, 3 model or runtime failure, 4 IO.

#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "imbml/error.hpp"
#include "imbml/study.hpp"
#include "imbml/text.hpp"

namespace fs = std::filesystem;
using namespace imbml;

namespace {

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::Io:
      return 4;
    case ErrorCode::InvalidConfig:
    case ErrorCode::InvalidSchema:
    case ErrorCode::MissingColumn:
    case ErrorCode::BadLevel:
    case ErrorCode::NonNumeric:
    case ErrorCode::EmptyData:
    case ErrorCode::MissingTripData:
    case ErrorCode::NoTrips:
    case ErrorCode::ColumnMismatch:
    case ErrorCode::KTooLarge:
    case ErrorCode::MissingConstructTags:
      return 2;
    default:
      return 3;
  }
}

std::string one_line(std::string text) {
  for (char& c : text)
    if (c == '\n' || c == '\r') c = ' ';
  return text;
}

// Flag values land here; only flags the user actually passed override the config.
struct Flags {
  std::string config, data, schema, out, balance, method, scoring;
  std::uint64_t seed = 0;
  int reps = 0, ntree = 0, threads = 0, hidden = 0, k_min = 0, k_max = 0, n = 0, p = 0;
  double train_fraction = 0, fraction = 0, strength = 0;
  std::vector<std::string> models;
};

struct Command {
  CLI::App* app = nullptr;
  Flags flags;
};

bool given(CLI::App* app, const char* name) {
  auto* opt = app->get_option_no_throw(name);
  return opt != nullptr && opt->count() > 0;
}

RunConfig resolve(const Command& cmd) {
  CLI::App* app = cmd.app;
  const Flags& f = cmd.flags;
  RunConfig cfg = f.config.empty() ? RunConfig{} : load_config(f.config);
  if (given(app, "--data")) cfg.data_csv = f.data;
  if (given(app, "--schema")) cfg.schema_path = f.schema;
  if (given(app, "--out")) cfg.output_dir = f.out;
  if (given(app, "--seed")) cfg.seed = f.seed;
  if (given(app, "--reps")) {
    cfg.replications = f.reps;
    cfg.tune_reps = f.reps;
  }
  if (given(app, "--train-fraction")) cfg.train_fraction = f.train_fraction;
  if (given(app, "--balance")) cfg.balance = parse_balance_policy(f.balance);
  if (given(app, "--method")) cfg.method = f.method;
  if (given(app, "--ntree")) cfg.rf.ntree = f.ntree;
  if (given(app, "--threads")) cfg.threads = f.threads;
  if (given(app, "--hidden")) cfg.ann.hidden_units = f.hidden;
  if (given(app, "--rf-train-scoring")) cfg.rf_train_scoring = parse_forest_train_scoring(f.scoring);
  if (given(app, "--n")) cfg.synthetic.n = f.n;
  if (given(app, "--p")) cfg.synthetic.p = static_cast<std::size_t>(f.p);
  if (given(app, "--fraction")) cfg.synthetic.target_minority_fraction = f.fraction;
  if (given(app, "--signal-strength")) cfg.synthetic.signal_strength = f.strength;
  if (given(app, "--k-min") || given(app, "--k-max")) {
    const int lo = given(app, "--k-min") ? f.k_min : cfg.tune_k.front();
    const int hi = given(app, "--k-max") ? f.k_max : cfg.tune_k.back();
    if (lo < 1 || hi < lo) throw Error(ErrorCode::InvalidConfig, "--k-min/--k-max must satisfy 1 <= min <= max");
    cfg.tune_k.clear();
    for (int k = lo; k <= hi; ++k) cfg.tune_k.push_back(k);
  }
  validate(cfg);
  return cfg;
}

SyntheticConfig synthetic_of(const RunConfig& cfg) {
  SyntheticConfig s = cfg.synthetic;
  s.seed = cfg.seed;
  return s;
}

// Uses --data/--schema when given, otherwise the synthetic benchmark.
Dataset input_dataset(const RunConfig& cfg) {
  if (cfg.data_csv.empty()) {
    if (!cfg.schema_path.empty())
      throw Error(ErrorCode::InvalidConfig, "a schema was given without a data file");
    return generate_synthetic(synthetic_of(cfg));
  }
  if (cfg.schema_path.empty()) throw Error(ErrorCode::InvalidConfig, "--schema is required with --data");
  return load_dataset(cfg.data_csv, cfg.schema_path);
}

std::vector<ModelKind> models_of(const Flags& f) {
  if (f.models.empty()) return {ModelKind::LR, ModelKind::RF, ModelKind::ANN};
  std::vector<ModelKind> models;
  for (const auto& m : f.models) models.push_back(parse_model(m));
  return models;
}

fs::path out_dir(const RunConfig& cfg) {
  fs::path dir(cfg.output_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::Io, "cannot create '" + dir.string() + "': " + ec.message());
  return dir;
}

void put(const fs::path& path, const std::string& text) {
  write_file(path.string(), text);
  std::cout << "wrote " << path.string() << "\n";
}

Schema schema_of(const Dataset& ds) { return Schema{ds.specs(), "label"}; }

std::string label_column(const RunConfig& cfg) {
  return cfg.schema_path.empty() ? std::string("label") : read_schema(cfg.schema_path).label_column;
}

int cmd_generate(const RunConfig& cfg) {
  const Dataset ds = generate_synthetic(synthetic_of(cfg));
  const fs::path dir = out_dir(cfg);
  put(dir / "data.csv", dataset_to_csv(ds, "label"));
  put(dir / "schema.json", schema_to_json(schema_of(ds)));
  std::cout << "rows=" << ds.rows() << " predictors=" << ds.cols() << " class0=" << ds.count(0)
            << " class1=" << ds.count(1) << "\n";
  return 0;
}

int cmd_describe(const RunConfig& cfg) {
  std::cout << to_text(describe(input_dataset(cfg)));
  return 0;
}

int cmd_balance(const RunConfig& cfg) {
  const Dataset ds = input_dataset(cfg);
  ResampleOptions options;
  options.snap_to_levels = cfg.snap_to_levels;
  const BalancedDataset balanced =
      balance_to_parity(ds, resample_method(cfg), derive_seed(cfg.seed, stream::kBalance), options);
  const fs::path dir = out_dir(cfg);
  put(dir / "balanced.csv", dataset_to_csv(balanced.dataset, label_column(cfg), {{"synthetic", balanced.synthetic_mask}}));
  std::cout << "rows=" << balanced.dataset.rows() << " synthetic=" << balanced.synthetic_count()
            << " class0=" << balanced.dataset.count(0) << " class1=" << balanced.dataset.count(1) << "\n";
  return 0;
}

int cmd_compare(const RunConfig& cfg) {
  const Dataset ds = input_dataset(cfg);
  std::vector<ResampleMethod> methods;
  for (const char* name : {"smote", "rwo", "pdfos"}) {
    RunConfig c = cfg;
    c.method = name;
    methods.push_back(resample_method(c));
  }
  ResampleOptions options;
  options.snap_to_levels = cfg.snap_to_levels;
  const auto table = compare_oversamplers(ds, methods, cfg.lr, cfg.seed, cfg.threshold, options);
  const fs::path dir = out_dir(cfg);
  const std::string header = report_header("compare-oversamplers", cfg);
  put(dir / "oversamplers.csv", header + oversampler_csv(table));
  std::cout << oversampler_markdown(table);
  return 0;
}

int cmd_crossval(const RunConfig& cfg, const Flags& f) {
  const Dataset ds = input_dataset(cfg);
  const CvSummary summary = run_crossval(ds, cv_config(cfg, cfg.balance, models_of(f)));
  const std::string condition = cfg.balance == BalancePolicy::none ? "original" : "balanced";
  const fs::path dir = out_dir(cfg);
  const std::string header = report_header("crossval", cfg);
  put(dir / "cv_replications.csv", header + cv_replications_csv(summary, condition));
  put(dir / "cv_summary.csv", header + cv_summary_csv({{condition, &summary}}));
  for (const auto& ms : summary.models) {
    std::cout << "\n" << ms.model << " (failed fits: " << ms.failed_fits << ")\n"
              << cv_summary_markdown(ms.model, {{condition, &summary}});
  }
  return 0;
}

int cmd_tune(const RunConfig& cfg) {
  const Dataset ds = input_dataset(cfg);
  const HiddenUnitSweep sweep =
      tune_hidden_units(ds, cfg.tune_k, cfg.tune_reps, cfg.seed, cfg.ann, cfg.train_fraction, cfg.threads);
  const fs::path dir = out_dir(cfg);
  const std::string header = report_header("tune-ann", cfg);
  put(dir / "sweep.csv", header + sweep_csv(sweep));
  put(dir / "sweep_summary.csv", header + sweep_summary_csv(sweep));
  const auto k = select_hidden_units(sweep);
  std::cout << "selected_k=" << (k ? std::to_string(*k) : std::string("NA")) << "\n";
  return 0;
}

int cmd_importance(const RunConfig& cfg) {
  const Dataset ds = input_dataset(cfg);
  const CvSummary summary =
      run_crossval(ds, cv_config(cfg, cfg.balance, {ModelKind::LR, ModelKind::RF, ModelKind::ANN}));
  const ImportanceTable table = importance_table(summary, ds);
  const TopKReport report = top_k(table, std::min(cfg.top_k, table.predictors.size()));
  const fs::path dir = out_dir(cfg);
  const std::string header = report_header("importance", cfg);
  put(dir / "importance.csv", header + importance_csv(table));
  put(dir / "top10.csv", header + top_k_csv(report));
  put(dir / "rank_distribution.csv", header + rank_distribution_csv(table, cfg.rank_bins));
  std::cout << importance_markdown(table) << "\n" << rank_distribution_markdown(table, cfg.rank_bins);
  return 0;
}

int cmd_full_study(const RunConfig& cfg) {
  run_full_study(input_dataset(cfg), cfg);
  for (const auto& name : full_study_files()) std::cout << "wrote " << (fs::path(cfg.output_dir) / name).string() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Oversampling and model comparison for imbalanced binary data"};
  app.require_subcommand(1);
  app.failure_message(CLI::FailureMessage::help);
  app.set_version_flag("--version", "imbml 0.1.0");

  std::vector<std::unique_ptr<Command>> commands;
  auto add = [&](const char* name, const char* about) -> Command& {
    auto cmd = std::make_unique<Command>();
    cmd->app = app.add_subcommand(name, about);
    Flags& f = cmd->flags;
    CLI::App* sub = cmd->app;
    sub->add_option("--config", f.config, "JSON run configuration")->check(CLI::ExistingFile);
    sub->add_option("--seed", f.seed, "master seed");
    sub->add_option("--out", f.out, "output directory");
    sub->add_option("--threads", f.threads, "worker threads (0 = hardware)");
    commands.push_back(std::move(cmd));
    return *commands.back();
  };
  auto data_flags = [](Command& cmd) {
    cmd.app->add_option("--data", cmd.flags.data, "input CSV (default: synthetic benchmark)");
    cmd.app->add_option("--schema", cmd.flags.schema, "schema JSON for --data");
  };
  auto cv_flags = [](Command& cmd) {
    Flags& f = cmd.flags;
    cmd.app->add_option("--reps", f.reps, "Monte Carlo replications");
    cmd.app->add_option("--train-fraction", f.train_fraction, "training share of each split");
    cmd.app->add_option("--balance", f.balance, "pre-split | within-train | none");
    cmd.app->add_option("--ntree", f.ntree, "trees per forest");
    cmd.app->add_option("--hidden", f.hidden, "hidden units");
    cmd.app->add_option("--rf-train-scoring", f.scoring, "oob-class-inbag-score | inbag | oob");
  };
  auto method_flag = [](Command& cmd) { cmd.app->add_option("--method", cmd.flags.method, "smote | rwo | pdfos"); };

  Command& generate = add("generate", "write the synthetic benchmark (data.csv, schema.json)");
  generate.app->add_option("--n", generate.flags.n, "rows");
  generate.app->add_option("--p", generate.flags.p, "predictors");
  generate.app->add_option("--fraction", generate.flags.fraction, "target share of class 1");
  generate.app->add_option("--signal-strength", generate.flags.strength, "log-odds per signal SD");

  Command& describe_cmd = add("describe", "class counts and per-feature summaries");
  data_flags(describe_cmd);

  Command& balance = add("balance", "oversample the minority class to parity (balanced.csv)");
  data_flags(balance);
  method_flag(balance);

  Command& compare = add("compare-oversamplers", "logistic fit on original vs SMOTE/RWO/PDFOS data");
  data_flags(compare);

  Command& crossval = add("crossval", "Monte Carlo cross-validation of LR, RF and ANN");
  data_flags(crossval);
  cv_flags(crossval);
  method_flag(crossval);
  crossval.app->add_option("--model", crossval.flags.models, "lr | rf | ann (repeatable; default all)");

  Command& tune = add("tune-ann", "hidden-unit sweep with train/test accuracy per replicate");
  data_flags(tune);
  tune.app->add_option("--reps", tune.flags.reps, "replicates per k");
  tune.app->add_option("--train-fraction", tune.flags.train_fraction, "training share of each split");
  tune.app->add_option("--k-min", tune.flags.k_min, "smallest hidden-unit count");
  tune.app->add_option("--k-max", tune.flags.k_max, "largest hidden-unit count");

  Command& importance = add("importance", "average importance ranks, top-k lists, rank dispersion");
  data_flags(importance);
  cv_flags(importance);
  method_flag(importance);

  Command& full = add("full-study", "every report table in one bundle");
  data_flags(full);
  cv_flags(full);
  method_flag(full);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    std::cerr << "error code=Usage message=\"" << one_line(e.what()) << "\"\n";
    return 2;
  }

  try {
    for (const auto& cmd : commands) {
      if (!cmd->app->parsed()) continue;
      const RunConfig cfg = resolve(*cmd);
      const std::string name = cmd->app->get_name();
      if (name == "generate") return cmd_generate(cfg);
      if (name == "describe") return cmd_describe(cfg);
      if (name == "balance") return cmd_balance(cfg);
      if (name == "compare-oversamplers") return cmd_compare(cfg);
      if (name == "crossval") return cmd_crossval(cfg, cmd->flags);
      if (name == "tune-ann") return cmd_tune(cfg);
      if (name == "importance") return cmd_importance(cfg);
      if (name == "full-study") return cmd_full_study(cfg);
    }
  } catch (const Error& e) {
    std::string message = e.what();
    const std::string prefix = std::string(to_string(e.code())) + ": ";
    if (message.rfind(prefix, 0) == 0) message.erase(0, prefix.size());
    std::cerr << "error code=" << to_string(e.code()) << " message=\"" << one_line(message) << "\"\n";
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error code=Runtime message=\"" << one_line(e.what()) << "\"\n";
    return 3;
  }
  return 2;
}
