// Command-line front end: data generation, feature ranking, model
// training/evaluation, the synthetic experiment and the filter benchmark.
//
// Every subcommand exits 0 on success. Failures print a JSON object
// {"error": ..., "command": ...} to stderr and exit nonzero.

#include <charconv>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "upliftfs/dataset.h"
#include "upliftfs/error.h"
#include "upliftfs/evaluation.h"
#include "upliftfs/experiment.h"
#include "upliftfs/meta_learners.h"
#include "upliftfs/model_io.h"
#include "upliftfs/selection.h"
#include "upliftfs/synthetic.h"
#include "upliftfs/uplift_forest.h"

namespace {

using nlohmann::json;
using namespace upliftfs;

std::string FormatReal(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

void Emit(const std::string& path, const std::string& contents) {
  if (path.empty() || path == "-") {
    std::cout << contents;
  } else {
    WriteTextFile(path, contents);
  }
}

struct ForestFlags {
  ForestConfig config;

  void Register(CLI::App* app) {
    app->add_option("--n-trees", config.n_trees, "Trees per forest");
    app->add_option("--max-depth", config.max_depth, "Maximum tree depth");
    app->add_option("--min-samples-leaf", config.min_samples_leaf,
                    "Minimum rows per child (per arm for uplift trees)");
    app->add_option("--max-features", config.max_features_per_split,
                    "Features sampled per split");
    app->add_option("--forest-seed", config.seed, "Forest seed");
  }
};

struct DataFlags {
  std::string path;
  std::string treatment_col = "w";
  std::string outcome_col = "y";

  void Register(CLI::App* app) {
    app->add_option("--data", path, "Input CSV")->required();
    app->add_option("--treatment-col", treatment_col, "Treatment column name");
    app->add_option("--outcome-col", outcome_col, "Outcome column name");
  }
  Dataset Load() const { return LoadCsv(path, treatment_col, outcome_col); }
};

// generate ------------------------------------------------------------------

struct GenerateCommand {
  DgpConfig dgp;
  bool calibrate = false;
  double target_control = 0.2;
  double target_ate = 0.1;
  std::string out;
  std::string truth;
  std::string treatment_col = "w";
  std::string outcome_col = "y";

  void Register(CLI::App* app) {
    app->add_option("--n", dgp.n, "Rows");
    app->add_option("--m1", dgp.m1, "Classification features");
    app->add_option("--m2", dgp.m2, "Uplift features");
    app->add_option("--m3", dgp.m3, "Irrelevant features");
    app->add_option("--a1", dgp.a1, "Control intercept");
    app->add_option("--a2", dgp.a2, "Treatment-effect intercept");
    app->add_option("--noise-sd", dgp.noise_sd, "Logit noise standard deviation");
    app->add_option("--periodic-frequency", dgp.periodic_frequency,
                    "Frequency of the sin/cos patterns");
    app->add_option("--seed", dgp.seed, "Seed");
    app->add_flag("--calibrate", calibrate,
                  "Choose a1/a2 to hit the target rates");
    app->add_option("--target-control-rate", target_control, "Calibration target");
    app->add_option("--target-ate", target_ate, "Calibration target");
    app->add_option("--out", out, "Output CSV")->required();
    app->add_option("--truth", truth, "Ground-truth JSON (default <out>.json)");
    app->add_option("--treatment-col", treatment_col, "Treatment column name");
    app->add_option("--outcome-col", outcome_col, "Outcome column name");
  }

  void Run() {
    if (calibrate) {
      const Intercepts ab = CalibrateIntercepts(target_control, target_ate, dgp);
      dgp.a1 = ab.a1;
      dgp.a2 = ab.a2;
    }
    const SyntheticDataset synth = Generate(dgp);
    WriteCsv(synth.data, out, treatment_col, outcome_col);
    const std::string truth_path = truth.empty() ? out + ".json" : truth;
    WriteTextFile(truth_path, SidecarToJson(synth).dump() + "\n");
  }
};

// select --------------------------------------------------------------------

struct SelectCommand {
  DataFlags data;
  ForestFlags forest;
  std::string method = "kl";
  int bins = kDefaultBins;
  size_t top = 0;
  bool include_treatment = false;
  std::string divergence = "kl";
  std::string out;
  std::string diagnostics;

  void Register(CLI::App* app) {
    data.Register(app);
    forest.Register(app);
    app->add_option("--method", method,
                    "f, lr, kl, ed, chi, uplift-forest, two-model or outcome");
    app->add_option("--bins", bins, "Bins for the kl/ed/chi filters");
    app->add_option("--top", top, "Only print the first k features");
    app->add_option("--divergence", divergence,
                    "Split criterion of the uplift-forest method");
    app->add_flag("--include-treatment", include_treatment,
                  "Let the outcome forest see the treatment flag");
    app->add_option("--out", out, "Ranking CSV (default stdout)");
    app->add_option("--diagnostics", diagnostics, "Diagnostics JSON");
  }

  void Run() {
    const Dataset d = data.Load();
    d.RequireBothArms();
    SelectionOptions options;
    options.num_bins = bins;
    options.forest = forest.config;
    options.uplift_kind = ParseDivergence(divergence);
    options.outcome_include_treatment = include_treatment;
    const FeatureRanking ranking = RankFeatures(d, ParseSelection(method), options);

    std::ostringstream csv;
    csv << "feature_name,score,rank\n";
    const size_t rows = top > 0 ? std::min(top, ranking.order.size())
                                : ranking.order.size();
    for (size_t r = 0; r < rows; ++r) {
      const size_t j = ranking.order[r];
      csv << d.feature_names()[j] << ',' << FormatReal(ranking.scores[j]) << ','
          << r + 1 << '\n';
    }
    Emit(out, csv.str());
    if (!diagnostics.empty()) {
      json diag{{"method", ranking.method_name},
                {"bins", bins},
                {"diagnostics", ranking.diagnostics}};
      WriteTextFile(diagnostics, diag.dump(2) + "\n");
    }
  }
};

// train ---------------------------------------------------------------------

std::vector<std::string> ReadRankingCsv(const std::string& path, size_t top) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open ranking '" + path + "'");
  std::string line;
  std::getline(in, line);
  std::vector<std::string> names;
  while (std::getline(in, line) && (top == 0 || names.size() < top)) {
    if (line.empty()) continue;
    names.push_back(line.substr(0, line.find(',')));
  }
  return names;
}

struct TrainCommand {
  DataFlags data;
  ForestFlags forest;
  std::string model = "uplift-forest";
  std::string divergence = "kl";
  std::vector<std::string> features;
  std::string ranking;
  size_t top = 0;
  std::string out;

  void Register(CLI::App* app) {
    data.Register(app);
    forest.Register(app);
    app->add_option("--model", model, "two-model or uplift-forest");
    app->add_option("--divergence", divergence, "Uplift split criterion");
    app->add_option("--features", features, "Feature names to use")->delimiter(',');
    app->add_option("--ranking", ranking, "Ranking CSV written by select");
    app->add_option("--top", top, "Use the first k ranked features");
    app->add_option("--out", out, "Model JSON")->required();
  }

  void Run() {
    const Dataset full = data.Load();
    std::vector<std::string> names = features;
    if (!ranking.empty()) names = ReadRankingCsv(ranking, top);
    if (names.empty()) names = full.feature_names();
    std::vector<size_t> columns;
    for (const auto& n : names) columns.push_back(full.FeatureIndex(n));
    const Dataset d = full.SelectFeatures(columns);

    UpliftModel fitted;
    fitted.kind = model;
    if (model == "two-model") {
      fitted.two_model = FitTwoModel(d, forest.config);
    } else if (model == "uplift-forest") {
      UpliftForestConfig cfg;
      cfg.kind = ParseDivergence(divergence);
      cfg.forest = forest.config;
      fitted.uplift_forest = FitUpliftForest(d, cfg);
    } else {
      throw Error("unknown model '" + model + "'");
    }
    SaveModel(fitted, out);
  }
};

// evaluate ------------------------------------------------------------------

struct EvaluateCommand {
  DataFlags data;
  std::string model;
  std::string truth;
  std::string predictions;
  std::string out;

  void Register(CLI::App* app) {
    data.Register(app);
    app->add_option("--model", model, "Model JSON written by train")->required();
    app->add_option("--truth", truth, "Ground-truth JSON for RMSE of ITE");
    app->add_option("--predictions", predictions, "Per-row predicted ITE CSV");
    app->add_option("--out", out, "Metrics JSON (default stdout)");
  }

  void Run() {
    const Dataset d = data.Load();
    const UpliftModel fitted = LoadModel(model);
    const std::vector<double> ite = fitted.PredictIte(d);
    json metrics{{"model", fitted.kind}, {"n", d.num_rows()}};
    if (d.HasBothArms()) metrics["auuc"] = Auuc(ite, d.treatment(), d.outcome());
    if (!truth.empty()) {
      const SyntheticSidecar sidecar = SidecarFromJson(ReadJsonFile(truth));
      if (sidecar.true_ite.size() != d.num_rows()) {
        throw Error("ground truth has " + std::to_string(sidecar.true_ite.size()) +
                    " rows, data has " + std::to_string(d.num_rows()));
      }
      metrics["rmse_ite"] = RmseIte(ite, sidecar.true_ite);
    }
    if (!predictions.empty()) {
      std::ostringstream csv;
      csv << "row,predicted_ite\n";
      for (size_t i = 0; i < ite.size(); ++i) csv << i << ',' << FormatReal(ite[i]) << '\n';
      WriteTextFile(predictions, csv.str());
    }
    Emit(out, metrics.dump(2) + "\n");
  }
};

// experiment ----------------------------------------------------------------

struct ExperimentCommand {
  std::string config_path;
  ExperimentConfig cfg;
  CLI::App* app = nullptr;

  void Register(CLI::App* a) {
    app = a;
    app->add_option("--config", config_path, "Experiment config JSON");
    app->add_option("--trials", cfg.trials, "Number of trials");
    app->add_option("--seed", cfg.seed, "Master seed");
    app->add_option("--threads", cfg.threads, "Worker threads");
    app->add_option("--out-dir", cfg.output_dir, "Output directory");
    app->add_option("--n", cfg.dgp.n, "Rows per trial");
    app->add_option("--m1", cfg.dgp.m1, "Classification features");
    app->add_option("--m2", cfg.dgp.m2, "Uplift features");
    app->add_option("--m3", cfg.dgp.m3, "Irrelevant features");
    app->add_option("--noise-sd", cfg.dgp.noise_sd, "Logit noise sd");
    app->add_option("--periodic-frequency", cfg.dgp.periodic_frequency,
                    "Frequency of the sin/cos patterns");
    app->add_option("--methods", cfg.methods, "Selection methods")->delimiter(',');
    app->add_option("--models", cfg.models, "Uplift models")->delimiter(',');
    app->add_option("--m-star", cfg.m_star, "Top-feature counts")->delimiter(',');
    app->add_option("--bins", cfg.bins, "Bin counts for kl/ed/chi")->delimiter(',');
    app->add_option("--test-fraction", cfg.test_fraction, "Test share");
    app->add_option("--no-baseline", "Skip the all-features cells")->expected(0);
    app->add_option("--no-auuc", "Skip AUUC")->expected(0);
    app->add_option("--n-trees", cfg.forest.n_trees, "Trees per forest");
    app->add_option("--max-depth", cfg.forest.max_depth, "Maximum tree depth");
    app->add_option("--min-samples-leaf", cfg.forest.min_samples_leaf,
                    "Minimum rows per child");
    app->add_option("--max-features", cfg.forest.max_features_per_split,
                    "Features sampled per split");
  }

  // Config file first, then every flag given on the command line.
  ExperimentConfig Resolve() {
    if (config_path.empty()) {
      ExperimentConfig out = cfg;
      out.baseline = app->count("--no-baseline") == 0;
      out.compute_auuc = app->count("--no-auuc") == 0;
      return out;
    }
    ExperimentConfig out = ExperimentConfigFromJson(ReadJsonFile(config_path));
    auto given = [&](const char* flag) { return app->count(flag) > 0; };
    if (given("--trials")) out.trials = cfg.trials;
    if (given("--seed")) out.seed = cfg.seed;
    if (given("--threads")) out.threads = cfg.threads;
    if (given("--out-dir")) out.output_dir = cfg.output_dir;
    if (given("--n")) out.dgp.n = cfg.dgp.n;
    if (given("--m1")) out.dgp.m1 = cfg.dgp.m1;
    if (given("--m2")) out.dgp.m2 = cfg.dgp.m2;
    if (given("--m3")) out.dgp.m3 = cfg.dgp.m3;
    if (given("--noise-sd")) out.dgp.noise_sd = cfg.dgp.noise_sd;
    if (given("--periodic-frequency")) {
      out.dgp.periodic_frequency = cfg.dgp.periodic_frequency;
    }
    if (given("--methods")) out.methods = cfg.methods;
    if (given("--models")) out.models = cfg.models;
    if (given("--m-star")) out.m_star = cfg.m_star;
    if (given("--bins")) out.bins = cfg.bins;
    if (given("--test-fraction")) out.test_fraction = cfg.test_fraction;
    if (given("--no-baseline")) out.baseline = false;
    if (given("--no-auuc")) out.compute_auuc = false;
    if (given("--n-trees")) out.forest.n_trees = cfg.forest.n_trees;
    if (given("--max-depth")) out.forest.max_depth = cfg.forest.max_depth;
    if (given("--min-samples-leaf")) {
      out.forest.min_samples_leaf = cfg.forest.min_samples_leaf;
    }
    if (given("--max-features")) {
      out.forest.max_features_per_split = cfg.forest.max_features_per_split;
    }
    return out;
  }

  void Run() {
    const ExperimentConfig resolved = Resolve();
    const ExperimentOutput output = RunExperiment(resolved);
    if (resolved.output_dir.empty()) {
      std::cout << ReportToCsv(output.report);
    } else {
      std::cerr << "wrote " << output.report.cells.size() << " cells to "
                << resolved.output_dir << " (" << output.resumed_trials
                << " trials resumed)\n";
    }
  }
};

// bench ---------------------------------------------------------------------

struct BenchCommand {
  DgpConfig dgp;
  int bins = kDefaultBins;
  int repeats = 3;
  std::string out;

  void Register(CLI::App* app) {
    dgp.n = 50000;
    app->add_option("--n", dgp.n, "Base row count (also timed at 2n)");
    app->add_option("--m1", dgp.m1, "Classification features");
    app->add_option("--m2", dgp.m2, "Uplift features");
    app->add_option("--m3", dgp.m3, "Irrelevant features");
    app->add_option("--seed", dgp.seed, "Seed");
    app->add_option("--bins", bins, "Bins for kl/ed/chi");
    app->add_option("--repeats", repeats, "Timing repetitions (fastest kept)");
    app->add_option("--out", out, "Timing CSV (default stdout)");
  }

  void Run() {
    const auto rows = BenchFilters(dgp, bins, repeats);
    std::ostringstream csv;
    csv << "method,n,seconds_n,seconds_2n,ratio\n";
    for (const auto& r : rows) {
      csv << r.method << ',' << r.n << ',' << FormatReal(r.seconds_n) << ','
          << FormatReal(r.seconds_2n) << ',' << FormatReal(r.ratio()) << '\n';
    }
    Emit(out, csv.str());
  }
};

int Fail(const std::string& command, const std::string& message, int code) {
  std::cerr << json{{"error", message}, {"command", command}}.dump() << "\n";
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Feature selection for uplift modeling", "upliftfs"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kSoftwareVersion));

  GenerateCommand generate;
  SelectCommand select;
  TrainCommand train;
  EvaluateCommand evaluate;
  ExperimentCommand experiment;
  BenchCommand bench;
  generate.Register(app.add_subcommand("generate", "Write a synthetic dataset"));
  select.Register(app.add_subcommand("select", "Rank features"));
  train.Register(app.add_subcommand("train", "Fit an uplift model"));
  evaluate.Register(app.add_subcommand("evaluate", "Score a fitted model"));
  experiment.Register(app.add_subcommand("experiment", "Run the synthetic protocol"));
  bench.Register(app.add_subcommand("bench", "Time the filters at n and 2n"));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return Fail("parse", e.what(), 2);
  }

  const std::string command = app.get_subcommands().front()->get_name();
  try {
    if (command == "generate") generate.Run();
    if (command == "select") select.Run();
    if (command == "train") train.Run();
    if (command == "evaluate") evaluate.Run();
    if (command == "experiment") experiment.Run();
    if (command == "bench") bench.Run();
  } catch (const std::exception& e) {
    return Fail(command, e.what(), 1);
  }
  return 0;
}
