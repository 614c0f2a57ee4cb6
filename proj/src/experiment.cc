#include "upliftfs/experiment.h"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include "upliftfs/error.h"
#include "upliftfs/meta_learners.h"
#include "upliftfs/model_io.h"
#include "upliftfs/random.h"
#include "upliftfs/selection.h"
#include "upliftfs/uplift_forest.h"

namespace upliftfs {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct MethodSpec {
  std::string label;
  SelectionMethod method = SelectionMethod::kF;
  int bins = kDefaultBins;
  bool baseline = false;
};

std::vector<MethodSpec> MethodSpecs(const ExperimentConfig& cfg) {
  std::vector<MethodSpec> specs;
  for (const auto& name : cfg.methods) {
    const SelectionMethod method = ParseSelection(name);
    if (IsBinMethod(method) && cfg.bins.size() > 1) {
      for (int k : cfg.bins) {
        specs.push_back({name + "@" + std::to_string(k), method, k, false});
      }
    } else {
      specs.push_back({name, method, cfg.bins.front(), false});
    }
  }
  if (cfg.baseline) specs.push_back({"all", SelectionMethod::kF, 0, true});
  return specs;
}

std::string FormatReal(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

struct Prediction {
  std::vector<double> ite;
  std::string error;
};

Prediction FitAndPredict(const std::string& model, const Dataset& train,
                         const Dataset& test, const ForestConfig& forest,
                         DivergenceKind uplift_kind) {
  Prediction out;
  try {
    if (model == "two-model") {
      out.ite = FitTwoModel(train, forest).PredictIte(test);
    } else if (model == "uplift-forest") {
      UpliftForestConfig cfg;
      cfg.kind = uplift_kind;
      cfg.forest = forest;
      out.ite = FitUpliftForest(train, cfg).PredictUplift(test);
    } else {
      throw Error("unknown model '" + model + "'");
    }
  } catch (const std::exception& e) {
    out.error = e.what();
  }
  return out;
}

std::string TrialPath(const std::string& dir, int index) {
  char name[32];
  std::snprintf(name, sizeof(name), "trial_%05d.json", index);
  return (fs::path(dir) / "trials" / name).string();
}

}  // namespace

void ExperimentConfig::Validate() const {
  dgp.Validate();
  forest.Validate();
  if (trials < 1) throw Error("trials must be >= 1");
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
    throw Error("test_fraction must lie in (0, 1)");
  }
  if (methods.empty()) throw Error("no selection methods configured");
  for (const auto& m : methods) ParseSelection(m);
  if (models.empty()) throw Error("no models configured");
  for (const auto& m : models) {
    if (m != "two-model" && m != "uplift-forest") {
      throw Error("unknown model '" + m + "'");
    }
  }
  if (m_star.empty()) throw Error("m_star grid is empty");
  for (size_t k : m_star) {
    if (k < 1) throw Error("m_star values must be >= 1");
  }
  if (bins.empty()) throw Error("bins grid is empty");
  for (int k : bins) {
    if (k < 2) throw Error("bin counts must be >= 2");
  }
}

std::vector<std::string> ExperimentConfig::MethodLabels() const {
  std::vector<std::string> labels;
  for (const auto& s : MethodSpecs(*this)) labels.push_back(s.label);
  return labels;
}

json ExperimentConfigToJson(const ExperimentConfig& c) {
  return json{{"dgp", DgpConfigToJson(c.dgp)},
              {"calibrate", c.calibrate},
              {"target_control_rate", c.target_control_rate},
              {"target_ate", c.target_ate},
              {"trials", c.trials},
              {"test_fraction", c.test_fraction},
              {"methods", c.methods},
              {"models", c.models},
              {"m_star", c.m_star},
              {"bins", c.bins},
              {"baseline", c.baseline},
              {"compute_auuc", c.compute_auuc},
              {"recall_k", c.recall_k},
              {"forest", ForestConfigToJson(c.forest)},
              {"uplift_divergence", DivergenceName(c.uplift_kind)},
              {"outcome_include_treatment", c.outcome_include_treatment},
              {"seed", c.seed},
              {"output_dir", c.output_dir},
              {"threads", c.threads}};
}

ExperimentConfig ExperimentConfigFromJson(const json& j,
                                          const ExperimentConfig& d) {
  if (!j.is_object()) throw Error("experiment config must be a JSON object");
  static const std::vector<std::string> known = {
      "dgp",          "calibrate",     "target_control_rate",
      "target_ate",   "trials",        "test_fraction",
      "methods",      "models",        "m_star",
      "bins",         "baseline",      "compute_auuc",
      "recall_k",     "forest",        "uplift_divergence",
      "outcome_include_treatment",     "seed",
      "output_dir",   "threads"};
  for (const auto& [key, value] : j.items()) {
    if (std::find(known.begin(), known.end(), key) == known.end()) {
      throw Error("unknown experiment config key '" + key + "'");
    }
  }
  try {
    ExperimentConfig c;
    c.dgp = j.contains("dgp") ? DgpConfigFromJson(j["dgp"], d.dgp) : d.dgp;
    c.calibrate = j.value("calibrate", d.calibrate);
    c.target_control_rate = j.value("target_control_rate", d.target_control_rate);
    c.target_ate = j.value("target_ate", d.target_ate);
    c.trials = j.value("trials", d.trials);
    c.test_fraction = j.value("test_fraction", d.test_fraction);
    c.methods = j.value("methods", d.methods);
    c.models = j.value("models", d.models);
    c.m_star = j.value("m_star", d.m_star);
    c.bins = j.value("bins", d.bins);
    c.baseline = j.value("baseline", d.baseline);
    c.compute_auuc = j.value("compute_auuc", d.compute_auuc);
    c.recall_k = j.value("recall_k", d.recall_k);
    c.forest = j.contains("forest") ? ForestConfigFromJson(j["forest"], d.forest)
                                    : d.forest;
    c.uplift_kind = j.contains("uplift_divergence")
                        ? ParseDivergence(j["uplift_divergence"].get<std::string>())
                        : d.uplift_kind;
    c.outcome_include_treatment =
        j.value("outcome_include_treatment", d.outcome_include_treatment);
    c.seed = j.value("seed", d.seed);
    c.output_dir = j.value("output_dir", d.output_dir);
    c.threads = j.value("threads", d.threads);
    return c;
  } catch (const json::exception& e) {
    throw Error(std::string("invalid experiment config: ") + e.what());
  }
}

std::string ConfigHash(const ExperimentConfig& config) {
  json j = ExperimentConfigToJson(config);
  j.erase("output_dir");
  j.erase("threads");
  const std::string text = j.dump();
  uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

ExperimentConfig ResolveIntercepts(const ExperimentConfig& config) {
  ExperimentConfig out = config;
  if (config.calibrate) {
    const Intercepts ab = CalibrateIntercepts(config.target_control_rate,
                                              config.target_ate, config.dgp);
    out.dgp.a1 = ab.a1;
    out.dgp.a2 = ab.a2;
  }
  return out;
}

uint64_t TrialSeed(const ExperimentConfig& config, int trial_index) {
  return DeriveSeed(config.seed, static_cast<uint64_t>(trial_index));
}

std::vector<TrialResult> RunTrial(const ExperimentConfig& config, int trial_index) {
  config.Validate();
  const uint64_t seed = TrialSeed(config, trial_index);
  DgpConfig dgp = config.dgp;
  dgp.seed = DeriveSeed(seed, "dgp");
  const SyntheticDataset synth = Generate(dgp);
  const SplitPair split =
      TrainTestSplit(synth.data, config.test_fraction, DeriveSeed(seed, "split"));
  std::vector<double> test_ite;
  for (size_t r : split.test_rows) test_ite.push_back(synth.true_ite[r]);

  const size_t m = synth.data.num_features();
  const size_t recall_k =
      std::min(m, config.recall_k > 0 ? config.recall_k : dgp.m2);
  const std::vector<MethodSpec> specs = MethodSpecs(config);

  std::map<std::pair<std::string, std::vector<size_t>>, Prediction> cache;
  auto predict = [&](const std::string& model,
                     const std::vector<size_t>& features) -> const Prediction& {
    auto key = std::make_pair(model, features);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    ForestConfig forest = config.forest;
    forest.seed = DeriveSeed(seed, "model:" + model);
    Prediction p;
    if (!split.train.HasBothArms() || !split.test.HasBothArms()) {
      p.error = "a split half lacks one treatment arm";
    } else {
      p = FitAndPredict(model, split.train.SelectFeatures(features),
                        split.test.SelectFeatures(features), forest,
                        config.uplift_kind);
    }
    return cache.emplace(std::move(key), std::move(p)).first->second;
  };

  std::vector<TrialResult> results;
  auto fill = [&](TrialResult& r, const std::vector<size_t>& features) {
    const Prediction& p = predict(r.model, features);
    if (!p.error.empty()) {
      r.error = p.error;
      return;
    }
    r.rmse = RmseIte(p.ite, test_ite);
    if (config.compute_auuc) {
      try {
        r.auuc = Auuc(p.ite, split.test.treatment(), split.test.outcome());
      } catch (const Error& e) {
        r.error = e.what();
      }
    }
  };

  for (const MethodSpec& spec : specs) {
    if (spec.baseline) {
      std::vector<size_t> all(m);
      for (size_t j = 0; j < m; ++j) all[j] = j;
      for (const auto& model : config.models) {
        TrialResult r;
        r.trial_id = trial_index;
        r.method = spec.label;
        r.model = model;
        r.m_star = m;
        r.has_recall = false;
        r.selected_features = synth.data.feature_names();
        fill(r, all);
        results.push_back(std::move(r));
      }
      continue;
    }

    FeatureRanking ranking;
    std::string ranking_error;
    try {
      if (!split.train.HasBothArms()) throw Error("training half lacks one arm");
      SelectionOptions options;
      options.num_bins = spec.bins;
      options.forest = config.forest;
      options.forest.seed = DeriveSeed(seed, "select:" + spec.label);
      options.uplift_kind = config.uplift_kind;
      options.outcome_include_treatment = config.outcome_include_treatment;
      ranking = RankFeatures(split.train, spec.method, options);
    } catch (const std::exception& e) {
      ranking_error = e.what();
    }
    RecallResult recall;
    if (ranking_error.empty() && dgp.m2 > 0) {
      recall = FeatureRecallTopK(ranking, synth.roles, synth.patterns, recall_k);
    }

    for (size_t m_star : config.m_star) {
      for (const auto& model : config.models) {
        TrialResult r;
        r.trial_id = trial_index;
        r.method = spec.label;
        r.model = model;
        r.m_star = m_star;
        if (!ranking_error.empty()) {
          r.error = "ranking failed: " + ranking_error;
        } else if (m_star > m) {
          r.error = "m_star exceeds the feature count";
        } else {
          r.has_recall = dgp.m2 > 0;
          r.recall_overall = recall.overall;
          r.recall_by_pattern = recall.by_pattern;
          std::vector<size_t> top = ranking.Top(m_star);
          for (size_t j : top) r.selected_features.push_back(synth.data.feature_names()[j]);
          std::sort(top.begin(), top.end());
          fill(r, top);
        }
        results.push_back(std::move(r));
      }
    }
  }
  return results;
}

int EffectiveThreads(int requested) {
  int threads = requested > 0
                    ? requested
                    : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  if (const char* env = std::getenv("UPLIFTFS_THREADS")) {
    const int cap = std::atoi(env);
    if (cap > 0) threads = std::min(threads, cap);
  }
  return std::max(1, threads);
}

json TrialResultToJson(const TrialResult& r) {
  json j{{"trial_id", r.trial_id},
         {"method", r.method},
         {"model", r.model},
         {"m_star", r.m_star},
         {"rmse", r.rmse},
         {"has_recall", r.has_recall},
         {"recall_overall", r.recall_overall},
         {"recall_by_pattern", r.recall_by_pattern},
         {"selected_features", r.selected_features},
         {"error", r.error}};
  j["auuc"] = r.auuc ? json(*r.auuc) : json(nullptr);
  return j;
}

TrialResult TrialResultFromJson(const json& j) {
  TrialResult r;
  r.trial_id = j.at("trial_id").get<int>();
  r.method = j.at("method").get<std::string>();
  r.model = j.at("model").get<std::string>();
  r.m_star = j.at("m_star").get<size_t>();
  r.rmse = j.at("rmse").get<double>();
  r.has_recall = j.at("has_recall").get<bool>();
  r.recall_overall = j.at("recall_overall").get<double>();
  r.recall_by_pattern =
      j.at("recall_by_pattern").get<std::map<std::string, double>>();
  r.selected_features = j.at("selected_features").get<std::vector<std::string>>();
  r.error = j.at("error").get<std::string>();
  if (!j.at("auuc").is_null()) r.auuc = j["auuc"].get<double>();
  return r;
}

std::string ReportToCsv(const ExperimentReport& report) {
  std::ostringstream out;
  out << "method,model,m_star,metric,mean,se,lo,hi\n";
  for (const auto& cell : report.cells) {
    for (const auto& s : cell.metrics) {
      out << cell.method << ',' << cell.model << ',' << cell.m_star << ','
          << s.metric << ',' << FormatReal(s.mean) << ',' << FormatReal(s.se)
          << ',' << FormatReal(s.lo) << ',' << FormatReal(s.hi) << '\n';
    }
  }
  return out.str();
}

json ReportToJson(const ExperimentReport& report, const ExperimentConfig& resolved) {
  json cells = json::array();
  for (const auto& cell : report.cells) {
    json metrics = json::object();
    for (const auto& s : cell.metrics) {
      metrics[s.metric] = {{"mean", s.mean}, {"se", s.se}, {"lo", s.lo},
                           {"hi", s.hi},     {"trials", s.trials}};
    }
    cells.push_back({{"method", cell.method},
                     {"model", cell.model},
                     {"m_star", cell.m_star},
                     {"failed_trials", cell.failed_trials},
                     {"metrics", std::move(metrics)}});
  }
  return json{{"format", "upliftfs.report"},
              {"version", kModelFormatVersion},
              {"software_version", kSoftwareVersion},
              {"resolved_config_hash", ConfigHash(resolved)},
              {"a1", resolved.dgp.a1},
              {"a2", resolved.dgp.a2},
              {"trials", resolved.trials},
              {"cells", std::move(cells)}};
}

ExperimentOutput RunExperiment(const ExperimentConfig& config) {
  config.Validate();
  ExperimentOutput output;
  output.resolved = ResolveIntercepts(config);
  const ExperimentConfig& cfg = output.resolved;
  output.trials.resize(cfg.trials);
  std::vector<bool> done(cfg.trials, false);

  const bool persist = !cfg.output_dir.empty();
  if (persist) {
    std::error_code ec;
    fs::create_directories(fs::path(cfg.output_dir) / "trials", ec);
    if (ec) throw Error("cannot create output directory: " + ec.message());
    const std::string manifest_path =
        (fs::path(cfg.output_dir) / "manifest.json").string();
    const std::string hash = ConfigHash(config);
    if (fs::exists(manifest_path)) {
      const json manifest = ReadJsonFile(manifest_path);
      if (manifest.value("config_hash", "") != hash) {
        throw Error("output directory '" + cfg.output_dir +
                    "' holds results for a different configuration");
      }
      for (int t = 0; t < cfg.trials; ++t) {
        const std::string path = TrialPath(cfg.output_dir, t);
        if (!fs::exists(path)) continue;
        const json doc = ReadJsonFile(path);
        for (const auto& r : doc.at("results")) {
          output.trials[t].push_back(TrialResultFromJson(r));
        }
        done[t] = true;
        ++output.resumed_trials;
      }
    } else {
      json manifest{{"format", "upliftfs.manifest"},
                    {"version", kModelFormatVersion},
                    {"software_version", kSoftwareVersion},
                    {"config_hash", hash},
                    {"config", ExperimentConfigToJson(config)},
                    {"a1", cfg.dgp.a1},
                    {"a2", cfg.dgp.a2}};
      manifest["config"].erase("output_dir");
      manifest["config"].erase("threads");
      WriteTextFile(manifest_path, manifest.dump(2) + "\n");
    }
  }

  std::vector<int> pending;
  for (int t = 0; t < cfg.trials; ++t) {
    if (!done[t]) pending.push_back(t);
  }
  std::atomic<size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&]() {
    for (size_t k = next++; k < pending.size(); k = next++) {
      const int t = pending[k];
      try {
        std::vector<TrialResult> results = RunTrial(cfg, t);
        if (persist) {
          json doc{{"trial", t}, {"results", json::array()}};
          for (const auto& r : results) doc["results"].push_back(TrialResultToJson(r));
          WriteTextFile(TrialPath(cfg.output_dir, t), doc.dump() + "\n");
        }
        output.trials[t] = std::move(results);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  const int threads = std::min<int>(EffectiveThreads(cfg.threads),
                                    std::max<size_t>(1, pending.size()));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int i = 0; i < threads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);

  std::vector<TrialResult> flat;
  for (const auto& trial : output.trials) flat.insert(flat.end(), trial.begin(), trial.end());
  output.report = Aggregate(flat);
  if (persist) {
    WriteTextFile((fs::path(cfg.output_dir) / "report.csv").string(),
                  ReportToCsv(output.report));
    WriteTextFile((fs::path(cfg.output_dir) / "report.json").string(),
                  ReportToJson(output.report, cfg).dump(2) + "\n");
  }
  return output;
}

}  // namespace upliftfs
