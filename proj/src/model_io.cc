#include "upliftfs/model_io.h"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "upliftfs/error.h"

namespace upliftfs {

using nlohmann::json;

namespace {

void CheckFormat(const json& j, const std::string& format) {
  if (!j.is_object() || j.value("format", "") != format) {
    throw Error("expected a '" + format + "' document");
  }
  if (j.value("version", 0) != kModelFormatVersion) {
    throw Error("unsupported " + format + " version " +
                std::to_string(j.value("version", 0)));
  }
}

}  // namespace

json ForestConfigToJson(const ForestConfig& c) {
  return json{{"n_trees", c.n_trees},
              {"max_depth", c.max_depth},
              {"min_samples_leaf", c.min_samples_leaf},
              {"max_features_per_split", c.max_features_per_split},
              {"seed", c.seed},
              {"bootstrap", c.bootstrap}};
}

ForestConfig ForestConfigFromJson(const json& j, const ForestConfig& d) {
  ForestConfig c;
  c.n_trees = j.value("n_trees", d.n_trees);
  c.max_depth = j.value("max_depth", d.max_depth);
  c.min_samples_leaf = j.value("min_samples_leaf", d.min_samples_leaf);
  c.max_features_per_split =
      j.value("max_features_per_split", d.max_features_per_split);
  c.seed = j.value("seed", d.seed);
  c.bootstrap = j.value("bootstrap", d.bootstrap);
  return c;
}

json ForestToJson(const StandardForest& forest) {
  json trees = json::array();
  for (const auto& tree : forest.trees) {
    json t;
    for (const auto& node : tree.nodes) {
      t["feature"].push_back(node.feature);
      t["threshold"].push_back(node.threshold);
      t["left"].push_back(node.left);
      t["right"].push_back(node.right);
      t["n_samples"].push_back(node.n_samples);
      t["impurity_decrease"].push_back(node.impurity_decrease);
      t["value"].push_back(node.value);
    }
    trees.push_back(std::move(t));
  }
  return json{{"format", "upliftfs.standard_forest"},
              {"version", kModelFormatVersion},
              {"config", ForestConfigToJson(forest.config)},
              {"feature_names", forest.feature_names},
              {"num_classes", forest.num_classes},
              {"trees", std::move(trees)}};
}

StandardForest ForestFromJson(const json& j) {
  CheckFormat(j, "upliftfs.standard_forest");
  StandardForest forest;
  forest.config = ForestConfigFromJson(j.at("config"));
  forest.feature_names = j.at("feature_names").get<std::vector<std::string>>();
  forest.num_classes = j.at("num_classes").get<int>();
  for (const auto& t : j.at("trees")) {
    DecisionTree tree;
    const size_t count = t.at("feature").size();
    for (size_t i = 0; i < count; ++i) {
      TreeNode node;
      node.feature = t["feature"][i].get<int>();
      node.threshold = t["threshold"][i].get<double>();
      node.left = t["left"][i].get<int>();
      node.right = t["right"][i].get<int>();
      node.n_samples = t["n_samples"][i].get<size_t>();
      node.impurity_decrease = t["impurity_decrease"][i].get<double>();
      node.value = t["value"][i].get<std::vector<double>>();
      tree.nodes.push_back(std::move(node));
    }
    if (tree.nodes.empty()) throw Error("forest document has an empty tree");
    forest.trees.push_back(std::move(tree));
  }
  if (forest.trees.empty()) throw Error("forest document has no trees");
  return forest;
}

json UpliftForestToJson(const UpliftForest& forest) {
  json trees = json::array();
  for (const auto& tree : forest.trees) {
    json t;
    for (const auto& node : tree.nodes) {
      t["feature"].push_back(node.feature);
      t["threshold"].push_back(node.threshold);
      t["left"].push_back(node.left);
      t["right"].push_back(node.right);
      t["gain"].push_back(node.gain);
      t["n_treat"].push_back(node.n_treat);
      t["n_control"].push_back(node.n_control);
      t["p_treat"].push_back(node.p_treat);
      t["q_control"].push_back(node.q_control);
      t["uplift"].push_back(node.uplift);
    }
    trees.push_back(std::move(t));
  }
  json config = ForestConfigToJson(forest.config.forest);
  config["divergence"] = DivergenceName(forest.config.kind);
  config["max_threshold_candidates"] = forest.config.max_threshold_candidates;
  config["size_weighted_importance"] = forest.config.size_weighted_importance;
  return json{{"format", "upliftfs.uplift_forest"},
              {"version", kModelFormatVersion},
              {"config", std::move(config)},
              {"feature_names", forest.feature_names},
              {"num_classes", forest.num_classes},
              {"trees", std::move(trees)}};
}

UpliftForest UpliftForestFromJson(const json& j) {
  CheckFormat(j, "upliftfs.uplift_forest");
  UpliftForest forest;
  const json& config = j.at("config");
  forest.config.forest = ForestConfigFromJson(config);
  forest.config.kind = ParseDivergence(config.value("divergence", "kl"));
  forest.config.max_threshold_candidates =
      config.value("max_threshold_candidates", 20);
  forest.config.size_weighted_importance =
      config.value("size_weighted_importance", false);
  forest.feature_names = j.at("feature_names").get<std::vector<std::string>>();
  forest.num_classes = j.at("num_classes").get<int>();
  for (const auto& t : j.at("trees")) {
    UpliftTree tree;
    const size_t count = t.at("feature").size();
    for (size_t i = 0; i < count; ++i) {
      UpliftNode node;
      node.feature = t["feature"][i].get<int>();
      node.threshold = t["threshold"][i].get<double>();
      node.left = t["left"][i].get<int>();
      node.right = t["right"][i].get<int>();
      node.gain = t["gain"][i].get<double>();
      node.n_treat = t["n_treat"][i].get<size_t>();
      node.n_control = t["n_control"][i].get<size_t>();
      node.p_treat = t["p_treat"][i].get<std::vector<double>>();
      node.q_control = t["q_control"][i].get<std::vector<double>>();
      node.uplift = t["uplift"][i].get<double>();
      tree.nodes.push_back(std::move(node));
    }
    if (tree.nodes.empty()) throw Error("uplift forest document has an empty tree");
    forest.trees.push_back(std::move(tree));
  }
  if (forest.trees.empty()) throw Error("uplift forest document has no trees");
  return forest;
}

const std::vector<std::string>& UpliftModel::feature_names() const {
  if (two_model) return two_model->model_treat.feature_names;
  if (uplift_forest) return uplift_forest->feature_names;
  throw Error("empty model");
}

std::vector<double> UpliftModel::PredictIte(const Dataset& data) const {
  std::vector<size_t> columns;
  for (const auto& name : feature_names()) columns.push_back(data.FeatureIndex(name));
  const Dataset view = data.SelectFeatures(columns);
  if (two_model) return two_model->PredictIte(view);
  return uplift_forest->PredictUplift(view);
}

json ModelToJson(const UpliftModel& model) {
  json j{{"format", "upliftfs.model"},
         {"version", kModelFormatVersion},
         {"kind", model.kind}};
  if (model.two_model) {
    j["treatment"] = ForestToJson(model.two_model->model_treat);
    j["control"] = ForestToJson(model.two_model->model_control);
  } else if (model.uplift_forest) {
    j["forest"] = UpliftForestToJson(*model.uplift_forest);
  } else {
    throw Error("empty model");
  }
  return j;
}

UpliftModel ModelFromJson(const json& j) {
  CheckFormat(j, "upliftfs.model");
  UpliftModel model;
  model.kind = j.at("kind").get<std::string>();
  if (model.kind == "two-model") {
    model.two_model = TwoModelLearner{ForestFromJson(j.at("treatment")),
                                      ForestFromJson(j.at("control"))};
  } else if (model.kind == "uplift-forest") {
    model.uplift_forest = UpliftForestFromJson(j.at("forest"));
  } else {
    throw Error("unknown model kind '" + model.kind + "'");
  }
  return model;
}

void SaveModel(const UpliftModel& model, const std::string& path) {
  WriteTextFile(path, ModelToJson(model).dump() + "\n");
}

UpliftModel LoadModel(const std::string& path) {
  return ModelFromJson(ReadJsonFile(path));
}

json DgpConfigToJson(const DgpConfig& c) {
  return json{{"n", c.n},
              {"m1", c.m1},
              {"m2", c.m2},
              {"m3", c.m3},
              {"a1", c.a1},
              {"a2", c.a2},
              {"noise_sd", c.noise_sd},
              {"periodic_frequency", c.periodic_frequency},
              {"seed", c.seed}};
}

DgpConfig DgpConfigFromJson(const json& j, const DgpConfig& d) {
  DgpConfig c;
  c.n = j.value("n", d.n);
  c.m1 = j.value("m1", d.m1);
  c.m2 = j.value("m2", d.m2);
  c.m3 = j.value("m3", d.m3);
  c.a1 = j.value("a1", d.a1);
  c.a2 = j.value("a2", d.a2);
  c.noise_sd = j.value("noise_sd", d.noise_sd);
  c.periodic_frequency = j.value("periodic_frequency", d.periodic_frequency);
  c.seed = j.value("seed", d.seed);
  return c;
}

json SidecarToJson(const SyntheticDataset& data) {
  json roles = json::array(), patterns = json::array();
  for (size_t j = 0; j < data.roles.size(); ++j) {
    roles.push_back(RoleName(data.roles[j]));
    patterns.push_back(PatternName(data.patterns[j]));
  }
  return json{{"format", "upliftfs.synthetic_truth"},
              {"version", kModelFormatVersion},
              {"feature_names", data.data.feature_names()},
              {"roles", std::move(roles)},
              {"patterns", std::move(patterns)},
              {"true_ite", data.true_ite},
              {"config", DgpConfigToJson(data.config)}};
}

SyntheticSidecar SidecarFromJson(const json& j) {
  CheckFormat(j, "upliftfs.synthetic_truth");
  SyntheticSidecar s;
  s.feature_names = j.at("feature_names").get<std::vector<std::string>>();
  for (const auto& r : j.at("roles")) s.roles.push_back(ParseRole(r.get<std::string>()));
  for (const auto& p : j.at("patterns")) {
    s.patterns.push_back(ParsePattern(p.get<std::string>()));
  }
  s.true_ite = j.at("true_ite").get<std::vector<double>>();
  s.config = DgpConfigFromJson(j.at("config"));
  return s;
}

json ReadJsonFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open file '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw Error("invalid JSON in '" + path + "': " + e.what());
  }
}

void WriteTextFile(const std::string& path, const std::string& contents) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw Error("cannot write '" + path + "'");
    out << contents;
    if (!out) throw Error("write failed for '" + path + "'");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw Error("cannot move '" + tmp + "' into place: " + ec.message());
}

}  // namespace upliftfs
