#include "upliftfs/dataset.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

#include "upliftfs/error.h"
#include "upliftfs/random.h"

namespace upliftfs {

Dataset::Dataset(std::vector<std::string> feature_names,
                 std::vector<std::vector<double>> columns,
                 std::vector<int> treatment, std::vector<int> outcome,
                 int num_classes)
    : feature_names_(std::move(feature_names)),
      columns_(std::move(columns)),
      treatment_(std::move(treatment)),
      outcome_(std::move(outcome)) {
  const size_t n = treatment_.size();
  if (n == 0) throw Error("dataset has no rows");
  if (columns_.empty()) throw Error("dataset has no features");
  if (feature_names_.size() != columns_.size()) {
    throw Error("feature name count does not match column count");
  }
  if (outcome_.size() != n) throw Error("outcome length differs from treatment");
  std::set<std::string> seen;
  for (size_t j = 0; j < columns_.size(); ++j) {
    if (!seen.insert(feature_names_[j]).second) {
      throw Error("duplicate feature name '" + feature_names_[j] + "'");
    }
    if (columns_[j].size() != n) {
      throw Error("feature '" + feature_names_[j] + "' has wrong length");
    }
    for (size_t i = 0; i < n; ++i) {
      if (!std::isfinite(columns_[j][i])) {
        throw Error("non-finite value at row " + std::to_string(i + 1) +
                    ", column '" + feature_names_[j] + "'");
      }
    }
  }
  int max_class = 0;
  for (size_t i = 0; i < n; ++i) {
    if (treatment_[i] != 0 && treatment_[i] != 1) {
      throw Error("treatment value outside {0,1} at row " +
                  std::to_string(i + 1));
    }
    if (outcome_[i] < 0) {
      throw Error("negative outcome at row " + std::to_string(i + 1));
    }
    max_class = std::max(max_class, outcome_[i]);
    num_treated_ += treatment_[i];
  }
  num_classes_ = num_classes > 0 ? num_classes : std::max(2, max_class + 1);
  if (max_class >= num_classes_) {
    throw Error("outcome class exceeds num_classes");
  }
}

std::vector<double> Dataset::Row(size_t row) const {
  std::vector<double> out(columns_.size());
  for (size_t j = 0; j < columns_.size(); ++j) out[j] = columns_[j][row];
  return out;
}

void Dataset::RequireBothArms() const {
  if (!HasBothArms()) {
    throw Error("data must contain both treatment and control rows");
  }
}

Dataset Dataset::SelectRows(std::span<const size_t> rows) const {
  std::vector<std::vector<double>> cols(columns_.size());
  for (size_t j = 0; j < columns_.size(); ++j) {
    cols[j].reserve(rows.size());
    for (size_t r : rows) cols[j].push_back(columns_[j].at(r));
  }
  std::vector<int> w, y;
  w.reserve(rows.size());
  y.reserve(rows.size());
  for (size_t r : rows) {
    w.push_back(treatment_.at(r));
    y.push_back(outcome_.at(r));
  }
  return Dataset(feature_names_, std::move(cols), std::move(w), std::move(y),
                 num_classes_);
}

Dataset Dataset::SelectFeatures(std::span<const size_t> features) const {
  std::vector<std::string> names;
  std::vector<std::vector<double>> cols;
  for (size_t j : features) {
    names.push_back(feature_names_.at(j));
    cols.push_back(columns_.at(j));
  }
  return Dataset(std::move(names), std::move(cols), treatment_, outcome_,
                 num_classes_);
}

Dataset Dataset::ArmRows(int arm) const {
  std::vector<size_t> rows;
  for (size_t i = 0; i < num_rows(); ++i) {
    if (treatment_[i] == arm) rows.push_back(i);
  }
  if (rows.empty()) throw Error("arm " + std::to_string(arm) + " is empty");
  return SelectRows(rows);
}

size_t Dataset::FeatureIndex(const std::string& name) const {
  auto it = std::find(feature_names_.begin(), feature_names_.end(), name);
  if (it == feature_names_.end()) throw Error("unknown feature '" + name + "'");
  return static_cast<size_t>(it - feature_names_.begin());
}

namespace {

std::vector<std::string> SplitLine(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  for (auto& c : cells) {
    const auto b = c.find_first_not_of(" \t\r");
    const auto e = c.find_last_not_of(" \t\r");
    c = b == std::string::npos ? std::string() : c.substr(b, e - b + 1);
  }
  return cells;
}

bool ParseReal(const std::string& cell, double* out) {
  if (cell.empty()) return false;
  const char* first = cell.data();
  const char* last = cell.data() + cell.size();
  if (*first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, *out);
  return ec == std::errc() && ptr == last && std::isfinite(*out);
}

bool ParseBinary(const std::string& cell, int* out) {
  const char* last = cell.data() + cell.size();
  auto [ptr, ec] = std::from_chars(cell.data(), last, *out);
  return ec == std::errc() && ptr == last && (*out == 0 || *out == 1);
}

}  // namespace

Dataset LoadCsv(const std::string& path, const std::string& treatment_col,
                const std::string& outcome_col) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open file '" + path + "'");
  std::string line;
  if (!std::getline(in, line)) throw Error("missing header row in '" + path + "'");
  const std::vector<std::string> header = SplitLine(line);
  std::set<std::string> unique(header.begin(), header.end());
  if (unique.size() != header.size()) throw Error("duplicate column in header");

  auto locate = [&](const std::string& name) {
    auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw Error("missing column '" + name + "'");
    return static_cast<size_t>(it - header.begin());
  };
  const size_t w_col = locate(treatment_col);
  const size_t y_col = locate(outcome_col);
  if (w_col == y_col) throw Error("treatment and outcome columns coincide");

  std::vector<size_t> feature_cols;
  std::vector<std::string> names;
  for (size_t c = 0; c < header.size(); ++c) {
    if (c != w_col && c != y_col) {
      feature_cols.push_back(c);
      names.push_back(header[c]);
    }
  }
  std::vector<std::vector<double>> cols(feature_cols.size());
  std::vector<int> w, y;
  size_t row = 0;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    ++row;
    const std::vector<std::string> cells = SplitLine(line);
    if (cells.size() != header.size()) {
      throw Error("row " + std::to_string(row) + " has " +
                  std::to_string(cells.size()) + " cells, expected " +
                  std::to_string(header.size()));
    }
    int v;
    if (!ParseBinary(cells[w_col], &v)) {
      throw Error("treatment value outside {0,1} at row " + std::to_string(row));
    }
    w.push_back(v);
    if (!ParseBinary(cells[y_col], &v)) {
      throw Error("outcome value outside {0,1} at row " + std::to_string(row));
    }
    y.push_back(v);
    for (size_t k = 0; k < feature_cols.size(); ++k) {
      double x;
      if (!ParseReal(cells[feature_cols[k]], &x)) {
        throw Error("invalid numeric value at (row " + std::to_string(row) +
                    ", column \"" + names[k] + "\")");
      }
      cols[k].push_back(x);
    }
  }
  if (row == 0) throw Error("file '" + path + "' has no data rows");
  return Dataset(std::move(names), std::move(cols), std::move(w), std::move(y));
}

void WriteCsv(const Dataset& data, const std::string& path,
              const std::string& treatment_col,
              const std::string& outcome_col) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write '" + path + "'");
  for (const auto& name : data.feature_names()) out << name << ',';
  out << treatment_col << ',' << outcome_col << '\n';
  char buf[64];
  for (size_t i = 0; i < data.num_rows(); ++i) {
    for (size_t j = 0; j < data.num_features(); ++j) {
      auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), data.value(i, j));
      out.write(buf, ptr - buf);
      out << ',';
    }
    out << data.treatment()[i] << ',' << data.outcome()[i] << '\n';
  }
  if (!out) throw Error("write failed for '" + path + "'");
}

SplitPair TrainTestSplit(const Dataset& data, double test_fraction,
                         uint64_t seed) {
  const size_t n = data.num_rows();
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
    throw Error("test fraction must lie in (0, 1)");
  }
  if (n < 2) throw Error("cannot split fewer than 2 rows");
  long test_n = std::lround(static_cast<double>(n) * test_fraction);
  test_n = std::clamp<long>(test_n, 1, static_cast<long>(n) - 1);

  std::vector<size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  RandomEngine rng(seed);
  // Explicit Fisher-Yates; std::shuffle's draw sequence is unspecified.
  for (size_t i = n - 1; i > 0; --i) {
    const size_t j = static_cast<size_t>(rng() % (i + 1));
    std::swap(perm[i], perm[j]);
  }
  std::vector<size_t> test_rows(perm.begin(), perm.begin() + test_n);
  std::vector<size_t> train_rows(perm.begin() + test_n, perm.end());
  std::sort(test_rows.begin(), test_rows.end());
  std::sort(train_rows.begin(), train_rows.end());

  SplitPair split{data.SelectRows(train_rows), data.SelectRows(test_rows), seed,
                  std::move(train_rows), std::move(test_rows), {}};
  if (!split.train.HasBothArms()) {
    split.warnings.push_back("training half lacks one treatment arm");
  }
  if (!split.test.HasBothArms()) {
    split.warnings.push_back("test half lacks one treatment arm");
  }
  return split;
}

FeatureRanking FeatureRanking::FromScores(std::vector<double> scores,
                                          std::string method_name) {
  FeatureRanking r;
  r.order.resize(scores.size());
  std::iota(r.order.begin(), r.order.end(), 0);
  std::stable_sort(r.order.begin(), r.order.end(), [&](size_t a, size_t b) {
    return scores[a] > scores[b];
  });
  r.scores = std::move(scores);
  r.method_name = std::move(method_name);
  return r;
}

std::vector<size_t> FeatureRanking::Top(size_t k) const {
  k = std::min(k, order.size());
  return {order.begin(), order.begin() + k};
}

std::vector<size_t> FeatureRanking::Ranks() const {
  std::vector<size_t> ranks(order.size());
  for (size_t j = 0; j < order.size(); ++j) ranks[order[j]] = j + 1;
  return ranks;
}

}  // namespace upliftfs
