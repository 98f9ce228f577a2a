#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "dreject/dataset.hpp"
#include "dreject/rng.hpp"

namespace dreject {

// Loads a comma-separated file with a header row; the named target column
// becomes Y, every other column (in header order) a feature.
inline LabeledDataset load_csv(const std::string& path, const std::string& target_column) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("load_csv: cannot open file: " + path);

  std::string line;
  if (!std::getline(in, line)) throw std::invalid_argument("load_csv: empty file: " + path);
  if (!line.empty() && line.back() == '\r') line.pop_back();

  std::vector<std::string> header;
  {
    std::istringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) header.push_back(cell);
  }
  std::size_t target_idx = header.size();
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == target_column) {
      target_idx = i;
      break;
    }
  }
  if (target_idx == header.size()) {
    throw std::invalid_argument("load_csv: target column '" + target_column + "' not found");
  }
  std::size_t d = header.size() - 1;
  if (d == 0) throw std::invalid_argument("load_csv: no feature columns besides the target");

  std::vector<double> features;
  std::vector<double> targets;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::istringstream ss(line);
    std::string cell;
    std::size_t col = 0;
    while (std::getline(ss, cell, ',')) {
      if (col >= header.size()) break;
      double value;
      try {
        std::size_t used = 0;
        value = std::stod(cell, &used);
        if (used != cell.size() || !std::isfinite(value)) throw std::invalid_argument(cell);
      } catch (const std::exception&) {
        throw std::invalid_argument("load_csv: non-numeric cell at row " + std::to_string(row) +
                                    ", column '" + header[col] + "'");
      }
      if (col == target_idx) {
        targets.push_back(value);
      } else {
        features.push_back(value);
      }
      ++col;
    }
    if (col != header.size()) {
      throw std::invalid_argument("load_csv: row " + std::to_string(row) + " has " +
                                  std::to_string(col) + " cells, expected " +
                                  std::to_string(header.size()));
    }
  }
  if (targets.empty()) throw std::invalid_argument("load_csv: no data rows in " + path);
  std::size_t n = targets.size();
  return LabeledDataset(FeatureMatrix(n, d, std::move(features)), std::move(targets));
}

// Three-way split fractions. Labeled and unlabeled sizes are floors of their
// fractions; the remainder goes to the test split.
struct SplitSpec {
  double labeled_frac = 0.5;
  double unlabeled_frac = 0.2;
  double test_frac = 0.3;
  std::uint64_t seed = 0;

  void validate() const {
    if (!(labeled_frac > 0.0 && unlabeled_frac > 0.0 && test_frac > 0.0)) {
      throw std::invalid_argument("SplitSpec: all fractions must be positive");
    }
    if (std::abs(labeled_frac + unlabeled_frac + test_frac - 1.0) > 1e-12) {
      throw std::invalid_argument("SplitSpec: fractions must sum to 1");
    }
  }
};

struct ThreeWaySplit {
  LabeledDataset labeled;
  FeatureMatrix unlabeled;  // targets discarded
  LabeledDataset test;
};

inline ThreeWaySplit split(const LabeledDataset& data, const SplitSpec& spec) {
  spec.validate();
  std::size_t n = data.size();
  if (n < 3) throw std::invalid_argument("split: need at least three rows");

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(derive_seed(spec.seed, seed_stream::split));
  rng.shuffle(order);

  auto n_labeled = static_cast<std::size_t>(spec.labeled_frac * static_cast<double>(n));
  auto n_unlabeled = static_cast<std::size_t>(spec.unlabeled_frac * static_cast<double>(n));
  if (n_labeled == 0 || n_unlabeled == 0 || n_labeled + n_unlabeled >= n) {
    throw std::invalid_argument("split: a split would be empty");
  }

  std::size_t d = data.dim();
  auto take = [&](std::size_t begin, std::size_t end) {
    std::vector<double> f;
    std::vector<double> y;
    f.reserve((end - begin) * d);
    y.reserve(end - begin);
    for (std::size_t i = begin; i < end; ++i) {
      auto row = data.features.row(order[i]);
      f.insert(f.end(), row.begin(), row.end());
      y.push_back(data.targets[order[i]]);
    }
    return LabeledDataset(FeatureMatrix(end - begin, d, std::move(f)), std::move(y));
  };

  LabeledDataset labeled = take(0, n_labeled);
  LabeledDataset unlabeled_full = take(n_labeled, n_labeled + n_unlabeled);
  LabeledDataset test = take(n_labeled + n_unlabeled, n);
  return ThreeWaySplit{std::move(labeled), std::move(unlabeled_full.features), std::move(test)};
}

// Per-feature z-scoring fitted on the labeled split. Constant features keep
// stddev 1 so they pass through unchanged; their indices are reported so
// callers can warn.
class Standardizer {
 public:
  explicit Standardizer(const FeatureMatrix& labeled) {
    std::size_t n = labeled.rows();
    std::size_t d = labeled.cols();
    mean_.assign(d, 0.0);
    stddev_.assign(d, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      auto row = labeled.row(i);
      for (std::size_t j = 0; j < d; ++j) mean_[j] += row[j];
    }
    for (std::size_t j = 0; j < d; ++j) mean_[j] /= static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) {
      auto row = labeled.row(i);
      for (std::size_t j = 0; j < d; ++j) {
        double c = row[j] - mean_[j];
        stddev_[j] += c * c;
      }
    }
    for (std::size_t j = 0; j < d; ++j) {
      stddev_[j] = n > 1 ? std::sqrt(stddev_[j] / static_cast<double>(n - 1)) : 0.0;
      if (stddev_[j] <= 0.0) {
        // Constant feature: identity transform so the column passes through.
        stddev_[j] = 1.0;
        mean_[j] = 0.0;
        constant_features_.push_back(j);
      }
    }
  }

  FeatureMatrix apply(const FeatureMatrix& m) const {
    if (m.cols() != mean_.size()) {
      throw std::invalid_argument("Standardizer: feature dimension mismatch");
    }
    std::vector<double> out(m.rows() * m.cols());
    for (std::size_t i = 0; i < m.rows(); ++i) {
      auto row = m.row(i);
      for (std::size_t j = 0; j < m.cols(); ++j) {
        out[i * m.cols() + j] = (row[j] - mean_[j]) / stddev_[j];
      }
    }
    return FeatureMatrix(m.rows(), m.cols(), std::move(out));
  }

  LabeledDataset apply(const LabeledDataset& data) const {
    return LabeledDataset(apply(data.features), data.targets);
  }

  const std::vector<double>& mean() const { return mean_; }
  const std::vector<double>& stddev() const { return stddev_; }
  const std::vector<std::size_t>& constant_features() const { return constant_features_; }

 private:
  std::vector<double> mean_;
  std::vector<double> stddev_;
  std::vector<std::size_t> constant_features_;
};

inline Standardizer standardize_fit(const LabeledDataset& labeled) {
  return Standardizer(labeled.features);
}

}  // namespace dreject
