#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

namespace dreject {

// Dense row-major feature matrix. Immutable after construction.
class FeatureMatrix {
 public:
  FeatureMatrix(std::size_t rows, std::size_t cols, std::vector<double> data)
      : rows_(rows), cols_(cols), data_(std::move(data)) {
    if (rows_ == 0 || cols_ == 0) {
      throw std::invalid_argument("FeatureMatrix: empty matrix");
    }
    if (data_.size() != rows_ * cols_) {
      throw std::invalid_argument("FeatureMatrix: data size mismatch");
    }
    for (double v : data_) {
      if (!std::isfinite(v)) throw std::invalid_argument("FeatureMatrix: non-finite value");
    }
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::span<const double> row(std::size_t i) const {
    return std::span<const double>(data_.data() + i * cols_, cols_);
  }
  std::span<const double> data() const { return data_; }

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<double> data_;
};

// Supervised sample: features X (n x d) and targets Y (n).
struct LabeledDataset {
  FeatureMatrix features;
  std::vector<double> targets;

  LabeledDataset(FeatureMatrix f, std::vector<double> t)
      : features(std::move(f)), targets(std::move(t)) {
    if (targets.size() != features.rows()) {
      throw std::invalid_argument("LabeledDataset: feature/target row mismatch");
    }
    for (double y : targets) {
      if (!std::isfinite(y)) throw std::invalid_argument("LabeledDataset: non-finite target");
    }
  }

  std::size_t size() const { return targets.size(); }
  std::size_t dim() const { return features.cols(); }
};

inline double squared_distance(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

}  // namespace dreject
