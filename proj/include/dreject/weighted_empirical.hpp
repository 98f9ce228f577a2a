#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <stdexcept>
#include <vector>

namespace dreject {

// Discrete predictive distribution: sorted support points with normalized
// nonnegative weights. Immutable after construction; this is the common
// representation produced by every weight-generating regressor.
class WeightedEmpirical {
 public:
  // Builds the distribution from a weighted sample. Duplicate support values
  // (exact binary equality) are merged with their weights summed; weights are
  // renormalized to sum to one; zero-weight atoms are dropped.
  WeightedEmpirical(std::span<const double> values, std::span<const double> weights) {
    if (values.empty()) {
      throw std::invalid_argument("WeightedEmpirical: empty support");
    }
    if (values.size() != weights.size()) {
      throw std::invalid_argument("WeightedEmpirical: values/weights length mismatch");
    }
    double total = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
      if (!std::isfinite(values[i]) || !std::isfinite(weights[i])) {
        throw std::invalid_argument("WeightedEmpirical: non-finite input");
      }
      if (weights[i] < 0.0) {
        throw std::invalid_argument("WeightedEmpirical: negative weight");
      }
      total += weights[i];
    }
    if (!(total > 0.0)) {
      throw std::invalid_argument("WeightedEmpirical: total weight is zero");
    }

    std::vector<std::size_t> order(values.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });

    // Leaving already-normalized weights untouched keeps construction
    // idempotent: rebuilding from (points, weights) reproduces the object.
    bool renormalize = std::abs(total - 1.0) > 1e-12;
    points_.reserve(values.size());
    weights_.reserve(values.size());
    for (std::size_t idx : order) {
      double w = renormalize ? weights[idx] / total : weights[idx];
      if (w == 0.0) continue;
      if (!points_.empty() && points_.back() == values[idx]) {
        weights_.back() += w;
      } else {
        points_.push_back(values[idx]);
        weights_.push_back(w);
      }
    }
    if (points_.empty()) {
      // All mass sat on zero-weight atoms; cannot happen with total > 0.
      throw std::invalid_argument("WeightedEmpirical: no support left");
    }
    cumulative_.resize(weights_.size());
    std::partial_sum(weights_.begin(), weights_.end(), cumulative_.begin());
    cumulative_.back() = 1.0;  // pin the top so quantile(1) is exact
  }

  static WeightedEmpirical point_mass(double value) {
    const double w = 1.0;
    return WeightedEmpirical(std::span<const double>(&value, 1),
                             std::span<const double>(&w, 1));
  }

  std::span<const double> points() const { return points_; }
  std::span<const double> weights() const { return weights_; }
  std::size_t size() const { return points_.size(); }
  double min() const { return points_.front(); }
  double max() const { return points_.back(); }

  // Right-continuous step CDF: total weight of support points <= u.
  double cdf(double u) const {
    auto it = std::upper_bound(points_.begin(), points_.end(), u);
    if (it == points_.begin()) return 0.0;
    return cumulative_[static_cast<std::size_t>(it - points_.begin()) - 1];
  }

  // Generalized inverse inf{t : cdf(t) >= p}, defined for p in (0, 1].
  double quantile(double p) const {
    if (!(p > 0.0 && p <= 1.0)) {
      throw std::invalid_argument("WeightedEmpirical::quantile: p must be in (0,1]");
    }
    auto it = std::lower_bound(cumulative_.begin(), cumulative_.end(), p);
    return points_[static_cast<std::size_t>(it - cumulative_.begin())];
  }

  double mean() const {
    double m = 0.0;
    for (std::size_t i = 0; i < points_.size(); ++i) m += weights_[i] * points_[i];
    return m;
  }

  bool operator==(const WeightedEmpirical& other) const {
    return points_ == other.points_ && weights_ == other.weights_;
  }

 private:
  std::vector<double> points_;
  std::vector<double> weights_;
  std::vector<double> cumulative_;
};

inline WeightedEmpirical from_weighted_sample(std::span<const double> values,
                                              std::span<const double> weights) {
  return WeightedEmpirical(values, weights);
}

inline WeightedEmpirical from_sample(std::span<const double> values) {
  std::vector<double> w(values.size(), 1.0);
  return WeightedEmpirical(values, w);
}

}  // namespace dreject
