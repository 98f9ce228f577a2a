#pragma once

#include <cmath>
#include <stdexcept>

#include "dreject/math.hpp"

namespace dreject {

// Gaussian predictive distribution, the closed-form scoring path.
struct GaussianPredictive {
  double mean = 0.0;
  double stddev = 1.0;

  GaussianPredictive(double mean_, double stddev_) : mean(mean_), stddev(stddev_) {
    if (!(std::isfinite(mean) && std::isfinite(stddev)) || stddev <= 0.0) {
      throw std::invalid_argument("GaussianPredictive: stddev must be positive and finite");
    }
  }

  double cdf(double u) const { return normal_cdf((u - mean) / stddev); }
  double quantile(double p) const { return mean + stddev * normal_quantile(p); }

  bool operator==(const GaussianPredictive&) const = default;
};

}  // namespace dreject
