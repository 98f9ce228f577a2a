#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "dreject/gaussian.hpp"
#include "dreject/weighted_empirical.hpp"

namespace dreject {

// Opaque evaluable CDF with declared finite integration bounds, outside of
// which the function is 0 / 1 up to tolerance. Known discontinuities (or
// steep features worth pre-splitting) are declared as breakpoints so the
// quadrature can place segment boundaries exactly on them.
class CdfFunction {
 public:
  CdfFunction(std::function<double(double)> cdf, double lower, double upper,
              std::vector<double> breakpoints = {})
      : cdf_(std::move(cdf)), lower_(lower), upper_(upper), breakpoints_(std::move(breakpoints)) {
    if (!(std::isfinite(lower_) && std::isfinite(upper_)) || !(lower_ < upper_)) {
      throw std::invalid_argument("CdfFunction: bounds must be finite with lower < upper");
    }
    std::sort(breakpoints_.begin(), breakpoints_.end());
    breakpoints_.erase(std::unique(breakpoints_.begin(), breakpoints_.end()),
                       breakpoints_.end());
    if (cdf_(lower_) > 1e-9) {
      throw std::invalid_argument("CdfFunction: cdf(lower) exceeds 1e-9");
    }
    if (cdf_(upper_) < 1.0 - 1e-9) {
      throw std::invalid_argument("CdfFunction: cdf(upper) below 1 - 1e-9");
    }
    check_monotone();
  }

  double operator()(double u) const { return cdf_(u); }
  double lower() const { return lower_; }
  double upper() const { return upper_; }
  const std::vector<double>& breakpoints() const { return breakpoints_; }

  static CdfFunction from(const WeightedEmpirical& d) {
    double span = std::max(d.max() - d.min(), 1.0);
    double lo = d.min() - 1e-3 * span;
    std::vector<double> brk(d.points().begin(), d.points().end());
    return CdfFunction([d](double u) { return d.cdf(u); }, lo, d.max(), std::move(brk));
  }

  // Bounds mean +/- 10 sigma; interior guide points speed up the adaptive
  // quadrature without changing its result.
  static CdfFunction from(const GaussianPredictive& g) {
    std::vector<double> brk;
    for (double z : {-8.0, -6.0, -4.0, -3.0, -2.0, -1.0, -0.5, 0.0, 0.5, 1.0, 2.0, 3.0, 4.0,
                     6.0, 8.0}) {
      brk.push_back(g.mean + z * g.stddev);
    }
    return CdfFunction([g](double u) { return g.cdf(u); }, g.mean - 10.0 * g.stddev,
                       g.mean + 10.0 * g.stddev, std::move(brk));
  }

 private:
  // Sampled monotonicity check over breakpoints and a uniform grid; a genuine
  // decrease anywhere in between would be caught up to grid resolution.
  void check_monotone() const {
    std::vector<double> probes;
    probes.reserve(breakpoints_.size() + 130);
    for (double b : breakpoints_) {
      if (b > lower_ && b < upper_) probes.push_back(b);
    }
    for (int i = 0; i <= 128; ++i) {
      probes.push_back(lower_ + (upper_ - lower_) * (static_cast<double>(i) / 128.0));
    }
    std::sort(probes.begin(), probes.end());
    double prev = -1e-12;
    for (double u : probes) {
      double v = cdf_(u);
      if (v < prev - 1e-10) {
        throw std::invalid_argument("CdfFunction: cdf is not monotone nondecreasing");
      }
      prev = std::max(prev, v);
    }
  }

  std::function<double(double)> cdf_;
  double lower_;
  double upper_;
  std::vector<double> breakpoints_;
};

}  // namespace dreject
