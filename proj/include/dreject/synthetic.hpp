#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "dreject/dataset.hpp"
#include "dreject/gaussian.hpp"
#include "dreject/math.hpp"
#include "dreject/rng.hpp"
#include "dreject/scoring.hpp"

namespace dreject {

// Data model with analytically known conditional law: X uniform on [0,1]^d,
// Y | X = x ~ Normal(m(x), sigma(x)^2) with polynomial mean (in the first
// coordinate) and affine sigma. Affine sigma keeps every oracle quantity
// (entropy, threshold, divergence) exact or cheaply integrable.
struct SyntheticModel {
  std::size_t dim = 1;
  std::vector<double> mean_poly = {0.0, 1.0};     // sum_k c_k x0^k
  std::vector<double> sigma_affine = {0.0, 1.0};  // a0 + sum_j a_j x_j, size dim+1

  void validate() const {
    if (dim < 1) throw std::invalid_argument("SyntheticModel: dim must be >= 1");
    if (sigma_affine.size() != dim + 1) {
      throw std::invalid_argument("SyntheticModel: sigma needs dim+1 affine coefficients");
    }
    if (mean_poly.empty()) throw std::invalid_argument("SyntheticModel: empty mean polynomial");
    double lo = sigma_affine[0];
    for (std::size_t j = 1; j < sigma_affine.size(); ++j) lo += std::min(sigma_affine[j], 0.0);
    if (lo < -1e-12) {
      throw std::invalid_argument("SyntheticModel: sigma must be >= 0 on the unit cube");
    }
  }

  double mean(std::span<const double> x) const {
    double m = 0.0;
    for (std::size_t k = mean_poly.size(); k-- > 0;) m = m * x[0] + mean_poly[k];
    return m;
  }

  double sigma(std::span<const double> x) const {
    double s = sigma_affine[0];
    for (std::size_t j = 0; j < dim; ++j) s += sigma_affine[j + 1] * x[j];
    return std::max(s, 0.0);
  }

  bool sigma_constant() const {
    for (std::size_t j = 1; j < sigma_affine.size(); ++j) {
      if (sigma_affine[j] != 0.0) return false;
    }
    return true;
  }
};

inline SyntheticModel synthetic_model_by_name(const std::string& name) {
  if (name == "sigma-linear") {
    return SyntheticModel{1, {0.0, 1.0}, {0.0, 1.0}};  // m(x) = x, sigma(x) = x
  }
  if (name == "homoscedastic") {
    return SyntheticModel{1, {0.0, 1.0}, {1.0, 0.0}};  // constant sigma; degenerate threshold
  }
  throw std::invalid_argument("unknown synthetic model: " + name);
}

inline LabeledDataset sample(const SyntheticModel& model, std::size_t n, std::uint64_t seed) {
  model.validate();
  if (n < 1) throw std::invalid_argument("sample: n must be >= 1");
  Rng rng(derive_seed(seed, seed_stream::sample));
  std::vector<double> features(n * model.dim);
  std::vector<double> targets(n);
  std::vector<double> x(model.dim);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < model.dim; ++j) {
      x[j] = rng.uniform01();
      features[i * model.dim + j] = x[j];
    }
    double s = model.sigma(x);
    double z = rng.normal();  // consumed even when sigma == 0 to keep streams aligned
    targets[i] = model.mean(x) + s * z;
  }
  return LabeledDataset(FeatureMatrix(n, model.dim, std::move(features)), std::move(targets));
}

inline FeatureMatrix sample_features(const SyntheticModel& model, std::size_t n,
                                     std::uint64_t seed) {
  model.validate();
  if (n < 1) throw std::invalid_argument("sample_features: n must be >= 1");
  Rng rng(derive_seed(seed, seed_stream::sample));
  std::vector<double> features(n * model.dim);
  for (std::size_t i = 0; i < n * model.dim; ++i) features[i] = rng.uniform01();
  return FeatureMatrix(n, model.dim, std::move(features));
}

// Entropy of the true conditional law: sigma(x) / sqrt(pi).
inline Score true_entropy(const SyntheticModel& model, std::span<const double> x) {
  return Score(model.sigma(x) * kInvSqrtPi);
}

// Threshold of the optimal fixed-rate rule: the (1-eps) quantile of the
// entropy of the true conditional law.
struct OracleRule {
  double lambda_eps = 0.0;
  double epsilon = 0.0;
};

inline double sigma_affine_at(const SyntheticModel& model, double x0) {
  std::vector<double> x(model.dim, x0);
  return model.sigma(x);
}

inline OracleRule oracle_lambda(const SyntheticModel& model, double epsilon,
                                std::size_t mc_size = 200000, std::uint64_t seed = 1) {
  model.validate();
  if (!(epsilon > 0.0 && epsilon < 1.0)) {
    throw std::invalid_argument("oracle_lambda: epsilon must be in (0,1)");
  }
  if (model.dim == 1) {
    // sigma(X) is uniform between its endpoint values; quantile is closed form.
    double s0 = sigma_affine_at(model, 0.0);
    double s1 = sigma_affine_at(model, 1.0);
    double lo = std::min(s0, s1);
    double hi = std::max(s0, s1);
    return OracleRule{(lo + (1.0 - epsilon) * (hi - lo)) * kInvSqrtPi, epsilon};
  }
  Rng rng(derive_seed(seed, seed_stream::monte_carlo));
  std::vector<double> ent(mc_size);
  std::vector<double> x(model.dim);
  for (std::size_t i = 0; i < mc_size; ++i) {
    for (std::size_t j = 0; j < model.dim; ++j) x[j] = rng.uniform01();
    ent[i] = model.sigma(x) * kInvSqrtPi;
  }
  std::sort(ent.begin(), ent.end());
  auto rank = static_cast<std::size_t>(
      std::ceil((1.0 - epsilon) * static_cast<double>(mc_size)));
  rank = std::clamp<std::size_t>(rank, 1, mc_size);
  return OracleRule{ent[rank - 1], epsilon};
}

// A predictor under evaluation: nullopt is a rejection, otherwise the emitted
// predictive law (discrete for fitted models, Gaussian for oracle baselines).
using PredictiveLaw = std::variant<WeightedEmpirical, GaussianPredictive>;
using SelectivePredictor = std::function<std::optional<PredictiveLaw>(std::span<const double>)>;

inline Score entropy_of(const PredictiveLaw& law) {
  return std::visit([](const auto& d) { return entropy(d); }, law);
}

namespace detail {

inline Score divergence_to_conditional(const PredictiveLaw& pred, const SyntheticModel& model,
                                       std::span<const double> x) {
  double s = model.sigma(x);
  double m = model.mean(x);
  if (s > 0.0) {
    GaussianPredictive truth(m, s);
    return std::visit([&](const auto& d) { return divergence(d, truth); }, pred);
  }
  WeightedEmpirical truth = WeightedEmpirical::point_mass(m);
  return std::visit([&](const auto& d) { return divergence(d, truth); }, pred);
}

}  // namespace detail

// The predictor that attains zero excess risk: emits the true conditional law
// and applies the oracle threshold to the true entropy.
inline SelectivePredictor oracle_predictor(const SyntheticModel& model, const OracleRule& rule) {
  return [model, rule](std::span<const double> x) -> std::optional<PredictiveLaw> {
    if (true_entropy(model, x).value() > rule.lambda_eps) return std::nullopt;
    double s = model.sigma(x);
    double m = model.mean(x);
    if (s > 0.0) return PredictiveLaw(GaussianPredictive(m, s));
    return PredictiveLaw(WeightedEmpirical::point_mass(m));
  };
}

// Monte-Carlo evaluation of the excess-risk decomposition: an estimation term
// (divergence on acceptance) plus a disagreement term (entropy margin where
// the predictor and the oracle rule differ).
inline Score excess_risk(const SelectivePredictor& predictor, const SyntheticModel& model,
                         const OracleRule& rule, std::size_t mc_size, std::uint64_t seed) {
  model.validate();
  if (mc_size < 1) throw std::invalid_argument("excess_risk: mc_size must be >= 1");
  if (!(rule.lambda_eps >= 0.0)) {
    throw std::invalid_argument("excess_risk: oracle threshold must be >= 0");
  }
  Rng rng(derive_seed(seed, seed_stream::monte_carlo));
  std::vector<double> x(model.dim);
  double acc = 0.0;
  for (std::size_t i = 0; i < mc_size; ++i) {
    for (std::size_t j = 0; j < model.dim; ++j) x[j] = rng.uniform01();
    std::optional<PredictiveLaw> out = predictor(x);
    double ent = true_entropy(model, x).value();
    bool oracle_accepts = ent <= rule.lambda_eps;
    if (out.has_value()) {
      acc += detail::divergence_to_conditional(*out, model, x).value();
    }
    if (out.has_value() != oracle_accepts) {
      acc += std::abs(ent - rule.lambda_eps);
    }
  }
  return Score(acc / static_cast<double>(mc_size));
}

// Finite universe for exhaustive optimality checks: X takes finitely many
// values with known masses and conditional entropies.
struct FinitePoint {
  double mass = 0.0;
  double entropy = 0.0;
};

struct FiniteModel {
  std::vector<FinitePoint> points;
};

struct BruteForceResult {
  std::vector<bool> accept;
  double risk = 0.0;
};

// Exhaustive minimization of lambda + sum_{accepted} mass * (entropy - lambda)
// over all accept/reject assignments. Equal-risk ties prefer the larger
// accept set, matching acceptance on the entropy == lambda boundary.
inline BruteForceResult brute_force_optimal(const FiniteModel& model, double lambda) {
  std::size_t n = model.points.size();
  if (n == 0 || n > 20) {
    throw std::invalid_argument("brute_force_optimal: support size must be in [1, 20]");
  }
  if (lambda < 0.0) throw std::invalid_argument("brute_force_optimal: lambda must be >= 0");
  for (const FinitePoint& p : model.points) {
    if (p.mass < 0.0 || !std::isfinite(p.mass) || !std::isfinite(p.entropy)) {
      throw std::invalid_argument("brute_force_optimal: invalid finite model point");
    }
  }

  std::uint32_t best_mask = 0;
  double best_risk = lambda;  // empty accept set
  int best_count = 0;
  for (std::uint32_t mask = 1; mask < (1u << n); ++mask) {
    double risk = lambda;
    for (std::size_t i = 0; i < n; ++i) {
      if (mask & (1u << i)) {
        risk += model.points[i].mass * (model.points[i].entropy - lambda);
      }
    }
    int count = std::popcount(mask);
    if (risk < best_risk || (risk == best_risk && count > best_count)) {
      best_risk = risk;
      best_mask = mask;
      best_count = count;
    }
  }
  BruteForceResult result;
  result.accept.resize(n);
  for (std::size_t i = 0; i < n; ++i) result.accept[i] = (best_mask >> i) & 1u;
  result.risk = best_risk;
  return result;
}

}  // namespace dreject
