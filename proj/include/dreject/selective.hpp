#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "dreject/dataset.hpp"
#include "dreject/regressor.hpp"
#include "dreject/rng.hpp"
#include "dreject/scoring.hpp"

namespace dreject {

// Sorted jittered entropy scores from the unlabeled split. Evaluating its
// empirical CDF at a query score is what calibrates the rejection rate.
class CalibrationTable {
 public:
  CalibrationTable(std::vector<double> scores, double jitter_magnitude, std::uint64_t seed)
      : scores_(std::move(scores)), jitter_magnitude_(jitter_magnitude), seed_(seed) {
    if (scores_.empty()) throw std::invalid_argument("CalibrationTable: no scores");
    if (jitter_magnitude_ < 0.0) {
      throw std::invalid_argument("CalibrationTable: jitter magnitude must be >= 0");
    }
    for (double s : scores_) {
      if (!std::isfinite(s)) throw std::invalid_argument("CalibrationTable: non-finite score");
    }
    std::sort(scores_.begin(), scores_.end());
  }

  // Fraction of stored scores <= s.
  double ecdf(double s) const {
    auto it = std::upper_bound(scores_.begin(), scores_.end(), s);
    return static_cast<double>(it - scores_.begin()) / static_cast<double>(scores_.size());
  }

  std::span<const double> scores() const { return scores_; }
  std::size_t size() const { return scores_.size(); }
  double jitter_magnitude() const { return jitter_magnitude_; }
  std::uint64_t seed() const { return seed_; }

 private:
  std::vector<double> scores_;
  double jitter_magnitude_;
  std::uint64_t seed_;
};

// Builds the table: for each unlabeled row, the entropy of the predicted
// distribution plus an independent U[0, u] perturbation.
inline CalibrationTable entropy_scores(const Regressor& regressor, const FeatureMatrix& unlabeled,
                                       double jitter_magnitude, std::uint64_t seed) {
  if (unlabeled.cols() != regressor.dim()) {
    throw std::invalid_argument("entropy_scores: feature dimension mismatch");
  }
  if (jitter_magnitude < 0.0) {
    throw std::invalid_argument("entropy_scores: jitter magnitude must be >= 0");
  }
  Rng rng(derive_seed(seed, seed_stream::calibration));
  std::vector<double> scores(unlabeled.rows());
  for (std::size_t i = 0; i < unlabeled.rows(); ++i) {
    double ent = entropy(regressor.predict(unlabeled.row(i))).value();
    if (!std::isfinite(ent)) throw std::invalid_argument("entropy_scores: non-finite entropy");
    scores[i] = ent + rng.uniform(0.0, jitter_magnitude);
  }
  return CalibrationTable(std::move(scores), jitter_magnitude, seed);
}

// Either an accepted predictive distribution or the reject symbol.
class RejectPrediction {
 public:
  static RejectPrediction accept(WeightedEmpirical d) {
    return RejectPrediction(std::optional<WeightedEmpirical>(std::move(d)));
  }
  static RejectPrediction reject() { return RejectPrediction(std::nullopt); }

  bool accepted() const { return dist_.has_value(); }
  const WeightedEmpirical& distribution() const {
    if (!dist_) throw std::logic_error("RejectPrediction: rejected, no distribution");
    return *dist_;
  }

 private:
  explicit RejectPrediction(std::optional<WeightedEmpirical> d) : dist_(std::move(d)) {}
  std::optional<WeightedEmpirical> dist_;
};

// Target-rejection-rate policy. epsilon = 0 never rejects and epsilon = 1
// always rejects; strictly inside (0,1) the empirical-CDF rule applies.
class EpsilonPolicy {
 public:
  EpsilonPolicy(double epsilon, CalibrationTable table)
      : epsilon_(epsilon), table_(std::move(table)) {
    if (!(epsilon_ >= 0.0 && epsilon_ <= 1.0)) {
      throw std::invalid_argument("EpsilonPolicy: epsilon must be in [0,1]");
    }
  }

  double epsilon() const { return epsilon_; }
  const CalibrationTable& table() const { return table_; }

  // Acceptance rule on a jittered entropy score.
  bool accepts_score(double jittered_entropy) const {
    if (epsilon_ == 0.0) return true;
    if (epsilon_ == 1.0) return false;
    return table_.ecdf(jittered_entropy) <= 1.0 - epsilon_;
  }

 private:
  double epsilon_;
  CalibrationTable table_;
};

// Plug-in epsilon-predictor: accept with the fitted distribution when the
// calibrated empirical CDF of the jittered entropy stays below 1 - epsilon.
// zeta is the query's own perturbation, drawn from U[0, u] by the caller.
inline RejectPrediction predict_epsilon(const EpsilonPolicy& policy, const Regressor& regressor,
                                        std::span<const double> x, double zeta) {
  if (!(zeta >= 0.0 && zeta <= policy.table().jitter_magnitude())) {
    throw std::invalid_argument("predict_epsilon: zeta outside [0, jitter magnitude]");
  }
  WeightedEmpirical pred = regressor.predict(x);
  double score = entropy(pred).value() + zeta;
  if (policy.accepts_score(score)) return RejectPrediction::accept(std::move(pred));
  return RejectPrediction::reject();
}

// Fixed-threshold rule: accept when the predicted entropy is at most lambda.
// Pass +infinity to never reject.
inline RejectPrediction predict_lambda(const Regressor& regressor, double lambda,
                                       std::span<const double> x) {
  if (std::isnan(lambda) || lambda < 0.0) {
    throw std::invalid_argument("predict_lambda: lambda must be >= 0");
  }
  WeightedEmpirical pred = regressor.predict(x);
  if (entropy(pred).value() <= lambda) return RejectPrediction::accept(std::move(pred));
  return RejectPrediction::reject();
}

}  // namespace dreject
