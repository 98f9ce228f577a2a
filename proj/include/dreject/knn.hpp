#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "dreject/dataset.hpp"
#include "dreject/regressor.hpp"
#include "dreject/rng.hpp"
#include "dreject/scoring.hpp"
#include "dreject/weighted_empirical.hpp"

namespace dreject {

// Distributional k-nearest neighbors: weight 1/k on the k nearest training
// points by Euclidean distance. Distance ties are broken by original index,
// lower index counting as closer.
class KnnRegressor {
 public:
  KnnRegressor(LabeledDataset data, std::size_t k) : data_(std::move(data)), k_(k) {
    if (k_ < 1 || k_ > data_.size()) {
      throw std::invalid_argument("KnnRegressor: k out of range [1, n]");
    }
  }

  // Indices of the k selected neighbors (unordered).
  std::vector<std::size_t> neighbor_indices(std::span<const double> x) const {
    check_dim(x);
    std::vector<std::pair<double, std::size_t>> order(data_.size());
    for (std::size_t i = 0; i < data_.size(); ++i) {
      order[i] = {squared_distance(data_.features.row(i), x), i};
    }
    std::nth_element(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k_ - 1),
                     order.end());
    std::vector<std::size_t> idx(k_);
    for (std::size_t i = 0; i < k_; ++i) idx[i] = order[i].second;
    return idx;
  }

  std::vector<double> weights(std::span<const double> x) const {
    std::vector<double> w(data_.size(), 0.0);
    for (std::size_t i : neighbor_indices(x)) w[i] = 1.0 / static_cast<double>(k_);
    return w;
  }

  WeightedEmpirical predict(std::span<const double> x) const {
    auto idx = neighbor_indices(x);
    std::vector<double> values(idx.size());
    for (std::size_t i = 0; i < idx.size(); ++i) values[i] = data_.targets[idx[i]];
    std::vector<double> w(idx.size(), 1.0 / static_cast<double>(k_));
    return WeightedEmpirical(values, w);
  }

  std::size_t dim() const { return data_.dim(); }
  std::size_t train_size() const { return data_.size(); }
  std::size_t k() const { return k_; }

 private:
  void check_dim(std::span<const double> x) const {
    if (x.size() != data_.dim()) {
      throw std::invalid_argument("KnnRegressor: query dimension mismatch");
    }
  }

  LabeledDataset data_;
  std::size_t k_;
};

inline Regressor knn_fit(LabeledDataset data, std::size_t k) {
  return Regressor(KnnRegressor(std::move(data), k));
}

// Picks k from a grid by mean CRPS on an internal seeded holdout of the given
// fraction; ties go to the smallest k. Grid values must lie in [1, n]; values
// exceeding the holdout's fit subset are evaluated with k clamped to it.
inline std::size_t select_k(const LabeledDataset& data, std::span<const std::size_t> grid,
                            double val_fraction, std::uint64_t seed) {
  if (grid.empty()) throw std::invalid_argument("select_k: empty grid");
  if (!(val_fraction > 0.0 && val_fraction < 1.0)) {
    throw std::invalid_argument("select_k: val_fraction must be in (0,1)");
  }
  for (std::size_t k : grid) {
    if (k < 1 || k > data.size()) throw std::invalid_argument("select_k: grid value out of range");
  }
  if (data.size() < 2) throw std::invalid_argument("select_k: need at least two rows");

  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(derive_seed(seed, seed_stream::selection));
  rng.shuffle(order);

  std::size_t n_val = static_cast<std::size_t>(val_fraction * static_cast<double>(data.size()));
  n_val = std::clamp<std::size_t>(n_val, 1, data.size() - 1);
  std::size_t n_fit = data.size() - n_val;

  std::vector<std::size_t> ks(grid.begin(), grid.end());
  std::sort(ks.begin(), ks.end());
  ks.erase(std::unique(ks.begin(), ks.end()), ks.end());

  std::vector<double> score_sum(ks.size(), 0.0);
  std::vector<std::pair<double, std::size_t>> near(n_fit);
  std::vector<double> ordered_targets(n_fit);
  for (std::size_t v = 0; v < n_val; ++v) {
    auto xq = data.features.row(order[n_fit + v]);
    double yq = data.targets[order[n_fit + v]];
    for (std::size_t i = 0; i < n_fit; ++i) {
      near[i] = {squared_distance(data.features.row(order[i]), xq), order[i]};
    }
    std::sort(near.begin(), near.end());
    for (std::size_t i = 0; i < n_fit; ++i) ordered_targets[i] = data.targets[near[i].second];
    for (std::size_t gi = 0; gi < ks.size(); ++gi) {
      std::size_t k_eff = std::min(ks[gi], n_fit);
      std::vector<double> w(k_eff, 1.0 / static_cast<double>(k_eff));
      WeightedEmpirical pred(std::span<const double>(ordered_targets.data(), k_eff), w);
      score_sum[gi] += crps(pred, yq).value();
    }
  }

  std::size_t best = 0;
  for (std::size_t gi = 1; gi < ks.size(); ++gi) {
    if (score_sum[gi] < score_sum[best]) best = gi;
  }
  return ks[best];
}

}  // namespace dreject
