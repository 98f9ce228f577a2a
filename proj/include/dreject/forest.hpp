#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "dreject/dataset.hpp"
#include "dreject/regressor.hpp"
#include "dreject/rng.hpp"
#include "dreject/weighted_empirical.hpp"

namespace dreject {

struct ForestParams {
  std::size_t num_trees = 1000;
  double sample_fraction = 0.9;
  std::size_t min_node_size = 1;
  std::size_t mtry = 0;  // 0 = max(1, d/3)
  std::uint64_t seed = 0;

  void validate(std::size_t dim) const {
    if (num_trees < 1) throw std::invalid_argument("ForestParams: num_trees must be >= 1");
    if (!(sample_fraction > 0.0 && sample_fraction <= 1.0)) {
      throw std::invalid_argument("ForestParams: sample_fraction must be in (0,1]");
    }
    if (min_node_size < 1) throw std::invalid_argument("ForestParams: min_node_size must be >= 1");
    if (mtry > dim) throw std::invalid_argument("ForestParams: mtry exceeds feature count");
  }
};

// Ensemble of CART regression trees grown on subsamples without replacement.
// Splits minimize within-child variance (sum of squared errors); the query
// weight on training point i is (1/B) sum_b 1{i in leaf_b(x)} / |leaf_b(x)|
// over in-bag points, so weights are nonnegative and sum to one.
//
// This is a variance-split stand-in for distributional forests: only the
// leaf-weight aggregation matters downstream.
class ForestRegressor {
 public:
  ForestRegressor(LabeledDataset data, ForestParams params)
      : data_(std::move(data)), params_(params) {
    params_.validate(data_.dim());
    if (data_.size() < 2) throw std::invalid_argument("ForestRegressor: need at least two rows");
    if (params_.mtry == 0) params_.mtry = std::max<std::size_t>(1, data_.dim() / 3);
    trees_.reserve(params_.num_trees);
    for (std::size_t b = 0; b < params_.num_trees; ++b) {
      trees_.push_back(build_tree(derive_seed(params_.seed, b)));
    }
  }

  std::vector<double> weights(std::span<const double> x) const {
    check_dim(x);
    std::vector<double> w(data_.size(), 0.0);
    double inv_b = 1.0 / static_cast<double>(trees_.size());
    for (const Tree& tree : trees_) {
      std::uint32_t node = 0;
      while (tree.nodes[node].feature >= 0) {
        const Node& nd = tree.nodes[node];
        node = (x[static_cast<std::size_t>(nd.feature)] <= nd.threshold) ? nd.left : nd.right;
      }
      const Node& leaf = tree.nodes[node];
      double share = inv_b / static_cast<double>(leaf.end - leaf.begin);
      for (std::uint32_t j = leaf.begin; j < leaf.end; ++j) w[tree.items[j]] += share;
    }
    return w;
  }

  WeightedEmpirical predict(std::span<const double> x) const {
    std::vector<double> w = weights(x);
    std::vector<double> values;
    std::vector<double> ws;
    values.reserve(w.size());
    ws.reserve(w.size());
    for (std::size_t i = 0; i < w.size(); ++i) {
      if (w[i] > 0.0) {
        values.push_back(data_.targets[i]);
        ws.push_back(w[i]);
      }
    }
    return WeightedEmpirical(values, ws);
  }

  std::size_t dim() const { return data_.dim(); }
  std::size_t train_size() const { return data_.size(); }
  const ForestParams& params() const { return params_; }

 private:
  struct Node {
    std::int32_t feature = -1;  // -1 marks a leaf
    double threshold = 0.0;
    std::uint32_t left = 0;
    std::uint32_t right = 0;
    std::uint32_t begin = 0;  // leaf item range
    std::uint32_t end = 0;
  };

  struct Tree {
    std::vector<Node> nodes;
    std::vector<std::uint32_t> items;  // in-bag indices, arranged by leaf
  };

  void check_dim(std::span<const double> x) const {
    if (x.size() != data_.dim()) {
      throw std::invalid_argument("ForestRegressor: query dimension mismatch");
    }
  }

  Tree build_tree(std::uint64_t seed) const {
    Rng rng(seed);
    std::size_t n = data_.size();
    std::size_t bag = std::max<std::size_t>(
        1, static_cast<std::size_t>(params_.sample_fraction * static_cast<double>(n)));

    // Partial Fisher-Yates draw of `bag` indices without replacement.
    std::vector<std::uint32_t> pool(n);
    std::iota(pool.begin(), pool.end(), 0u);
    for (std::size_t i = 0; i < bag; ++i) {
      std::size_t j = i + static_cast<std::size_t>(rng.next_u64() % (n - i));
      std::swap(pool[i], pool[j]);
    }
    Tree tree;
    tree.items.assign(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(bag));

    struct Task {
      std::uint32_t node;
      std::uint32_t begin;
      std::uint32_t end;
    };
    tree.nodes.emplace_back();
    std::vector<Task> stack{{0, 0, static_cast<std::uint32_t>(bag)}};
    std::vector<std::size_t> features(data_.dim());
    std::vector<std::pair<double, double>> samples;  // (feature value, target)

    while (!stack.empty()) {
      Task task = stack.back();
      stack.pop_back();
      std::uint32_t count = task.end - task.begin;
      Node& node = tree.nodes[task.node];
      node.begin = task.begin;
      node.end = task.end;
      if (count <= params_.min_node_size) continue;

      double total = 0.0;
      for (std::uint32_t j = task.begin; j < task.end; ++j) {
        total += data_.targets[tree.items[j]];
      }
      double parent_score = total * total / static_cast<double>(count);

      // mtry candidate features, examined in ascending index order so gain
      // ties resolve to the first feature and lowest threshold.
      std::iota(features.begin(), features.end(), std::size_t{0});
      for (std::size_t i = 0; i < params_.mtry; ++i) {
        std::size_t j = i + static_cast<std::size_t>(rng.next_u64() % (features.size() - i));
        std::swap(features[i], features[j]);
      }
      std::sort(features.begin(), features.begin() + static_cast<std::ptrdiff_t>(params_.mtry));

      double best_gain = 1e-12 * std::max(1.0, std::abs(parent_score));
      std::int32_t best_feature = -1;
      double best_threshold = 0.0;
      for (std::size_t fi = 0; fi < params_.mtry; ++fi) {
        std::size_t f = features[fi];
        samples.clear();
        for (std::uint32_t j = task.begin; j < task.end; ++j) {
          samples.emplace_back(data_.features.row(tree.items[j])[f],
                               data_.targets[tree.items[j]]);
        }
        std::sort(samples.begin(), samples.end());
        double left_sum = 0.0;
        for (std::size_t s = 0; s + 1 < samples.size(); ++s) {
          left_sum += samples[s].second;
          if (samples[s].first == samples[s + 1].first) continue;
          double nl = static_cast<double>(s + 1);
          double nr = static_cast<double>(count) - nl;
          double right_sum = total - left_sum;
          double gain =
              left_sum * left_sum / nl + right_sum * right_sum / nr - parent_score;
          if (gain > best_gain) {
            best_gain = gain;
            best_feature = static_cast<std::int32_t>(f);
            best_threshold = 0.5 * (samples[s].first + samples[s + 1].first);
          }
        }
      }
      if (best_feature < 0) continue;  // no usable split: stays a leaf

      auto mid_it = std::partition(
          tree.items.begin() + task.begin, tree.items.begin() + task.end,
          [&](std::uint32_t idx) {
            return data_.features.row(idx)[static_cast<std::size_t>(best_feature)] <=
                   best_threshold;
          });
      auto mid = static_cast<std::uint32_t>(mid_it - tree.items.begin());
      std::uint32_t left_id = static_cast<std::uint32_t>(tree.nodes.size());
      tree.nodes.emplace_back();
      tree.nodes.emplace_back();
      Node& parent = tree.nodes[task.node];
      parent.feature = best_feature;
      parent.threshold = best_threshold;
      parent.left = left_id;
      parent.right = left_id + 1;
      stack.push_back({left_id, task.begin, mid});
      stack.push_back({left_id + 1, mid, task.end});
    }
    return tree;
  }

  LabeledDataset data_;
  ForestParams params_;
  std::vector<Tree> trees_;
};

inline Regressor forest_fit(LabeledDataset data, const ForestParams& params) {
  return Regressor(ForestRegressor(std::move(data), params));
}

}  // namespace dreject
