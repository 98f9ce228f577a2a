#pragma once

#include <memory>
#include <span>
#include <utility>
#include <vector>

#include "dreject/weighted_empirical.hpp"

namespace dreject {

// Type-erased fitted weight-generating model. Any backend exposing
// weights(x) / predict(x) / dim() / train_size() fits behind this surface.
// Fitted models are immutable, so copies share the implementation.
class Regressor {
 public:
  template <typename Backend>
  explicit Regressor(Backend backend)
      : impl_(std::make_shared<Model<Backend>>(std::move(backend))) {}

  // Per-training-point probability weights at x: nonnegative, sum to one.
  std::vector<double> weights(std::span<const double> x) const { return impl_->weights(x); }

  // Predictive distribution at x: the weighted empirical of training targets.
  WeightedEmpirical predict(std::span<const double> x) const { return impl_->predict(x); }

  std::size_t dim() const { return impl_->dim(); }
  std::size_t train_size() const { return impl_->train_size(); }

 private:
  struct Concept {
    virtual ~Concept() = default;
    virtual std::vector<double> weights(std::span<const double>) const = 0;
    virtual WeightedEmpirical predict(std::span<const double>) const = 0;
    virtual std::size_t dim() const = 0;
    virtual std::size_t train_size() const = 0;
  };

  template <typename Backend>
  struct Model final : Concept {
    explicit Model(Backend b) : backend(std::move(b)) {}
    std::vector<double> weights(std::span<const double> x) const override {
      return backend.weights(x);
    }
    WeightedEmpirical predict(std::span<const double> x) const override {
      return backend.predict(x);
    }
    std::size_t dim() const override { return backend.dim(); }
    std::size_t train_size() const override { return backend.train_size(); }
    Backend backend;
  };

  std::shared_ptr<const Concept> impl_;
};

}  // namespace dreject
