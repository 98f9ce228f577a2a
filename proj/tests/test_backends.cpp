#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <set>
#include <vector>

#include "dreject/forest.hpp"
#include "dreject/knn.hpp"
#include "dreject/rng.hpp"

using namespace dreject;
using Catch::Approx;

namespace {

LabeledDataset make_data(std::vector<std::vector<double>> rows, std::vector<double> targets) {
  std::size_t d = rows.front().size();
  std::vector<double> flat;
  for (const auto& r : rows) flat.insert(flat.end(), r.begin(), r.end());
  return LabeledDataset(FeatureMatrix(rows.size(), d, std::move(flat)), std::move(targets));
}

LabeledDataset random_dataset(Rng& rng, std::size_t n, std::size_t d) {
  std::vector<double> flat(n * d), y(n);
  for (double& v : flat) v = rng.uniform(-2.0, 2.0);
  for (double& v : y) v = rng.uniform(-5.0, 5.0);
  return LabeledDataset(FeatureMatrix(n, d, std::move(flat)), std::move(y));
}

// Selection-sort nearest neighbors with the lower-index-is-closer tie rule;
// deliberately independent of the production selection path.
std::vector<std::size_t> exhaustive_knn(const LabeledDataset& data, std::span<const double> x,
                                        std::size_t k) {
  std::vector<bool> used(data.size(), false);
  std::vector<std::size_t> picked;
  for (std::size_t round = 0; round < k; ++round) {
    std::size_t best = data.size();
    double best_dist = 0.0;
    for (std::size_t i = 0; i < data.size(); ++i) {
      if (used[i]) continue;
      double dist = squared_distance(data.features.row(i), x);
      if (best == data.size() || dist < best_dist) {
        best = i;
        best_dist = dist;
      }
    }
    used[best] = true;
    picked.push_back(best);
  }
  return picked;
}

}  // namespace

TEST_CASE("knn weights and predictive distribution", "[knn]") {
  auto data = make_data({{0.0}, {1.0}, {2.0}}, {10.0, 20.0, 30.0});
  KnnRegressor knn2(data, 2);
  std::vector<double> q{0.1};
  auto w = knn2.weights(q);
  CHECK(w[0] == Approx(0.5));
  CHECK(w[1] == Approx(0.5));
  CHECK(w[2] == 0.0);
  auto pred = knn2.predict(q);
  REQUIRE(pred.size() == 2);
  CHECK(pred.points()[0] == 10.0);
  CHECK(pred.points()[1] == 20.0);

  KnnRegressor knn3(data, 3);
  auto full = knn3.predict(std::vector<double>{5.0});
  REQUIRE(full.size() == 3);
  for (double weight : full.weights()) CHECK(weight == Approx(1.0 / 3.0));

  KnnRegressor knn1(data, 1);
  auto point = knn1.predict(std::vector<double>{1.9});
  REQUIRE(point.size() == 1);
  CHECK(point.points()[0] == 30.0);
  CHECK(entropy(point).value() == 0.0);
}

TEST_CASE("knn distance ties prefer the lower original index", "[knn]") {
  auto data = make_data({{0.0}, {2.0}, {-2.0}}, {1.0, 2.0, 3.0});
  KnnRegressor knn(data, 2);
  auto idx = knn.neighbor_indices(std::vector<double>{0.0});
  std::sort(idx.begin(), idx.end());
  REQUIRE(idx == std::vector<std::size_t>{0, 1});
}

TEST_CASE("knn validates inputs", "[knn]") {
  auto data = make_data({{0.0}, {1.0}}, {1.0, 2.0});
  CHECK_THROWS_AS(KnnRegressor(data, 0), std::invalid_argument);
  CHECK_THROWS_AS(KnnRegressor(data, 3), std::invalid_argument);
  KnnRegressor knn(data, 1);
  CHECK_THROWS_AS(knn.predict(std::vector<double>{0.0, 1.0}), std::invalid_argument);
}

TEST_CASE("knn matches exhaustive search on random instances", "[knn]") {
  Rng rng(62101);
  for (int iter = 0; iter < 100; ++iter) {
    std::size_t n = 2 + rng.next_u64() % 30;
    std::size_t d = 1 + rng.next_u64() % 4;
    auto data = random_dataset(rng, n, d);
    std::size_t k = 1 + rng.next_u64() % n;
    KnnRegressor knn(data, k);
    std::vector<double> q(d);
    for (double& v : q) v = rng.uniform(-2.0, 2.0);
    auto got = knn.neighbor_indices(q);
    auto want = exhaustive_knn(data, q, k);
    std::sort(got.begin(), got.end());
    std::sort(want.begin(), want.end());
    REQUIRE(got == want);
  }
}

TEST_CASE("knn locality", "[knn]") {
  Rng rng(5150);
  auto data = random_dataset(rng, 40, 2);
  KnnRegressor knn(data, 5);
  // Query a training point; it is strictly closest to itself here, so it
  // must carry weight 1/k.
  auto w = knn.weights(data.features.row(7));
  CHECK(w[7] == Approx(1.0 / 5.0));
}

TEST_CASE("forest forced split on two points", "[forest]") {
  auto data = make_data({{0.0}, {1.0}}, {-3.0, 3.0});
  ForestParams params;
  params.num_trees = 1;
  params.sample_fraction = 1.0;
  params.min_node_size = 1;
  params.mtry = 1;
  params.seed = 9;
  ForestRegressor forest(data, params);
  auto left = forest.predict(std::vector<double>{0.1});
  REQUIRE(left.size() == 1);
  CHECK(left.points()[0] == -3.0);
  auto right = forest.predict(std::vector<double>{0.9});
  REQUIRE(right.size() == 1);
  CHECK(right.points()[0] == 3.0);
}

TEST_CASE("forest weights are a probability vector at random queries", "[forest]") {
  Rng rng(777210);
  auto data = random_dataset(rng, 60, 3);
  ForestParams params;
  params.num_trees = 25;
  params.seed = 4;
  ForestRegressor forest(data, params);
  for (int iter = 0; iter < 100; ++iter) {
    std::vector<double> q{rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0),
                          rng.uniform(-2.0, 2.0)};
    auto w = forest.weights(q);
    double sum = 0.0;
    for (double v : w) {
      REQUIRE(v >= 0.0);
      sum += v;
    }
    REQUIRE(sum == Approx(1.0).margin(1e-12));
  }
}

TEST_CASE("forest on constant targets predicts the point mass", "[forest]") {
  Rng rng(31337);
  std::vector<std::vector<double>> rows;
  std::vector<double> targets;
  for (int i = 0; i < 30; ++i) {
    rows.push_back({rng.uniform(0.0, 1.0), rng.uniform(0.0, 1.0)});
    targets.push_back(7.5);
  }
  ForestRegressor forest(make_data(rows, targets), ForestParams{10, 0.9, 1, 0, 11});
  auto pred = forest.predict(std::vector<double>{0.5, 0.5});
  REQUIRE(pred.size() == 1);
  CHECK(pred.points()[0] == 7.5);
  CHECK(entropy(pred).value() == 0.0);
}

TEST_CASE("forest tolerates constant features", "[forest]") {
  auto data = make_data({{1.0}, {1.0}, {1.0}, {1.0}}, {1.0, 2.0, 3.0, 4.0});
  ForestRegressor forest(data, ForestParams{5, 1.0, 1, 1, 2});
  auto pred = forest.predict(std::vector<double>{1.0});
  REQUIRE(pred.size() == 4);  // single-leaf trees keep the full bag
  for (double w : pred.weights()) CHECK(w == Approx(0.25));
}

TEST_CASE("identical seeds give bit-identical weights", "[forest][knn]") {
  Rng rng(8181);
  auto data = random_dataset(rng, 50, 2);
  ForestParams params;
  params.num_trees = 15;
  params.seed = 77;
  ForestRegressor f1(data, params);
  ForestRegressor f2(data, params);
  KnnRegressor k1(data, 7);
  KnnRegressor k2(data, 7);
  for (int iter = 0; iter < 20; ++iter) {
    std::vector<double> q{rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0)};
    REQUIRE(f1.weights(q) == f2.weights(q));
    REQUIRE(k1.weights(q) == k2.weights(q));
  }
}

TEST_CASE("forest parameter validation", "[forest]") {
  Rng rng(12);
  auto data = random_dataset(rng, 10, 2);
  ForestParams params;
  params.sample_fraction = 0.0;
  CHECK_THROWS_AS(ForestRegressor(data, params), std::invalid_argument);
  params = ForestParams{};
  params.mtry = 3;
  CHECK_THROWS_AS(ForestRegressor(data, params), std::invalid_argument);
  params = ForestParams{};
  params.num_trees = 0;
  CHECK_THROWS_AS(ForestRegressor(data, params), std::invalid_argument);
}

TEST_CASE("select_k basics", "[knn]") {
  Rng rng(5123);
  // Singleton grid.
  auto data = random_dataset(rng, 30, 1);
  std::vector<std::size_t> grid{1};
  CHECK(select_k(data, grid, 0.25, 3) == 1);

  // Noiseless Y = X on a dense grid: k = 1 beats k = n.
  std::vector<std::vector<double>> rows;
  std::vector<double> targets;
  for (int i = 0; i < 200; ++i) {
    double x = static_cast<double>(i) / 200.0;
    rows.push_back({x});
    targets.push_back(x);
  }
  auto linear = make_data(rows, targets);
  std::vector<std::size_t> grid2{1, 200};
  CHECK(select_k(linear, grid2, 0.25, 17) == 1);
}

TEST_CASE("select_k ties resolve to the smaller k", "[knn]") {
  // Duplicated rows: every k yields the same point mass, so CRPS ties.
  auto data = make_data({{0.0}, {0.0}, {0.0}, {0.0}}, {5.0, 5.0, 5.0, 5.0});
  std::vector<std::size_t> grid{3, 2};
  CHECK(select_k(data, grid, 0.3, 1) == 2);
}

TEST_CASE("select_k validates the grid", "[knn]") {
  Rng rng(88);
  auto data = random_dataset(rng, 10, 1);
  std::vector<std::size_t> empty;
  CHECK_THROWS_AS(select_k(data, empty, 0.25, 1), std::invalid_argument);
  std::vector<std::size_t> oversized{11};
  CHECK_THROWS_AS(select_k(data, oversized, 0.25, 1), std::invalid_argument);
  std::vector<std::size_t> zero{0};
  CHECK_THROWS_AS(select_k(data, zero, 0.25, 1), std::invalid_argument);
}
