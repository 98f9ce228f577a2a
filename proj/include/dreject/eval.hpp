#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <variant>
#include <vector>

#include "dreject/data_io.hpp"
#include "dreject/dataset.hpp"
#include "dreject/forest.hpp"
#include "dreject/knn.hpp"
#include "dreject/regressor.hpp"
#include "dreject/rng.hpp"
#include "dreject/selective.hpp"
#include "dreject/synthetic.hpp"

namespace dreject {

// --- Predictor evaluation ----------------------------------------------------

struct EvalOutcome {
  std::optional<double> err;  // mean CRPS over accepted points; missing if none accepted
  double reject_rate = 0.0;
};

template <typename PredictFn>
EvalOutcome evaluate(PredictFn&& predictor, const LabeledDataset& test) {
  if (test.size() == 0) throw std::invalid_argument("evaluate: empty test set");
  double sum = 0.0;
  std::size_t accepted = 0;
  for (std::size_t i = 0; i < test.size(); ++i) {
    RejectPrediction p = predictor(test.features.row(i));
    if (p.accepted()) {
      sum += crps(p.distribution(), test.targets[i]).value();
      ++accepted;
    }
  }
  EvalOutcome out;
  out.reject_rate =
      static_cast<double>(test.size() - accepted) / static_cast<double>(test.size());
  if (accepted > 0) out.err = sum / static_cast<double>(accepted);
  return out;
}

// --- Experiment configuration --------------------------------------------------

struct CsvSource {
  std::string path;
  std::string target;
};

struct SyntheticSource {
  SyntheticModel model;
  std::size_t n_total = 1000;
};

using DataSource = std::variant<CsvSource, SyntheticSource>;

enum class BackendKind { knn, forest };

struct BackendConfig {
  BackendKind kind = BackendKind::knn;
  std::size_t k = 0;                 // knn: fixed k; 0 means select from k_grid
  std::vector<std::size_t> k_grid;   // knn: candidate grid for holdout selection
  double select_val_fraction = 0.25;
  ForestParams forest;
  std::optional<bool> standardize;   // default: on for knn, off for forest

  bool standardize_enabled() const {
    return standardize.value_or(kind == BackendKind::knn);
  }
};

// Jitter magnitude: a fixed value (default 1e-10) or the 1/n preset tied to
// the labeled-split size.
struct JitterSpec {
  enum class Mode { fixed, inverse_n };
  Mode mode = Mode::fixed;
  double magnitude = 1e-10;

  double resolve(std::size_t labeled_size) const {
    if (mode == Mode::inverse_n) return 1.0 / static_cast<double>(labeled_size);
    return magnitude;
  }
};

struct ExperimentConfig {
  DataSource source;
  BackendConfig backend;
  std::vector<double> epsilon_grid;
  JitterSpec jitter;
  SplitSpec split;  // seed field unused; every repetition derives its own
  std::size_t repetitions = 1;
  std::uint64_t base_seed = 0;
  unsigned jobs = 1;

  void validate() const {
    split.validate();
    if (repetitions < 1) throw std::invalid_argument("ExperimentConfig: repetitions must be >= 1");
    for (double e : epsilon_grid) {
      if (!(e >= 0.0 && e < 1.0)) {
        throw std::invalid_argument("ExperimentConfig: epsilon grid values must lie in [0,1)");
      }
    }
    if (backend.kind == BackendKind::knn && backend.k == 0 && backend.k_grid.empty()) {
      throw std::invalid_argument("ExperimentConfig: knn needs k or a k grid");
    }
    if (jitter.mode == JitterSpec::Mode::fixed && jitter.magnitude < 0.0) {
      throw std::invalid_argument("ExperimentConfig: jitter magnitude must be >= 0");
    }
    if (const auto* s = std::get_if<SyntheticSource>(&source)) {
      s->model.validate();
      if (s->n_total < 3) throw std::invalid_argument("ExperimentConfig: synthetic n too small");
    }
  }
};

// --- Sweep results --------------------------------------------------------------

struct SweepRow {
  double grid_value = 0.0;
  std::optional<double> err_mean;
  std::optional<double> err_std;
  std::size_t err_repetitions = 0;  // repetitions with at least one accepted point
  double rej_mean = 0.0;
  double rej_std = 0.0;
};

struct SweepResult {
  std::string grid_name;  // "epsilon" or "lambda"
  std::vector<SweepRow> rows;
  // Raw per-repetition values (grid index major), kept for statistical tests.
  std::vector<std::vector<double>> reject_by_rep;
  std::vector<std::vector<std::optional<double>>> err_by_rep;
};

namespace detail {

inline void parallel_for(std::size_t count, unsigned jobs,
                         const std::function<void(std::size_t)>& body) {
  if (jobs <= 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (;;) {
      std::size_t i = next.fetch_add(1);
      if (i >= count) return;
      try {
        body(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  unsigned n_threads = std::min<unsigned>(jobs, static_cast<unsigned>(count));
  pool.reserve(n_threads);
  for (unsigned t = 0; t < n_threads; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

inline std::pair<double, double> mean_and_sample_std(std::span<const double> values) {
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(values.size());
  if (values.size() < 2) return {mean, 0.0};
  double ss = 0.0;
  for (double v : values) {
    double c = v - mean;
    ss += c * c;
  }
  return {mean, std::sqrt(ss / static_cast<double>(values.size() - 1))};
}

// Data, model and per-point statistics prepared once per repetition; every
// grid value is then just a thresholding pass.
struct RepetitionState {
  CalibrationTable table;
  std::vector<double> test_entropy;   // raw predicted entropy per test point
  std::vector<double> test_zeta;      // per-point query jitter
  std::vector<double> test_crps;      // crps of the accepted prediction per point
};

inline RepetitionState prepare_repetition(const ExperimentConfig& config,
                                          const LabeledDataset* shared_csv,
                                          std::uint64_t rep_seed) {
  // Materialize the dataset.
  std::optional<LabeledDataset> synthetic_data;
  const LabeledDataset* data = shared_csv;
  if (const auto* s = std::get_if<SyntheticSource>(&config.source)) {
    synthetic_data.emplace(sample(s->model, s->n_total, derive_seed(rep_seed, seed_stream::sample)));
    data = &*synthetic_data;
  }

  SplitSpec spec = config.split;
  spec.seed = rep_seed;
  ThreeWaySplit parts = split(*data, spec);

  std::optional<Standardizer> scaler;
  if (config.backend.standardize_enabled()) {
    scaler.emplace(parts.labeled.features);
  }
  LabeledDataset labeled = scaler ? scaler->apply(parts.labeled) : std::move(parts.labeled);
  FeatureMatrix unlabeled = scaler ? scaler->apply(parts.unlabeled) : std::move(parts.unlabeled);
  LabeledDataset test = scaler ? scaler->apply(parts.test) : std::move(parts.test);

  // Fit the backend.
  std::optional<Regressor> reg;
  if (config.backend.kind == BackendKind::knn) {
    std::size_t k = config.backend.k;
    if (k == 0) {
      std::vector<std::size_t> grid = config.backend.k_grid;
      for (std::size_t& kg : grid) kg = std::min(kg, labeled.size());
      k = select_k(labeled, grid, config.backend.select_val_fraction,
                   derive_seed(rep_seed, seed_stream::selection));
    }
    k = std::min(k, labeled.size());
    reg.emplace(knn_fit(labeled, k));
  } else {
    ForestParams params = config.backend.forest;
    params.seed = derive_seed(rep_seed, seed_stream::fit);
    reg.emplace(forest_fit(labeled, params));
  }

  double u = config.jitter.resolve(labeled.size());
  CalibrationTable table = entropy_scores(*reg, unlabeled, u, rep_seed);

  RepetitionState state{std::move(table), {}, {}, {}};
  state.test_entropy.resize(test.size());
  state.test_zeta.resize(test.size());
  state.test_crps.resize(test.size());
  Rng query_rng(derive_seed(rep_seed, seed_stream::query));
  for (std::size_t i = 0; i < test.size(); ++i) {
    WeightedEmpirical pred = reg->predict(test.features.row(i));
    state.test_entropy[i] = entropy(pred).value();
    state.test_zeta[i] = query_rng.uniform(0.0, u);
    state.test_crps[i] = crps(pred, test.targets[i]).value();
  }
  return state;
}

inline SweepResult aggregate_sweep(std::string grid_name, const std::vector<double>& grid,
                                   std::vector<std::vector<double>> reject_by_rep,
                                   std::vector<std::vector<std::optional<double>>> err_by_rep) {
  SweepResult result;
  result.grid_name = std::move(grid_name);
  result.rows.resize(grid.size());
  for (std::size_t gi = 0; gi < grid.size(); ++gi) {
    SweepRow& row = result.rows[gi];
    row.grid_value = grid[gi];
    auto [rm, rs] = mean_and_sample_std(reject_by_rep[gi]);
    row.rej_mean = rm;
    row.rej_std = rs;
    std::vector<double> errs;
    for (const auto& e : err_by_rep[gi]) {
      if (e) errs.push_back(*e);
    }
    row.err_repetitions = errs.size();
    if (!errs.empty()) {
      auto [em, es] = mean_and_sample_std(errs);
      row.err_mean = em;
      row.err_std = es;
    }
  }
  result.reject_by_rep = std::move(reject_by_rep);
  result.err_by_rep = std::move(err_by_rep);
  return result;
}

}  // namespace detail

// Full protocol for one grid of epsilon values: per repetition, a fresh split
// with a derived seed, backend fit on the labeled part, calibration on the
// unlabeled part, then evaluation of every epsilon on the test part. Each
// test point draws one query jitter shared across the grid, so acceptance is
// monotone in epsilon within a repetition.
inline SweepResult run_sweep(const ExperimentConfig& config) {
  config.validate();
  if (config.epsilon_grid.empty()) throw std::invalid_argument("run_sweep: empty epsilon grid");

  std::optional<LabeledDataset> csv;
  if (const auto* c = std::get_if<CsvSource>(&config.source)) {
    csv.emplace(load_csv(c->path, c->target));
  }

  std::size_t reps = config.repetitions;
  std::size_t g = config.epsilon_grid.size();
  std::vector<std::vector<double>> reject(g, std::vector<double>(reps, 0.0));
  std::vector<std::vector<std::optional<double>>> err(
      g, std::vector<std::optional<double>>(reps));

  detail::parallel_for(reps, config.jobs, [&](std::size_t r) {
    detail::RepetitionState state = detail::prepare_repetition(
        config, csv ? &*csv : nullptr, derive_seed(config.base_seed, r));
    std::size_t n_test = state.test_entropy.size();
    for (std::size_t gi = 0; gi < g; ++gi) {
      double eps = config.epsilon_grid[gi];
      double sum = 0.0;
      std::size_t accepted = 0;
      for (std::size_t i = 0; i < n_test; ++i) {
        bool accept;
        if (eps == 0.0) {
          accept = true;
        } else {
          accept = state.table.ecdf(state.test_entropy[i] + state.test_zeta[i]) <= 1.0 - eps;
        }
        if (accept) {
          sum += state.test_crps[i];
          ++accepted;
        }
      }
      reject[gi][r] =
          static_cast<double>(n_test - accepted) / static_cast<double>(n_test);
      if (accepted > 0) err[gi][r] = sum / static_cast<double>(accepted);
    }
  });

  return detail::aggregate_sweep("epsilon", config.epsilon_grid, std::move(reject),
                                 std::move(err));
}

// Same pipeline thresholding raw predicted entropy at fixed lambda values;
// no calibration table or jitter enters the decision.
inline SweepResult run_lambda_sweep(const ExperimentConfig& config,
                                    const std::vector<double>& lambda_grid) {
  config.validate();
  if (lambda_grid.empty()) throw std::invalid_argument("run_lambda_sweep: empty lambda grid");
  for (double l : lambda_grid) {
    if (std::isnan(l) || l < 0.0) {
      throw std::invalid_argument("run_lambda_sweep: lambda values must be >= 0");
    }
  }

  std::optional<LabeledDataset> csv;
  if (const auto* c = std::get_if<CsvSource>(&config.source)) {
    csv.emplace(load_csv(c->path, c->target));
  }

  std::size_t reps = config.repetitions;
  std::size_t g = lambda_grid.size();
  std::vector<std::vector<double>> reject(g, std::vector<double>(reps, 0.0));
  std::vector<std::vector<std::optional<double>>> err(
      g, std::vector<std::optional<double>>(reps));

  detail::parallel_for(reps, config.jobs, [&](std::size_t r) {
    detail::RepetitionState state = detail::prepare_repetition(
        config, csv ? &*csv : nullptr, derive_seed(config.base_seed, r));
    std::size_t n_test = state.test_entropy.size();
    for (std::size_t gi = 0; gi < g; ++gi) {
      double sum = 0.0;
      std::size_t accepted = 0;
      for (std::size_t i = 0; i < n_test; ++i) {
        if (state.test_entropy[i] <= lambda_grid[gi]) {
          sum += state.test_crps[i];
          ++accepted;
        }
      }
      reject[gi][r] =
          static_cast<double>(n_test - accepted) / static_cast<double>(n_test);
      if (accepted > 0) err[gi][r] = sum / static_cast<double>(accepted);
    }
  });

  return detail::aggregate_sweep("lambda", lambda_grid, std::move(reject), std::move(err));
}

// --- Convergence study ------------------------------------------------------------

struct ConvergenceConfig {
  SyntheticModel model;
  std::vector<std::size_t> n_grid = {200, 800, 3200};
  std::size_t unlabeled_size = 500;
  double epsilon = 0.5;
  std::size_t repetitions = 20;
  std::size_t mc_size = 300;
  double k_exponent = 2.0 / 3.0;  // k = round(n^exponent)
  bool oracle = false;            // evaluate the oracle predictor instead
  double jitter_u = 1e-10;
  std::uint64_t base_seed = 0;
  unsigned jobs = 1;
};

struct ConvergenceRow {
  std::size_t n = 0;
  std::size_t k = 0;
  double median_excess = 0.0;
  double mean_excess = 0.0;
};

inline std::vector<ConvergenceRow> convergence_study(const ConvergenceConfig& config) {
  config.model.validate();
  if (config.n_grid.empty()) throw std::invalid_argument("convergence_study: empty n grid");
  if (!(config.epsilon > 0.0 && config.epsilon < 1.0)) {
    throw std::invalid_argument("convergence_study: epsilon must be in (0,1)");
  }
  OracleRule rule = oracle_lambda(config.model, config.epsilon, 200000,
                                  derive_seed(config.base_seed, 0xFACE));

  std::vector<ConvergenceRow> rows;
  for (std::size_t ni = 0; ni < config.n_grid.size(); ++ni) {
    std::size_t n = config.n_grid[ni];
    auto k = static_cast<std::size_t>(
        std::llround(std::pow(static_cast<double>(n), config.k_exponent)));
    k = std::clamp<std::size_t>(k, 1, n);
    std::uint64_t seed_n = derive_seed(config.base_seed, ni + 1);

    std::vector<double> excess(config.repetitions, 0.0);
    detail::parallel_for(config.repetitions, config.jobs, [&](std::size_t r) {
      std::uint64_t rep_seed = derive_seed(seed_n, r);
      SelectivePredictor predictor;
      if (config.oracle) {
        predictor = oracle_predictor(config.model, rule);
      } else {
        LabeledDataset labeled =
            sample(config.model, n, derive_seed(rep_seed, seed_stream::sample));
        FeatureMatrix unlabeled = sample_features(
            config.model, config.unlabeled_size, derive_seed(rep_seed, seed_stream::split));
        Regressor reg = knn_fit(std::move(labeled), k);
        CalibrationTable table = entropy_scores(reg, unlabeled, config.jitter_u, rep_seed);
        auto policy = std::make_shared<EpsilonPolicy>(config.epsilon, std::move(table));
        auto query_rng = std::make_shared<Rng>(derive_seed(rep_seed, seed_stream::query));
        double u = config.jitter_u;
        predictor = [reg, policy, query_rng, u](std::span<const double> x)
            -> std::optional<PredictiveLaw> {
          double zeta = query_rng->uniform(0.0, u);
          RejectPrediction p = predict_epsilon(*policy, reg, x, zeta);
          if (!p.accepted()) return std::nullopt;
          return PredictiveLaw(p.distribution());
        };
      }
      excess[r] = excess_risk(predictor, config.model, rule, config.mc_size,
                              derive_seed(rep_seed, seed_stream::monte_carlo))
                      .value();
    });

    std::vector<double> sorted = excess;
    std::sort(sorted.begin(), sorted.end());
    double median = sorted.size() % 2 == 1
                        ? sorted[sorted.size() / 2]
                        : 0.5 * (sorted[sorted.size() / 2 - 1] + sorted[sorted.size() / 2]);
    auto [mean, stddev] = detail::mean_and_sample_std(sorted);
    (void)stddev;
    rows.push_back(ConvergenceRow{n, k, median, mean});
  }
  return rows;
}

// --- Rejection-rate control study ----------------------------------------------------

struct RateStudyConfig {
  SyntheticModel model;
  std::size_t labeled_size = 1000;
  std::vector<std::size_t> unlabeled_sizes = {125, 500, 2000};
  std::vector<double> epsilon_grid = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
  std::size_t test_size = 2000;
  std::size_t repetitions = 30;
  std::size_t k = 0;  // 0 = round(n^(2/3))
  double jitter_u = 1e-10;
  std::uint64_t base_seed = 0;
  unsigned jobs = 1;
};

struct RateControlRow {
  std::size_t unlabeled_size = 0;
  double mean_abs_deviation = 0.0;  // mean over repetitions and epsilons of |r_hat - eps|
};

// Measures how tightly the plug-in rule tracks each target rate as the
// unlabeled calibration sample grows.
inline std::vector<RateControlRow> rejection_rate_study(const RateStudyConfig& config) {
  config.model.validate();
  if (config.unlabeled_sizes.empty() || config.epsilon_grid.empty()) {
    throw std::invalid_argument("rejection_rate_study: empty grid");
  }
  std::size_t k = config.k;
  if (k == 0) {
    k = static_cast<std::size_t>(
        std::llround(std::pow(static_cast<double>(config.labeled_size), 2.0 / 3.0)));
  }
  k = std::clamp<std::size_t>(k, 1, config.labeled_size);

  std::vector<RateControlRow> rows;
  for (std::size_t si = 0; si < config.unlabeled_sizes.size(); ++si) {
    std::size_t n_unlabeled = config.unlabeled_sizes[si];
    std::uint64_t seed_s = derive_seed(config.base_seed, si + 101);
    std::vector<double> dev(config.repetitions, 0.0);
    detail::parallel_for(config.repetitions, config.jobs, [&](std::size_t r) {
      std::uint64_t rep_seed = derive_seed(seed_s, r);
      LabeledDataset labeled =
          sample(config.model, config.labeled_size, derive_seed(rep_seed, seed_stream::sample));
      FeatureMatrix unlabeled = sample_features(config.model, n_unlabeled,
                                                derive_seed(rep_seed, seed_stream::split));
      FeatureMatrix test = sample_features(config.model, config.test_size,
                                           derive_seed(rep_seed, seed_stream::fit));
      Regressor reg = knn_fit(std::move(labeled), k);
      CalibrationTable table = entropy_scores(reg, unlabeled, config.jitter_u, rep_seed);
      Rng query_rng(derive_seed(rep_seed, seed_stream::query));
      std::vector<double> score(test.rows());
      for (std::size_t i = 0; i < test.rows(); ++i) {
        score[i] = entropy(reg.predict(test.row(i))).value() +
                   query_rng.uniform(0.0, config.jitter_u);
      }
      double total = 0.0;
      for (double eps : config.epsilon_grid) {
        std::size_t rejected = 0;
        for (double s : score) {
          if (table.ecdf(s) > 1.0 - eps) ++rejected;
        }
        double r_hat = static_cast<double>(rejected) / static_cast<double>(test.rows());
        total += std::abs(r_hat - eps);
      }
      dev[r] = total / static_cast<double>(config.epsilon_grid.size());
    });
    auto [mean, stddev] = detail::mean_and_sample_std(dev);
    (void)stddev;
    rows.push_back(RateControlRow{n_unlabeled, mean});
  }
  return rows;
}

}  // namespace dreject
