// Acceptance suite: one pass/fail line per criterion, nonzero exit when any
// fails. Criteria ids can be passed as arguments to run a subset, e.g.
// `dreject_acceptance 1 4`.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "dreject/dreject.hpp"

using namespace dreject;
namespace fs = std::filesystem;

namespace {

unsigned worker_count() {
  unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : std::min(hw, 4u);
}

WeightedEmpirical random_discrete(Rng& rng, std::size_t max_atoms) {
  std::size_t n = 1 + rng.next_u64() % max_atoms;
  std::vector<double> pts(n), wts(n);
  for (std::size_t i = 0; i < n; ++i) {
    pts[i] = rng.uniform(-5.0, 5.0);
    wts[i] = rng.uniform01_open();
  }
  return WeightedEmpirical(pts, wts);
}

std::string format(const char* fmt, ...) {
  char buf[512];
  va_list args;
  va_start(args, fmt);
  std::vsnprintf(buf, sizeof(buf), fmt, args);
  va_end(args);
  return buf;
}

// --- criterion 1: closed forms vs quadrature oracle --------------------------------

bool criterion_closed_forms(std::string& detail) {
  Rng rng(101);
  double worst_discrete = 0.0, worst_gauss = 0.0, worst_entropy = 0.0;
  for (int iter = 0; iter < 500; ++iter) {
    auto d = random_discrete(rng, 20);
    double y = rng.uniform(-6.0, 6.0);
    worst_discrete = std::max(
        worst_discrete,
        std::abs(crps(d, y).value() - crps_numeric(CdfFunction::from(d), y).value()));
    worst_entropy = std::max(
        worst_entropy,
        std::abs(entropy(d).value() - entropy_numeric(CdfFunction::from(d)).value()));

    GaussianPredictive g(rng.uniform(-3.0, 3.0), rng.uniform(0.05, 3.0));
    double yg = rng.uniform(-6.0, 6.0);
    worst_gauss = std::max(
        worst_gauss,
        std::abs(crps(g, yg).value() - crps_numeric(CdfFunction::from(g), yg).value()));
  }

  std::vector<double> half_pts{0.0, 1.0};
  std::vector<double> half_wts{0.5, 0.5};
  WeightedEmpirical half(half_pts, half_wts);
  double regression = crps(half, 0.0).value();
  bool pass = worst_discrete <= 1e-9 && worst_gauss <= 1e-8 && worst_entropy <= 1e-9 &&
              std::abs(regression - 0.25) <= 1e-12;
  detail = format("max dev discrete %.2e gaussian %.2e entropy %.2e; crps(.5d0+.5d1, 0)=%.12g",
                  worst_discrete, worst_gauss, worst_entropy, regression);
  return pass;
}

// --- criterion 2: mean-CRPS decomposition --------------------------------------------

bool criterion_decomposition(std::string& detail) {
  Rng rng(202);
  double worst_z = 0.0;
  for (int pair = 0; pair < 20; ++pair) {
    auto h = random_discrete(rng, 20);
    auto k = random_discrete(rng, 20);
    const std::size_t draws = 100000;
    double sum = 0.0, sum_sq = 0.0;
    for (std::size_t i = 0; i < draws; ++i) {
      double y = k.quantile(rng.uniform01_open());
      double c = crps(h, y).value();
      sum += c;
      sum_sq += c * c;
    }
    double mean = sum / draws;
    double variance = (sum_sq - sum * sum / draws) / (draws - 1);
    double se = std::sqrt(std::max(variance, 1e-30) / draws);
    double z = std::abs(mean - expected_crps(h, k).value()) / se;
    worst_z = std::max(worst_z, z);
  }
  detail = format("20 pairs x 1e5 draws, worst |z| = %.2f (limit 4)", worst_z);
  return worst_z <= 4.0;
}

// --- criterion 3: Lipschitz domination by W1 -----------------------------------------

bool criterion_lipschitz(std::string& detail) {
  Rng rng(303);
  int violations = 0;
  for (int iter = 0; iter < 1000; ++iter) {
    auto h = random_discrete(rng, 15);
    auto k = random_discrete(rng, 15);
    double w = wasserstein1(h, k).value();
    if (std::abs(entropy(h).value() - entropy(k).value()) > w + 1e-12) ++violations;
    if (divergence(h, k).value() > w + 1e-12) ++violations;
  }
  detail = format("1000 random pairs, %d violations", violations);
  return violations == 0;
}

// --- criterion 4: brute-force optimality ----------------------------------------------

bool criterion_brute_force(std::string& detail) {
  Rng rng(404);
  int mismatches = 0;
  for (int iter = 0; iter < 200; ++iter) {
    std::size_t n = 2 + rng.next_u64() % 11;  // support size <= 12
    FiniteModel model;
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      FinitePoint p{rng.uniform01_open(), rng.uniform(0.0, 1.0)};
      total += p.mass;
      model.points.push_back(p);
    }
    for (auto& p : model.points) p.mass /= total;
    double lambda = rng.uniform(0.0, 1.0);
    auto result = brute_force_optimal(model, lambda);
    for (std::size_t i = 0; i < n; ++i) {
      if (model.points[i].entropy == lambda) continue;
      if (result.accept[i] != (model.points[i].entropy <= lambda)) ++mismatches;
    }
  }
  detail = format("200 random finite models, %d mismatches", mismatches);
  return mismatches == 0;
}

// --- criterion 5: rejection-rate control ------------------------------------------------

bool criterion_rate_control(std::string& detail) {
  // 2000 points at 0.5/0.25/0.25 gives exactly 1000 labeled / 500 unlabeled.
  ExperimentConfig config;
  config.source = SyntheticSource{synthetic_model_by_name("sigma-linear"), 2000};
  config.backend.kind = BackendKind::knn;
  config.backend.k = 100;
  config.epsilon_grid = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
  config.split = SplitSpec{0.5, 0.25, 0.25, 0};
  config.repetitions = 50;
  config.base_seed = 505;
  config.jobs = worker_count();
  SweepResult sweep = run_sweep(config);

  const double bound = 3.0 / std::sqrt(500.0);
  double worst = 0.0;
  for (std::size_t gi = 0; gi < config.epsilon_grid.size(); ++gi) {
    double eps = config.epsilon_grid[gi];
    double dev = 0.0;
    for (double r : sweep.reject_by_rep[gi]) dev += std::abs(r - eps);
    dev /= static_cast<double>(config.repetitions);
    worst = std::max(worst, dev);
  }

  RateStudyConfig study;
  study.model = synthetic_model_by_name("sigma-linear");
  study.labeled_size = 1000;
  study.unlabeled_sizes = {125, 500, 2000};
  study.test_size = 2000;
  study.repetitions = 30;
  study.base_seed = 515;
  study.jobs = worker_count();
  auto rows = rejection_rate_study(study);

  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (const auto& row : rows) {
    double x = std::log(static_cast<double>(row.unlabeled_size));
    double y = std::log(row.mean_abs_deviation);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  double n = static_cast<double>(rows.size());
  double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);

  bool pass = worst <= bound && slope > -0.8 && slope < -0.2;
  detail = format("max_eps mean|r-eps| = %.4f (limit %.4f); N-sweep slope = %.3f in (-0.8,-0.2)",
                  worst, bound, slope);
  return pass;
}

// --- criterion 6: error monotonicity and rate tracking -------------------------------------

bool run_monotonicity(const ExperimentConfig& config, const char* label, std::string& detail,
                      bool& pass) {
  SweepResult sweep = run_sweep(config);
  const auto& rows = sweep.rows;
  bool local = true;
  if (!rows.front().err_mean || !rows.back().err_mean) local = false;
  if (local) local = *rows.back().err_mean < *rows.front().err_mean;
  for (std::size_t i = 0; local && i + 1 < rows.size(); ++i) {
    double s0 = rows[i].err_std.value_or(0.0);
    double s1 = rows[i + 1].err_std.value_or(0.0);
    double pooled = std::sqrt(0.5 * (s0 * s0 + s1 * s1));
    if (!(rows[i + 1].err_mean.value() <= rows[i].err_mean.value() + pooled)) local = false;
  }
  double worst_rate = 0.0;
  for (const auto& row : rows) {
    worst_rate = std::max(worst_rate, std::abs(row.rej_mean - row.grid_value));
  }
  if (worst_rate > 0.03) local = false;
  detail += format("%s: err(0.9)=%.4g err(0)=%.4g max|r-eps|=%.3f; ", label,
                   rows.back().err_mean.value_or(-1.0), rows.front().err_mean.value_or(-1.0),
                   worst_rate);
  pass = pass && local;
  return local;
}

bool criterion_error_monotonicity(std::string& detail) {
  bool pass = true;

  ExperimentConfig config;
  config.source = SyntheticSource{synthetic_model_by_name("sigma-linear"), 1000};
  config.backend.kind = BackendKind::knn;
  config.backend.k = 63;  // round(500^(2/3))
  config.epsilon_grid = {0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
  config.repetitions = 100;
  config.base_seed = 606;
  config.jobs = worker_count();
  run_monotonicity(config, "synthetic", detail, pass);

  const char* csv = std::getenv("DREJECT_UCI_CSV");
  const char* target = std::getenv("DREJECT_UCI_TARGET");
  if (csv != nullptr && target != nullptr) {
    ExperimentConfig uci = config;
    uci.source = CsvSource{csv, target};
    uci.backend.k = 0;
    uci.backend.k_grid = {1, 2, 4, 8, 16, 32, 64};
    uci.base_seed = 616;
    run_monotonicity(uci, "uci", detail, pass);
  } else {
    detail += "(no UCI csv provided via DREJECT_UCI_CSV/TARGET)";
  }
  return pass;
}

// --- criterion 7: consistency of the plug-in rule ---------------------------------------------

bool criterion_consistency(std::string& detail) {
  ConvergenceConfig config;
  config.model = synthetic_model_by_name("sigma-linear");
  config.n_grid = {200, 800, 3200};
  config.unlabeled_size = 500;
  config.epsilon = 0.5;
  config.repetitions = 20;
  config.mc_size = 300;
  config.k_exponent = 2.0 / 3.0;
  config.base_seed = 707;
  config.jobs = worker_count();
  auto rows = convergence_study(config);

  ConvergenceConfig oracle_config = config;
  oracle_config.oracle = true;
  oracle_config.repetitions = 5;
  auto oracle_rows = convergence_study(oracle_config);

  bool decreasing = rows[1].median_excess < rows[0].median_excess &&
                    rows[2].median_excess < rows[1].median_excess;
  double oracle_worst = 0.0;
  for (const auto& row : oracle_rows) oracle_worst = std::max(oracle_worst, row.median_excess);

  detail = format("medians %.4g > %.4g > %.4g; oracle max %.2e (limit 0.01)",
                  rows[0].median_excess, rows[1].median_excess, rows[2].median_excess,
                  oracle_worst);
  return decreasing && oracle_worst <= 0.01;
}

// --- criterion 8: byte-identical reruns -------------------------------------------------------

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

bool rerun_matches(const std::string& cli, const std::string& command, const std::string& stem,
                   std::string& detail) {
  fs::path base = fs::temp_directory_path() / ("dreject_acceptance_" + stem);
  fs::remove_all(base);
  fs::create_directories(base / "a");
  fs::create_directories(base / "b");
  std::string run_a = cli + " " + command + " --out " + (base / "a").string() + " > /dev/null 2>&1";
  if (std::system(run_a.c_str()) != 0) {
    detail += format("%s: initial run failed; ", stem.c_str());
    return false;
  }
  std::string manifest = (base / "a" / (stem + ".manifest.json")).string();
  std::string run_b = cli + " rerun " + manifest + " --out " + (base / "b").string() +
                      " > /dev/null 2>&1";
  if (std::system(run_b.c_str()) != 0) {
    detail += format("%s: rerun failed; ", stem.c_str());
    return false;
  }
  bool same = slurp(base / "a" / (stem + ".csv")) == slurp(base / "b" / (stem + ".csv"));
  detail += format("%s: %s; ", stem.c_str(), same ? "identical" : "DIFFER");
  return same;
}

bool criterion_determinism(std::string& detail) {
  const char* cli = std::getenv("DREJECT_CLI");
  if (cli == nullptr) {
    detail = "DREJECT_CLI not set";
    return false;
  }
  bool pass = true;
  pass &= rerun_matches(cli,
                        "sweep-epsilon --synthetic sigma-linear --n 300 --k 15 --eps 0:0.9:0.1 "
                        "--reps 3 --seed 42 --jobs 2 --name sweep_epsilon",
                        "sweep_epsilon", detail);
  pass &= rerun_matches(cli,
                        "sweep-lambda --synthetic sigma-linear --n 300 --k 15 "
                        "--lambda 0,0.05,0.1,0.2 --reps 3 --seed 43 --name sweep_lambda",
                        "sweep_lambda", detail);
  pass &= rerun_matches(cli,
                        "convergence --synthetic sigma-linear --n-grid 100,200 --reps 3 --mc 60 "
                        "--unlabeled 100 --seed 44 --name convergence",
                        "convergence", detail);
  return pass;
}

struct Criterion {
  int id;
  const char* name;
  std::function<bool(std::string&)> run;
};

}  // namespace

int main(int argc, char** argv) {
  std::set<int> selected;
  for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));

  std::vector<Criterion> criteria{
      {1, "closed-form fidelity vs quadrature oracle", criterion_closed_forms},
      {2, "mean-CRPS decomposition (entropy + divergence)", criterion_decomposition},
      {3, "Lipschitz domination by Wasserstein-1", criterion_lipschitz},
      {4, "brute-force optimality of entropy thresholding", criterion_brute_force},
      {5, "rejection-rate control and N^(-1/2) trend", criterion_rate_control},
      {6, "error monotonicity and rate tracking", criterion_error_monotonicity},
      {7, "excess-risk consistency over sample size", criterion_consistency},
      {8, "byte-identical rerun from manifest", criterion_determinism},
  };

  int failures = 0;
  for (auto& criterion : criteria) {
    if (!selected.empty() && !selected.count(criterion.id)) continue;
    auto start = std::chrono::steady_clock::now();
    std::string detail;
    bool pass = false;
    try {
      pass = criterion.run(detail);
    } catch (const std::exception& e) {
      detail = std::string("exception: ") + e.what();
    }
    double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("[%s] criterion %d: %s (%s) [%.1fs]\n", pass ? "PASS" : "FAIL", criterion.id,
                criterion.name, detail.c_str(), seconds);
    std::fflush(stdout);
    if (!pass) ++failures;
  }
  return failures;
}
