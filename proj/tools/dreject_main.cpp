// Command-line front end: ad-hoc scoring plus the sweep and convergence
// experiments, each emitting a CSV and a JSON manifest that reproduces the
// run byte for byte.

#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "dreject/dreject.hpp"

namespace {

using nlohmann::json;

std::string fmt_g(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

std::string fmt_opt(const std::optional<double>& v) { return v ? fmt_g(*v) : "NA"; }

std::uint64_t fnv1a64(const std::string& s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string hash_hex(std::uint64_t h) {
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::vector<double> parse_real_grid(const std::string& text) {
  std::vector<double> grid;
  auto colons = std::count(text.begin(), text.end(), ':');
  if (colons == 2) {
    double start, stop, step;
    char extra;
    if (std::sscanf(text.c_str(), "%lf:%lf:%lf%c", &start, &stop, &step, &extra) != 3 ||
        step <= 0.0 || stop < start) {
      throw std::invalid_argument("bad grid spec '" + text + "' (want start:stop:step)");
    }
    auto count = static_cast<std::size_t>(std::floor((stop - start) / step + 1e-9)) + 1;
    for (std::size_t i = 0; i < count; ++i) grid.push_back(start + static_cast<double>(i) * step);
    return grid;
  }
  std::istringstream ss(text);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    if (cell.empty()) continue;
    grid.push_back(std::stod(cell));
  }
  if (grid.empty()) throw std::invalid_argument("empty grid spec '" + text + "'");
  return grid;
}

std::vector<double> parse_real_list(const std::string& text) {
  std::vector<double> out;
  std::istringstream ss(text);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    if (!cell.empty()) out.push_back(std::stod(cell));
  }
  if (out.empty()) throw std::invalid_argument("empty list '" + text + "'");
  return out;
}

std::vector<std::size_t> parse_count_list(const std::string& text) {
  std::vector<std::size_t> out;
  for (double v : parse_real_list(text)) {
    if (v < 0.0 || v != std::floor(v)) {
      throw std::invalid_argument("expected nonnegative integers in '" + text + "'");
    }
    out.push_back(static_cast<std::size_t>(v));
  }
  return out;
}

// --- config <-> json -------------------------------------------------------------

json model_to_json(const dreject::SyntheticModel& m) {
  return json{{"dim", m.dim}, {"mean_poly", m.mean_poly}, {"sigma_affine", m.sigma_affine}};
}

dreject::SyntheticModel model_from_json(const json& j) {
  dreject::SyntheticModel m;
  m.dim = j.at("dim").get<std::size_t>();
  m.mean_poly = j.at("mean_poly").get<std::vector<double>>();
  m.sigma_affine = j.at("sigma_affine").get<std::vector<double>>();
  m.validate();
  return m;
}

dreject::ExperimentConfig sweep_config_from_json(const json& j) {
  dreject::ExperimentConfig config;
  const json& src = j.at("source");
  if (src.at("type") == "csv") {
    config.source = dreject::CsvSource{src.at("path").get<std::string>(),
                                       src.at("target").get<std::string>()};
  } else {
    config.source = dreject::SyntheticSource{model_from_json(src.at("model")),
                                             src.at("n_total").get<std::size_t>()};
  }
  const json& b = j.at("backend");
  config.backend.kind = b.at("kind") == "forest" ? dreject::BackendKind::forest
                                                 : dreject::BackendKind::knn;
  config.backend.k = b.value("k", std::size_t{0});
  config.backend.k_grid = b.value("k_grid", std::vector<std::size_t>{});
  config.backend.select_val_fraction = b.value("val_fraction", 0.25);
  if (b.contains("forest")) {
    const json& f = b.at("forest");
    config.backend.forest.num_trees = f.at("num_trees").get<std::size_t>();
    config.backend.forest.sample_fraction = f.at("sample_fraction").get<double>();
    config.backend.forest.min_node_size = f.at("min_node_size").get<std::size_t>();
    config.backend.forest.mtry = f.at("mtry").get<std::size_t>();
  }
  if (b.contains("standardize") && !b.at("standardize").is_null()) {
    config.backend.standardize = b.at("standardize").get<bool>();
  }
  if (j.contains("epsilon_grid")) {
    config.epsilon_grid = j.at("epsilon_grid").get<std::vector<double>>();
  }
  const json& jit = j.at("jitter");
  config.jitter.mode = jit.at("mode") == "inverse_n" ? dreject::JitterSpec::Mode::inverse_n
                                                     : dreject::JitterSpec::Mode::fixed;
  config.jitter.magnitude = jit.value("u", 1e-10);
  const json& sp = j.at("split");
  config.split.labeled_frac = sp.at("labeled").get<double>();
  config.split.unlabeled_frac = sp.at("unlabeled").get<double>();
  config.split.test_frac = sp.at("test").get<double>();
  config.repetitions = j.at("repetitions").get<std::size_t>();
  config.base_seed = j.at("seed").get<std::uint64_t>();
  config.jobs = j.value("jobs", 1u);
  return config;
}

dreject::ConvergenceConfig convergence_config_from_json(const json& j) {
  dreject::ConvergenceConfig config;
  config.model = model_from_json(j.at("model"));
  config.n_grid = j.at("n_grid").get<std::vector<std::size_t>>();
  config.unlabeled_size = j.at("unlabeled").get<std::size_t>();
  config.epsilon = j.at("epsilon").get<double>();
  config.repetitions = j.at("repetitions").get<std::size_t>();
  config.mc_size = j.at("mc").get<std::size_t>();
  config.k_exponent = j.at("k_exponent").get<double>();
  config.oracle = j.value("oracle", false);
  config.jitter_u = j.value("jitter_u", 1e-10);
  config.base_seed = j.at("seed").get<std::uint64_t>();
  config.jobs = j.value("jobs", 1u);
  return config;
}

// --- output ------------------------------------------------------------------------

std::string sweep_csv(const dreject::SweepResult& result, const std::string& hash) {
  std::ostringstream out;
  out << "# manifest_hash=" << hash << "\n";
  out << result.grid_name << ",err_mean,err_std,rej_mean,rej_std\n";
  for (const auto& row : result.rows) {
    out << fmt_g(row.grid_value) << ',' << fmt_opt(row.err_mean) << ',' << fmt_opt(row.err_std)
        << ',' << fmt_g(row.rej_mean) << ',' << fmt_g(row.rej_std) << "\n";
  }
  return out.str();
}

std::string convergence_csv(const std::vector<dreject::ConvergenceRow>& rows,
                            const std::string& hash) {
  std::ostringstream out;
  out << "# manifest_hash=" << hash << "\n";
  out << "n,k,excess_median,excess_mean\n";
  for (const auto& row : rows) {
    out << row.n << ',' << row.k << ',' << fmt_g(row.median_excess) << ','
        << fmt_g(row.mean_excess) << "\n";
  }
  return out.str();
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << content;
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

std::string default_out_dir() {
  if (const char* env = std::getenv("DREJECT_OUT_DIR")) return env;
  return ".";
}

// Runs a fully resolved invocation and writes <name>.csv plus
// <name>.manifest.json into out_dir. Fresh runs and manifest reruns share
// this path, so outputs are byte-identical by construction.
void run_invocation(const std::string& command, const json& config, const std::string& name,
                    const std::string& out_dir) {
  std::string hash = hash_hex(fnv1a64(config.dump()));
  std::string csv;
  if (command == "sweep-epsilon") {
    csv = sweep_csv(dreject::run_sweep(sweep_config_from_json(config)), hash);
  } else if (command == "sweep-lambda") {
    dreject::ExperimentConfig base = sweep_config_from_json(config);
    auto lambda_grid = config.at("lambda_grid").get<std::vector<double>>();
    csv = sweep_csv(dreject::run_lambda_sweep(base, lambda_grid), hash);
  } else if (command == "convergence") {
    csv = convergence_csv(dreject::convergence_study(convergence_config_from_json(config)), hash);
  } else {
    throw std::invalid_argument("unknown command in manifest: " + command);
  }

  json manifest{{"version", dreject::kVersion},
                {"command", command},
                {"name", name},
                {"config", config},
                {"manifest_hash", hash}};

  std::filesystem::path dir(out_dir);
  std::filesystem::create_directories(dir);
  write_file(dir / (name + ".csv"), csv);
  write_file(dir / (name + ".manifest.json"), manifest.dump(2) + "\n");
  std::printf("wrote %s and %s\n", (dir / (name + ".csv")).c_str(),
              (dir / (name + ".manifest.json")).c_str());
}

// --- flag -> config assembly ----------------------------------------------------------

struct SweepFlags {
  std::string data_path;
  std::string target;
  std::string synthetic;
  std::size_t n_total = 1000;
  std::size_t dim = 1;
  std::string model_mean;
  std::string model_sigma;
  std::string backend = "knn";
  std::size_t k = 0;
  std::string k_grid;
  double val_fraction = 0.25;
  std::size_t trees = 1000;
  double sample_fraction = 0.9;
  std::size_t min_node_size = 1;
  std::size_t mtry = 0;
  std::string eps = "0:0.9:0.1";
  std::string lambda;
  std::size_t reps = 100;
  std::uint64_t seed = 0;
  double jitter = 1e-10;
  std::string jitter_preset;
  std::string split = "0.5,0.2,0.3";
  int standardize = -1;  // -1 default, 0 off, 1 on
  unsigned jobs = 1;
  std::string out_dir;
  std::string name;
};

json synthetic_source_json(const SweepFlags& f) {
  dreject::SyntheticModel model;
  if (f.synthetic == "custom") {
    model.dim = f.dim;
    if (f.model_mean.empty() || f.model_sigma.empty()) {
      throw std::invalid_argument("--synthetic custom requires --model-mean and --model-sigma");
    }
    model.mean_poly = parse_real_list(f.model_mean);
    model.sigma_affine = parse_real_list(f.model_sigma);
  } else {
    model = dreject::synthetic_model_by_name(f.synthetic);
  }
  model.validate();
  return json{{"type", "synthetic"}, {"model", model_to_json(model)}, {"n_total", f.n_total}};
}

json sweep_config_json(const SweepFlags& f, bool lambda_mode) {
  json config;
  if (!f.data_path.empty() && !f.synthetic.empty()) {
    throw std::invalid_argument("--data and --synthetic are mutually exclusive");
  }
  if (!f.data_path.empty()) {
    if (f.target.empty()) throw std::invalid_argument("--data requires --target");
    config["source"] = json{{"type", "csv"}, {"path", f.data_path}, {"target", f.target}};
  } else if (!f.synthetic.empty()) {
    config["source"] = synthetic_source_json(f);
  } else {
    throw std::invalid_argument("need --data <csv> or --synthetic <model>");
  }

  json backend{{"kind", f.backend}};
  if (f.backend == "knn") {
    if (f.k == 0 && f.k_grid.empty()) {
      throw std::invalid_argument("knn backend needs --k or --k-grid");
    }
    backend["k"] = f.k;
    if (!f.k_grid.empty()) backend["k_grid"] = parse_count_list(f.k_grid);
    backend["val_fraction"] = f.val_fraction;
  } else if (f.backend == "forest") {
    backend["forest"] = json{{"num_trees", f.trees},
                             {"sample_fraction", f.sample_fraction},
                             {"min_node_size", f.min_node_size},
                             {"mtry", f.mtry}};
  } else {
    throw std::invalid_argument("unknown backend '" + f.backend + "'");
  }
  if (f.standardize >= 0) backend["standardize"] = (f.standardize == 1);
  config["backend"] = backend;

  if (lambda_mode) {
    if (f.lambda.empty()) throw std::invalid_argument("sweep-lambda needs --lambda");
    config["lambda_grid"] = parse_real_grid(f.lambda);
    config["epsilon_grid"] = json::array();
  } else {
    config["epsilon_grid"] = parse_real_grid(f.eps);
  }

  if (!f.jitter_preset.empty() && f.jitter_preset != "fixed" && f.jitter_preset != "inverse-n") {
    throw std::invalid_argument("--jitter-preset must be 'fixed' or 'inverse-n'");
  }
  if (f.jitter_preset == "inverse-n") {
    config["jitter"] = json{{"mode", "inverse_n"}};
  } else {
    config["jitter"] = json{{"mode", "fixed"}, {"u", f.jitter}};
  }

  std::vector<double> fracs = parse_real_list(f.split);
  if (fracs.size() != 3) throw std::invalid_argument("--split wants three fractions");
  config["split"] = json{{"labeled", fracs[0]}, {"unlabeled", fracs[1]}, {"test", fracs[2]}};
  config["repetitions"] = f.reps;
  config["seed"] = f.seed;
  config["jobs"] = f.jobs;
  return config;
}

void add_sweep_flags(CLI::App* cmd, SweepFlags& f, bool lambda_mode) {
  cmd->add_option("--data", f.data_path, "CSV dataset path");
  cmd->add_option("--target", f.target, "target column name");
  cmd->add_option("--synthetic", f.synthetic, "synthetic model: sigma-linear, homoscedastic, custom");
  cmd->add_option("--n", f.n_total, "synthetic sample size before splitting");
  cmd->add_option("--dim", f.dim, "feature dimension for --synthetic custom");
  cmd->add_option("--model-mean", f.model_mean, "mean polynomial coefficients (custom model)");
  cmd->add_option("--model-sigma", f.model_sigma, "sigma affine coefficients (custom model)");
  cmd->add_option("--backend", f.backend, "knn or forest")->capture_default_str();
  cmd->add_option("--k", f.k, "knn neighbor count (0 = select from --k-grid)");
  cmd->add_option("--k-grid", f.k_grid, "candidate k values for holdout selection");
  cmd->add_option("--val-fraction", f.val_fraction, "holdout fraction for k selection")
      ->capture_default_str();
  cmd->add_option("--trees", f.trees, "forest: number of trees")->capture_default_str();
  cmd->add_option("--sample-fraction", f.sample_fraction, "forest: subsample fraction")
      ->capture_default_str();
  cmd->add_option("--min-node-size", f.min_node_size, "forest: minimal node size")
      ->capture_default_str();
  cmd->add_option("--mtry", f.mtry, "forest: features per split (0 = d/3)");
  if (lambda_mode) {
    cmd->add_option("--lambda", f.lambda, "lambda grid: start:stop:step or comma list")
        ->required();
  } else {
    cmd->add_option("--eps", f.eps, "epsilon grid: start:stop:step or comma list")
        ->capture_default_str();
  }
  cmd->add_option("--reps", f.reps, "number of repetitions")->capture_default_str();
  cmd->add_option("--seed", f.seed, "base seed (all randomness flows from it)")->required();
  cmd->add_option("--jitter", f.jitter, "jitter magnitude u")->capture_default_str();
  cmd->add_option("--jitter-preset", f.jitter_preset,
                  "'fixed' (the --jitter magnitude) or 'inverse-n' (u = 1/n)");
  cmd->add_option("--split", f.split, "labeled,unlabeled,test fractions")->capture_default_str();
  cmd->add_flag_callback("--standardize", [&f] { f.standardize = 1; },
                         "force feature standardization on");
  cmd->add_flag_callback("--no-standardize", [&f] { f.standardize = 0; },
                         "force feature standardization off");
  cmd->add_option("--jobs", f.jobs, "parallel repetition workers")->capture_default_str();
  cmd->add_option("--out", f.out_dir, "output directory (env DREJECT_OUT_DIR overrides default)");
  cmd->add_option("--name", f.name, "output file stem");
}

struct ConvergenceFlags {
  std::string synthetic = "sigma-linear";
  std::size_t dim = 1;
  std::string model_mean;
  std::string model_sigma;
  std::string n_grid = "200,800,3200";
  std::size_t unlabeled = 500;
  double epsilon = 0.5;
  std::size_t reps = 20;
  std::size_t mc = 300;
  double k_exponent = 2.0 / 3.0;
  bool oracle = false;
  double jitter = 1e-10;
  std::uint64_t seed = 0;
  unsigned jobs = 1;
  std::string out_dir;
  std::string name;
};

json convergence_config_json(const ConvergenceFlags& f) {
  dreject::SyntheticModel model;
  if (f.synthetic == "custom") {
    model.dim = f.dim;
    model.mean_poly = parse_real_list(f.model_mean);
    model.sigma_affine = parse_real_list(f.model_sigma);
  } else {
    model = dreject::synthetic_model_by_name(f.synthetic);
  }
  model.validate();
  return json{{"model", model_to_json(model)},
              {"n_grid", parse_count_list(f.n_grid)},
              {"unlabeled", f.unlabeled},
              {"epsilon", f.epsilon},
              {"repetitions", f.reps},
              {"mc", f.mc},
              {"k_exponent", f.k_exponent},
              {"oracle", f.oracle},
              {"jitter_u", f.jitter},
              {"seed", f.seed},
              {"jobs", f.jobs}};
}

// --- score subcommand -----------------------------------------------------------------

struct ScoreFlags {
  std::string discrete;
  std::string gaussian;
  double y = 0.0;
};

int run_score(const ScoreFlags& f) {
  if (f.discrete.empty() == f.gaussian.empty()) {
    throw std::invalid_argument("score needs exactly one of --discrete or --gaussian");
  }
  double crps_value, entropy_value;
  if (!f.discrete.empty()) {
    std::vector<double> points, weights;
    std::istringstream ss(f.discrete);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      auto colon = cell.find(':');
      if (colon == std::string::npos) {
        throw std::invalid_argument("bad atom '" + cell + "' (want point:weight)");
      }
      points.push_back(std::stod(cell.substr(0, colon)));
      weights.push_back(std::stod(cell.substr(colon + 1)));
    }
    dreject::WeightedEmpirical d(points, weights);
    crps_value = dreject::crps(d, f.y).value();
    entropy_value = dreject::entropy(d).value();
  } else {
    std::vector<double> params = parse_real_list(f.gaussian);
    if (params.size() != 2) throw std::invalid_argument("--gaussian wants mean,stddev");
    dreject::GaussianPredictive g(params[0], params[1]);
    crps_value = dreject::crps(g, f.y).value();
    entropy_value = dreject::entropy(g).value();
  }
  std::printf("crps %s\n", fmt_g(crps_value).c_str());
  std::printf("entropy %s\n", fmt_g(entropy_value).c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"distributional regression with reject option"};
  app.require_subcommand(1);

  ScoreFlags score_flags;
  CLI::App* score_cmd = app.add_subcommand("score", "CRPS and entropy of one distribution");
  score_cmd->add_option("--discrete", score_flags.discrete,
                        "weighted atoms, e.g. \"0:0.5,1:0.5\"");
  score_cmd->add_option("--gaussian", score_flags.gaussian, "mean,stddev");
  score_cmd->add_option("--y", score_flags.y, "observation")->required();

  SweepFlags eps_flags;
  CLI::App* eps_cmd = app.add_subcommand("sweep-epsilon",
                                         "error/rejection sweep over target rates");
  add_sweep_flags(eps_cmd, eps_flags, false);

  SweepFlags lambda_flags;
  CLI::App* lambda_cmd =
      app.add_subcommand("sweep-lambda", "error/rejection sweep over entropy thresholds");
  add_sweep_flags(lambda_cmd, lambda_flags, true);

  ConvergenceFlags conv_flags;
  CLI::App* conv_cmd =
      app.add_subcommand("convergence", "excess risk of the plug-in rule over sample sizes");
  conv_cmd->add_option("--synthetic", conv_flags.synthetic, "model name or 'custom'")
      ->capture_default_str();
  conv_cmd->add_option("--dim", conv_flags.dim, "dimension for custom model");
  conv_cmd->add_option("--model-mean", conv_flags.model_mean, "custom mean polynomial");
  conv_cmd->add_option("--model-sigma", conv_flags.model_sigma, "custom sigma coefficients");
  conv_cmd->add_option("--n-grid", conv_flags.n_grid, "labeled sizes")->capture_default_str();
  conv_cmd->add_option("--unlabeled", conv_flags.unlabeled, "calibration sample size")
      ->capture_default_str();
  conv_cmd->add_option("--epsilon", conv_flags.epsilon, "target rejection rate")
      ->capture_default_str();
  conv_cmd->add_option("--reps", conv_flags.reps, "repetitions per n")->capture_default_str();
  conv_cmd->add_option("--mc", conv_flags.mc, "Monte-Carlo draws per excess-risk estimate")
      ->capture_default_str();
  conv_cmd->add_option("--k-exponent", conv_flags.k_exponent, "k = round(n^exponent)")
      ->capture_default_str();
  conv_cmd->add_flag("--oracle", conv_flags.oracle, "evaluate the oracle rule instead");
  conv_cmd->add_option("--jitter", conv_flags.jitter, "jitter magnitude")->capture_default_str();
  conv_cmd->add_option("--seed", conv_flags.seed, "base seed")->required();
  conv_cmd->add_option("--jobs", conv_flags.jobs, "parallel workers")->capture_default_str();
  conv_cmd->add_option("--out", conv_flags.out_dir, "output directory");
  conv_cmd->add_option("--name", conv_flags.name, "output file stem");

  std::string manifest_path, rerun_out, rerun_name;
  CLI::App* rerun_cmd = app.add_subcommand("rerun", "re-execute a run from its manifest");
  rerun_cmd->add_option("manifest", manifest_path, "manifest JSON path")->required();
  rerun_cmd->add_option("--out", rerun_out, "output directory");
  rerun_cmd->add_option("--name", rerun_name, "output file stem override");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }

  try {
    if (*score_cmd) return run_score(score_flags);
    if (*eps_cmd) {
      json config = sweep_config_json(eps_flags, false);
      std::string out = eps_flags.out_dir.empty() ? default_out_dir() : eps_flags.out_dir;
      std::string name = eps_flags.name.empty() ? "sweep_epsilon" : eps_flags.name;
      run_invocation("sweep-epsilon", config, name, out);
      return 0;
    }
    if (*lambda_cmd) {
      json config = sweep_config_json(lambda_flags, true);
      std::string out = lambda_flags.out_dir.empty() ? default_out_dir() : lambda_flags.out_dir;
      std::string name = lambda_flags.name.empty() ? "sweep_lambda" : lambda_flags.name;
      run_invocation("sweep-lambda", config, name, out);
      return 0;
    }
    if (*conv_cmd) {
      json config = convergence_config_json(conv_flags);
      std::string out = conv_flags.out_dir.empty() ? default_out_dir() : conv_flags.out_dir;
      std::string name = conv_flags.name.empty() ? "convergence" : conv_flags.name;
      run_invocation("convergence", config, name, out);
      return 0;
    }
    if (*rerun_cmd) {
      std::ifstream in(manifest_path);
      if (!in) throw std::invalid_argument("cannot open manifest: " + manifest_path);
      json manifest = json::parse(in);
      std::string command = manifest.at("command").get<std::string>();
      json config = manifest.at("config");
      std::string recorded = manifest.value("manifest_hash", "");
      std::string recomputed = hash_hex(fnv1a64(config.dump()));
      if (!recorded.empty() && recorded != recomputed) {
        throw std::invalid_argument("manifest hash mismatch: file was edited");
      }
      std::string name =
          rerun_name.empty() ? manifest.value("name", std::string("rerun")) : rerun_name;
      std::string out = rerun_out.empty() ? default_out_dir() : rerun_out;
      run_invocation(command, config, name, out);
      return 0;
    }
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const json::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
