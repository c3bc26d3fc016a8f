// matmat command-line interface.
//
// Exit codes: 0 success, 1 usage/config error, 2 data error,
// 3 training divergence (train only).

#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "matmat/blocktarget.hpp"
#include "matmat/errors.hpp"
#include "matmat/harness.hpp"
#include "matmat/model_io.hpp"

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitDiverged = 3;

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= s.size()) {
    auto comma = s.find(',', start);
    auto item = s.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
    if (!item.empty()) out.push_back(item);
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

std::vector<double> parse_grid(const std::string& s) {
  std::vector<double> grid;
  for (const auto& item : split_list(s)) {
    try {
      std::size_t used = 0;
      double v = std::stod(item, &used);
      if (used != item.size()) throw std::invalid_argument(item);
      grid.push_back(v);
    } catch (const std::logic_error&) {
      throw matmat::ConfigError("bad learning rate '" + item + "' in --grid");
    }
  }
  return grid;
}

struct TrainingFlags {
  std::size_t epochs = 30;
  std::size_t d = 2;
  std::size_t t = 2;
  std::uint64_t seed = 7;
  double test_fraction = 0.1;
  double l2 = 0.0;
  double init_std = 0.1;
  double clamp_lo = 0.5;
  double clamp_hi = 5.0;

  void attach(CLI::App* cmd) {
    cmd->add_option("--epochs", epochs, "SGD epochs")->capture_default_str();
    cmd->add_option("--d", d, "latent dimension")->capture_default_str();
    cmd->add_option("--t", t, "block side length (matmat)")->capture_default_str();
    cmd->add_option("--seed", seed, "seed for the split and training")->capture_default_str();
    cmd->add_option("--test-fraction", test_fraction, "held-out fraction")->capture_default_str();
    cmd->add_option("--l2", l2, "L2 penalty")->capture_default_str();
    cmd->add_option("--init-std", init_std, "initialization standard deviation")->capture_default_str();
    cmd->add_option("--clamp-lo", clamp_lo, "lower prediction bound")->capture_default_str();
    cmd->add_option("--clamp-hi", clamp_hi, "upper prediction bound")->capture_default_str();
  }

  matmat::TrainConfig config(double lr) const {
    matmat::TrainConfig tc;
    tc.learning_rate = lr;
    tc.epochs = epochs;
    tc.d = d;
    tc.seed = seed;
    tc.init_std = init_std;
    tc.l2 = l2;
    tc.clamp = {clamp_lo, clamp_hi};
    return tc;
  }
};

int run_train(const std::string& data_path, const std::string& algo_name, double lr, const TrainingFlags& flags,
              const std::string& out_path) {
  const auto algo = matmat::parse_algorithm(algo_name);
  const auto tc = flags.config(lr);
  matmat::validate(tc);
  if (algo == matmat::Algorithm::matmat && flags.t < 1) throw matmat::ConfigError("t must be at least 1");

  const auto data = matmat::load_dataset(data_path);
  const auto sp = matmat::split(data.table, flags.test_fraction, flags.seed);
  try {
    matmat::AnyModel model;
    std::vector<double> trace;
    if (algo == matmat::Algorithm::matmat) {
      auto r = matmat::train_matmat(data.table, data.popularity, matmat::popularity_spec(flags.t), sp, tc);
      model = std::move(r.model);
      trace = std::move(r.trace.epoch_loss);
    } else {
      auto r = matmat::train_classic(data.table, sp, tc);
      model = std::move(r.model);
      trace = std::move(r.trace.epoch_loss);
    }
    matmat::save_model(out_path, model);
    std::printf("trained %s on %zu triples (%zu users, %zu items); final loss %.6f\n",
                std::string(matmat::to_string(algo)).c_str(), sp.train.size(), data.table.n_users,
                data.table.n_items, trace.back());
    std::printf("model written to %s\n", out_path.c_str());
  } catch (const matmat::TrainingError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitDiverged;
  }
  return 0;
}

int run_eval(const std::string& data_path, const std::string& model_path, double test_fraction, std::uint64_t seed,
             std::size_t k) {
  if (k < 1) throw matmat::ConfigError("k must be at least 1");
  const auto data = matmat::load_dataset(data_path);
  const auto sp = matmat::split(data.table, test_fraction, seed);
  const auto any = matmat::load_model(model_path);

  matmat::EvalReport report;
  std::visit(
      [&](const auto& model) {
        if (model.n_users != data.table.n_users || model.n_items != data.table.n_items) {
          throw matmat::ValidationError("model was trained on " + std::to_string(model.n_users) + " users x " +
                                        std::to_string(model.n_items) + " items but data has " +
                                        std::to_string(data.table.n_users) + " x " +
                                        std::to_string(data.table.n_items));
        }
        report = matmat::evaluate(model, data.table, sp, k);
      },
      any);
  report.algorithm = std::holds_alternative<matmat::MatMatModel>(any) ? "matmat" : "classic";
  std::printf("algorithm: %s\nmae: %.6f\nrmse: %.6f\nmatthew_degree: %.6f\nn_test: %zu\nn_cold: %zu\n",
              report.algorithm.c_str(), report.mae, report.rmse, report.matthew_degree, report.n_test,
              report.n_cold);
  return 0;
}

int run_sweep(const std::string& data_path, const std::string& grid, const std::string& algos, std::size_t k,
              std::size_t threads, const TrainingFlags& flags, const std::string& out_dir) {
  matmat::ExperimentConfig cfg;
  cfg.data_path = data_path;
  cfg.learning_rates = parse_grid(grid);
  cfg.algorithms.clear();
  for (const auto& name : split_list(algos)) cfg.algorithms.push_back(matmat::parse_algorithm(name));
  cfg.epochs = flags.epochs;
  cfg.d = flags.d;
  cfg.t = flags.t;
  cfg.seed = flags.seed;
  cfg.test_fraction = flags.test_fraction;
  cfg.k = k;
  cfg.init_std = flags.init_std;
  cfg.l2 = flags.l2;
  cfg.clamp = {flags.clamp_lo, flags.clamp_hi};
  cfg.output_dir = out_dir;
  cfg.threads = threads;
  matmat::validate(cfg);

  std::error_code ec;
  std::filesystem::create_directories(cfg.output_dir, ec);
  if (ec) throw matmat::IoError("cannot create " + out_dir + ": " + ec.message());

  const auto result = matmat::run_experiment(cfg);
  matmat::emit_csv(result, cfg.output_dir / "sweep.csv");
  matmat::emit_charts(result, cfg.output_dir);
  std::fputs(matmat::format_csv(result).c_str(), stdout);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Matrix factorization by matrix fitting: training, evaluation and sweeps"};
  app.require_subcommand(1);

  std::string data_path, algo = "matmat", out_path, model_path, grid = "0.001,0.002,0.005,0.01,0.02,0.05",
                         algos = "classic,matmat", out_dir;
  double lr = 0.01;
  double eval_fraction = 0.1;
  std::uint64_t eval_seed = 7;
  std::size_t k = 10, threads = 0;
  std::uint64_t fp_users = 0, fp_items = 0, fp_t = 2, fp_d = 2, fp_bytes = 8;

  TrainingFlags train_flags, sweep_flags;

  auto* train = app.add_subcommand("train", "train one model and save it");
  train->add_option("--data", data_path, "ratings CSV")->required();
  train->add_option("--algo", algo, "classic or matmat")->capture_default_str();
  train->add_option("--lr", lr, "learning rate")->capture_default_str();
  train->add_option("--out", out_path, "model output path")->required();
  train_flags.attach(train);

  auto* eval = app.add_subcommand("eval", "evaluate a saved model on the held-out split");
  eval->add_option("--data", data_path, "ratings CSV")->required();
  eval->add_option("--model", model_path, "model file")->required();
  eval->add_option("--test-fraction", eval_fraction, "held-out fraction")->capture_default_str();
  eval->add_option("--seed", eval_seed, "split seed")->capture_default_str();
  eval->add_option("--k", k, "top-k list length for the Matthew degree")->capture_default_str();

  auto* sweep = app.add_subcommand("sweep", "learning-rate sweep writing sweep.csv, mae.svg, matthew.svg");
  sweep->add_option("--data", data_path, "ratings CSV")->required();
  sweep->add_option("--grid", grid, "comma-separated learning rates")->capture_default_str();
  sweep->add_option("--algos", algos, "comma-separated algorithms")->capture_default_str();
  sweep->add_option("--k", k, "top-k list length")->capture_default_str();
  sweep->add_option("--threads", threads, "worker threads (0 = all cores)")->capture_default_str();
  sweep->add_option("--out-dir", out_dir, "output directory")->required();
  sweep_flags.attach(sweep);

  auto* footprint = app.add_subcommand("footprint", "compare dense tensor storage with MatMat factor storage");
  footprint->add_option("--users", fp_users)->required();
  footprint->add_option("--items", fp_items)->required();
  footprint->add_option("--t", fp_t)->capture_default_str();
  footprint->add_option("--d", fp_d)->capture_default_str();
  footprint->add_option("--bytes", fp_bytes, "bytes per stored value")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (*train) return run_train(data_path, algo, lr, train_flags, out_path);
    if (*eval) return run_eval(data_path, model_path, eval_fraction, eval_seed, k);
    if (*sweep) return run_sweep(data_path, grid, algos, k, threads, sweep_flags, out_dir);
    if (*footprint) {
      auto fp = matmat::storage_footprint(fp_users, fp_items, fp_t, fp_d, fp_bytes);
      std::fputs(matmat::format_footprint(fp).c_str(), stdout);
      return 0;
    }
  } catch (const matmat::ConfigError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitUsage;
  } catch (const matmat::TrainingError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitDiverged;
  } catch (const matmat::MetricError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitUsage;
  } catch (const matmat::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitData;
  }
  return 0;
}
