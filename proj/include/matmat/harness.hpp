#pragma once

// Experiment driver: learning-rate sweeps over both algorithms on a shared
// split, CSV output and SVG charts.

#include <cstdint>
#include <filesystem>
#include <limits>
#include <string>
#include <vector>

#include "matmat/dataset.hpp"
#include "matmat/errors.hpp"
#include "matmat/factorization.hpp"
#include "matmat/metrics.hpp"
#include "matmat/model_io.hpp"

namespace matmat {

struct ExperimentConfig {
  std::filesystem::path data_path;
  std::vector<Algorithm> algorithms{Algorithm::classic, Algorithm::matmat};
  std::vector<double> learning_rates{0.001, 0.002, 0.005, 0.01, 0.02, 0.05};
  std::size_t epochs = 30;
  std::size_t d = 2;
  std::size_t t = 2;
  std::uint64_t seed = 7;
  double test_fraction = 0.1;
  std::size_t k = 10;
  double init_std = 0.1;
  double l2 = 0.0;
  ClampRange clamp{};
  std::filesystem::path output_dir;
  std::size_t threads = 0;  // 0: hardware concurrency
};

void validate(const ExperimentConfig& config);

TrainConfig train_config(const ExperimentConfig& config, double learning_rate);

struct SweepResult {
  std::vector<EvalReport> reports;  // ordered by (algorithm, learning_rate)
};

// Scores `model` on the test triples of `split`: MAE/RMSE on the star scale
// and the Matthew degree of its top-k lists. The Matthew degree is NaN when
// fewer than two distinct items get recommended.
template <typename Model>
EvalReport evaluate(const Model& model, const InteractionTable& table, const Split& split, std::size_t k);

struct Dataset {
  InteractionTable table;
  PopularityTable popularity;
};

Dataset load_dataset(const std::filesystem::path& path);

// Runs every (algorithm, learning rate) cell on the same split. Diverged
// cells are reported with diverged = true and NaN metrics.
SweepResult run_sweep(const Dataset& data, const ExperimentConfig& config);
SweepResult run_experiment(const ExperimentConfig& config);

std::string format_csv(const SweepResult& result);
void emit_csv(const SweepResult& result, const std::filesystem::path& path);
// Inverse of format_csv up to print precision; seed is not stored.
SweepResult parse_csv(std::string_view text);

// Writes mae.svg and matthew.svg into `dir`.
void emit_charts(const SweepResult& result, const std::filesystem::path& dir);

std::string human_bytes(std::uint64_t bytes);
std::string format_footprint(const StorageFootprint& fp);

// ---- charts ----------------------------------------------------------------

struct ChartSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;  // non-finite values are skipped when drawing
};

// Pixel geometry of a line chart. The plot area spans
// [left, left + width] x [top, top + height]. With log_x:
//   px = left + width * (log10 x - log10 x_min) / (log10 x_max - log10 x_min)
// and linearly otherwise; y is flipped:
//   py = top + height * (1 - (y - y_min) / (y_max - y_min)).
// A degenerate range maps to the centre of the plot area.
struct ChartLayout {
  double canvas_width = 640;
  double canvas_height = 400;
  double left = 80;
  double top = 40;
  double width = 400;
  double height = 300;
  double x_min = 1, x_max = 1;
  double y_min = 0, y_max = 1;
  bool log_x = true;

  double map_x(double x) const;
  double map_y(double y) const;
};

ChartLayout fit_layout(const std::vector<ChartSeries>& series, bool log_x);

std::string render_line_chart(const std::string& title, const std::string& x_label, const std::string& y_label,
                              const std::vector<ChartSeries>& series, bool log_x = true);

// ---------------------------------------------------------------------------

template <typename Model>
EvalReport evaluate(const Model& model, const InteractionTable& table, const Split& split, std::size_t k) {
  EvalReport report;
  auto known_user = users_in_train(table, split);
  auto known_item = items_in_train(table, split);
  std::vector<double> predicted, actual;
  predicted.reserve(split.test.size());
  actual.reserve(split.test.size());
  for (std::size_t idx : split.test) {
    const Triple& tr = table.triples[idx];
    predicted.push_back(predict(model, tr.user, tr.item));
    actual.push_back(tr.rating);
    if (!known_user[tr.user] || !known_item[tr.item]) ++report.n_cold;
  }
  report.n_test = predicted.size();
  report.mae = mae(predicted, actual);
  report.rmse = rmse(predicted, actual);
  report.seed = split.seed;
  try {
    report.matthew_degree = matthew_degree(topk(model, table, split, k));
  } catch (const MetricError&) {
    report.matthew_degree = std::numeric_limits<double>::quiet_NaN();
  }
  return report;
}

}  // namespace matmat
