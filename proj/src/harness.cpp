#include "matmat/harness.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <mutex>
#include <set>
#include <thread>

#include "matmat/blocktarget.hpp"
#include "matmat/errors.hpp"

namespace matmat {

void validate(const ExperimentConfig& config) {
  if (config.algorithms.empty()) throw ConfigError("no algorithms selected");
  if (config.learning_rates.empty()) throw ConfigError("learning-rate grid is empty");
  std::set<Algorithm> algos(config.algorithms.begin(), config.algorithms.end());
  if (algos.size() != config.algorithms.size()) throw ConfigError("duplicate algorithm in sweep");
  std::set<double> rates;
  for (double lr : config.learning_rates) {
    if (!(lr > 0.0) || !std::isfinite(lr)) throw ConfigError("learning rates must be positive");
    if (!rates.insert(lr).second) throw ConfigError("duplicate learning rate in grid");
  }
  if (config.t < 1) throw ConfigError("t must be at least 1");
  if (config.k < 1) throw ConfigError("k must be at least 1");
  if (!(config.test_fraction > 0.0 && config.test_fraction < 1.0)) {
    throw ConfigError("test fraction must lie in (0, 1)");
  }
  validate(train_config(config, config.learning_rates.front()));
}

TrainConfig train_config(const ExperimentConfig& config, double learning_rate) {
  TrainConfig tc;
  tc.learning_rate = learning_rate;
  tc.epochs = config.epochs;
  tc.d = config.d;
  tc.seed = config.seed;
  tc.init_std = config.init_std;
  tc.l2 = config.l2;
  tc.clamp = config.clamp;
  return tc;
}

Dataset load_dataset(const std::filesystem::path& path) {
  auto records = load_ratings(path);
  Dataset data{build_interactions(records), {}};
  data.popularity = compute_popularity(data.table);
  return data;
}

namespace {

struct Cell {
  Algorithm algo;
  double learning_rate;
};

EvalReport run_cell(const Dataset& data, const Split& split, const ExperimentConfig& config, const Cell& cell) {
  const TrainConfig tc = train_config(config, cell.learning_rate);
  EvalReport report;
  try {
    if (cell.algo == Algorithm::matmat) {
      auto trained = train_matmat(data.table, data.popularity, popularity_spec(config.t), split, tc);
      report = evaluate(trained.model, data.table, split, config.k);
    } else {
      auto trained = train_classic(data.table, split, tc);
      report = evaluate(trained.model, data.table, split, config.k);
    }
  } catch (const TrainingError&) {
    constexpr double nan = std::numeric_limits<double>::quiet_NaN();
    report = EvalReport{};
    report.mae = report.rmse = report.matthew_degree = nan;
    report.n_test = split.test.size();
    auto known_user = users_in_train(data.table, split);
    auto known_item = items_in_train(data.table, split);
    for (std::size_t idx : split.test) {
      const Triple& tr = data.table.triples[idx];
      if (!known_user[tr.user] || !known_item[tr.item]) ++report.n_cold;
    }
    report.diverged = true;
  }
  report.algorithm = std::string(to_string(cell.algo));
  report.learning_rate = cell.learning_rate;
  report.seed = config.seed;
  return report;
}

}  // namespace

SweepResult run_sweep(const Dataset& data, const ExperimentConfig& config) {
  validate(config);
  const Split shared = split(data.table, config.test_fraction, config.seed);

  std::vector<Algorithm> algos = config.algorithms;
  std::sort(algos.begin(), algos.end(),
            [](Algorithm a, Algorithm b) { return to_string(a) < to_string(b); });
  std::vector<double> rates = config.learning_rates;
  std::sort(rates.begin(), rates.end());
  std::vector<Cell> cells;
  for (Algorithm a : algos) {
    for (double lr : rates) cells.push_back({a, lr});
  }

  SweepResult result;
  result.reports.resize(cells.size());
  std::size_t workers = config.threads ? config.threads : std::max(1u, std::thread::hardware_concurrency());
  workers = std::min(workers, cells.size());

  // Each cell owns its model; reports land at their cell's slot so the output
  // order does not depend on completion order.
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t c = next++; c < cells.size(); c = next++) {
          try {
            result.reports[c] = run_cell(data, shared, config, cells[c]);
          } catch (...) {
            std::lock_guard lock(failure_mutex);
            if (!failure) failure = std::current_exception();
          }
        }
      });
    }
  }
  if (failure) std::rethrow_exception(failure);
  return result;
}

SweepResult run_experiment(const ExperimentConfig& config) {
  validate(config);
  return run_sweep(load_dataset(config.data_path), config);
}

namespace {

std::string fixed6(double v) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

constexpr std::string_view kCsvHeader = "algorithm,learning_rate,mae,rmse,matthew_degree,n_test,n_cold,diverged";

}  // namespace

std::string format_csv(const SweepResult& result) {
  std::string out(kCsvHeader);
  out += '\n';
  for (const auto& r : result.reports) {
    out += r.algorithm + ',' + fixed6(r.learning_rate) + ',' + fixed6(r.mae) + ',' + fixed6(r.rmse) + ',' +
           fixed6(r.matthew_degree) + ',' + std::to_string(r.n_test) + ',' + std::to_string(r.n_cold) + ',' +
           (r.diverged ? "true" : "false") + '\n';
  }
  return out;
}

void emit_csv(const SweepResult& result, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << format_csv(result);
  if (!out) throw IoError("failed writing " + path.string());
}

namespace {

double parse_real(std::string_view s, std::size_t line) {
  if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) throw ParseError(line, "bad number '" + std::string(s) + "'");
  return v;
}

std::size_t parse_count(std::string_view s, std::size_t line) {
  std::size_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) throw ParseError(line, "bad count '" + std::string(s) + "'");
  return v;
}

}  // namespace

SweepResult parse_csv(std::string_view text) {
  SweepResult result;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto eol = text.find('\n', pos);
    std::string_view line = text.substr(pos, eol == std::string_view::npos ? std::string_view::npos : eol - pos);
    pos = eol == std::string_view::npos ? text.size() : eol + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    if (line_no == 1) {
      if (line != kCsvHeader) throw ParseError(1, "unexpected sweep CSV header");
      continue;
    }
    std::vector<std::string_view> f;
    std::size_t start = 0;
    for (auto comma = line.find(','); ; comma = line.find(',', start)) {
      f.push_back(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    if (f.size() != 8) throw ParseError(line_no, "expected 8 fields");
    EvalReport r;
    r.algorithm = std::string(f[0]);
    r.learning_rate = parse_real(f[1], line_no);
    r.mae = parse_real(f[2], line_no);
    r.rmse = parse_real(f[3], line_no);
    r.matthew_degree = parse_real(f[4], line_no);
    r.n_test = parse_count(f[5], line_no);
    r.n_cold = parse_count(f[6], line_no);
    if (f[7] != "true" && f[7] != "false") throw ParseError(line_no, "diverged must be true or false");
    r.diverged = f[7] == "true";
    result.reports.push_back(std::move(r));
  }
  return result;
}

void emit_charts(const SweepResult& result, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());

  std::vector<ChartSeries> mae_series, matthew_series;
  for (const auto& r : result.reports) {
    auto find = [&](std::vector<ChartSeries>& v) -> ChartSeries& {
      for (auto& s : v) {
        if (s.label == r.algorithm) return s;
      }
      v.push_back({r.algorithm, {}, {}});
      return v.back();
    };
    ChartSeries& m = find(mae_series);
    m.x.push_back(r.learning_rate);
    m.y.push_back(r.mae);
    ChartSeries& f = find(matthew_series);
    f.x.push_back(r.learning_rate);
    f.y.push_back(r.matthew_degree);
  }

  auto write = [&](const std::filesystem::path& path, const std::string& svg) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path.string());
    out << svg;
    if (!out) throw IoError("failed writing " + path.string());
  };
  write(dir / "mae.svg", render_line_chart("MAE vs learning rate", "learning rate", "MAE", mae_series));
  write(dir / "matthew.svg",
        render_line_chart("Degree of Matthew Effect vs learning rate", "learning rate", "Matthew degree",
                          matthew_series));
}

std::string human_bytes(std::uint64_t bytes) {
  static constexpr const char* kUnits[] = {"B", "KB", "MB", "GB", "TB", "PB", "EB"};
  double value = static_cast<double>(bytes);
  std::size_t unit = 0;
  while (value >= 1000.0 && unit + 1 < std::size(kUnits)) {
    value /= 1000.0;
    ++unit;
  }
  char buf[64];
  if (unit == 0) {
    std::snprintf(buf, sizeof(buf), "%llu B", static_cast<unsigned long long>(bytes));
  } else {
    std::snprintf(buf, sizeof(buf), "%.1f %s", value, kUnits[unit]);
  }
  return buf;
}

std::string format_footprint(const StorageFootprint& fp) {
  char ratio[64];
  std::snprintf(ratio, sizeof(ratio), "%.1f", fp.ratio());
  return "tensor_bytes: " + std::to_string(fp.tensor_bytes) + " (" + human_bytes(fp.tensor_bytes) + ")\n" +
         "matmat_bytes: " + std::to_string(fp.matmat_bytes) + " (" + human_bytes(fp.matmat_bytes) + ")\n" +
         "ratio: " + ratio + "x\n";
}

}  // namespace matmat
