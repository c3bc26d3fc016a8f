#include <cmath>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "matmat/errors.hpp"
#include "matmat/harness.hpp"
#include "oracles.hpp"

using namespace matmat;

namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

Dataset synthetic(std::uint64_t seed = 3) {
  auto recs = oracle::structured_records(60, 90, 0.15, seed);
  Dataset d{build_interactions(recs), {}};
  d.popularity = compute_popularity(d.table);
  return d;
}

ExperimentConfig small_config() {
  ExperimentConfig c;
  c.learning_rates = {0.01};
  c.epochs = 5;
  c.seed = 11;
  c.threads = 2;
  return c;
}

}  // namespace

TEST_CASE("one grid point and two algorithms give two reports") {
  auto result = run_sweep(synthetic(), small_config());
  REQUIRE(result.reports.size() == 2);
  CHECK(result.reports[0].algorithm == "classic");
  CHECK(result.reports[1].algorithm == "matmat");
  for (const auto& r : result.reports) {
    CHECK(r.learning_rate == 0.01);
    CHECK_FALSE(r.diverged);
    CHECK(r.mae >= 0.0);
    CHECK(r.mae <= 4.5);
    CHECK(r.rmse >= 0.0);
    CHECK(std::isfinite(r.matthew_degree));
  }
}

TEST_CASE("sweep rows are ordered by algorithm then learning rate, on a shared split") {
  auto cfg = small_config();
  cfg.algorithms = {Algorithm::matmat, Algorithm::classic};
  cfg.learning_rates = {0.02, 0.005, 0.01};
  auto result = run_sweep(synthetic(), cfg);
  REQUIRE(result.reports.size() == 6);
  const char* algos[] = {"classic", "classic", "classic", "matmat", "matmat", "matmat"};
  const double rates[] = {0.005, 0.01, 0.02, 0.005, 0.01, 0.02};
  for (std::size_t k = 0; k < 6; ++k) {
    CHECK(result.reports[k].algorithm == algos[k]);
    CHECK(result.reports[k].learning_rate == rates[k]);
    CHECK(result.reports[k].n_test == result.reports[0].n_test);
    CHECK(result.reports[k].n_cold == result.reports[0].n_cold);
  }
}

TEST_CASE("sweep output does not depend on the thread count") {
  auto cfg = small_config();
  cfg.learning_rates = {0.005, 0.01, 0.02};
  auto data = synthetic();
  cfg.threads = 1;
  auto serial = format_csv(run_sweep(data, cfg));
  cfg.threads = 4;
  CHECK(format_csv(run_sweep(data, cfg)) == serial);
}

TEST_CASE("invalid sweep configurations are rejected") {
  auto data = synthetic();
  auto cfg = small_config();
  cfg.learning_rates = {};
  CHECK_THROWS_AS(run_sweep(data, cfg), ConfigError);
  cfg.learning_rates = {0.01, 0.01};
  CHECK_THROWS_AS(run_sweep(data, cfg), ConfigError);
  cfg.learning_rates = {-0.01};
  CHECK_THROWS_AS(run_sweep(data, cfg), ConfigError);
  cfg = small_config();
  cfg.algorithms = {};
  CHECK_THROWS_AS(run_sweep(data, cfg), ConfigError);
}

TEST_CASE("diverging cells are data, not crashes") {
  auto cfg = small_config();
  cfg.learning_rates = {0.01, 1e6};
  auto result = run_sweep(synthetic(), cfg);
  REQUIRE(result.reports.size() == 4);
  for (const auto& r : result.reports) {
    if (r.learning_rate == 1e6) {
      CHECK(r.diverged);
      CHECK(std::isnan(r.mae));
    } else {
      CHECK_FALSE(r.diverged);
    }
  }
  auto csv = format_csv(result);
  CHECK(csv.find("classic,1000000.000000,nan,nan,nan,") != std::string::npos);
  CHECK(csv.find(",true\n") != std::string::npos);
}

TEST_CASE("CSV layout and parse-back") {
  SweepResult r;
  r.reports.push_back({"classic", 0.001, 7, 0.7512345678, 0.95, 1.2345, 100, 3, false});
  r.reports.push_back({"matmat", 0.001, 7, 0.70, 0.9, 0.98, 100, 3, false});
  auto csv = format_csv(r);
  CHECK(csv ==
        "algorithm,learning_rate,mae,rmse,matthew_degree,n_test,n_cold,diverged\n"
        "classic,0.001000,0.751235,0.950000,1.234500,100,3,false\n"
        "matmat,0.001000,0.700000,0.900000,0.980000,100,3,false\n");

  auto back = parse_csv(csv);
  REQUIRE(back.reports.size() == 2);
  for (std::size_t k = 0; k < 2; ++k) {
    CHECK(back.reports[k].algorithm == r.reports[k].algorithm);
    CHECK(std::abs(back.reports[k].learning_rate - r.reports[k].learning_rate) <= 5e-7);
    CHECK(std::abs(back.reports[k].mae - r.reports[k].mae) <= 5e-7);
    CHECK(std::abs(back.reports[k].rmse - r.reports[k].rmse) <= 5e-7);
    CHECK(std::abs(back.reports[k].matthew_degree - r.reports[k].matthew_degree) <= 5e-7);
    CHECK(back.reports[k].n_test == 100);
    CHECK(back.reports[k].n_cold == 3);
  }
  CHECK_THROWS_AS(parse_csv("bogus,header\n"), ParseError);
}

TEST_CASE("swept CSV parses back within print precision") {
  auto cfg = small_config();
  cfg.learning_rates = {0.003, 0.03};
  auto result = run_sweep(synthetic(), cfg);
  auto dir = oracle::temp_dir("harness_csv");
  emit_csv(result, dir / "sweep.csv");
  auto text = slurp(dir / "sweep.csv");
  CHECK(oracle::count_occurrences(text, "\n") == 5);
  auto back = parse_csv(text);
  REQUIRE(back.reports.size() == result.reports.size());
  for (std::size_t k = 0; k < back.reports.size(); ++k) {
    CHECK(std::abs(back.reports[k].mae - result.reports[k].mae) <= 5e-7);
    CHECK(std::abs(back.reports[k].matthew_degree - result.reports[k].matthew_degree) <= 5e-7);
  }
  CHECK_THROWS_AS(emit_csv(result, "/nonexistent-dir/x/sweep.csv"), IoError);
}

TEST_CASE("charts have one polyline per algorithm with one point per rate") {
  SweepResult r;
  const double rates[] = {0.001, 0.002, 0.005, 0.01, 0.02};
  for (const char* algo : {"classic", "matmat"})
    for (double lr : rates) r.reports.push_back({algo, lr, 0, 0.8 + lr, 0.9, 1.0 - lr, 10, 0, false});
  auto dir = oracle::temp_dir("harness_charts");
  emit_charts(r, dir);
  for (const char* name : {"mae.svg", "matthew.svg"}) {
    auto svg = slurp(dir / name);
    CHECK(svg.rfind("<svg", 0) == 0);
    CHECK(oracle::well_formed_xml(svg));
    CHECK(oracle::count_occurrences(svg, "<polyline") == 2);
    auto pos = svg.find("<polyline");
    while (pos != std::string::npos) {
      auto pts_start = svg.find("points=\"", pos) + 8;
      auto pts = svg.substr(pts_start, svg.find('"', pts_start) - pts_start);
      CHECK(oracle::count_occurrences(pts, ",") == 5);
      pos = svg.find("<polyline", pos + 1);
    }
    CHECK(svg.find("classic") != std::string::npos);
    CHECK(svg.find("matmat") != std::string::npos);
    CHECK(svg.find("learning rate") != std::string::npos);
  }
}

TEST_CASE("chart coordinates follow the documented mapping") {
  std::vector<ChartSeries> series{{"a", {0.001, 0.1}, {2.0, 4.0}}};
  auto L = fit_layout(series, true);
  CHECK(L.x_min == 0.001);
  CHECK(L.x_max == 0.1);
  CHECK(L.y_min == 2.0);
  CHECK(L.y_max == 4.0);
  // log10 range [-3, -1]; 0.01 sits halfway
  CHECK(L.map_x(0.001) == doctest::Approx(L.left));
  CHECK(L.map_x(0.01) == doctest::Approx(L.left + L.width / 2));
  CHECK(L.map_x(0.1) == doctest::Approx(L.left + L.width));
  CHECK(L.map_y(2.0) == doctest::Approx(L.top + L.height));
  CHECK(L.map_y(3.5) == doctest::Approx(L.top + 0.25 * L.height));
  CHECK(L.map_y(4.0) == doctest::Approx(L.top));

  // left 80, width 400, top 40, height 300 -> (80, 340) and (480, 40)
  auto svg = render_line_chart("t", "x", "y", series);
  CHECK(svg.find("points=\"80.00,340.00 480.00,40.00\"") != std::string::npos);

  auto lin = fit_layout(series, false);
  CHECK(lin.map_x(0.0505) == doctest::Approx(lin.left + lin.width / 2));

  std::vector<ChartSeries> flat{{"f", {0.01}, {1.0}}};
  auto F = fit_layout(flat, true);
  CHECK(F.map_x(0.01) == doctest::Approx(F.left + F.width / 2));
  CHECK(F.map_y(1.0) == doctest::Approx(F.top + F.height / 2));
}

TEST_CASE("non-finite values are left out of the polyline") {
  std::vector<ChartSeries> series{{"a", {0.001, 0.01, 0.1}, {1.0, std::nan(""), 2.0}}};
  auto svg = render_line_chart("t", "x", "y", series);
  auto pts_start = svg.find("points=\"") + 8;
  auto pts = svg.substr(pts_start, svg.find('"', pts_start) - pts_start);
  CHECK(oracle::count_occurrences(pts, ",") == 2);
  CHECK(oracle::well_formed_xml(svg));
}

TEST_CASE("footprint report in human units") {
  auto text = format_footprint(storage_footprint(610, 9724, 2, 2, 8));
  CHECK(text.find("tensor_bytes: 189812480 (189.8 MB)") != std::string::npos);
  CHECK(text.find("matmat_bytes: 330688 (330.7 KB)") != std::string::npos);
  CHECK(text.find("ratio: 574.0x") != std::string::npos);
  CHECK(format_footprint(storage_footprint(1, 1, 1, 1, 8)).find("ratio: 0.5x") != std::string::npos);
  CHECK(human_bytes(999) == "999 B");
  CHECK(human_bytes(160'000'000'000'000ull) == "160.0 TB");
}

TEST_CASE("evaluate counts cold pairs and scores on the star scale") {
  // user 3 and item 30 appear only in the pair that lands in the test set
  std::vector<RatingRecord> recs{{1, 10, 4.0, 0}, {1, 20, 3.0, 0}, {2, 10, 5.0, 0},
                                 {2, 20, 2.0, 0}, {3, 30, 1.0, 0}};
  auto table = build_interactions(recs);
  Split sp{{0, 1, 2, 3}, {4}, 0.2, 0};
  TrainConfig c;
  c.seed = 1;
  auto model = init_classic(c, table.n_users, table.n_items, table.max_rating);
  auto report = evaluate(model, table, sp, 1);
  CHECK(report.n_test == 1);
  CHECK(report.n_cold == 1);
  CHECK(report.mae == doctest::Approx(std::abs(predict_classic(model, 2, 2) - 1.0)));
}

TEST_CASE("run_experiment reads the data file") {
  auto dir = oracle::temp_dir("harness_experiment");
  oracle::write_csv(dir / "ratings.csv", oracle::structured_records(30, 40, 0.2, 1));
  auto cfg = small_config();
  cfg.data_path = dir / "ratings.csv";
  auto result = run_experiment(cfg);
  CHECK(result.reports.size() == 2);
  cfg.data_path = dir / "missing.csv";
  CHECK_THROWS_AS(run_experiment(cfg), IngestError);
}
