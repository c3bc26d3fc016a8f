#include "matmat/metrics.hpp"

#include <cmath>
#include <functional>

#include "matmat/errors.hpp"

namespace matmat {

namespace {

void check_pairs(std::span<const double> predictions, std::span<const double> actuals) {
  if (predictions.empty()) throw MetricError("no predictions to score");
  if (predictions.size() != actuals.size()) throw MetricError("prediction/actual length mismatch");
}

}  // namespace

double mae(std::span<const double> predictions, std::span<const double> actuals) {
  check_pairs(predictions, actuals);
  double total = 0.0;
  for (std::size_t k = 0; k < predictions.size(); ++k) total += std::abs(predictions[k] - actuals[k]);
  return total / static_cast<double>(predictions.size());
}

double rmse(std::span<const double> predictions, std::span<const double> actuals) {
  check_pairs(predictions, actuals);
  double total = 0.0;
  for (std::size_t k = 0; k < predictions.size(); ++k) {
    const double e = predictions[k] - actuals[k];
    total += e * e;
  }
  return std::sqrt(total / static_cast<double>(predictions.size()));
}

TopKLists topk(const MatMatModel& model, const InteractionTable& table, const Split& split, std::size_t k) {
  return topk_by([&](UserIndex u, ItemIndex i) { return predict_matmat(model, u, i); }, table, split, k);
}

TopKLists topk(const ClassicModel& model, const InteractionTable& table, const Split& split, std::size_t k) {
  return topk_by([&](UserIndex u, ItemIndex i) { return predict_classic(model, u, i); }, table, split, k);
}

double matthew_degree_from_frequencies(std::span<const double> frequencies) {
  std::vector<double> f;
  f.reserve(frequencies.size());
  for (double v : frequencies) {
    if (v > 0.0) f.push_back(v);
  }
  if (f.size() < 2) throw MetricError("Matthew degree needs at least two recommended items");
  std::sort(f.begin(), f.end(), std::greater<>());

  // Offsets relative to the first point leave the slope unchanged and make a
  // flat distribution produce exactly zero.
  const std::size_t n = f.size();
  const double y0 = std::log(f[0]);
  double mean_x = 0.0, mean_y = 0.0;
  for (std::size_t r = 0; r < n; ++r) {
    mean_x += std::log(static_cast<double>(r + 1));
    mean_y += std::log(f[r]) - y0;
  }
  mean_x /= static_cast<double>(n);
  mean_y /= static_cast<double>(n);
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t r = 0; r < n; ++r) {
    const double dx = std::log(static_cast<double>(r + 1)) - mean_x;
    sxy += dx * (std::log(f[r]) - y0 - mean_y);
    sxx += dx * dx;
  }
  const double slope = sxy / sxx;
  return slope == 0.0 ? 0.0 : -slope;
}

double matthew_degree(const TopKLists& lists) {
  std::size_t n_items = 0;
  for (const auto& list : lists.lists) {
    for (ItemIndex i : list) n_items = std::max<std::size_t>(n_items, i + 1);
  }
  std::vector<double> freq(n_items, 0.0);
  for (const auto& list : lists.lists) {
    for (ItemIndex i : list) freq[i] += 1.0;
  }
  return matthew_degree_from_frequencies(freq);
}

StorageFootprint storage_footprint(std::uint64_t n_users, std::uint64_t n_items, std::uint64_t t, std::uint64_t d,
                                   std::uint64_t bytes_per_value) {
  if (n_users == 0 || n_items == 0 || t == 0 || d == 0 || bytes_per_value == 0) {
    throw ConfigError("footprint arguments must be positive");
  }
  auto mul = [](std::uint64_t a, std::uint64_t b) {
    std::uint64_t out = 0;
    if (__builtin_mul_overflow(a, b, &out)) throw MetricError("storage footprint overflows 64 bits");
    return out;
  };
  std::uint64_t rows = 0;
  if (__builtin_add_overflow(n_users, n_items, &rows)) throw MetricError("storage footprint overflows 64 bits");

  StorageFootprint fp;
  fp.tensor_bytes = mul(mul(mul(mul(n_users, n_items), t), t), bytes_per_value);
  fp.matmat_bytes = mul(mul(mul(rows, t), d), bytes_per_value);
  return fp;
}

}  // namespace matmat
