#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "matmat/dataset.hpp"
#include "matmat/factorization.hpp"

namespace matmat {

struct EvalReport {
  std::string algorithm;
  double learning_rate = 0.0;
  std::uint64_t seed = 0;
  double mae = 0.0;
  double rmse = 0.0;
  double matthew_degree = 0.0;
  std::size_t n_test = 0;
  std::size_t n_cold = 0;  // test pairs whose user or item has no training triple
  bool diverged = false;
};

// Throw MetricError on empty or mismatched inputs.
double mae(std::span<const double> predictions, std::span<const double> actuals);
double rmse(std::span<const double> predictions, std::span<const double> actuals);

struct TopKLists {
  std::size_t k = 0;
  std::vector<std::vector<ItemIndex>> lists;  // indexed by user
};

// Items a user already rated in training are excluded. Lists are ordered by
// score descending, ties by ascending item index.
template <typename Scorer>
TopKLists topk_by(Scorer&& score, const InteractionTable& table, const Split& split, std::size_t k);

TopKLists topk(const MatMatModel& model, const InteractionTable& table, const Split& split, std::size_t k);
TopKLists topk(const ClassicModel& model, const InteractionTable& table, const Split& split, std::size_t k);

// Degree of Matthew Effect: negated OLS slope of ln(frequency) on ln(rank),
// where frequency counts the lists containing an item, items with zero
// frequency are dropped, and ranks 1..n follow frequency descending.
// 0 means uniform exposure. Throws MetricError with fewer than two items.
double matthew_degree(const TopKLists& lists);
double matthew_degree_from_frequencies(std::span<const double> frequencies);

struct StorageFootprint {
  std::uint64_t tensor_bytes = 0;  // n_users * n_items * t * t * bytes
  std::uint64_t matmat_bytes = 0;  // (n_users + n_items) * t * d * bytes

  double ratio() const noexcept {
    return static_cast<double>(tensor_bytes) / static_cast<double>(matmat_bytes);
  }
};

// Throws ConfigError for zero arguments and MetricError on uint64 overflow.
StorageFootprint storage_footprint(std::uint64_t n_users, std::uint64_t n_items, std::uint64_t t,
                                   std::uint64_t d, std::uint64_t bytes_per_value);

// ---------------------------------------------------------------------------

template <typename Scorer>
TopKLists topk_by(Scorer&& score, const InteractionTable& table, const Split& split, std::size_t k) {
  TopKLists out;
  out.k = k;
  out.lists.resize(table.n_users);
  if (k == 0) return out;

  std::vector<std::vector<ItemIndex>> rated(table.n_users);
  for (std::size_t idx : split.train) rated[table.triples[idx].user].push_back(table.triples[idx].item);

  std::vector<std::uint8_t> excluded(table.n_items, 0);
  std::vector<std::pair<double, ItemIndex>> candidates;
  candidates.reserve(table.n_items);
  auto better = [](const std::pair<double, ItemIndex>& a, const std::pair<double, ItemIndex>& b) {
    return a.first != b.first ? a.first > b.first : a.second < b.second;
  };

  for (UserIndex u = 0; u < table.n_users; ++u) {
    for (ItemIndex i : rated[u]) excluded[i] = 1;
    candidates.clear();
    for (ItemIndex i = 0; i < table.n_items; ++i) {
      if (!excluded[i]) candidates.emplace_back(score(u, i), i);
    }
    for (ItemIndex i : rated[u]) excluded[i] = 0;

    const std::size_t take = std::min(k, candidates.size());
    std::partial_sort(candidates.begin(), candidates.begin() + static_cast<std::ptrdiff_t>(take), candidates.end(),
                      better);
    auto& list = out.lists[u];
    list.reserve(take);
    for (std::size_t r = 0; r < take; ++r) list.push_back(candidates[r].second);
  }
  return out;
}

}  // namespace matmat
