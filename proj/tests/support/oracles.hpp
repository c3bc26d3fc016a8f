#pragma once

// Test-only reference computations and synthetic data. Nothing here calls
// into the code paths it is used to check.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "matmat/dataset.hpp"
#include "matmat/factorization.hpp"

namespace oracle {

// Row-major dense matrix as nested vectors.
using Mat = std::vector<std::vector<double>>;

inline Mat to_mat(matmat::ConstMatrixView v) {
  Mat m(v.rows(), std::vector<double>(v.cols()));
  for (std::size_t r = 0; r < v.rows(); ++r)
    for (std::size_t c = 0; c < v.cols(); ++c) m[r][c] = v.data()[r * v.cols() + c];
  return m;
}

inline Mat product(const Mat& a, const Mat& b) {
  Mat out(a.size(), std::vector<double>(b[0].size(), 0.0));
  for (std::size_t r = 0; r < a.size(); ++r)
    for (std::size_t c = 0; c < b[0].size(); ++c) {
      long double acc = 0;
      for (std::size_t k = 0; k < b.size(); ++k) acc += static_cast<long double>(a[r][k]) * b[k][c];
      out[r][c] = static_cast<double>(acc);
    }
  return out;
}

// ||U V - R||^2 + l2 (||U||^2 + ||V||^2), accumulated in long double.
inline long double block_loss(const Mat& U, const Mat& V, const Mat& R, double l2 = 0.0) {
  long double loss = 0;
  for (std::size_t a = 0; a < R.size(); ++a)
    for (std::size_t b = 0; b < R[0].size(); ++b) {
      long double p = 0;
      for (std::size_t k = 0; k < V.size(); ++k) p += static_cast<long double>(U[a][k]) * V[k][b];
      const long double e = p - R[a][b];
      loss += e * e;
    }
  long double pen = 0;
  for (const auto& row : U)
    for (double v : row) pen += static_cast<long double>(v) * v;
  for (const auto& row : V)
    for (double v : row) pen += static_cast<long double>(v) * v;
  return loss + l2 * pen;
}

// Central finite differences of block_loss with respect to every entry of U and V.
inline std::pair<Mat, Mat> fd_gradient(Mat U, Mat V, const Mat& R, double l2, double h = 1e-5) {
  Mat gU = U, gV = V;
  for (std::size_t r = 0; r < U.size(); ++r)
    for (std::size_t c = 0; c < U[0].size(); ++c) {
      const double keep = U[r][c];
      U[r][c] = keep + h;
      const long double up = block_loss(U, V, R, l2);
      U[r][c] = keep - h;
      const long double down = block_loss(U, V, R, l2);
      U[r][c] = keep;
      gU[r][c] = static_cast<double>((up - down) / (2 * h));
    }
  for (std::size_t r = 0; r < V.size(); ++r)
    for (std::size_t c = 0; c < V[0].size(); ++c) {
      const double keep = V[r][c];
      V[r][c] = keep + h;
      const long double up = block_loss(U, V, R, l2);
      V[r][c] = keep - h;
      const long double down = block_loss(U, V, R, l2);
      V[r][c] = keep;
      gV[r][c] = static_cast<double>((up - down) / (2 * h));
    }
  return {gU, gV};
}

inline Mat random_mat(std::size_t rows, std::size_t cols, std::mt19937_64& rng, double lo = -1.0, double hi = 1.0) {
  std::uniform_real_distribution<double> dist(lo, hi);
  Mat m(rows, std::vector<double>(cols));
  for (auto& row : m)
    for (double& v : row) v = dist(rng);
  return m;
}

inline matmat::Matrix to_matrix(const Mat& m) {
  std::vector<double> flat;
  for (const auto& row : m) flat.insert(flat.end(), row.begin(), row.end());
  return matmat::Matrix(m.size(), m[0].size(), std::move(flat));
}

// OLS slope of y on x through the 2x2 normal equations in long double
// (uncentered sums), a different route from the centered implementation.
inline double ols_slope(const std::vector<double>& x, const std::vector<double>& y) {
  long double n = static_cast<long double>(x.size()), sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    sx += x[k];
    sy += y[k];
    sxx += static_cast<long double>(x[k]) * x[k];
    sxy += static_cast<long double>(x[k]) * y[k];
  }
  return static_cast<double>((n * sxy - sx * sy) / (n * sxx - sx * sx));
}

// Zipf-like frequencies C * r^(-alpha) for r = 1..n.
inline std::vector<double> power_law(std::size_t n, double alpha, double scale) {
  std::vector<double> f(n);
  for (std::size_t r = 1; r <= n; ++r) f[r - 1] = scale * std::pow(static_cast<double>(r), -alpha);
  return f;
}

// Observed (user, item) pairs at the given density; every user and item gets
// at least one pair.
inline std::vector<std::pair<std::uint32_t, std::uint32_t>> random_pattern(std::size_t n_users, std::size_t n_items,
                                                                            double density, std::mt19937_64& rng) {
  std::set<std::pair<std::uint32_t, std::uint32_t>> pairs;
  for (std::uint32_t u = 0; u < n_users; ++u) pairs.emplace(u, static_cast<std::uint32_t>(rng() % n_items));
  for (std::uint32_t i = 0; i < n_items; ++i) pairs.emplace(static_cast<std::uint32_t>(rng() % n_users), i);
  const auto target = static_cast<std::size_t>(density * static_cast<double>(n_users * n_items));
  while (pairs.size() < target) {
    pairs.emplace(static_cast<std::uint32_t>(rng() % n_users), static_cast<std::uint32_t>(rng() % n_items));
  }
  return {pairs.begin(), pairs.end()};
}

// Block samples whose targets are exactly U*_u V*_i for planted factors.
inline std::vector<matmat::BlockSample> planted_blocks(std::size_t n_users, std::size_t n_items, std::size_t t,
                                                       std::size_t d, double density, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<Mat> U, V;
  for (std::size_t u = 0; u < n_users; ++u) U.push_back(random_mat(t, d, rng, 0.2, 1.0));
  for (std::size_t i = 0; i < n_items; ++i) V.push_back(random_mat(d, t, rng, 0.2, 1.0));
  std::vector<matmat::BlockSample> samples;
  for (auto [u, i] : random_pattern(n_users, n_items, density, rng)) {
    samples.push_back({u, i, to_matrix(product(U[u], V[i]))});
  }
  return samples;
}

inline std::vector<matmat::ScalarSample> planted_scalars(std::size_t n_users, std::size_t n_items, std::size_t d,
                                                         double density, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<Mat> P, Q;
  for (std::size_t u = 0; u < n_users; ++u) P.push_back(random_mat(1, d, rng, 0.2, 1.0));
  for (std::size_t i = 0; i < n_items; ++i) Q.push_back(random_mat(d, 1, rng, 0.2, 1.0));
  std::vector<matmat::ScalarSample> samples;
  for (auto [u, i] : random_pattern(n_users, n_items, density, rng)) {
    samples.push_back({u, i, product(P[u], Q[i])[0][0]});
  }
  return samples;
}

// Random half-star ratings in [0.5, 5] on a random pattern, as CSV records.
inline std::vector<matmat::RatingRecord> random_records(std::size_t n_users, std::size_t n_items, double density,
                                                        std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<matmat::RatingRecord> recs;
  std::int64_t ts = 1000;
  for (auto [u, i] : random_pattern(n_users, n_items, density, rng)) {
    const double stars = 0.5 * static_cast<double>(1 + rng() % 10);
    recs.push_back({static_cast<std::int64_t>(u) * 3 + 1, static_cast<std::int64_t>(i) * 7 + 2, stars, ts++});
  }
  return recs;
}

// Ratings driven by a planted low-rank structure plus item popularity, so
// that learned models beat a constant predictor.
inline std::vector<matmat::RatingRecord> structured_records(std::size_t n_users, std::size_t n_items, double density,
                                                            std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<Mat> P, Q;
  for (std::size_t u = 0; u < n_users; ++u) P.push_back(random_mat(1, 2, rng, 0.3, 1.0));
  for (std::size_t i = 0; i < n_items; ++i) Q.push_back(random_mat(2, 1, rng, 0.3, 1.0));
  std::normal_distribution<double> noise(0.0, 0.3);
  std::vector<matmat::RatingRecord> recs;
  for (auto [u, i] : random_pattern(n_users, n_items, density, rng)) {
    double r = 0.5 + 4.5 * product(P[u], Q[i])[0][0] / 2.0 + noise(rng);
    r = std::round(std::clamp(r, 0.5, 5.0) * 2.0) / 2.0;
    recs.push_back({static_cast<std::int64_t>(u) + 1, static_cast<std::int64_t>(i) + 1, r, 0});
  }
  return recs;
}

inline void write_csv(const std::filesystem::path& path, const std::vector<matmat::RatingRecord>& recs) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << "userId,movieId,rating,timestamp\n";
  for (const auto& r : recs) out << r.user_ext << ',' << r.item_ext << ',' << r.rating << ',' << r.timestamp << '\n';
}

// Minimal XML well-formedness check: balanced, properly nested tags and
// quoted attributes. Enough for the SVG we emit.
inline bool well_formed_xml(const std::string& s) {
  std::vector<std::string> stack;
  std::size_t pos = 0;
  while ((pos = s.find('<', pos)) != std::string::npos) {
    const auto end = s.find('>', pos);
    if (end == std::string::npos) return false;
    std::string tag = s.substr(pos + 1, end - pos - 1);
    pos = end + 1;
    if (tag.empty()) return false;
    if (tag[0] == '?' || tag[0] == '!') continue;
    std::size_t quotes = 0;
    for (char c : tag) quotes += c == '"';
    if (quotes % 2) return false;
    if (tag[0] == '/') {
      if (stack.empty() || stack.back() != tag.substr(1)) return false;
      stack.pop_back();
    } else if (tag.back() != '/') {
      stack.push_back(tag.substr(0, tag.find_first_of(" \t\n")));
    }
  }
  return stack.empty();
}

inline std::size_t count_occurrences(const std::string& s, const std::string& needle) {
  std::size_t n = 0;
  for (auto pos = s.find(needle); pos != std::string::npos; pos = s.find(needle, pos + 1)) ++n;
  return n;
}

inline std::filesystem::path temp_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("matmat_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace oracle
