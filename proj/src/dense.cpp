#include "matmat/dense.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "matmat/errors.hpp"

namespace matmat {

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> values)
    : rows_(rows), cols_(cols), data_(std::move(values)) {
  if (data_.size() != rows * cols) {
    throw ShapeError("matrix of " + std::to_string(rows) + "x" + std::to_string(cols) + " given " +
                     std::to_string(data_.size()) + " values");
  }
}

Matrix Matrix::from_view(ConstMatrixView v) {
  return Matrix(v.rows(), v.cols(), std::vector<double>(v.data(), v.data() + v.size()));
}

void multiply(ConstMatrixView a, ConstMatrixView b, MatrixView out) {
  if (a.cols() != b.rows() || out.rows() != a.rows() || out.cols() != b.cols()) {
    throw ShapeError("multiply: incompatible shapes");
  }
  for (std::size_t r = 0; r < a.rows(); ++r) {
    for (std::size_t c = 0; c < b.cols(); ++c) {
      double acc = 0.0;
      for (std::size_t k = 0; k < a.cols(); ++k) acc += a(r, k) * b(k, c);
      out(r, c) = acc;
    }
  }
}

Matrix multiply(ConstMatrixView a, ConstMatrixView b) {
  Matrix out(a.rows(), b.cols());
  multiply(a, b, out.view());
  return out;
}

double frobenius_squared(ConstMatrixView m) {
  double acc = 0.0;
  for (double v : m.flat()) acc += v * v;
  return acc;
}

bool all_finite(std::span<const double> values) {
  return std::all_of(values.begin(), values.end(), [](double v) { return std::isfinite(v); });
}

}  // namespace matmat
