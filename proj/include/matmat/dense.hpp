#pragma once

// Small row-major dense blocks. Factor blocks are t x d or d x t with t, d in
// the single digits, so plain loops beat any blocked GEMM here.

#include <cassert>
#include <cstddef>
#include <span>
#include <type_traits>
#include <vector>

namespace matmat {

template <typename T>
class BasicMatrixView {
 public:
  BasicMatrixView() = default;
  BasicMatrixView(T* data, std::size_t rows, std::size_t cols) : data_(data), rows_(rows), cols_(cols) {}

  // const view from mutable view
  template <typename U>
    requires(std::is_const_v<T> && std::is_same_v<std::remove_const_t<T>, U>)
  BasicMatrixView(BasicMatrixView<U> other) : data_(other.data()), rows_(other.rows()), cols_(other.cols()) {}

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return rows_ * cols_; }
  T* data() const noexcept { return data_; }
  std::span<T> flat() const noexcept { return {data_, size()}; }

  T& operator()(std::size_t r, std::size_t c) const {
    assert(r < rows_ && c < cols_);
    return data_[r * cols_ + c];
  }

 private:
  T* data_ = nullptr;
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
};

using MatrixView = BasicMatrixView<double>;
using ConstMatrixView = BasicMatrixView<const double>;

class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
  Matrix(std::size_t rows, std::size_t cols, std::vector<double> values);
  static Matrix from_view(ConstMatrixView v);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
  std::span<double> flat() noexcept { return data_; }
  std::span<const double> flat() const noexcept { return data_; }

  MatrixView view() noexcept { return {data_.data(), rows_, cols_}; }
  ConstMatrixView view() const noexcept { return {data_.data(), rows_, cols_}; }
  operator MatrixView() noexcept { return view(); }
  operator ConstMatrixView() const noexcept { return view(); }

  bool operator==(const Matrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

// `count` equally shaped blocks stored back to back.
class BlockBank {
 public:
  BlockBank() = default;
  BlockBank(std::size_t count, std::size_t rows, std::size_t cols)
      : count_(count), rows_(rows), cols_(cols), data_(count * rows * cols, 0.0) {}

  std::size_t count() const noexcept { return count_; }
  std::size_t block_rows() const noexcept { return rows_; }
  std::size_t block_cols() const noexcept { return cols_; }

  MatrixView block(std::size_t k) noexcept { return {data_.data() + k * rows_ * cols_, rows_, cols_}; }
  ConstMatrixView block(std::size_t k) const noexcept {
    return {data_.data() + k * rows_ * cols_, rows_, cols_};
  }
  std::span<double> flat() noexcept { return data_; }
  std::span<const double> flat() const noexcept { return data_; }

  bool operator==(const BlockBank&) const = default;

 private:
  std::size_t count_ = 0;
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

// out = a * b. Throws ShapeError on mismatched shapes.
void multiply(ConstMatrixView a, ConstMatrixView b, MatrixView out);
Matrix multiply(ConstMatrixView a, ConstMatrixView b);

double frobenius_squared(ConstMatrixView m);
bool all_finite(std::span<const double> values);

}  // namespace matmat
