// Copyright 2026 The mbcredit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef MBCREDIT_NUMCORE_TENSOR_HPP_
#define MBCREDIT_NUMCORE_TENSOR_HPP_

#include <Eigen/Dense>

#include <cmath>
#include <cstddef>
#include <functional>
#include <initializer_list>
#include <numeric>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "mbcredit/errors.hpp"

namespace mbcredit::numcore {

using RowMatrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MatrixMap = Eigen::Map<RowMatrix>;
using ConstMatrixMap = Eigen::Map<const RowMatrix>;

using Shape = std::vector<std::size_t>;

// SIMD-aligned storage. Eigen picks its vectorized code path from the
// runtime alignment of the first element, so unaligned heap blocks would
// make results depend on where a tensor happens to live.
using Storage = std::vector<double, Eigen::aligned_allocator<double>>;

inline std::size_t NumElements(const Shape& shape) {
  return std::accumulate(shape.begin(), shape.end(), std::size_t{1},
                         std::multiplies<>());
}

inline std::string ShapeString(const Shape& shape) {
  std::ostringstream out;
  out << "(";
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) out << ",";
    out << shape[i];
  }
  out << ")";
  return out.str();
}

// Dense row-major array of doubles. Networks only ever need rank <= 2; a
// rank-2 tensor is (rows, cols) and rank 1 is viewed as a single row.
class Tensor {
 public:
  Tensor() = default;

  explicit Tensor(Shape shape, double fill = 0.0)
      : shape_(std::move(shape)), data_(NumElements(shape_), fill) {}

  Tensor(Shape shape, std::vector<double> data)
      : shape_(std::move(shape)), data_(data.begin(), data.end()) {
    MBCREDIT_CHECK_DIM(NumElements(shape_) == data_.size(),
                       "tensor data length " + std::to_string(data_.size()) +
                           " does not match shape " + ShapeString(shape_));
  }

  static Tensor Zeros(std::size_t rows, std::size_t cols) {
    return Tensor({rows, cols}, 0.0);
  }

  static Tensor Filled(std::size_t rows, std::size_t cols, double value) {
    return Tensor({rows, cols}, value);
  }

  static Tensor Scalar(double value) { return Tensor({1, 1}, value); }

  static Tensor Row(std::span<const double> values) {
    return Tensor({1, values.size()},
                  std::vector<double>(values.begin(), values.end()));
  }

  static Tensor FromRows(std::initializer_list<std::initializer_list<double>> rows) {
    const std::size_t r = rows.size();
    const std::size_t c = r ? rows.begin()->size() : 0;
    std::vector<double> data;
    data.reserve(r * c);
    for (const auto& row : rows) {
      MBCREDIT_CHECK_DIM(row.size() == c, "ragged rows");
      data.insert(data.end(), row.begin(), row.end());
    }
    return Tensor({r, c}, std::move(data));
  }

  static Tensor FromMatrix(const RowMatrix& m) {
    Tensor t = Zeros(static_cast<std::size_t>(m.rows()),
                     static_cast<std::size_t>(m.cols()));
    t.matrix() = m;
    return t;
  }

  const Shape& shape() const { return shape_; }
  std::size_t rank() const { return shape_.size(); }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  std::size_t rows() const {
    if (shape_.size() < 2) return shape_.empty() ? 0 : 1;
    return shape_[0];
  }
  std::size_t cols() const {
    if (shape_.empty()) return 0;
    return shape_.back();
  }

  std::span<double> data() { return data_; }
  std::span<const double> data() const { return data_; }
  Storage& vec() { return data_; }
  const Storage& vec() const { return data_; }
  std::vector<double> ToVector() const {
    return std::vector<double>(data_.begin(), data_.end());
  }

  double& operator[](std::size_t i) { return data_[i]; }
  double operator[](std::size_t i) const { return data_[i]; }

  double& operator()(std::size_t r, std::size_t c) {
    return data_[r * cols() + c];
  }
  double operator()(std::size_t r, std::size_t c) const {
    return data_[r * cols() + c];
  }

  // Scalar value of a single-element tensor.
  double item() const {
    MBCREDIT_CHECK_DIM(data_.size() == 1,
                       "item() on tensor of shape " + ShapeString(shape_));
    return data_[0];
  }

  std::span<double> row(std::size_t r) {
    return std::span<double>(data_).subspan(r * cols(), cols());
  }
  std::span<const double> row(std::size_t r) const {
    return std::span<const double>(data_).subspan(r * cols(), cols());
  }

  MatrixMap matrix() {
    return MatrixMap(data_.data(), static_cast<Eigen::Index>(rows()),
                     static_cast<Eigen::Index>(cols()));
  }
  ConstMatrixMap matrix() const {
    return ConstMatrixMap(data_.data(), static_cast<Eigen::Index>(rows()),
                          static_cast<Eigen::Index>(cols()));
  }

  Tensor Reshaped(Shape shape) const {
    MBCREDIT_CHECK_DIM(NumElements(shape) == data_.size(),
                       "cannot reshape " + ShapeString(shape_) + " to " +
                           ShapeString(shape));
    Tensor t;
    t.shape_ = std::move(shape);
    t.data_ = data_;
    return t;
  }

  void Fill(double value) { std::fill(data_.begin(), data_.end(), value); }

  bool AllFinite() const {
    for (double v : data_) {
      if (!std::isfinite(v)) return false;
    }
    return true;
  }

  bool SameShape(const Tensor& other) const { return shape_ == other.shape_; }

  friend bool operator==(const Tensor& a, const Tensor& b) {
    return a.shape_ == b.shape_ && a.data_ == b.data_;
  }

 private:
  Shape shape_;
  Storage data_;
};

// Gathers the listed rows of `src` into a new tensor.
inline Tensor GatherRows(const Tensor& src, std::span<const std::size_t> idx) {
  Tensor out = Tensor::Zeros(idx.size(), src.cols());
  for (std::size_t i = 0; i < idx.size(); ++i) {
    auto from = src.row(idx[i]);
    std::copy(from.begin(), from.end(), out.row(i).begin());
  }
  return out;
}

// Horizontal concatenation [a | b] of two matrices with equal row counts.
inline Tensor ConcatCols(const Tensor& a, const Tensor& b) {
  MBCREDIT_CHECK_DIM(a.rows() == b.rows(), "ConcatCols row mismatch");
  Tensor out = Tensor::Zeros(a.rows(), a.cols() + b.cols());
  for (std::size_t r = 0; r < a.rows(); ++r) {
    auto dst = out.row(r);
    std::copy(a.row(r).begin(), a.row(r).end(), dst.begin());
    std::copy(b.row(r).begin(), b.row(r).end(),
              dst.begin() + static_cast<std::ptrdiff_t>(a.cols()));
  }
  return out;
}

}  // namespace mbcredit::numcore

#endif  // MBCREDIT_NUMCORE_TENSOR_HPP_
