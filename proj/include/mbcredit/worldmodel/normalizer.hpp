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

#ifndef MBCREDIT_WORLDMODEL_NORMALIZER_HPP_
#define MBCREDIT_WORLDMODEL_NORMALIZER_HPP_

#include <cmath>
#include <cstddef>
#include <vector>

#include "mbcredit/errors.hpp"
#include "mbcredit/numcore/tensor.hpp"

namespace mbcredit::worldmodel {

using numcore::Tensor;

// Per-coordinate running mean/variance over every row ever observed,
// merged batch-wise with the parallel variance formula.
class RunningNormalizer {
 public:
  RunningNormalizer() = default;
  explicit RunningNormalizer(std::size_t dim)
      : mean_(dim, 0.0), m2_(dim, 0.0) {}

  std::size_t dim() const { return mean_.size(); }
  double count() const { return count_; }

  void Update(const Tensor& rows) {
    MBCREDIT_CHECK_DIM(rows.cols() == dim(), "normalizer dimension mismatch");
    const double nb = static_cast<double>(rows.rows());
    if (nb == 0.0) return;
    for (std::size_t k = 0; k < dim(); ++k) {
      double mb = 0.0;
      for (std::size_t r = 0; r < rows.rows(); ++r) mb += rows(r, k);
      mb /= nb;
      double m2b = 0.0;
      for (std::size_t r = 0; r < rows.rows(); ++r) {
        const double d = rows(r, k) - mb;
        m2b += d * d;
      }
      const double n = count_ + nb;
      const double delta = mb - mean_[k];
      mean_[k] += delta * nb / n;
      m2_[k] += m2b + delta * delta * count_ * nb / n;
    }
    count_ += nb;
  }

  double mean(std::size_t k) const { return mean_[k]; }

  // Population std; coordinates with (near) zero spread get scale 1.
  double scale(std::size_t k) const {
    if (count_ <= 0.0) return 1.0;
    const double s = std::sqrt(m2_[k] / count_);
    return s < kMinScale ? 1.0 : s;
  }

  double Normalize(std::size_t k, double x) const {
    return (x - mean_[k]) / scale(k);
  }
  double Denormalize(std::size_t k, double z) const {
    return z * scale(k) + mean_[k];
  }

  Tensor Normalize(const Tensor& rows) const {
    Tensor out = rows;
    for (std::size_t r = 0; r < rows.rows(); ++r) {
      for (std::size_t k = 0; k < dim(); ++k) out(r, k) = Normalize(k, rows(r, k));
    }
    return out;
  }
  Tensor Denormalize(const Tensor& rows) const {
    Tensor out = rows;
    for (std::size_t r = 0; r < rows.rows(); ++r) {
      for (std::size_t k = 0; k < dim(); ++k) {
        out(r, k) = Denormalize(k, rows(r, k));
      }
    }
    return out;
  }

  // Serialized as a (3, dim) tensor: count row, mean row, m2 row.
  Tensor ToTensor() const {
    Tensor t = Tensor::Zeros(3, dim());
    for (std::size_t k = 0; k < dim(); ++k) {
      t(0, k) = count_;
      t(1, k) = mean_[k];
      t(2, k) = m2_[k];
    }
    return t;
  }
  static RunningNormalizer FromTensor(const Tensor& t) {
    MBCREDIT_CHECK_DIM(t.rows() == 3, "normalizer tensor must have 3 rows");
    RunningNormalizer n(t.cols());
    n.count_ = t.cols() ? t(0, 0) : 0.0;
    for (std::size_t k = 0; k < t.cols(); ++k) {
      n.mean_[k] = t(1, k);
      n.m2_[k] = t(2, k);
    }
    return n;
  }

 private:
  static constexpr double kMinScale = 1e-8;

  double count_ = 0.0;
  std::vector<double> mean_;
  std::vector<double> m2_;
};

}  // namespace mbcredit::worldmodel

#endif  // MBCREDIT_WORLDMODEL_NORMALIZER_HPP_
