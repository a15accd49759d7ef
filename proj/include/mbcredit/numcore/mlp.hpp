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

#ifndef MBCREDIT_NUMCORE_MLP_HPP_
#define MBCREDIT_NUMCORE_MLP_HPP_

#include <cmath>
#include <cstddef>
#include <random>
#include <string>
#include <vector>

#include "mbcredit/errors.hpp"
#include "mbcredit/numcore/autodiff.hpp"
#include "mbcredit/numcore/rng.hpp"
#include "mbcredit/numcore/tensor.hpp"

namespace mbcredit::numcore {

enum class Activation { kIdentity, kRelu, kTanh };

inline std::string ActivationName(Activation a) {
  switch (a) {
    case Activation::kIdentity: return "identity";
    case Activation::kRelu: return "relu";
    case Activation::kTanh: return "tanh";
  }
  return "?";
}

// Fully-connected network y = act(x W + b) per layer. Weights are stored as
// (fan_in, fan_out) so a batch of row vectors multiplies from the left.
class Mlp {
 public:
  Mlp() = default;

  // All parameters zero.
  Mlp(std::vector<std::size_t> layer_sizes, Activation hidden,
      Activation output)
      : layer_sizes_(std::move(layer_sizes)), hidden_(hidden), output_(output) {
    MBCREDIT_CHECK(layer_sizes_.size() >= 2,
                   "Mlp needs at least input and output widths");
    for (std::size_t l = 0; l + 1 < layer_sizes_.size(); ++l) {
      weights_.push_back(Tensor::Zeros(layer_sizes_[l], layer_sizes_[l + 1]));
      biases_.push_back(Tensor::Zeros(1, layer_sizes_[l + 1]));
    }
  }

  Mlp(std::vector<std::size_t> layer_sizes, Activation hidden,
      Activation output, Rng& rng)
      : Mlp(std::move(layer_sizes), hidden, output) {
    Initialize(rng);
  }

  // Uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)) for weights and biases.
  void Initialize(Rng& rng) {
    for (std::size_t l = 0; l < weights_.size(); ++l) {
      const double bound =
          std::sqrt(1.0 / static_cast<double>(layer_sizes_[l]));
      std::uniform_real_distribution<double> u(-bound, bound);
      for (double& w : weights_[l].vec()) w = u(rng);
      for (double& b : biases_[l].vec()) b = u(rng);
    }
  }

  void ZeroParameters() {
    for (auto& w : weights_) w.Fill(0.0);
    for (auto& b : biases_) b.Fill(0.0);
  }

  void ScaleOutputLayer(double factor) {
    weights_.back().matrix() *= factor;
    biases_.back().matrix() *= factor;
  }

  std::size_t input_size() const { return layer_sizes_.front(); }
  std::size_t output_size() const { return layer_sizes_.back(); }
  std::size_t num_layers() const { return weights_.size(); }
  const std::vector<std::size_t>& layer_sizes() const { return layer_sizes_; }
  Activation hidden_activation() const { return hidden_; }
  Activation output_activation() const { return output_; }

  Tensor& weight(std::size_t l) { return weights_[l]; }
  const Tensor& weight(std::size_t l) const { return weights_[l]; }
  Tensor& bias(std::size_t l) { return biases_[l]; }
  const Tensor& bias(std::size_t l) const { return biases_[l]; }

  // Weights and biases interleaved, layer by layer.
  std::vector<Tensor*> Parameters() {
    std::vector<Tensor*> out;
    for (std::size_t l = 0; l < weights_.size(); ++l) {
      out.push_back(&weights_[l]);
      out.push_back(&biases_[l]);
    }
    return out;
  }
  std::vector<const Tensor*> Parameters() const {
    std::vector<const Tensor*> out;
    for (std::size_t l = 0; l < weights_.size(); ++l) {
      out.push_back(&weights_[l]);
      out.push_back(&biases_[l]);
    }
    return out;
  }

  std::size_t NumParameters() const {
    std::size_t n = 0;
    for (const Tensor* p : Parameters()) n += p->size();
    return n;
  }

  // Inference pass, nothing recorded.
  Tensor Forward(const Tensor& input) const {
    CheckInput(input);
    RowMatrix h = input.matrix();
    for (std::size_t l = 0; l < weights_.size(); ++l) {
      RowMatrix z(h.rows(), static_cast<Eigen::Index>(layer_sizes_[l + 1]));
      z.noalias() = h * weights_[l].matrix();
      z.rowwise() += biases_[l].matrix().row(0);
      Apply(l + 1 == weights_.size() ? output_ : hidden_, z);
      h = std::move(z);
    }
    return Tensor::FromMatrix(h);
  }

  // Recording pass. Parameters are registered on the tape so Backward
  // reports gradients keyed by this network's tensors.
  Var Forward(Tape& tape, Var input) const {
    CheckInput(input.value());
    Var h = input;
    for (std::size_t l = 0; l < weights_.size(); ++l) {
      h = ops::MatMul(h, tape.Parameter(weights_[l]));
      h = ops::AddRow(h, tape.Parameter(biases_[l]));
      const Activation act = l + 1 == weights_.size() ? output_ : hidden_;
      if (act == Activation::kRelu) h = ops::Relu(h);
      if (act == Activation::kTanh) h = ops::Tanh(h);
    }
    return h;
  }

  bool AllFinite() const {
    for (const Tensor* p : Parameters()) {
      if (!p->AllFinite()) return false;
    }
    return true;
  }

 private:
  void CheckInput(const Tensor& input) const {
    MBCREDIT_CHECK_DIM(input.rank() == 2 && input.cols() == input_size(),
                       "Mlp input shape " + ShapeString(input.shape()) +
                           " but network expects width " +
                           std::to_string(input_size()));
  }

  static void Apply(Activation act, RowMatrix& z) {
    switch (act) {
      case Activation::kIdentity: break;
      case Activation::kRelu: z = z.cwiseMax(0.0); break;
      case Activation::kTanh: z = z.array().tanh().matrix(); break;
    }
  }

  std::vector<std::size_t> layer_sizes_;
  Activation hidden_ = Activation::kRelu;
  Activation output_ = Activation::kIdentity;
  std::vector<Tensor> weights_;
  std::vector<Tensor> biases_;
};

// Widths [in, hidden x depth, out].
inline std::vector<std::size_t> StackWidths(std::size_t in, std::size_t hidden,
                                            std::size_t depth,
                                            std::size_t out) {
  std::vector<std::size_t> w{in};
  for (std::size_t i = 0; i < depth; ++i) w.push_back(hidden);
  w.push_back(out);
  return w;
}

}  // namespace mbcredit::numcore

#endif  // MBCREDIT_NUMCORE_MLP_HPP_
