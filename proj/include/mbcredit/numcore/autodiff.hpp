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

// Reverse-mode automatic differentiation over rank-2 tensors.
//
// A Tape records every primitive applied to its variables. Nodes are
// appended after their parents, so walking the node list backwards is a
// valid reverse topological order. Gradients are only propagated into nodes
// that (transitively) depend on a registered parameter.

#ifndef MBCREDIT_NUMCORE_AUTODIFF_HPP_
#define MBCREDIT_NUMCORE_AUTODIFF_HPP_

#include <cmath>
#include <cstddef>
#include <functional>
#include <unordered_map>
#include <utility>
#include <vector>

#include "mbcredit/errors.hpp"
#include "mbcredit/numcore/tensor.hpp"

namespace mbcredit::numcore {

class Tape;

// Handle to a node on a tape. Cheap to copy; valid while the tape lives.
class Var {
 public:
  Var() = default;
  Var(Tape* tape, std::size_t id) : tape_(tape), id_(id) {}

  const Tensor& value() const;
  Tape* tape() const { return tape_; }
  std::size_t id() const { return id_; }

 private:
  Tape* tape_ = nullptr;
  std::size_t id_ = 0;
};

// Parameter gradients produced by Tape::Backward, keyed by parameter address.
class Gradients {
 public:
  // Gradient for `param`; zeros of the same shape if it was not reached.
  Tensor Of(const Tensor& param) const {
    auto it = grads_.find(&param);
    if (it == grads_.end()) return Tensor(param.shape(), 0.0);
    return it->second;
  }

  bool Reached(const Tensor& param) const { return grads_.count(&param) > 0; }

  void Set(const Tensor* param, Tensor grad) { grads_[param] = std::move(grad); }

  void Accumulate(const Tensor* param, const Tensor& grad) {
    auto it = grads_.find(param);
    if (it == grads_.end()) {
      grads_.emplace(param, grad);
    } else {
      it->second.matrix() += grad.matrix();
    }
  }

 private:
  std::unordered_map<const Tensor*, Tensor> grads_;
};

class Tape {
 public:
  using BackwardFn = std::function<void(Tape&, std::size_t)>;

  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  Var Constant(Tensor value) {
    nodes_.push_back(Node{std::move(value), {}, false, {}, nullptr, false});
    return Var(this, nodes_.size() - 1);
  }

  // Leaf bound to a parameter tensor. The tape reads the tensor in place, so
  // it must stay alive and unmodified until Backward returns.
  Var Parameter(const Tensor& param) {
    nodes_.push_back(Node{Tensor(), {}, false, {}, &param, true});
    return Var(this, nodes_.size() - 1);
  }

  // Appends a derived node. `backward` is only kept when at least one parent
  // needs gradients.
  Var Record(Tensor value, std::initializer_list<Var> parents,
             BackwardFn backward) {
    bool needs = false;
    for (const Var& p : parents) {
      MBCREDIT_CHECK(p.tape() == this, "variable belongs to another tape");
      needs = needs || nodes_[p.id()].requires_grad;
    }
    nodes_.push_back(Node{std::move(value), {}, false,
                          needs ? std::move(backward) : BackwardFn{}, nullptr,
                          needs});
    return Var(this, nodes_.size() - 1);
  }

  const Tensor& value(std::size_t id) const {
    const Node& n = nodes_[id];
    return n.param != nullptr ? *n.param : n.value;
  }
  bool requires_grad(std::size_t id) const { return nodes_[id].requires_grad; }

  // Gradient accumulator of a node, zero-initialized on first touch.
  MatrixMap grad(std::size_t id) {
    Node& n = nodes_[id];
    if (!n.has_grad) {
      n.grad = Tensor(value(id).shape(), 0.0);
      n.has_grad = true;
    }
    return n.grad.matrix();
  }

  std::size_t size() const { return nodes_.size(); }

  Gradients Backward(Var loss) {
    MBCREDIT_CHECK(loss.tape() == this, "loss belongs to another tape");
    const Tensor& lv = value(loss.id());
    MBCREDIT_CHECK(lv.size() == 1,
                   "Backward requires a scalar loss, got shape " +
                       ShapeString(lv.shape()));
    for (Node& n : nodes_) {
      n.has_grad = false;
      n.grad = Tensor();
    }
    grad(loss.id()).setOnes();
    for (std::size_t k = loss.id() + 1; k-- > 0;) {
      Node& n = nodes_[k];
      if (!n.has_grad || !n.requires_grad) continue;
      if (n.backward) n.backward(*this, k);
    }
    Gradients out;
    for (const Node& n : nodes_) {
      if (n.param != nullptr && n.has_grad) out.Accumulate(n.param, n.grad);
    }
    return out;
  }

 private:
  struct Node {
    Tensor value;
    Tensor grad;
    bool has_grad;
    BackwardFn backward;
    const Tensor* param;
    bool requires_grad;
  };

  std::vector<Node> nodes_;
};

inline const Tensor& Var::value() const { return tape_->value(id_); }

namespace ops {

namespace internal {

inline void RequireSameShape(const Var& a, const Var& b, const char* op) {
  MBCREDIT_CHECK_DIM(a.value().shape() == b.value().shape(),
                     std::string(op) + ": shape mismatch " +
                         ShapeString(a.value().shape()) + " vs " +
                         ShapeString(b.value().shape()));
}

}  // namespace internal

inline Var MatMul(const Var& a, const Var& b) {
  const Tensor& av = a.value();
  const Tensor& bv = b.value();
  MBCREDIT_CHECK_DIM(av.cols() == bv.rows(),
                     "MatMul: inner dimensions " + ShapeString(av.shape()) +
                         " x " + ShapeString(bv.shape()));
  Tensor out = Tensor::Zeros(av.rows(), bv.cols());
  out.matrix().noalias() = av.matrix() * bv.matrix();
  const std::size_t ia = a.id(), ib = b.id();
  return a.tape()->Record(std::move(out), {a, b},
                          [ia, ib](Tape& t, std::size_t self) {
                            auto g = t.grad(self);
                            if (t.requires_grad(ia)) {
                              t.grad(ia).noalias() +=
                                  g * t.value(ib).matrix().transpose();
                            }
                            if (t.requires_grad(ib)) {
                              t.grad(ib).noalias() +=
                                  t.value(ia).matrix().transpose() * g;
                            }
                          });
}

// x + b with b a (1, cols) row broadcast over every row of x.
inline Var AddRow(const Var& x, const Var& b) {
  const Tensor& xv = x.value();
  const Tensor& bv = b.value();
  MBCREDIT_CHECK_DIM(bv.rows() == 1 && bv.cols() == xv.cols(),
                     "AddRow: bias shape " + ShapeString(bv.shape()) +
                         " vs input " + ShapeString(xv.shape()));
  Tensor out = xv;
  out.matrix().rowwise() += bv.matrix().row(0);
  const std::size_t ix = x.id(), ib = b.id();
  return x.tape()->Record(std::move(out), {x, b},
                          [ix, ib](Tape& t, std::size_t self) {
                            auto g = t.grad(self);
                            if (t.requires_grad(ix)) t.grad(ix) += g;
                            if (t.requires_grad(ib)) {
                              t.grad(ib) += g.colwise().sum();
                            }
                          });
}

// x * b elementwise with b a (1, cols) row broadcast over every row of x.
inline Var MulRow(const Var& x, const Var& b) {
  const Tensor& xv = x.value();
  const Tensor& bv = b.value();
  MBCREDIT_CHECK_DIM(bv.rows() == 1 && bv.cols() == xv.cols(),
                     "MulRow: shape mismatch");
  Tensor out = xv;
  out.matrix().array().rowwise() *= bv.matrix().row(0).array();
  const std::size_t ix = x.id(), ib = b.id();
  return x.tape()->Record(
      std::move(out), {x, b}, [ix, ib](Tape& t, std::size_t self) {
        auto g = t.grad(self);
        if (t.requires_grad(ix)) {
          t.grad(ix).array() +=
              g.array().rowwise() * t.value(ib).matrix().row(0).array();
        }
        if (t.requires_grad(ib)) {
          t.grad(ib) +=
              (g.array() * t.value(ix).matrix().array()).matrix().colwise().sum();
        }
      });
}

inline Var Add(const Var& a, const Var& b) {
  internal::RequireSameShape(a, b, "Add");
  Tensor out = a.value();
  out.matrix() += b.value().matrix();
  const std::size_t ia = a.id(), ib = b.id();
  return a.tape()->Record(std::move(out), {a, b},
                          [ia, ib](Tape& t, std::size_t self) {
                            auto g = t.grad(self);
                            if (t.requires_grad(ia)) t.grad(ia) += g;
                            if (t.requires_grad(ib)) t.grad(ib) += g;
                          });
}

inline Var Sub(const Var& a, const Var& b) {
  internal::RequireSameShape(a, b, "Sub");
  Tensor out = a.value();
  out.matrix() -= b.value().matrix();
  const std::size_t ia = a.id(), ib = b.id();
  return a.tape()->Record(std::move(out), {a, b},
                          [ia, ib](Tape& t, std::size_t self) {
                            auto g = t.grad(self);
                            if (t.requires_grad(ia)) t.grad(ia) += g;
                            if (t.requires_grad(ib)) t.grad(ib) -= g;
                          });
}

inline Var Mul(const Var& a, const Var& b) {
  internal::RequireSameShape(a, b, "Mul");
  Tensor out = a.value();
  out.matrix().array() *= b.value().matrix().array();
  const std::size_t ia = a.id(), ib = b.id();
  return a.tape()->Record(
      std::move(out), {a, b}, [ia, ib](Tape& t, std::size_t self) {
        auto g = t.grad(self);
        if (t.requires_grad(ia)) {
          t.grad(ia).array() += g.array() * t.value(ib).matrix().array();
        }
        if (t.requires_grad(ib)) {
          t.grad(ib).array() += g.array() * t.value(ia).matrix().array();
        }
      });
}

inline Var Scale(const Var& x, double c) {
  Tensor out = x.value();
  out.matrix() *= c;
  const std::size_t ix = x.id();
  return x.tape()->Record(std::move(out), {x},
                          [ix, c](Tape& t, std::size_t self) {
                            t.grad(ix) += c * t.grad(self);
                          });
}

inline Var AddScalar(const Var& x, double c) {
  Tensor out = x.value();
  out.matrix().array() += c;
  const std::size_t ix = x.id();
  return x.tape()->Record(std::move(out), {x},
                          [ix](Tape& t, std::size_t self) {
                            t.grad(ix) += t.grad(self);
                          });
}

inline Var Relu(const Var& x) {
  Tensor out = x.value();
  out.matrix() = out.matrix().cwiseMax(0.0);
  const std::size_t ix = x.id();
  return x.tape()->Record(
      std::move(out), {x}, [ix](Tape& t, std::size_t self) {
        auto g = t.grad(self);
        t.grad(ix).array() +=
            (t.value(ix).matrix().array() > 0.0).cast<double>() * g.array();
      });
}

inline Var Tanh(const Var& x) {
  Tensor out = x.value();
  out.matrix() = out.matrix().array().tanh().matrix();
  const std::size_t ix = x.id();
  return x.tape()->Record(
      std::move(out), {x}, [ix](Tape& t, std::size_t self) {
        auto g = t.grad(self);
        auto y = t.value(self).matrix().array();
        t.grad(ix).array() += (1.0 - y.square()) * g.array();
      });
}

inline Var Exp(const Var& x) {
  Tensor out = x.value();
  out.matrix() = out.matrix().array().exp().matrix();
  const std::size_t ix = x.id();
  return x.tape()->Record(
      std::move(out), {x}, [ix](Tape& t, std::size_t self) {
        t.grad(ix).array() +=
            t.value(self).matrix().array() * t.grad(self).array();
      });
}

inline Var Square(const Var& x) {
  Tensor out = x.value();
  out.matrix() = out.matrix().array().square().matrix();
  const std::size_t ix = x.id();
  return x.tape()->Record(
      std::move(out), {x}, [ix](Tape& t, std::size_t self) {
        t.grad(ix).array() +=
            2.0 * t.value(ix).matrix().array() * t.grad(self).array();
      });
}

// Clamps into [lo, hi]; the gradient passes only where lo <= x <= hi.
inline Var Clip(const Var& x, double lo, double hi) {
  Tensor out = x.value();
  out.matrix() = out.matrix().cwiseMax(lo).cwiseMin(hi);
  const std::size_t ix = x.id();
  return x.tape()->Record(
      std::move(out), {x}, [ix, lo, hi](Tape& t, std::size_t self) {
        auto xv = t.value(ix).matrix().array();
        auto inside = ((xv >= lo) && (xv <= hi)).cast<double>();
        t.grad(ix).array() += inside * t.grad(self).array();
      });
}

// Elementwise minimum; ties route the gradient to `a`.
inline Var Minimum(const Var& a, const Var& b) {
  internal::RequireSameShape(a, b, "Minimum");
  Tensor out = a.value();
  out.matrix() = out.matrix().cwiseMin(b.value().matrix());
  const std::size_t ia = a.id(), ib = b.id();
  return a.tape()->Record(
      std::move(out), {a, b}, [ia, ib](Tape& t, std::size_t self) {
        auto g = t.grad(self).array();
        auto take_a = (t.value(ia).matrix().array() <=
                       t.value(ib).matrix().array())
                          .cast<double>();
        if (t.requires_grad(ia)) t.grad(ia).array() += take_a * g;
        if (t.requires_grad(ib)) t.grad(ib).array() += (1.0 - take_a) * g;
      });
}

// Row sums: (rows, cols) -> (rows, 1).
inline Var SumCols(const Var& x) {
  const Tensor& xv = x.value();
  Tensor out = Tensor::Zeros(xv.rows(), 1);
  out.matrix() = xv.matrix().rowwise().sum();
  const std::size_t ix = x.id();
  return x.tape()->Record(
      std::move(out), {x}, [ix](Tape& t, std::size_t self) {
        auto g = t.grad(self);
        t.grad(ix).colwise() += g.col(0);
      });
}

inline Var Sum(const Var& x) {
  Tensor out = Tensor::Scalar(x.value().matrix().sum());
  const std::size_t ix = x.id();
  return x.tape()->Record(std::move(out), {x},
                          [ix](Tape& t, std::size_t self) {
                            const double g = t.grad(self)(0, 0);
                            t.grad(ix).array() += g;
                          });
}

inline Var Mean(const Var& x) {
  const double n = static_cast<double>(x.value().size());
  MBCREDIT_CHECK_DIM(n > 0, "Mean of empty tensor");
  return Scale(Sum(x), 1.0 / n);
}

// Mean squared error between `pred` and a constant target of equal shape.
inline Var MeanSquaredError(const Var& pred, const Tensor& target) {
  Var t = pred.tape()->Constant(target);
  return Mean(Square(Sub(pred, t)));
}

}  // namespace ops

}  // namespace mbcredit::numcore

#endif  // MBCREDIT_NUMCORE_AUTODIFF_HPP_
