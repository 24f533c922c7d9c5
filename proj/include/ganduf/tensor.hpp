#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "ganduf/errors.hpp"

namespace ganduf {

namespace detail {

// Graph node. The recorded graph is the web of parent links; backward()
// consumes it (one backward per recorded forward) and clears the links.
struct TensorNode {
  std::vector<std::size_t> shape;
  std::vector<double> value;
  std::vector<double> grad;  // allocated lazily; empty means "no grad yet"
  bool requires_grad = false;
  std::vector<std::shared_ptr<TensorNode>> parents;
  std::function<void(TensorNode&)> backprop;

  std::size_t size() const { return value.size(); }
  void ensure_grad() {
    if (grad.size() != value.size()) grad.assign(value.size(), 0.0);
  }
};

using NodePtr = std::shared_ptr<TensorNode>;

}  // namespace detail

// Dense float64 tensor, 1-D or 2-D, row-major. Value-semantic handle onto a
// shared node so ops can record the compute graph.
class Tensor {
 public:
  Tensor() = default;

  static Tensor zeros(std::vector<std::size_t> shape, bool requires_grad = false);
  static Tensor full(std::vector<std::size_t> shape, double v, bool requires_grad = false);
  static Tensor from(std::vector<double> data, std::vector<std::size_t> shape,
                     bool requires_grad = false);
  static Tensor scalar(double v);

  bool defined() const { return node_ != nullptr; }
  const std::vector<std::size_t>& shape() const { return node_->shape; }
  std::size_t size() const { return node_->value.size(); }
  std::size_t rows() const;  // 2-D only
  std::size_t cols() const;

  std::span<const double> value() const { return node_->value; }
  std::span<double> value() { return node_->value; }
  double item() const;  // scalar tensors only

  bool requires_grad() const { return node_->requires_grad; }
  bool has_grad() const { return node_->grad.size() == node_->value.size(); }
  std::span<const double> grad() const;
  void zero_grad();  // allocates the grad buffer if absent

  detail::NodePtr node_;  // shared graph node; ops and Adam reach in directly
};

// Op family. Every op checks shapes (throwing ShapeError with the op name and
// the offending shapes) and records a backward closure when any input
// requires grad. log() clamps its argument to >= 1e-12, which keeps forward
// values finite but makes the derivative meaningless below the clamp.
Tensor matmul(const Tensor& a, const Tensor& b);
Tensor add(const Tensor& a, const Tensor& b);  // same shape, or [r,c] + [c] row broadcast
Tensor mul(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor scale(const Tensor& a, double s);
Tensor concat(const Tensor& a, const Tensor& b);  // along last dim
Tensor slice(const Tensor& a, std::size_t from, std::size_t to);  // last dim
Tensor tanh(const Tensor& a);
Tensor sigmoid(const Tensor& a);
Tensor leaky_relu(const Tensor& a, double alpha = 0.2);
Tensor softplus(const Tensor& a);
Tensor log(const Tensor& a);
Tensor mean(const Tensor& a);  // scalar
Tensor sum(const Tensor& a);   // scalar
Tensor square(const Tensor& a);

// Reverse pass from a scalar loss. Accumulates into every requires_grad leaf
// reachable from it (fan-out adds), then clears the recorded graph; calling
// it again on the same graph is a ContractError.
void backward(const Tensor& loss);

// Max relative error between analytic gradients of f at x and central finite
// differences with step h. f must be pure and scalar-valued.
double grad_check(const std::function<Tensor(const Tensor&)>& f, Tensor& x, double h);

std::string shape_str(const std::vector<std::size_t>& s);

}  // namespace ganduf
