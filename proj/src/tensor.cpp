#include "ganduf/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

#include "ganduf/kernels.hpp"

namespace ganduf {

namespace {

using detail::NodePtr;
using detail::TensorNode;

constexpr double kLogClamp = 1e-12;

std::size_t shape_numel(const std::vector<std::size_t>& shape) {
  std::size_t n = 1;
  for (std::size_t d : shape) n *= d;
  return n;
}

NodePtr make_node(std::vector<std::size_t> shape, std::vector<double> value,
                  bool requires_grad) {
  auto n = std::make_shared<TensorNode>();
  n->shape = std::move(shape);
  n->value = std::move(value);
  n->requires_grad = requires_grad;
  return n;
}

Tensor wrap(NodePtr n) {
  Tensor t;
  t.node_ = std::move(n);
  return t;
}

// Builds the output node and records the backward closure if needed.
Tensor record(std::vector<std::size_t> shape, std::vector<double> value,
              std::vector<NodePtr> parents,
              std::function<void(TensorNode&)> backprop) {
  bool rg = false;
  for (const auto& p : parents) rg = rg || p->requires_grad;
  NodePtr out = make_node(std::move(shape), std::move(value), rg);
  if (rg) {
    out->parents = std::move(parents);
    out->backprop = std::move(backprop);
  }
  return wrap(out);
}

void accumulate(TensorNode& target, const double* src, std::size_t n) {
  target.ensure_grad();
  kernels::add(target.grad.data(), src, target.grad.data(), n);
}

double stable_sigmoid(double x) {
  if (x >= 0.0) {
    return 1.0 / (1.0 + std::exp(-x));
  }
  const double e = std::exp(x);
  return e / (1.0 + e);
}

[[noreturn]] void shape_fail(const char* op, const Tensor& a, const Tensor& b) {
  throw ShapeError(std::string(op) + ": shapes " + shape_str(a.shape()) +
                   " and " + shape_str(b.shape()) + " not conformable");
}

void require_2d(const char* op, const Tensor& t) {
  if (t.shape().size() != 2)
    throw ShapeError(std::string(op) + ": expected 2-D tensor, got " +
                     shape_str(t.shape()));
}

// Elementwise unary op with pointwise derivative dy/dx given as a function of
// (x, y).
template <typename Fwd, typename Dfn>
Tensor unary_op(const Tensor& a, Fwd fwd, Dfn dfdx) {
  std::vector<double> out(a.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = fwd(a.value()[i]);
  NodePtr an = a.node_;
  return record(a.shape(), std::move(out), {an},
                [an, dfdx](TensorNode& self) {
                  if (!an->requires_grad) return;
                  an->ensure_grad();
                  for (std::size_t i = 0; i < self.value.size(); ++i) {
                    an->grad[i] += self.grad[i] * dfdx(an->value[i], self.value[i]);
                  }
                });
}

}  // namespace

std::string shape_str(const std::vector<std::size_t>& s) {
  std::string out = "[";
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (i) out += ", ";
    out += std::to_string(s[i]);
  }
  return out + "]";
}

Tensor Tensor::zeros(std::vector<std::size_t> shape, bool requires_grad) {
  std::size_t n = shape_numel(shape);
  return wrap(make_node(std::move(shape), std::vector<double>(n, 0.0), requires_grad));
}

Tensor Tensor::full(std::vector<std::size_t> shape, double v, bool requires_grad) {
  std::size_t n = shape_numel(shape);
  return wrap(make_node(std::move(shape), std::vector<double>(n, v), requires_grad));
}

Tensor Tensor::from(std::vector<double> data, std::vector<std::size_t> shape,
                    bool requires_grad) {
  if (shape_numel(shape) != data.size())
    throw ShapeError("Tensor::from: " + std::to_string(data.size()) +
                     " values do not fill shape " + shape_str(shape));
  return wrap(make_node(std::move(shape), std::move(data), requires_grad));
}

Tensor Tensor::scalar(double v) { return from({v}, {1}); }

std::size_t Tensor::rows() const {
  if (node_->shape.size() != 2) throw ShapeError("rows(): tensor is not 2-D");
  return node_->shape[0];
}

std::size_t Tensor::cols() const {
  if (node_->shape.size() != 2) throw ShapeError("cols(): tensor is not 2-D");
  return node_->shape[1];
}

double Tensor::item() const {
  if (size() != 1) throw ContractError("item(): tensor is not scalar");
  return node_->value[0];
}

std::span<const double> Tensor::grad() const {
  if (!has_grad()) throw ContractError("grad(): gradient not populated");
  return node_->grad;
}

void Tensor::zero_grad() {
  node_->grad.assign(node_->value.size(), 0.0);
}

Tensor matmul(const Tensor& a, const Tensor& b) {
  require_2d("matmul", a);
  require_2d("matmul", b);
  if (a.cols() != b.rows()) shape_fail("matmul", a, b);
  const std::size_t r = a.rows(), k = a.cols(), c = b.cols();
  std::vector<double> out(r * c, 0.0);
  kernels::matmul(a.value().data(), b.value().data(), out.data(), r, k, c);
  NodePtr an = a.node_, bn = b.node_;
  return record({r, c}, std::move(out), {an, bn},
                [an, bn, r, k, c](TensorNode& self) {
                  if (an->requires_grad) {
                    an->ensure_grad();  // dA += dC * B^T
                    kernels::matmul_nt(self.grad.data(), bn->value.data(),
                                       an->grad.data(), r, c, k);
                  }
                  if (bn->requires_grad) {
                    bn->ensure_grad();  // dB += A^T * dC
                    kernels::matmul_tn(an->value.data(), self.grad.data(),
                                       bn->grad.data(), k, c, r);
                  }
                });
}

Tensor add(const Tensor& a, const Tensor& b) {
  if (a.shape() == b.shape()) {
    std::vector<double> out(a.size());
    kernels::add(a.value().data(), b.value().data(), out.data(), out.size());
    NodePtr an = a.node_, bn = b.node_;
    return record(a.shape(), std::move(out), {an, bn}, [an, bn](TensorNode& self) {
      if (an->requires_grad) accumulate(*an, self.grad.data(), self.grad.size());
      if (bn->requires_grad) accumulate(*bn, self.grad.data(), self.grad.size());
    });
  }
  // Row broadcast: [r, c] + [c].
  if (a.shape().size() == 2 && b.shape().size() == 1 && a.cols() == b.size()) {
    const std::size_t r = a.rows(), c = a.cols();
    std::vector<double> out(a.size());
    for (std::size_t i = 0; i < r; ++i) {
      kernels::add(a.value().data() + i * c, b.value().data(), out.data() + i * c, c);
    }
    NodePtr an = a.node_, bn = b.node_;
    return record(a.shape(), std::move(out), {an, bn}, [an, bn, r, c](TensorNode& self) {
      if (an->requires_grad) accumulate(*an, self.grad.data(), self.grad.size());
      if (bn->requires_grad) {
        bn->ensure_grad();
        for (std::size_t i = 0; i < r; ++i) {
          kernels::add(bn->grad.data(), self.grad.data() + i * c, bn->grad.data(), c);
        }
      }
    });
  }
  shape_fail("add", a, b);
}

Tensor mul(const Tensor& a, const Tensor& b) {
  if (a.shape() != b.shape()) shape_fail("mul", a, b);
  std::vector<double> out(a.size());
  kernels::mul(a.value().data(), b.value().data(), out.data(), out.size());
  NodePtr an = a.node_, bn = b.node_;
  return record(a.shape(), std::move(out), {an, bn}, [an, bn](TensorNode& self) {
    const std::size_t n = self.grad.size();
    std::vector<double> tmp(n);
    if (an->requires_grad) {
      kernels::mul(self.grad.data(), bn->value.data(), tmp.data(), n);
      accumulate(*an, tmp.data(), n);
    }
    if (bn->requires_grad) {
      kernels::mul(self.grad.data(), an->value.data(), tmp.data(), n);
      accumulate(*bn, tmp.data(), n);
    }
  });
}

Tensor sub(const Tensor& a, const Tensor& b) { return add(a, scale(b, -1.0)); }

Tensor scale(const Tensor& a, double s) {
  std::vector<double> out(a.size());
  kernels::scale(a.value().data(), s, out.data(), out.size());
  NodePtr an = a.node_;
  return record(a.shape(), std::move(out), {an}, [an, s](TensorNode& self) {
    if (!an->requires_grad) return;
    an->ensure_grad();
    kernels::axpy(s, self.grad.data(), an->grad.data(), self.grad.size());
  });
}

Tensor concat(const Tensor& a, const Tensor& b) {
  if (a.shape().size() == 1 && b.shape().size() == 1) {
    std::vector<double> out;
    out.reserve(a.size() + b.size());
    out.insert(out.end(), a.value().begin(), a.value().end());
    out.insert(out.end(), b.value().begin(), b.value().end());
    NodePtr an = a.node_, bn = b.node_;
    const std::size_t na = a.size();
    return record({a.size() + b.size()}, std::move(out), {an, bn},
                  [an, bn, na](TensorNode& self) {
                    if (an->requires_grad) accumulate(*an, self.grad.data(), na);
                    if (bn->requires_grad)
                      accumulate(*bn, self.grad.data() + na, self.grad.size() - na);
                  });
  }
  if (a.shape().size() == 2 && b.shape().size() == 2 && a.rows() == b.rows()) {
    const std::size_t r = a.rows(), ca = a.cols(), cb = b.cols();
    std::vector<double> out(r * (ca + cb));
    for (std::size_t i = 0; i < r; ++i) {
      std::copy_n(a.value().data() + i * ca, ca, out.data() + i * (ca + cb));
      std::copy_n(b.value().data() + i * cb, cb, out.data() + i * (ca + cb) + ca);
    }
    NodePtr an = a.node_, bn = b.node_;
    return record({r, ca + cb}, std::move(out), {an, bn},
                  [an, bn, r, ca, cb](TensorNode& self) {
                    const std::size_t c = ca + cb;
                    if (an->requires_grad) {
                      an->ensure_grad();
                      for (std::size_t i = 0; i < r; ++i)
                        kernels::add(an->grad.data() + i * ca, self.grad.data() + i * c,
                                     an->grad.data() + i * ca, ca);
                    }
                    if (bn->requires_grad) {
                      bn->ensure_grad();
                      for (std::size_t i = 0; i < r; ++i)
                        kernels::add(bn->grad.data() + i * cb,
                                     self.grad.data() + i * c + ca,
                                     bn->grad.data() + i * cb, cb);
                    }
                  });
  }
  shape_fail("concat", a, b);
}

Tensor slice(const Tensor& a, std::size_t from, std::size_t to) {
  const std::size_t last = a.shape().back();
  if (from >= to || to > last)
    throw ShapeError("slice: range [" + std::to_string(from) + ", " +
                     std::to_string(to) + ") invalid for shape " + shape_str(a.shape()));
  const std::size_t w = to - from;
  NodePtr an = a.node_;
  if (a.shape().size() == 1) {
    std::vector<double> out(a.value().begin() + from, a.value().begin() + to);
    return record({w}, std::move(out), {an}, [an, from, w](TensorNode& self) {
      if (!an->requires_grad) return;
      an->ensure_grad();
      kernels::add(an->grad.data() + from, self.grad.data(), an->grad.data() + from, w);
    });
  }
  require_2d("slice", a);
  const std::size_t r = a.rows(), c = a.cols();
  std::vector<double> out(r * w);
  for (std::size_t i = 0; i < r; ++i)
    std::copy_n(a.value().data() + i * c + from, w, out.data() + i * w);
  return record({r, w}, std::move(out), {an}, [an, from, w, r, c](TensorNode& self) {
    if (!an->requires_grad) return;
    an->ensure_grad();
    for (std::size_t i = 0; i < r; ++i)
      kernels::add(an->grad.data() + i * c + from, self.grad.data() + i * w,
                   an->grad.data() + i * c + from, w);
  });
}

Tensor tanh(const Tensor& a) {
  return unary_op(
      a, [](double x) { return std::tanh(x); },
      [](double, double y) { return 1.0 - y * y; });
}

Tensor sigmoid(const Tensor& a) {
  return unary_op(
      a, [](double x) { return stable_sigmoid(x); },
      [](double, double y) { return y * (1.0 - y); });
}

Tensor leaky_relu(const Tensor& a, double alpha) {
  return unary_op(
      a, [alpha](double x) { return x > 0.0 ? x : alpha * x; },
      [alpha](double x, double) { return x > 0.0 ? 1.0 : alpha; });
}

Tensor softplus(const Tensor& a) {
  return unary_op(
      a,
      [](double x) { return std::log1p(std::exp(-std::abs(x))) + std::max(x, 0.0); },
      [](double x, double) { return stable_sigmoid(x); });
}

Tensor log(const Tensor& a) {
  return unary_op(
      a, [](double x) { return std::log(std::max(x, kLogClamp)); },
      [](double x, double) { return 1.0 / std::max(x, kLogClamp); });
}

Tensor square(const Tensor& a) {
  return unary_op(
      a, [](double x) { return x * x; }, [](double x, double) { return 2.0 * x; });
}

Tensor sum(const Tensor& a) {
  const double s = kernels::sum(a.value().data(), a.size());
  NodePtr an = a.node_;
  return record({1}, {s}, {an}, [an](TensorNode& self) {
    if (!an->requires_grad) return;
    an->ensure_grad();
    const double g = self.grad[0];
    for (double& v : an->grad) v += g;
  });
}

Tensor mean(const Tensor& a) {
  const std::size_t n = a.size();
  const double s = kernels::sum(a.value().data(), n) / static_cast<double>(n);
  NodePtr an = a.node_;
  return record({1}, {s}, {an}, [an, n](TensorNode& self) {
    if (!an->requires_grad) return;
    an->ensure_grad();
    const double g = self.grad[0] / static_cast<double>(n);
    for (double& v : an->grad) v += g;
  });
}

void backward(const Tensor& loss) {
  if (!loss.defined() || loss.size() != 1)
    throw ContractError("backward: loss must be a scalar tensor");
  TensorNode* root = loss.node_.get();
  if (!root->backprop)
    throw ContractError("backward: loss is not part of a recorded graph");

  // Postorder DFS gives a topological order (parents before consumers).
  std::vector<TensorNode*> order;
  std::unordered_set<TensorNode*> seen;
  std::vector<std::pair<TensorNode*, std::size_t>> stack{{root, 0}};
  seen.insert(root);
  while (!stack.empty()) {
    auto& [node, next] = stack.back();
    if (next < node->parents.size()) {
      TensorNode* p = node->parents[next++].get();
      if (seen.insert(p).second) stack.push_back({p, 0});
    } else {
      order.push_back(node);
      stack.pop_back();
    }
  }

  root->grad.assign(1, 1.0);
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    TensorNode* node = *it;
    if (node->backprop && node->grad.size() == node->value.size()) {
      node->backprop(*node);
    }
    // Consume the graph: only leaves keep state after backward.
    node->backprop = nullptr;
    node->parents.clear();
  }
}

double grad_check(const std::function<Tensor(const Tensor&)>& f, Tensor& x, double h) {
  if (h <= 0.0) throw ContractError("grad_check: h must be positive");
  x.node_->requires_grad = true;
  x.zero_grad();
  Tensor y = f(x);
  if (y.size() != 1) throw ContractError("grad_check: f must be scalar-valued");
  backward(y);
  std::vector<double> analytic(x.grad().begin(), x.grad().end());

  double max_rel = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double orig = x.value()[i];
    x.value()[i] = orig + h;
    const double fp = f(x).item();
    x.value()[i] = orig - h;
    const double fm = f(x).item();
    x.value()[i] = orig;
    const double cd = (fp - fm) / (2.0 * h);
    const double rel =
        std::abs(analytic[i] - cd) / (std::abs(analytic[i]) + std::abs(cd) + 1e-12);
    max_rel = std::max(max_rel, rel);
  }
  return max_rel;
}

}  // namespace ganduf
