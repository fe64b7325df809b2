#pragma once

#include <deque>
#include <functional>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "vsharp/tensor.hpp"

namespace vsharp {

/// Trainable tensor with an accumulated gradient of the same shape.
template <typename T>
struct Parameter {
  std::string name;
  Tensor<T> value;
  Tensor<T> grad;

  Parameter() = default;
  Parameter(std::string n, Tensor<T> v) : name(std::move(n)), value(std::move(v)), grad(value.shape()) {}

  void zero_grad() { grad.fill(T(0)); }
};

/// Handle to a node on a Tape.
struct Var {
  std::int32_t id = -1;
  bool valid() const { return id >= 0; }
};

/// Reverse-mode autodiff graph. Ops append nodes eagerly (values computed on
/// the spot); backward() runs one reverse sweep over the append order, which
/// is a topological order by construction. A Tape is confined to one thread.
template <typename T>
class Tape {
public:
  using BackwardFn = std::function<void(Tape&, const Tensor<T>& gout)>;

  /// Constant (or differentiable, if requires_grad) input node.
  Var leaf(Tensor<T> value, bool requires_grad = false) {
    return push(std::move(value), requires_grad, nullptr, nullptr);
  }

  /// Leaf bound to a Parameter; backward() adds into p.grad.
  Var param(Parameter<T>& p) { return push(p.value, true, nullptr, &p); }

  Var scalar(T v) { return leaf(Tensor<T>({1}, {v})); }

  /// Appends an op node. `inputs` exist only to derive requires_grad; the
  /// backward fn captures whatever vars it needs.
  Var op(Tensor<T> value, std::initializer_list<Var> inputs, BackwardFn fn) {
    bool req = false;
    for (Var v : inputs) req = req || node(v).needs_grad;
    return push(std::move(value), req, req ? std::move(fn) : nullptr, nullptr);
  }

  Var op(Tensor<T> value, const std::vector<Var>& inputs, BackwardFn fn) {
    bool req = false;
    for (Var v : inputs) req = req || node(v).needs_grad;
    return push(std::move(value), req, req ? std::move(fn) : nullptr, nullptr);
  }

  const Tensor<T>& val(Var v) const { return node(v).value; }
  const Shape& shape(Var v) const { return node(v).value.shape(); }
  bool requires_grad(Var v) const { return node(v).needs_grad; }

  /// Gradient buffer of a node, allocated (zeros) on demand.
  Tensor<T>& grad_buffer(Var v) {
    Node& n = node(v);
    if (n.grad.empty() && n.value.size() > 0) n.grad = Tensor<T>(n.value.shape());
    return n.grad;
  }

  /// Gradient of a node after backward(); zeros if no path to the loss.
  const Tensor<T>& grad(Var v) { return grad_buffer(v); }

  void add_grad(Var v, const Tensor<T>& g) {
    Node& n = node(v);
    if (!n.needs_grad) return;
    check_same_shape(n.value, g, "add_grad");
    Tensor<T>& buf = grad_buffer(v);
    for (std::int64_t i = 0; i < g.size(); ++i) buf[i] += g[i];
  }

  /// Reverse sweep from a real scalar loss node. Visits each node exactly
  /// once, in reverse append order; gradients of bound Parameters are
  /// accumulated into Parameter::grad.
  void backward(Var loss) {
    Node& ln = node(loss);
    if (ln.value.size() != 1) throw std::invalid_argument("backward: loss must be a scalar node");
    grad_buffer(loss)[0] += T(1);
    for (std::int32_t i = loss.id; i >= 0; --i) {
      Node& n = nodes_[static_cast<std::size_t>(i)];
      if (!n.needs_grad || n.grad.empty()) continue;
      if (n.backward) n.backward(*this, n.grad);
      if (n.bound) {
        for (std::int64_t k = 0; k < n.grad.size(); ++k) n.bound->grad[k] += n.grad[k];
      }
    }
  }

  std::size_t size() const { return nodes_.size(); }

private:
  struct Node {
    Tensor<T> value;
    Tensor<T> grad;
    BackwardFn backward;
    Parameter<T>* bound = nullptr;
    bool needs_grad = false;
  };

  Node& node(Var v) { return nodes_[index(v)]; }
  const Node& node(Var v) const { return nodes_[index(v)]; }

  std::size_t index(Var v) const {
    if (!v.valid() || static_cast<std::size_t>(v.id) >= nodes_.size())
      throw std::invalid_argument("invalid tape var");
    return static_cast<std::size_t>(v.id);
  }

  Var push(Tensor<T> value, bool req, BackwardFn fn, Parameter<T>* bound) {
    Node n;
    n.value = std::move(value);
    n.backward = std::move(fn);
    n.bound = bound;
    n.needs_grad = req;
    nodes_.push_back(std::move(n));
    return Var{static_cast<std::int32_t>(nodes_.size() - 1)};
  }

  std::deque<Node> nodes_;  // deque keeps value references stable as ops append
};

}  // namespace vsharp
