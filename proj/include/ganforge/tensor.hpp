#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "ganforge/errors.hpp"

namespace ganforge {

using Shape = std::vector<int>;

size_t shape_numel(const Shape& s);
std::string shape_str(const Shape& s);

// Reverse-mode autodiff tensor. A Tensor is a shared handle to a graph node;
// ops build nodes in forward order and stamp each with a global sequence
// number. An op can only consume tensors that already exist, so construction
// order is a topological order and walking reachable nodes by descending
// sequence number is exactly the reverse of forward construction.
template <typename T>
class Tensor {
 public:
  struct Node {
    Shape shape;
    std::vector<T> value;
    std::vector<T> grad;  // allocated on first accumulation, same size as value
    bool requires_grad = false;
    uint64_t seq = 0;
    std::string op = "leaf";  // op id carried into numeric-error messages
    std::vector<std::shared_ptr<Node>> parents;
    std::function<void(Node&)> backward_fn;

    std::vector<T>& grad_buf() {
      if (grad.empty()) grad.assign(value.size(), T(0));
      return grad;
    }
  };

  Tensor() = default;
  Tensor(Shape shape, std::vector<T> values, bool requires_grad = false);

  static Tensor zeros(const Shape& shape, bool requires_grad = false);
  static Tensor full(const Shape& shape, T v, bool requires_grad = false);

  // Builds an op output node; wiring of parents and the backward closure is
  // done by the op implementations.
  static Tensor make_op(Shape shape, std::vector<T> values, const std::string& op,
                        const std::vector<Tensor>& inputs,
                        std::function<void(Node&)> backward_fn);

  bool defined() const { return node_ != nullptr; }
  const Shape& shape() const { return node_->shape; }
  size_t numel() const { return node_->value.size(); }
  int dim(int i) const { return node_->shape[static_cast<size_t>(i)]; }
  int ndim() const { return static_cast<int>(node_->shape.size()); }

  std::vector<T>& values() { return node_->value; }
  const std::vector<T>& values() const { return node_->value; }
  const std::string& op() const { return node_->op; }

  bool requires_grad() const { return node_ && node_->requires_grad; }
  void set_requires_grad(bool b) { node_->requires_grad = b; }

  bool has_grad() const { return node_ && !node_->grad.empty(); }
  std::vector<T>& grad() { return node_->grad_buf(); }
  const std::vector<T>& grad() const { return node_->grad; }
  void zero_grad() { node_->grad.clear(); }

  // Scalar extraction; the tensor must hold exactly one element.
  T item() const;

  // Reverse accumulation from this scalar into every reachable node that
  // requires grad. Visits nodes in reverse construction order.
  void backward();

  // Leaf copy of the current value; cuts the graph (used to keep D updates
  // from backpropagating into G).
  Tensor detach() const;

  std::shared_ptr<Node> node() const { return node_; }

 private:
  std::shared_ptr<Node> node_;
};

// Throws NumericError naming `op` if any element is NaN or infinite.
template <typename T>
void ensure_finite(const std::string& op, const std::vector<T>& values);

extern template class Tensor<float>;
extern template class Tensor<double>;
extern template void ensure_finite<float>(const std::string&, const std::vector<float>&);
extern template void ensure_finite<double>(const std::string&, const std::vector<double>&);

}  // namespace ganforge
