#include "ganforge/tensor.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <unordered_set>

namespace ganforge {

namespace {
std::atomic<uint64_t> g_seq{1};
}

size_t shape_numel(const Shape& s) {
  size_t n = 1;
  for (int d : s) n *= static_cast<size_t>(d);
  return n;
}

std::string shape_str(const Shape& s) {
  std::string out = "[";
  for (size_t i = 0; i < s.size(); ++i) {
    if (i) out += "x";
    out += std::to_string(s[i]);
  }
  return out + "]";
}

template <typename T>
Tensor<T>::Tensor(Shape shape, std::vector<T> values, bool requires_grad) {
  for (int d : shape) {
    if (d <= 0) throw ConfigError("tensor extent must be positive, got shape " + shape_str(shape));
  }
  if (shape_numel(shape) != values.size())
    throw ConfigError("tensor shape " + shape_str(shape) + " does not match " +
                      std::to_string(values.size()) + " values");
  node_ = std::make_shared<Node>();
  node_->shape = std::move(shape);
  node_->value = std::move(values);
  node_->requires_grad = requires_grad;
  node_->seq = g_seq.fetch_add(1, std::memory_order_relaxed);
}

template <typename T>
Tensor<T> Tensor<T>::zeros(const Shape& shape, bool requires_grad) {
  return Tensor(shape, std::vector<T>(shape_numel(shape), T(0)), requires_grad);
}

template <typename T>
Tensor<T> Tensor<T>::full(const Shape& shape, T v, bool requires_grad) {
  return Tensor(shape, std::vector<T>(shape_numel(shape), v), requires_grad);
}

template <typename T>
Tensor<T> Tensor<T>::make_op(Shape shape, std::vector<T> values, const std::string& op,
                             const std::vector<Tensor>& inputs,
                             std::function<void(Node&)> backward_fn) {
  ensure_finite(op, values);
  bool needs_grad = false;
  for (const auto& in : inputs) needs_grad = needs_grad || in.requires_grad();
  Tensor out(std::move(shape), std::move(values), needs_grad);
  out.node_->op = op;
  if (needs_grad) {
    for (const auto& in : inputs) out.node_->parents.push_back(in.node_);
    out.node_->backward_fn = std::move(backward_fn);
  }
  return out;
}

template <typename T>
T Tensor<T>::item() const {
  if (numel() != 1)
    throw ConfigError("item() on non-scalar tensor of shape " + shape_str(shape()));
  return node_->value[0];
}

template <typename T>
void Tensor<T>::backward() {
  if (numel() != 1)
    throw ConfigError("backward() requires a scalar root, got shape " + shape_str(shape()));
  if (!requires_grad()) return;

  // Collect reachable grad-requiring nodes, then order by descending seq.
  std::vector<Node*> order;
  std::unordered_set<Node*> seen;
  std::vector<Node*> stack{node_.get()};
  seen.insert(node_.get());
  while (!stack.empty()) {
    Node* n = stack.back();
    stack.pop_back();
    order.push_back(n);
    for (const auto& p : n->parents) {
      if (p->requires_grad && seen.insert(p.get()).second) stack.push_back(p.get());
    }
  }
  std::sort(order.begin(), order.end(),
            [](const Node* a, const Node* b) { return a->seq > b->seq; });

  node_->grad_buf()[0] = T(1);
  for (Node* n : order) {
    if (n->backward_fn && !n->grad.empty()) n->backward_fn(*n);
  }
}

template <typename T>
Tensor<T> Tensor<T>::detach() const {
  return Tensor(node_->shape, node_->value, false);
}

template <typename T>
void ensure_finite(const std::string& op, const std::vector<T>& values) {
  for (size_t i = 0; i < values.size(); ++i) {
    if (!std::isfinite(static_cast<double>(values[i])))
      throw NumericError("non-finite value in op '" + op + "' at element " + std::to_string(i));
  }
}

template class Tensor<float>;
template class Tensor<double>;
template void ensure_finite<float>(const std::string&, const std::vector<float>&);
template void ensure_finite<double>(const std::string&, const std::vector<double>&);

}  // namespace ganforge
