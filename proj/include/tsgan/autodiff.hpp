#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "tsgan/tensor.hpp"

// Reverse-mode differentiation on a dynamically recorded graph.
//
// Backward rules are themselves written in terms of recorded ops, so a
// gradient computed with create_graph=true is an ordinary differentiable
// value (double backprop, needed by the gradient penalty).

namespace tsgan::ad {

// What forward ops record.
//   off     : values only; nothing can be differentiated
//   first   : a graph for first-order gradients only
//   higher  : a graph whose gradients may themselves be differentiated
enum class Recording { off, first, higher };

Recording recording();

class RecordingGuard {
 public:
  explicit RecordingGuard(Recording mode);
  ~RecordingGuard();
  RecordingGuard(const RecordingGuard&) = delete;
  RecordingGuard& operator=(const RecordingGuard&) = delete;

 private:
  Recording saved_;
};

struct NoGrad : RecordingGuard {
  NoGrad() : RecordingGuard(Recording::off) {}
};

template <typename T>
class Var;

template <typename T>
struct Node {
  using Backward = std::function<std::vector<Var<T>>(const Var<T>& self, const Var<T>& grad_out,
                                                     const std::vector<bool>& needed)>;
  Tensor<T> value;
  bool requires_grad = false;
  bool higher_order = false;
  std::vector<Var<T>> inputs;
  Backward backward;
  const char* op = "leaf";
};

template <typename T>
class Var {
 public:
  Var() = default;
  explicit Var(std::shared_ptr<Node<T>> node) : node_(std::move(node)) {}

  static Var constant(Tensor<T> value) {
    auto n = std::make_shared<Node<T>>();
    n->value = std::move(value);
    return Var(std::move(n));
  }
  // Trainable leaf. Leaves differentiate to any order.
  static Var parameter(Tensor<T> value) {
    auto n = std::make_shared<Node<T>>();
    n->value = std::move(value);
    n->requires_grad = true;
    n->higher_order = true;
    return Var(std::move(n));
  }

  bool defined() const { return static_cast<bool>(node_); }
  const Tensor<T>& value() const { return node_->value; }
  Tensor<T>& mutable_value() { return node_->value; }
  const Shape& shape() const { return node_->value.shape(); }
  std::size_t numel() const { return node_->value.numel(); }
  bool requires_grad() const { return node_ && node_->requires_grad; }
  const char* op() const { return node_->op; }
  Node<T>* node() const { return node_.get(); }
  const std::shared_ptr<Node<T>>& ptr() const { return node_; }

  // Detached copy of the value (a constant sharing no graph).
  Var detach() const { return constant(node_->value); }

 private:
  std::shared_ptr<Node<T>> node_;
};

// Builds the result node of an op. When recording is off or no input needs a
// gradient, the result is a constant and `backward` is dropped.
template <typename T>
Var<T> make_op(const char* name, Tensor<T> value, std::vector<Var<T>> inputs,
               typename Node<T>::Backward backward) {
  auto n = std::make_shared<Node<T>>();
  n->value = std::move(value);
  n->op = name;
  const Recording mode = recording();
  bool any = false;
  for (const auto& in : inputs) any = any || in.requires_grad();
  if (mode != Recording::off && any) {
    n->requires_grad = true;
    n->higher_order = mode == Recording::higher;
    n->inputs = std::move(inputs);
    n->backward = std::move(backward);
  }
  return Var<T>(std::move(n));
}

// Gradients of a scalar `root` with respect to each of `wrt`. Inputs that do
// not influence root get a zero tensor. With create_graph the returned values
// are recorded and can be differentiated again; this requires every node on
// the path to have been recorded in Recording::higher.
template <typename T>
std::vector<Var<T>> grad(const Var<T>& root, const std::vector<Var<T>>& wrt,
                         bool create_graph = false);

// Gradient of sum(output) with respect to `input`, recorded for a further
// differentiation. Throws CapabilityError if the forward pass was not recorded
// with higher-order support.
template <typename T>
Var<T> input_gradient(const Var<T>& output, const Var<T>& input);

}  // namespace tsgan::ad
