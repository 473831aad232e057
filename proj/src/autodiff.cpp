#include "tsgan/autodiff.hpp"

#include <unordered_map>
#include <unordered_set>

#include "tsgan/ops.hpp"

namespace tsgan::ad {
namespace {
thread_local Recording g_recording = Recording::higher;
}

Recording recording() { return g_recording; }

RecordingGuard::RecordingGuard(Recording mode) : saved_(g_recording) { g_recording = mode; }
RecordingGuard::~RecordingGuard() { g_recording = saved_; }

template <typename T>
std::vector<Var<T>> grad(const Var<T>& root, const std::vector<Var<T>>& wrt, bool create_graph) {
  if (!root.defined() || root.numel() != 1) {
    throw ShapeError("grad: root must be a scalar, got shape " +
                     (root.defined() ? shape_str(root.shape()) : std::string("<undefined>")));
  }

  // Topological order (inputs before users) over nodes that require grad.
  std::vector<Node<T>*> order;
  std::unordered_map<Node<T>*, std::size_t> index;
  std::unordered_map<Node<T>*, Var<T>> owner;
  if (root.requires_grad()) {
    std::vector<std::pair<Var<T>, std::size_t>> stack{{root, 0}};
    std::unordered_set<Node<T>*> seen{root.node()};
    while (!stack.empty()) {
      auto& [v, next] = stack.back();
      Node<T>* n = v.node();
      if (next < n->inputs.size()) {
        const Var<T>& in = n->inputs[next++];
        if (in.requires_grad() && seen.insert(in.node()).second) stack.push_back({in, 0});
        continue;
      }
      index[n] = order.size();
      order.push_back(n);
      owner[n] = v;
      stack.pop_back();
    }
  }

  std::unordered_set<Node<T>*> targets;
  for (const auto& w : wrt) {
    if (w.defined()) targets.insert(w.node());
  }
  std::vector<char> needed(order.size(), 0);
  for (std::size_t i = 0; i < order.size(); ++i) {
    Node<T>* n = order[i];
    bool need = targets.count(n) > 0;
    for (const auto& in : n->inputs) {
      if (in.requires_grad() && needed[index.at(in.node())]) need = true;
    }
    needed[i] = need;
  }

  if (create_graph) {
    for (std::size_t i = 0; i < order.size(); ++i) {
      if (needed[i] && !order[i]->higher_order) {
        throw CapabilityError(std::string("op '") + order[i]->op +
                              "' was recorded without higher-order support");
      }
    }
  }

  RecordingGuard guard(create_graph ? Recording::higher : Recording::off);
  std::vector<Var<T>> grads(order.size());
  if (!order.empty()) {
    grads.back() = Var<T>::constant(Tensor<T>(root.shape(), T(1)));
  }
  for (std::size_t i = order.size(); i-- > 0;) {
    Node<T>* n = order[i];
    if (!needed[i] || !grads[i].defined() || !n->backward) continue;
    std::vector<bool> mask(n->inputs.size(), false);
    bool any = false;
    for (std::size_t j = 0; j < n->inputs.size(); ++j) {
      const auto& in = n->inputs[j];
      mask[j] = in.requires_grad() && needed[index.at(in.node())];
      any = any || mask[j];
    }
    if (!any) continue;
    std::vector<Var<T>> in_grads = n->backward(owner.at(n), grads[i], mask);
    for (std::size_t j = 0; j < n->inputs.size(); ++j) {
      if (!mask[j] || !in_grads[j].defined()) continue;
      const std::size_t k = index.at(n->inputs[j].node());
      grads[k] = grads[k].defined() ? add(grads[k], in_grads[j]) : in_grads[j];
    }
    // Free intermediate cotangents as soon as they have been propagated.
    if (!targets.count(n)) grads[i] = Var<T>();
  }

  std::vector<Var<T>> out;
  out.reserve(wrt.size());
  for (const auto& w : wrt) {
    auto it = w.defined() ? index.find(w.node()) : index.end();
    if (it != index.end() && grads[it->second].defined()) {
      out.push_back(grads[it->second]);
    } else {
      out.push_back(Var<T>::constant(Tensor<T>(w.defined() ? w.shape() : Shape{1}, T(0))));
    }
  }
  return out;
}

template <typename T>
Var<T> input_gradient(const Var<T>& output, const Var<T>& input) {
  if (!output.requires_grad() || !input.requires_grad()) {
    throw CapabilityError("input_gradient: graph was built without recording");
  }
  Var<T> total;
  {
    RecordingGuard guard(Recording::higher);
    total = sum_all(output);
  }
  return grad(total, {input}, true).front();
}

template std::vector<Var<float>> grad(const Var<float>&, const std::vector<Var<float>>&, bool);
template std::vector<Var<double>> grad(const Var<double>&, const std::vector<Var<double>>&, bool);
template Var<float> input_gradient(const Var<float>&, const Var<float>&);
template Var<double> input_gradient(const Var<double>&, const Var<double>&);

}  // namespace tsgan::ad
