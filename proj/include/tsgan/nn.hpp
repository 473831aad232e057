#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "tsgan/ops.hpp"

namespace tsgan::nn {

using Rng = std::mt19937_64;

// How weights are drawn at construction.
//   normal : N(0, 0.02) for linear/conv weights, gamma ~ N(1, 0.02), zero biases
//   fan_in : U(-1/sqrt(fan_in), 1/sqrt(fan_in)) for weights and biases, gamma = 1
enum class Init { normal, fan_in };

Init parse_init(const std::string& name);
std::string init_name(Init init);

template <typename T>
using NamedParams = std::vector<std::pair<std::string, ad::Var<T>>>;

template <typename T>
struct Linear {
  ad::Var<T> weight;  // [out, in]
  ad::Var<T> bias;    // [out]

  Linear() = default;
  Linear(std::size_t in, std::size_t out, Init init, Rng& rng);
  ad::Var<T> operator()(const ad::Var<T>& x) const { return ad::linear(x, weight, bias); }
  void collect(const std::string& prefix, NamedParams<T>& out) const;
};

template <typename T>
struct Conv1d {
  ad::Var<T> weight;  // [out, in, k]
  ad::Var<T> bias;
  std::size_t stride = 2;
  std::size_t pad = 1;

  Conv1d() = default;
  Conv1d(std::size_t in, std::size_t out, std::size_t k, std::size_t stride, std::size_t pad,
         Init init, Rng& rng);
  ad::Var<T> operator()(const ad::Var<T>& x) const {
    return ad::conv1d(x, weight, bias, stride, pad);
  }
  void collect(const std::string& prefix, NamedParams<T>& out) const;
};

template <typename T>
struct ConvTranspose1d {
  ad::Var<T> weight;  // [in, out, k]
  ad::Var<T> bias;
  std::size_t stride = 2;
  std::size_t pad = 1;

  ConvTranspose1d() = default;
  ConvTranspose1d(std::size_t in, std::size_t out, std::size_t k, std::size_t stride,
                  std::size_t pad, Init init, Rng& rng);
  ad::Var<T> operator()(const ad::Var<T>& x) const {
    return ad::conv_transpose1d(x, weight, bias, stride, pad);
  }
  void collect(const std::string& prefix, NamedParams<T>& out) const;
};

// Batch normalization over (batch, length) per channel of a [B, C, L] input.
// Running variance uses the unbiased batch estimate.
template <typename T>
struct BatchNorm1d {
  ad::Var<T> gamma;
  ad::Var<T> beta;
  Tensor<T> running_mean;
  Tensor<T> running_var;
  T momentum = T(0.1);
  T eps = T(1e-5);

  BatchNorm1d() = default;
  BatchNorm1d(std::size_t channels, Init init, Rng& rng);

  // Train mode normalizes with batch statistics and folds them into the
  // running estimates with `momentum`; a momentum <= 0 accumulates a plain
  // cumulative average instead (used for recalibration), with `seen` batches.
  ad::Var<T> forward(const ad::Var<T>& x, bool train);
  void reset_running();
  std::size_t seen = 0;

  void collect(const std::string& prefix, NamedParams<T>& out) const;
  void collect_buffers(const std::string& prefix, std::vector<std::pair<std::string, Tensor<T>*>>& out);
};

// Adam with bias correction. One state per parameter group.
template <typename T>
struct Adam {
  T lr = T(1e-4);
  T beta1 = T(0.5);
  T beta2 = T(0.9);
  T eps = T(1e-8);
  std::int64_t steps = 0;
  std::vector<Tensor<T>> m;
  std::vector<Tensor<T>> v;

  Adam() = default;
  Adam(T lr, T beta1, T beta2, T eps) : lr(lr), beta1(beta1), beta2(beta2), eps(eps) {}

  void step(const std::vector<ad::Var<T>>& params, const std::vector<ad::Var<T>>& grads);
};

template <typename T>
std::vector<ad::Var<T>> vars_of(const NamedParams<T>& named) {
  std::vector<ad::Var<T>> out;
  out.reserve(named.size());
  for (const auto& [name, v] : named) out.push_back(v);
  return out;
}

}  // namespace tsgan::nn
