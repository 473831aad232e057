#include "tsgan/nn.hpp"

#include <cmath>

namespace tsgan::nn {

Init parse_init(const std::string& name) {
  if (name == "normal") return Init::normal;
  if (name == "fan_in") return Init::fan_in;
  throw ConfigError("unknown init '" + name + "' (expected normal or fan_in)");
}

std::string init_name(Init init) { return init == Init::normal ? "normal" : "fan_in"; }

namespace {

template <typename T>
Tensor<T> draw_weight(Shape shape, std::size_t fan_in, Init init, Rng& rng) {
  Tensor<T> t(std::move(shape));
  if (init == Init::normal) {
    std::normal_distribution<double> d(0.0, 0.02);
    for (auto& v : t.data()) v = static_cast<T>(d(rng));
  } else {
    const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
    std::uniform_real_distribution<double> d(-bound, bound);
    for (auto& v : t.data()) v = static_cast<T>(d(rng));
  }
  return t;
}

template <typename T>
Tensor<T> draw_bias(std::size_t n, std::size_t fan_in, Init init, Rng& rng) {
  if (init == Init::normal) return Tensor<T>(Shape{n});
  return draw_weight<T>(Shape{n}, fan_in, init, rng);
}

}  // namespace

template <typename T>
Linear<T>::Linear(std::size_t in, std::size_t out, Init init, Rng& rng)
    : weight(ad::Var<T>::parameter(draw_weight<T>({out, in}, in, init, rng))),
      bias(ad::Var<T>::parameter(draw_bias<T>(out, in, init, rng))) {}

template <typename T>
void Linear<T>::collect(const std::string& prefix, NamedParams<T>& out) const {
  out.emplace_back(prefix + ".weight", weight);
  out.emplace_back(prefix + ".bias", bias);
}

template <typename T>
Conv1d<T>::Conv1d(std::size_t in, std::size_t out, std::size_t k, std::size_t stride,
                  std::size_t pad, Init init, Rng& rng)
    : weight(ad::Var<T>::parameter(draw_weight<T>({out, in, k}, in * k, init, rng))),
      bias(ad::Var<T>::parameter(draw_bias<T>(out, in * k, init, rng))),
      stride(stride),
      pad(pad) {}

template <typename T>
void Conv1d<T>::collect(const std::string& prefix, NamedParams<T>& out) const {
  out.emplace_back(prefix + ".weight", weight);
  out.emplace_back(prefix + ".bias", bias);
}

template <typename T>
ConvTranspose1d<T>::ConvTranspose1d(std::size_t in, std::size_t out, std::size_t k,
                                    std::size_t stride, std::size_t pad, Init init, Rng& rng)
    : weight(ad::Var<T>::parameter(draw_weight<T>({in, out, k}, out * k, init, rng))),
      bias(ad::Var<T>::parameter(draw_bias<T>(out, out * k, init, rng))),
      stride(stride),
      pad(pad) {}

template <typename T>
void ConvTranspose1d<T>::collect(const std::string& prefix, NamedParams<T>& out) const {
  out.emplace_back(prefix + ".weight", weight);
  out.emplace_back(prefix + ".bias", bias);
}

template <typename T>
BatchNorm1d<T>::BatchNorm1d(std::size_t channels, Init init, Rng& rng)
    : running_mean(Shape{channels}), running_var(Shape{channels}, T(1)) {
  Tensor<T> g(Shape{channels}, T(1));
  if (init == Init::normal) {
    std::normal_distribution<double> d(1.0, 0.02);
    for (auto& v : g.data()) v = static_cast<T>(d(rng));
  }
  gamma = ad::Var<T>::parameter(std::move(g));
  beta = ad::Var<T>::parameter(Tensor<T>(Shape{channels}));
}

template <typename T>
void BatchNorm1d<T>::reset_running() {
  running_mean.fill(T(0));
  running_var.fill(T(1));
  seen = 0;
}

template <typename T>
ad::Var<T> BatchNorm1d<T>::forward(const ad::Var<T>& x, bool train) {
  using namespace ad;
  if (x.shape().size() != 3 || x.shape()[1] != gamma.numel()) {
    throw ShapeError("batchnorm1d: input " + shape_str(x.shape()) + " for " +
                     std::to_string(gamma.numel()) + " channels");
  }
  const std::size_t b = x.shape()[0];
  const std::size_t l = x.shape()[2];
  const std::size_t c = x.shape()[1];
  if (!train) {
    Tensor<T> scale(Shape{c});
    Tensor<T> shift(Shape{c});
    for (std::size_t i = 0; i < c; ++i) {
      scale[i] = T(1) / std::sqrt(running_var[i] + eps);
      shift[i] = -running_mean[i] * scale[i];
    }
    Var<T> norm = add(mul(x, channel_broadcast(Var<T>::constant(scale), b, l)),
                      channel_broadcast(Var<T>::constant(shift), b, l));
    return add(mul(norm, channel_broadcast(gamma, b, l)), channel_broadcast(beta, b, l));
  }
  const std::size_t n = b * l;
  if (n < 2 || b < 2) throw ShapeError("batchnorm1d: train mode needs a batch of at least 2");
  const T inv_n = T(1) / static_cast<T>(n);
  Var<T> mean = mul_scalar(channel_sum(x), inv_n);
  Var<T> xc = sub(x, channel_broadcast(mean, b, l));
  Var<T> var = mul_scalar(channel_sum(mul(xc, xc)), inv_n);
  Var<T> inv = rsqrt(add_scalar(var, eps));
  Var<T> y = add(mul(xc, channel_broadcast(mul(inv, gamma), b, l)), channel_broadcast(beta, b, l));

  const T unbias = static_cast<T>(n) / static_cast<T>(n - 1);
  ++seen;
  const T m = momentum > T(0) ? momentum : T(1) / static_cast<T>(seen);
  for (std::size_t i = 0; i < c; ++i) {
    running_mean[i] = (T(1) - m) * running_mean[i] + m * mean.value()[i];
    running_var[i] = (T(1) - m) * running_var[i] + m * var.value()[i] * unbias;
  }
  return y;
}

template <typename T>
void BatchNorm1d<T>::collect(const std::string& prefix, NamedParams<T>& out) const {
  out.emplace_back(prefix + ".gamma", gamma);
  out.emplace_back(prefix + ".beta", beta);
}

template <typename T>
void BatchNorm1d<T>::collect_buffers(const std::string& prefix,
                                     std::vector<std::pair<std::string, Tensor<T>*>>& out) {
  out.emplace_back(prefix + ".running_mean", &running_mean);
  out.emplace_back(prefix + ".running_var", &running_var);
}

template <typename T>
void Adam<T>::step(const std::vector<ad::Var<T>>& params, const std::vector<ad::Var<T>>& grads) {
  if (params.size() != grads.size()) throw ShapeError("adam: parameter/gradient count mismatch");
  if (m.empty()) {
    for (const auto& p : params) {
      m.emplace_back(p.shape());
      v.emplace_back(p.shape());
    }
  }
  if (m.size() != params.size()) throw ShapeError("adam: state does not match parameter list");
  ++steps;
  const T c1 = T(1) - static_cast<T>(std::pow(static_cast<double>(beta1), steps));
  const T c2 = T(1) - static_cast<T>(std::pow(static_cast<double>(beta2), steps));
  for (std::size_t i = 0; i < params.size(); ++i) {
    Tensor<T>& p = params[i].node()->value;
    const Tensor<T>& g = grads[i].value();
    if (g.shape() != p.shape() || m[i].shape() != p.shape()) {
      throw ShapeError("adam: shape mismatch for parameter " + std::to_string(i));
    }
    for (std::size_t j = 0; j < p.numel(); ++j) {
      m[i][j] = beta1 * m[i][j] + (T(1) - beta1) * g[j];
      v[i][j] = beta2 * v[i][j] + (T(1) - beta2) * g[j] * g[j];
      const T mhat = m[i][j] / c1;
      const T vhat = v[i][j] / c2;
      p[j] -= lr * mhat / (std::sqrt(vhat) + eps);
    }
  }
}

template struct Linear<float>;
template struct Linear<double>;
template struct Conv1d<float>;
template struct Conv1d<double>;
template struct ConvTranspose1d<float>;
template struct ConvTranspose1d<double>;
template struct BatchNorm1d<float>;
template struct BatchNorm1d<double>;
template struct Adam<float>;
template struct Adam<double>;

}  // namespace tsgan::nn
