#include "tsgan/ops.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>

namespace tsgan::ad {
namespace {

std::atomic<Backend> g_backend{Backend::parallel};

template <typename T>
void require_same(const Var<T>& a, const Var<T>& b, const char* op) {
  if (a.shape() != b.shape()) {
    throw ShapeError(std::string(op) + ": shape mismatch " + shape_str(a.shape()) + " vs " +
                     shape_str(b.shape()));
  }
}

template <typename T>
void require_rank(const Var<T>& a, std::size_t rank, const char* op) {
  if (a.shape().size() != rank) {
    throw ShapeError(std::string(op) + ": expected rank " + std::to_string(rank) + ", got " +
                     shape_str(a.shape()));
  }
}

template <typename T, typename F>
Tensor<T> zip(const Tensor<T>& a, const Tensor<T>& b, F f) {
  Tensor<T> out(a.shape());
  const T* pa = a.ptr();
  const T* pb = b.ptr();
  T* po = out.ptr();
  for (std::size_t i = 0; i < out.numel(); ++i) po[i] = f(pa[i], pb[i]);
  return out;
}

template <typename T, typename F>
Tensor<T> map(const Tensor<T>& a, F f) {
  Tensor<T> out(a.shape());
  const T* pa = a.ptr();
  T* po = out.ptr();
  for (std::size_t i = 0; i < out.numel(); ++i) po[i] = f(pa[i]);
  return out;
}

template <typename T>
using Grads = std::vector<Var<T>>;

// f^(order)(x) for the smooth unary family.
template <typename T>
T eval_fn(Fn f, int order, T x) {
  switch (f) {
    case Fn::gelu: {
      const T c = T(0.7978845608028654);  // sqrt(2/pi)
      const T a = T(0.044715);
      const T u = c * (x + a * x * x * x);
      const T t = std::tanh(u);
      const T du = c * (T(1) + T(3) * a * x * x);
      const T sech2 = T(1) - t * t;
      if (order == 0) return T(0.5) * x * (T(1) + t);
      if (order == 1) return T(0.5) * (T(1) + t) + T(0.5) * x * sech2 * du;
      const T d2u = T(6) * a * c * x;
      return sech2 * du + T(0.5) * x * sech2 * (d2u - T(2) * t * du * du);
    }
    case Fn::sigmoid: {
      const T s = T(1) / (T(1) + std::exp(-x));
      if (order == 0) return s;
      if (order == 1) return s * (T(1) - s);
      return s * (T(1) - s) * (T(1) - T(2) * s);
    }
    case Fn::tanh: {
      const T t = std::tanh(x);
      if (order == 0) return t;
      if (order == 1) return T(1) - t * t;
      return T(-2) * t * (T(1) - t * t);
    }
    case Fn::exp:
      return std::exp(x);
    case Fn::log:
      if (order == 0) return std::log(x);
      if (order == 1) return T(1) / x;
      return T(-1) / (x * x);
    case Fn::sqrt: {
      const T r = std::sqrt(x);
      if (order == 0) return r;
      if (order == 1) return T(0.5) / r;
      return T(-0.25) / (x * r);
    }
    case Fn::rsqrt: {
      const T r = T(1) / std::sqrt(x);
      if (order == 0) return r;
      if (order == 1) return T(-0.5) * r / x;
      return T(0.75) * r / (x * x);
    }
  }
  return T(0);
}

const char* fn_name(Fn f) {
  switch (f) {
    case Fn::gelu: return "gelu";
    case Fn::sigmoid: return "sigmoid";
    case Fn::tanh: return "tanh";
    case Fn::exp: return "exp";
    case Fn::log: return "log";
    case Fn::sqrt: return "sqrt";
    case Fn::rsqrt: return "rsqrt";
  }
  return "fn";
}

constexpr int kMaxOrder = 2;

template <typename T>
void gemm(bool ta, bool tb, std::size_t m, std::size_t n, std::size_t k, const T* a, const T* b,
          T* c) {
  if (g_backend.load() == Backend::serial) {
    kernels::serial::gemm(ta, tb, m, n, k, a, b, c);
  } else {
    kernels::parallel::gemm(ta, tb, m, n, k, a, b, c);
  }
}

template <typename T>
void conv_fwd_kernel(const kernels::ConvGeom& g, const T* x, const T* w, T* y) {
  if (g_backend.load() == Backend::serial) {
    kernels::serial::conv1d_forward(g, x, w, y);
  } else {
    kernels::parallel::conv1d_forward(g, x, w, y);
  }
}

template <typename T>
void conv_adj_kernel(const kernels::ConvGeom& g, const T* gy, const T* w, T* gx) {
  if (g_backend.load() == Backend::serial) {
    kernels::serial::conv1d_adjoint(g, gy, w, gx);
  } else {
    kernels::parallel::conv1d_adjoint(g, gy, w, gx);
  }
}

template <typename T>
void conv_wgrad_kernel(const kernels::ConvGeom& g, const T* x, const T* gy, T* gw) {
  if (g_backend.load() == Backend::serial) {
    kernels::serial::conv1d_weight_grad(g, x, gy, gw);
  } else {
    kernels::parallel::conv1d_weight_grad(g, x, gy, gw);
  }
}

Shape x_shape(const kernels::ConvGeom& g) { return {g.batch, g.in_ch, g.in_len}; }
Shape y_shape(const kernels::ConvGeom& g) { return {g.batch, g.out_ch, g.out_len}; }
Shape w_shape(const kernels::ConvGeom& g) { return {g.out_ch, g.in_ch, g.kernel}; }

// Splits a rank >= 2 shape into (dim0, dim1, product of the rest).
void axis1_split(const Shape& s, std::size_t& outer, std::size_t& mid, std::size_t& inner) {
  if (s.size() < 2) throw ShapeError("axis-1 op needs rank >= 2, got " + shape_str(s));
  outer = s[0];
  mid = s[1];
  inner = 1;
  for (std::size_t i = 2; i < s.size(); ++i) inner *= s[i];
}

}  // namespace

void set_backend(Backend b) { g_backend.store(b); }
Backend backend() { return g_backend.load(); }

template <typename T>
Var<T> add(const Var<T>& a, const Var<T>& b) {
  require_same(a, b, "add");
  return make_op<T>("add", zip(a.value(), b.value(), [](T x, T y) { return x + y; }), {a, b},
                    [](const Var<T>&, const Var<T>& g, const std::vector<bool>&) {
                      return Grads<T>{g, g};
                    });
}

template <typename T>
Var<T> sub(const Var<T>& a, const Var<T>& b) {
  require_same(a, b, "sub");
  return make_op<T>("sub", zip(a.value(), b.value(), [](T x, T y) { return x - y; }), {a, b},
                    [](const Var<T>&, const Var<T>& g, const std::vector<bool>& need) {
                      return Grads<T>{g, need[1] ? neg(g) : Var<T>()};
                    });
}

template <typename T>
Var<T> mul(const Var<T>& a, const Var<T>& b) {
  require_same(a, b, "mul");
  return make_op<T>("mul", zip(a.value(), b.value(), [](T x, T y) { return x * y; }), {a, b},
                    [](const Var<T>& self, const Var<T>& g, const std::vector<bool>& need) {
                      const auto& in = self.node()->inputs;
                      return Grads<T>{need[0] ? mul(g, in[1]) : Var<T>(),
                                      need[1] ? mul(g, in[0]) : Var<T>()};
                    });
}

template <typename T>
Var<T> neg(const Var<T>& a) {
  return make_op<T>("neg", map(a.value(), [](T x) { return -x; }), {a},
                    [](const Var<T>&, const Var<T>& g, const std::vector<bool>&) {
                      return Grads<T>{neg(g)};
                    });
}

template <typename T>
Var<T> add_scalar(const Var<T>& a, T s) {
  return make_op<T>("add_scalar", map(a.value(), [s](T x) { return x + s; }), {a},
                    [](const Var<T>&, const Var<T>& g, const std::vector<bool>&) {
                      return Grads<T>{g};
                    });
}

template <typename T>
Var<T> mul_scalar(const Var<T>& a, T s) {
  return make_op<T>("mul_scalar", map(a.value(), [s](T x) { return x * s; }), {a},
                    [s](const Var<T>&, const Var<T>& g, const std::vector<bool>&) {
                      return Grads<T>{mul_scalar(g, s)};
                    });
}

template <typename T>
Var<T> apply(Fn f, const Var<T>& x, int order) {
  if (order < 0 || order > kMaxOrder) {
    throw CapabilityError(std::string(fn_name(f)) + ": derivative of order " +
                          std::to_string(order) + " is not available");
  }
  return make_op<T>(fn_name(f), map(x.value(), [f, order](T v) { return eval_fn(f, order, v); }),
                    {x}, [f, order](const Var<T>& self, const Var<T>& g, const std::vector<bool>&) {
                      if (order + 1 > kMaxOrder) {
                        throw CapabilityError(std::string(fn_name(f)) + ": derivative of order " +
                                              std::to_string(order + 1) + " is not available");
                      }
                      return Grads<T>{mul(g, apply(f, self.node()->inputs[0], order + 1))};
                    });
}

template <typename T>
Var<T> leaky_relu(const Var<T>& x, T slope) {
  Var<T> mask = Var<T>::constant(map(x.value(), [slope](T v) { return v > T(0) ? T(1) : slope; }));
  return mul(x, mask);
}

template <typename T>
Var<T> sum_all(const Var<T>& x) {
  T acc = 0;
  for (T v : x.value().data()) acc += v;
  return make_op<T>("sum_all", Tensor<T>::scalar(acc), {x},
                    [](const Var<T>& self, const Var<T>& g, const std::vector<bool>&) {
                      return Grads<T>{broadcast_scalar(g, self.node()->inputs[0].shape())};
                    });
}

template <typename T>
Var<T> mean_all(const Var<T>& x) {
  return mul_scalar(sum_all(x), T(1) / static_cast<T>(x.numel()));
}

template <typename T>
Var<T> broadcast_scalar(const Var<T>& s, const Shape& shape) {
  if (s.numel() != 1) throw ShapeError("broadcast_scalar: expected one element");
  return make_op<T>("broadcast_scalar", Tensor<T>(shape, s.value()[0]), {s},
                    [](const Var<T>&, const Var<T>& g, const std::vector<bool>&) {
                      return Grads<T>{sum_all(g)};
                    });
}

template <typename T>
Var<T> row_sum(const Var<T>& x) {
  require_rank(x, 2, "row_sum");
  const std::size_t n = x.shape()[0], m = x.shape()[1];
  Tensor<T> out(Shape{n});
  for (std::size_t i = 0; i < n; ++i) {
    T acc = 0;
    for (std::size_t j = 0; j < m; ++j) acc += x.value()[i * m + j];
    out[i] = acc;
  }
  return make_op<T>("row_sum", std::move(out), {x},
                    [m](const Var<T>&, const Var<T>& g, const std::vector<bool>&) {
                      return Grads<T>{row_broadcast(g, m)};
                    });
}

template <typename T>
Var<T> row_broadcast(const Var<T>& v, std::size_t m) {
  require_rank(v, 1, "row_broadcast");
  const std::size_t n = v.shape()[0];
  Tensor<T> out(Shape{n, m});
  for (std::size_t i = 0; i < n; ++i) {
    std::fill_n(out.ptr() + i * m, m, v.value()[i]);
  }
  return make_op<T>("row_broadcast", std::move(out), {v},
                    [](const Var<T>&, const Var<T>& g, const std::vector<bool>&) {
                      return Grads<T>{row_sum(g)};
                    });
}

template <typename T>
Var<T> col_sum(const Var<T>& x) {
  require_rank(x, 2, "col_sum");
  const std::size_t n = x.shape()[0], m = x.shape()[1];
  Tensor<T> out(Shape{m});
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j) out[j] += x.value()[i * m + j];
  }
  return make_op<T>("col_sum", std::move(out), {x},
                    [n](const Var<T>&, const Var<T>& g, const std::vector<bool>&) {
                      return Grads<T>{col_broadcast(g, n)};
                    });
}

template <typename T>
Var<T> col_broadcast(const Var<T>& v, std::size_t n) {
  require_rank(v, 1, "col_broadcast");
  const std::size_t m = v.shape()[0];
  Tensor<T> out(Shape{n, m});
  for (std::size_t i = 0; i < n; ++i) {
    std::copy_n(v.value().ptr(), m, out.ptr() + i * m);
  }
  return make_op<T>("col_broadcast", std::move(out), {v},
                    [](const Var<T>&, const Var<T>& g, const std::vector<bool>&) {
                      return Grads<T>{col_sum(g)};
                    });
}

template <typename T>
Var<T> channel_sum(const Var<T>& x) {
  require_rank(x, 3, "channel_sum");
  const std::size_t b = x.shape()[0], c = x.shape()[1], l = x.shape()[2];
  Tensor<T> out(Shape{c});
  for (std::size_t bi = 0; bi < b; ++bi) {
    for (std::size_t ci = 0; ci < c; ++ci) {
      const T* p = x.value().ptr() + (bi * c + ci) * l;
      T acc = 0;
      for (std::size_t i = 0; i < l; ++i) acc += p[i];
      out[ci] += acc;
    }
  }
  return make_op<T>("channel_sum", std::move(out), {x},
                    [b, l](const Var<T>&, const Var<T>& g, const std::vector<bool>&) {
                      return Grads<T>{channel_broadcast(g, b, l)};
                    });
}

template <typename T>
Var<T> channel_broadcast(const Var<T>& v, std::size_t batch, std::size_t len) {
  require_rank(v, 1, "channel_broadcast");
  const std::size_t c = v.shape()[0];
  Tensor<T> out(Shape{batch, c, len});
  for (std::size_t bi = 0; bi < batch; ++bi) {
    for (std::size_t ci = 0; ci < c; ++ci) {
      std::fill_n(out.ptr() + (bi * c + ci) * len, len, v.value()[ci]);
    }
  }
  return make_op<T>("channel_broadcast", std::move(out), {v},
                    [](const Var<T>&, const Var<T>& g, const std::vector<bool>&) {
                      return Grads<T>{channel_sum(g)};
                    });
}

template <typename T>
Var<T> reshape(const Var<T>& x, Shape shape) {
  Shape from = x.shape();
  return make_op<T>("reshape", x.value().reshaped(std::move(shape)), {x},
                    [from](const Var<T>&, const Var<T>& g, const std::vector<bool>&) {
                      return Grads<T>{reshape(g, from)};
                    });
}

template <typename T>
Var<T> concat1(const std::vector<Var<T>>& xs) {
  if (xs.empty()) throw ShapeError("concat1: no inputs");
  std::size_t outer, mid0, inner;
  axis1_split(xs[0].shape(), outer, mid0, inner);
  std::vector<std::size_t> mids;
  std::size_t total = 0;
  for (const auto& x : xs) {
    std::size_t o, m, in;
    axis1_split(x.shape(), o, m, in);
    Shape a = x.shape(), b = xs[0].shape();
    a[1] = b[1] = 0;
    if (a != b) {
      throw ShapeError("concat1: incompatible shapes " + shape_str(xs[0].shape()) + " vs " +
                       shape_str(x.shape()));
    }
    mids.push_back(m);
    total += m;
  }
  Shape out_shape = xs[0].shape();
  out_shape[1] = total;
  Tensor<T> out(out_shape);
  for (std::size_t o = 0; o < outer; ++o) {
    std::size_t off = 0;
    for (std::size_t k = 0; k < xs.size(); ++k) {
      std::copy_n(xs[k].value().ptr() + o * mids[k] * inner, mids[k] * inner,
                  out.ptr() + (o * total + off) * inner);
      off += mids[k];
    }
  }
  return make_op<T>("concat1", std::move(out), xs,
                    [mids](const Var<T>&, const Var<T>& g, const std::vector<bool>& need) {
                      Grads<T> gs(mids.size());
                      std::size_t off = 0;
                      for (std::size_t k = 0; k < mids.size(); ++k) {
                        if (need[k]) gs[k] = slice1(g, off, mids[k]);
                        off += mids[k];
                      }
                      return gs;
                    });
}

template <typename T>
Var<T> slice1(const Var<T>& x, std::size_t start, std::size_t len) {
  std::size_t outer, mid, inner;
  axis1_split(x.shape(), outer, mid, inner);
  if (start + len > mid) {
    throw ShapeError("slice1: range [" + std::to_string(start) + ", " +
                     std::to_string(start + len) + ") out of " + shape_str(x.shape()));
  }
  Shape out_shape = x.shape();
  out_shape[1] = len;
  Tensor<T> out(out_shape);
  for (std::size_t o = 0; o < outer; ++o) {
    std::copy_n(x.value().ptr() + (o * mid + start) * inner, len * inner,
                out.ptr() + o * len * inner);
  }
  return make_op<T>("slice1", std::move(out), {x},
                    [start, mid](const Var<T>&, const Var<T>& g, const std::vector<bool>&) {
                      return Grads<T>{pad1(g, start, mid)};
                    });
}

template <typename T>
Var<T> pad1(const Var<T>& x, std::size_t start, std::size_t total) {
  std::size_t outer, len, inner;
  axis1_split(x.shape(), outer, len, inner);
  if (start + len > total) throw ShapeError("pad1: slice does not fit");
  Shape out_shape = x.shape();
  out_shape[1] = total;
  Tensor<T> out(out_shape);
  for (std::size_t o = 0; o < outer; ++o) {
    std::copy_n(x.value().ptr() + o * len * inner, len * inner,
                out.ptr() + (o * total + start) * inner);
  }
  return make_op<T>("pad1", std::move(out), {x},
                    [start, len](const Var<T>&, const Var<T>& g, const std::vector<bool>&) {
                      return Grads<T>{slice1(g, start, len)};
                    });
}

template <typename T>
Var<T> matmul(const Var<T>& a, const Var<T>& b, bool ta, bool tb) {
  require_rank(a, 2, "matmul");
  require_rank(b, 2, "matmul");
  const std::size_t m = ta ? a.shape()[1] : a.shape()[0];
  const std::size_t k = ta ? a.shape()[0] : a.shape()[1];
  const std::size_t kb = tb ? b.shape()[1] : b.shape()[0];
  const std::size_t n = tb ? b.shape()[0] : b.shape()[1];
  if (k != kb) {
    throw ShapeError("matmul: inner dimensions differ " + shape_str(a.shape()) + " vs " +
                     shape_str(b.shape()));
  }
  Tensor<T> out(Shape{m, n});
  gemm(ta, tb, m, n, k, a.value().ptr(), b.value().ptr(), out.ptr());
  return make_op<T>(
      "matmul", std::move(out), {a, b},
      [ta, tb](const Var<T>& self, const Var<T>& g, const std::vector<bool>& need) {
        const Var<T>& a = self.node()->inputs[0];
        const Var<T>& b = self.node()->inputs[1];
        Var<T> ga, gb;
        if (need[0]) ga = ta ? matmul(b, g, tb, true) : matmul(g, b, false, !tb);
        if (need[1]) gb = tb ? matmul(g, a, true, ta) : matmul(a, g, !ta, false);
        return Grads<T>{ga, gb};
      });
}

template <typename T>
Var<T> linear(const Var<T>& x, const Var<T>& w, const Var<T>& b) {
  require_rank(x, 2, "linear");
  require_rank(w, 2, "linear");
  if (x.shape()[1] != w.shape()[1]) {
    throw ShapeError("linear: input " + shape_str(x.shape()) + " does not match weight " +
                     shape_str(w.shape()));
  }
  Var<T> y = matmul(x, w, false, true);
  if (!b.defined()) return y;
  if (b.shape() != Shape{w.shape()[0]}) {
    throw ShapeError("linear: bias " + shape_str(b.shape()) + " does not match weight " +
                     shape_str(w.shape()));
  }
  return add(y, col_broadcast(b, x.shape()[0]));
}

template <typename T>
Var<T> conv_forward(const Var<T>& x, const Var<T>& w, const kernels::ConvGeom& g) {
  if (x.shape() != x_shape(g) || w.shape() != w_shape(g)) {
    throw ShapeError("conv1d: input " + shape_str(x.shape()) + " / weight " +
                     shape_str(w.shape()) + " do not match geometry");
  }
  Tensor<T> y(y_shape(g));
  conv_fwd_kernel(g, x.value().ptr(), w.value().ptr(), y.ptr());
  return make_op<T>("conv1d", std::move(y), {x, w},
                    [g](const Var<T>& self, const Var<T>& gy, const std::vector<bool>& need) {
                      const auto& in = self.node()->inputs;
                      return Grads<T>{need[0] ? conv_adjoint(gy, in[1], g) : Var<T>(),
                                      need[1] ? conv_weight_grad(in[0], gy, g) : Var<T>()};
                    });
}

template <typename T>
Var<T> conv_adjoint(const Var<T>& gy, const Var<T>& w, const kernels::ConvGeom& g) {
  if (gy.shape() != y_shape(g) || w.shape() != w_shape(g)) {
    throw ShapeError("conv_transpose1d: input " + shape_str(gy.shape()) + " / weight " +
                     shape_str(w.shape()) + " do not match geometry");
  }
  Tensor<T> gx(x_shape(g));
  conv_adj_kernel(g, gy.value().ptr(), w.value().ptr(), gx.ptr());
  return make_op<T>("conv_transpose1d", std::move(gx), {gy, w},
                    [g](const Var<T>& self, const Var<T>& h, const std::vector<bool>& need) {
                      const auto& in = self.node()->inputs;
                      return Grads<T>{need[0] ? conv_forward(h, in[1], g) : Var<T>(),
                                      need[1] ? conv_weight_grad(h, in[0], g) : Var<T>()};
                    });
}

template <typename T>
Var<T> conv_weight_grad(const Var<T>& x, const Var<T>& gy, const kernels::ConvGeom& g) {
  if (x.shape() != x_shape(g) || gy.shape() != y_shape(g)) {
    throw ShapeError("conv_weight_grad: operands " + shape_str(x.shape()) + " / " +
                     shape_str(gy.shape()) + " do not match geometry");
  }
  Tensor<T> gw(w_shape(g));
  conv_wgrad_kernel(g, x.value().ptr(), gy.value().ptr(), gw.ptr());
  return make_op<T>("conv_weight_grad", std::move(gw), {x, gy},
                    [g](const Var<T>& self, const Var<T>& v, const std::vector<bool>& need) {
                      const auto& in = self.node()->inputs;
                      return Grads<T>{need[0] ? conv_adjoint(in[1], v, g) : Var<T>(),
                                      need[1] ? conv_forward(in[0], v, g) : Var<T>()};
                    });
}

template <typename T>
Var<T> conv1d(const Var<T>& x, const Var<T>& w, const Var<T>& b, std::size_t stride,
              std::size_t pad) {
  require_rank(x, 3, "conv1d");
  require_rank(w, 3, "conv1d");
  if (x.shape()[1] != w.shape()[1]) {
    throw ShapeError("conv1d: input " + shape_str(x.shape()) + " vs weight " +
                     shape_str(w.shape()) + " channel mismatch");
  }
  kernels::ConvGeom g;
  g.batch = x.shape()[0];
  g.in_ch = x.shape()[1];
  g.in_len = x.shape()[2];
  g.out_ch = w.shape()[0];
  g.kernel = w.shape()[2];
  g.stride = stride;
  g.pad = pad;
  g.out_len = kernels::conv_out_len(g.in_len, g.kernel, stride, pad);
  if (g.out_len == 0) {
    throw ShapeError("conv1d: input " + shape_str(x.shape()) + " too short for weight " +
                     shape_str(w.shape()));
  }
  Var<T> y = conv_forward(x, w, g);
  if (!b.defined()) return y;
  if (b.shape() != Shape{g.out_ch}) throw ShapeError("conv1d: bias " + shape_str(b.shape()));
  return add(y, channel_broadcast(b, g.batch, g.out_len));
}

template <typename T>
Var<T> conv_transpose1d(const Var<T>& x, const Var<T>& w, const Var<T>& b, std::size_t stride,
                        std::size_t pad) {
  require_rank(x, 3, "conv_transpose1d");
  require_rank(w, 3, "conv_transpose1d");
  if (x.shape()[1] != w.shape()[0]) {
    throw ShapeError("conv_transpose1d: input " + shape_str(x.shape()) + " vs weight " +
                     shape_str(w.shape()) + " channel mismatch");
  }
  const std::size_t len = x.shape()[2];
  const std::size_t k = w.shape()[2];
  if (stride == 0 || len == 0 || (len - 1) * stride + k <= 2 * pad) {
    throw ShapeError("conv_transpose1d: empty output for input " + shape_str(x.shape()));
  }
  kernels::ConvGeom g;
  g.batch = x.shape()[0];
  g.out_ch = w.shape()[0];
  g.in_ch = w.shape()[1];
  g.out_len = len;
  g.in_len = (len - 1) * stride + k - 2 * pad;
  g.kernel = k;
  g.stride = stride;
  g.pad = pad;
  Var<T> y = conv_adjoint(x, w, g);
  if (!b.defined()) return y;
  if (b.shape() != Shape{g.in_ch}) {
    throw ShapeError("conv_transpose1d: bias " + shape_str(b.shape()));
  }
  return add(y, channel_broadcast(b, g.batch, g.in_len));
}

template <typename T>
Var<T> log_softmax(const Var<T>& x) {
  require_rank(x, 2, "log_softmax");
  const std::size_t n = x.shape()[0], m = x.shape()[1];
  Tensor<T> row_max(Shape{n}, -std::numeric_limits<T>::infinity());
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j) row_max[i] = std::max(row_max[i], x.value()[i * m + j]);
  }
  Var<T> shifted = sub(x, row_broadcast(Var<T>::constant(std::move(row_max)), m));
  Var<T> lse = log(row_sum(exp(shifted)));
  return sub(shifted, row_broadcast(lse, m));
}

template <typename T>
Var<T> softmax(const Var<T>& x) {
  return exp(log_softmax(x));
}

#define TSGAN_INSTANTIATE_OPS(T)                                                              \
  template Var<T> add(const Var<T>&, const Var<T>&);                                          \
  template Var<T> sub(const Var<T>&, const Var<T>&);                                          \
  template Var<T> mul(const Var<T>&, const Var<T>&);                                          \
  template Var<T> neg(const Var<T>&);                                                         \
  template Var<T> add_scalar(const Var<T>&, T);                                               \
  template Var<T> mul_scalar(const Var<T>&, T);                                               \
  template Var<T> apply(Fn, const Var<T>&, int);                                              \
  template Var<T> leaky_relu(const Var<T>&, T);                                               \
  template Var<T> sum_all(const Var<T>&);                                                     \
  template Var<T> mean_all(const Var<T>&);                                                    \
  template Var<T> broadcast_scalar(const Var<T>&, const Shape&);                              \
  template Var<T> row_sum(const Var<T>&);                                                     \
  template Var<T> row_broadcast(const Var<T>&, std::size_t);                                  \
  template Var<T> col_sum(const Var<T>&);                                                     \
  template Var<T> col_broadcast(const Var<T>&, std::size_t);                                  \
  template Var<T> channel_sum(const Var<T>&);                                                 \
  template Var<T> channel_broadcast(const Var<T>&, std::size_t, std::size_t);                 \
  template Var<T> reshape(const Var<T>&, Shape);                                              \
  template Var<T> concat1(const std::vector<Var<T>>&);                                        \
  template Var<T> slice1(const Var<T>&, std::size_t, std::size_t);                            \
  template Var<T> pad1(const Var<T>&, std::size_t, std::size_t);                              \
  template Var<T> matmul(const Var<T>&, const Var<T>&, bool, bool);                           \
  template Var<T> linear(const Var<T>&, const Var<T>&, const Var<T>&);                        \
  template Var<T> conv_forward(const Var<T>&, const Var<T>&, const kernels::ConvGeom&);       \
  template Var<T> conv_adjoint(const Var<T>&, const Var<T>&, const kernels::ConvGeom&);       \
  template Var<T> conv_weight_grad(const Var<T>&, const Var<T>&, const kernels::ConvGeom&);   \
  template Var<T> conv1d(const Var<T>&, const Var<T>&, const Var<T>&, std::size_t,            \
                         std::size_t);                                                        \
  template Var<T> conv_transpose1d(const Var<T>&, const Var<T>&, const Var<T>&, std::size_t,  \
                                   std::size_t);                                              \
  template Var<T> log_softmax(const Var<T>&);                                                 \
  template Var<T> softmax(const Var<T>&);

TSGAN_INSTANTIATE_OPS(float)
TSGAN_INSTANTIATE_OPS(double)

#undef TSGAN_INSTANTIATE_OPS

}  // namespace tsgan::ad
