#pragma once

#include <cstddef>

#include "tsgan/autodiff.hpp"
#include "tsgan/kernels.hpp"

// Differentiable ops. Every backward rule is expressed with ops from this
// file, so the set is closed under differentiation.

namespace tsgan::ad {

// Elementwise, shapes must match exactly.
template <typename T> Var<T> add(const Var<T>& a, const Var<T>& b);
template <typename T> Var<T> sub(const Var<T>& a, const Var<T>& b);
template <typename T> Var<T> mul(const Var<T>& a, const Var<T>& b);
template <typename T> Var<T> neg(const Var<T>& a);
template <typename T> Var<T> add_scalar(const Var<T>& a, T s);
template <typename T> Var<T> mul_scalar(const Var<T>& a, T s);

// Smooth unary functions. Each records analytic derivatives up to second
// order; asking for a third derivative throws CapabilityError.
enum class Fn { gelu, sigmoid, tanh, exp, log, sqrt, rsqrt };
template <typename T> Var<T> apply(Fn f, const Var<T>& x, int order = 0);

template <typename T> Var<T> gelu(const Var<T>& x) { return apply(Fn::gelu, x); }
template <typename T> Var<T> sigmoid(const Var<T>& x) { return apply(Fn::sigmoid, x); }
template <typename T> Var<T> tanh(const Var<T>& x) { return apply(Fn::tanh, x); }
template <typename T> Var<T> exp(const Var<T>& x) { return apply(Fn::exp, x); }
template <typename T> Var<T> log(const Var<T>& x) { return apply(Fn::log, x); }
template <typename T> Var<T> sqrt(const Var<T>& x) { return apply(Fn::sqrt, x); }
template <typename T> Var<T> rsqrt(const Var<T>& x) { return apply(Fn::rsqrt, x); }

// Piecewise linear: x * (x > 0 ? 1 : slope); the slope mask is a constant.
template <typename T> Var<T> leaky_relu(const Var<T>& x, T slope);

// Whole-tensor reductions and the scalar broadcast that undoes them.
template <typename T> Var<T> sum_all(const Var<T>& x);
template <typename T> Var<T> mean_all(const Var<T>& x);
template <typename T> Var<T> broadcast_scalar(const Var<T>& s, const Shape& shape);

// Axis-1 reductions of a [N, M] matrix and their broadcasts.
template <typename T> Var<T> row_sum(const Var<T>& x);                   // [N,M] -> [N]
template <typename T> Var<T> row_broadcast(const Var<T>& v, std::size_t m);  // [N] -> [N,M]
template <typename T> Var<T> col_sum(const Var<T>& x);                   // [N,M] -> [M]
template <typename T> Var<T> col_broadcast(const Var<T>& v, std::size_t n);  // [M] -> [N,M]

// Per-channel reduction of [B, C, L] and its broadcast.
template <typename T> Var<T> channel_sum(const Var<T>& x);  // [B,C,L] -> [C]
template <typename T>
Var<T> channel_broadcast(const Var<T>& v, std::size_t batch, std::size_t len);

template <typename T> Var<T> reshape(const Var<T>& x, Shape shape);

// Concatenate / slice / zero-pad along axis 1 of tensors with rank >= 2.
template <typename T> Var<T> concat1(const std::vector<Var<T>>& xs);
template <typename T> Var<T> slice1(const Var<T>& x, std::size_t start, std::size_t len);
template <typename T> Var<T> pad1(const Var<T>& x, std::size_t start, std::size_t total);

// C = op(A) op(B) for 2-D operands.
template <typename T>
Var<T> matmul(const Var<T>& a, const Var<T>& b, bool trans_a = false, bool trans_b = false);

// y = x W^T + b with W [out, in]; bias may be undefined.
template <typename T> Var<T> linear(const Var<T>& x, const Var<T>& w, const Var<T>& b);

// x [B,Ci,L], w [Co,Ci,K] -> [B,Co,Lout]; bias [Co] may be undefined.
template <typename T>
Var<T> conv1d(const Var<T>& x, const Var<T>& w, const Var<T>& b, std::size_t stride,
              std::size_t pad);

// x [B,Ci,L], w [Ci,Co,K] -> [B,Co,(L-1)*stride - 2*pad + K]. The adjoint of
// conv1d with the same weight.
template <typename T>
Var<T> conv_transpose1d(const Var<T>& x, const Var<T>& w, const Var<T>& b, std::size_t stride,
                        std::size_t pad);

// Raw conv pieces, exposed for the differentiation rules and tests.
template <typename T>
Var<T> conv_forward(const Var<T>& x, const Var<T>& w, const kernels::ConvGeom& g);
template <typename T>
Var<T> conv_adjoint(const Var<T>& gy, const Var<T>& w, const kernels::ConvGeom& g);
template <typename T>
Var<T> conv_weight_grad(const Var<T>& x, const Var<T>& gy, const kernels::ConvGeom& g);

// Row-wise (axis 1 of [N, M]) log-softmax and softmax.
template <typename T> Var<T> log_softmax(const Var<T>& x);
template <typename T> Var<T> softmax(const Var<T>& x);

// Kernel backend used by matmul/conv ops. Parallel is the default; serial
// runs the reference loops.
enum class Backend { serial, parallel };
void set_backend(Backend b);
Backend backend();

}  // namespace tsgan::ad
