#pragma once

#include <cstddef>

// Dense compute kernels behind the autodiff ops.
//
// Two implementations share one interface:
//   serial::   direct loop nests, kept as the reference the tests compare against
//   parallel:: im2col + register-tiled GEMM, rows distributed with OpenMP
//
// Every parallel kernel partitions output elements across threads and keeps the
// per-element accumulation order fixed, so results do not depend on the thread
// count.

namespace tsgan::kernels {

// Geometry of a 1-D convolution y[B,Co,Lo] = conv(x[B,Ci,Li], w[Co,Ci,K]).
struct ConvGeom {
  std::size_t batch = 1;
  std::size_t in_ch = 1;
  std::size_t out_ch = 1;
  std::size_t in_len = 1;
  std::size_t out_len = 1;
  std::size_t kernel = 1;
  std::size_t stride = 1;
  std::size_t pad = 0;
};

// Output length of a forward convolution; 0 when the window does not fit.
std::size_t conv_out_len(std::size_t in_len, std::size_t kernel, std::size_t stride,
                         std::size_t pad);

void set_num_threads(int n);
int num_threads();

namespace serial {

// C[M,N] = op(A) * op(B); op(A) is [M,K], op(B) is [K,N].
template <typename T>
void gemm(bool trans_a, bool trans_b, std::size_t m, std::size_t n, std::size_t k, const T* a,
          const T* b, T* c);

// y = conv(x, w), no bias.
template <typename T>
void conv1d_forward(const ConvGeom& g, const T* x, const T* w, T* y);

// gx = adjoint of conv1d_forward applied to gy (the transposed convolution).
template <typename T>
void conv1d_adjoint(const ConvGeom& g, const T* gy, const T* w, T* gx);

// gw = d<conv(x, w), gy>/dw.
template <typename T>
void conv1d_weight_grad(const ConvGeom& g, const T* x, const T* gy, T* gw);

}  // namespace serial

namespace parallel {

template <typename T>
void gemm(bool trans_a, bool trans_b, std::size_t m, std::size_t n, std::size_t k, const T* a,
          const T* b, T* c);

template <typename T>
void conv1d_forward(const ConvGeom& g, const T* x, const T* w, T* y);

template <typename T>
void conv1d_adjoint(const ConvGeom& g, const T* gy, const T* w, T* gx);

template <typename T>
void conv1d_weight_grad(const ConvGeom& g, const T* x, const T* gy, T* gw);

}  // namespace parallel

}  // namespace tsgan::kernels
