#include "tsgan/kernels.hpp"

#include <algorithm>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace tsgan::kernels {

std::size_t conv_out_len(std::size_t in_len, std::size_t kernel, std::size_t stride,
                         std::size_t pad) {
  if (stride == 0 || in_len + 2 * pad < kernel) return 0;
  return (in_len + 2 * pad - kernel) / stride + 1;
}

void set_num_threads(int n) {
#ifdef _OPENMP
  omp_set_num_threads(std::max(1, n));
#else
  (void)n;
#endif
}

int num_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

namespace serial {

template <typename T>
void gemm(bool trans_a, bool trans_b, std::size_t m, std::size_t n, std::size_t k, const T* a,
          const T* b, T* c) {
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      T acc = 0;
      for (std::size_t p = 0; p < k; ++p) {
        const T av = trans_a ? a[p * m + i] : a[i * k + p];
        const T bv = trans_b ? b[j * k + p] : b[p * n + j];
        acc += av * bv;
      }
      c[i * n + j] = acc;
    }
  }
}

template <typename T>
void conv1d_forward(const ConvGeom& g, const T* x, const T* w, T* y) {
  for (std::size_t b = 0; b < g.batch; ++b) {
    for (std::size_t co = 0; co < g.out_ch; ++co) {
      for (std::size_t o = 0; o < g.out_len; ++o) {
        T acc = 0;
        for (std::size_t ci = 0; ci < g.in_ch; ++ci) {
          for (std::size_t kk = 0; kk < g.kernel; ++kk) {
            const std::ptrdiff_t pos = static_cast<std::ptrdiff_t>(o * g.stride + kk) -
                                       static_cast<std::ptrdiff_t>(g.pad);
            if (pos < 0 || pos >= static_cast<std::ptrdiff_t>(g.in_len)) continue;
            acc += w[(co * g.in_ch + ci) * g.kernel + kk] * x[(b * g.in_ch + ci) * g.in_len + pos];
          }
        }
        y[(b * g.out_ch + co) * g.out_len + o] = acc;
      }
    }
  }
}

template <typename T>
void conv1d_adjoint(const ConvGeom& g, const T* gy, const T* w, T* gx) {
  std::fill(gx, gx + g.batch * g.in_ch * g.in_len, T(0));
  for (std::size_t b = 0; b < g.batch; ++b) {
    for (std::size_t co = 0; co < g.out_ch; ++co) {
      for (std::size_t o = 0; o < g.out_len; ++o) {
        const T gv = gy[(b * g.out_ch + co) * g.out_len + o];
        for (std::size_t ci = 0; ci < g.in_ch; ++ci) {
          for (std::size_t kk = 0; kk < g.kernel; ++kk) {
            const std::ptrdiff_t pos = static_cast<std::ptrdiff_t>(o * g.stride + kk) -
                                       static_cast<std::ptrdiff_t>(g.pad);
            if (pos < 0 || pos >= static_cast<std::ptrdiff_t>(g.in_len)) continue;
            gx[(b * g.in_ch + ci) * g.in_len + pos] += w[(co * g.in_ch + ci) * g.kernel + kk] * gv;
          }
        }
      }
    }
  }
}

template <typename T>
void conv1d_weight_grad(const ConvGeom& g, const T* x, const T* gy, T* gw) {
  std::fill(gw, gw + g.out_ch * g.in_ch * g.kernel, T(0));
  for (std::size_t co = 0; co < g.out_ch; ++co) {
    for (std::size_t ci = 0; ci < g.in_ch; ++ci) {
      for (std::size_t kk = 0; kk < g.kernel; ++kk) {
        T acc = 0;
        for (std::size_t b = 0; b < g.batch; ++b) {
          for (std::size_t o = 0; o < g.out_len; ++o) {
            const std::ptrdiff_t pos = static_cast<std::ptrdiff_t>(o * g.stride + kk) -
                                       static_cast<std::ptrdiff_t>(g.pad);
            if (pos < 0 || pos >= static_cast<std::ptrdiff_t>(g.in_len)) continue;
            acc += gy[(b * g.out_ch + co) * g.out_len + o] * x[(b * g.in_ch + ci) * g.in_len + pos];
          }
        }
        gw[(co * g.in_ch + ci) * g.kernel + kk] = acc;
      }
    }
  }
}

}  // namespace serial

namespace parallel {
namespace {

// Register tile: MR rows of C by two SIMD vectors' worth of columns.
constexpr std::size_t kMR = 4;
template <typename T>
constexpr std::size_t kNR = 64 / sizeof(T);

template <typename T, std::size_t MR, std::size_t NR>
inline void tile(std::size_t k, const T* a, std::size_t lda, const T* b, std::size_t ldb, T* c,
                 std::size_t ldc) {
  T acc[MR][NR] = {};
  for (std::size_t p = 0; p < k; ++p) {
    const T* bp = b + p * ldb;
    for (std::size_t r = 0; r < MR; ++r) {
      const T av = a[r * lda + p];
#pragma omp simd
      for (std::size_t j = 0; j < NR; ++j) acc[r][j] += av * bp[j];
    }
  }
  for (std::size_t r = 0; r < MR; ++r) {
    for (std::size_t j = 0; j < NR; ++j) c[r * ldc + j] = acc[r][j];
  }
}

// Ragged edge of the tile grid; same accumulation order as tile().
template <typename T>
inline void edge(std::size_t rows, std::size_t cols, std::size_t k, const T* a, std::size_t lda,
                 const T* b, std::size_t ldb, T* c, std::size_t ldc) {
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t j = 0; j < cols; ++j) {
      T acc = 0;
      for (std::size_t p = 0; p < k; ++p) acc += a[r * lda + p] * b[p * ldb + j];
      c[r * ldc + j] = acc;
    }
  }
}

template <typename T>
void transpose(std::size_t rows, std::size_t cols, const T* src, T* dst) {
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < cols; ++j) dst[j * rows + i] = src[i * cols + j];
  }
}

// col[(ci*K + kk), (b*Lo + o)] = x[b, ci, o*s + kk - p]
template <typename T>
void im2col(const ConvGeom& g, const T* x, T* col) {
  const std::size_t ncols = g.batch * g.out_len;
#pragma omp parallel for schedule(static)
  for (std::size_t row = 0; row < g.in_ch * g.kernel; ++row) {
    const std::size_t ci = row / g.kernel;
    const std::size_t kk = row % g.kernel;
    T* dst = col + row * ncols;
    for (std::size_t b = 0; b < g.batch; ++b) {
      const T* src = x + (b * g.in_ch + ci) * g.in_len;
      for (std::size_t o = 0; o < g.out_len; ++o) {
        const std::ptrdiff_t pos = static_cast<std::ptrdiff_t>(o * g.stride + kk) -
                                   static_cast<std::ptrdiff_t>(g.pad);
        dst[b * g.out_len + o] =
            (pos < 0 || pos >= static_cast<std::ptrdiff_t>(g.in_len)) ? T(0) : src[pos];
      }
    }
  }
}

// Scatter-add of col back onto x; parallel over (b, ci) so each output row has
// a single writer and a fixed kk-major accumulation order.
template <typename T>
void col2im(const ConvGeom& g, const T* col, T* x) {
  const std::size_t ncols = g.batch * g.out_len;
#pragma omp parallel for schedule(static)
  for (std::size_t bc = 0; bc < g.batch * g.in_ch; ++bc) {
    const std::size_t b = bc / g.in_ch;
    const std::size_t ci = bc % g.in_ch;
    T* dst = x + bc * g.in_len;
    std::fill(dst, dst + g.in_len, T(0));
    for (std::size_t kk = 0; kk < g.kernel; ++kk) {
      const T* src = col + (ci * g.kernel + kk) * ncols + b * g.out_len;
      for (std::size_t o = 0; o < g.out_len; ++o) {
        const std::ptrdiff_t pos = static_cast<std::ptrdiff_t>(o * g.stride + kk) -
                                   static_cast<std::ptrdiff_t>(g.pad);
        if (pos < 0 || pos >= static_cast<std::ptrdiff_t>(g.in_len)) continue;
        dst[pos] += src[o];
      }
    }
  }
}

// [B, C, L] <-> [C, B*L]
template <typename T>
void bcl_to_cbl(std::size_t batch, std::size_t ch, std::size_t len, const T* src, T* dst) {
  for (std::size_t b = 0; b < batch; ++b) {
    for (std::size_t c = 0; c < ch; ++c) {
      std::copy_n(src + (b * ch + c) * len, len, dst + c * batch * len + b * len);
    }
  }
}

template <typename T>
void cbl_to_bcl(std::size_t batch, std::size_t ch, std::size_t len, const T* src, T* dst) {
  for (std::size_t b = 0; b < batch; ++b) {
    for (std::size_t c = 0; c < ch; ++c) {
      std::copy_n(src + c * batch * len + b * len, len, dst + (b * ch + c) * len);
    }
  }
}

}  // namespace

template <typename T>
void gemm(bool trans_a, bool trans_b, std::size_t m, std::size_t n, std::size_t k, const T* a,
          const T* b, T* c) {
  if (m == 0 || n == 0) return;
  if (k == 0) {
    std::fill(c, c + m * n, T(0));
    return;
  }
  std::vector<T> a_buf;
  std::vector<T> b_buf;
  if (trans_a) {
    a_buf.resize(m * k);
    transpose(k, m, a, a_buf.data());
    a = a_buf.data();
  }
  if (trans_b) {
    b_buf.resize(k * n);
    transpose(n, k, b, b_buf.data());
    b = b_buf.data();
  }
  constexpr std::size_t nr = kNR<T>;
  const std::size_t row_blocks = (m + kMR - 1) / kMR;
#pragma omp parallel for schedule(static)
  for (std::size_t rb = 0; rb < row_blocks; ++rb) {
    const std::size_t i0 = rb * kMR;
    const std::size_t rows = std::min(kMR, m - i0);
    std::size_t j0 = 0;
    if (rows == kMR) {
      for (; j0 + nr <= n; j0 += nr) {
        tile<T, kMR, nr>(k, a + i0 * k, k, b + j0, n, c + i0 * n + j0, n);
      }
    }
    if (j0 < n) edge(rows, n - j0, k, a + i0 * k, k, b + j0, n, c + i0 * n + j0, n);
  }
}

template <typename T>
void conv1d_forward(const ConvGeom& g, const T* x, const T* w, T* y) {
  const std::size_t rows = g.in_ch * g.kernel;
  const std::size_t ncols = g.batch * g.out_len;
  std::vector<T> col(rows * ncols);
  im2col(g, x, col.data());
  std::vector<T> out(g.out_ch * ncols);
  gemm(false, false, g.out_ch, ncols, rows, w, col.data(), out.data());
  cbl_to_bcl(g.batch, g.out_ch, g.out_len, out.data(), y);
}

template <typename T>
void conv1d_adjoint(const ConvGeom& g, const T* gy, const T* w, T* gx) {
  const std::size_t rows = g.in_ch * g.kernel;
  const std::size_t ncols = g.batch * g.out_len;
  std::vector<T> gy2(g.out_ch * ncols);
  bcl_to_cbl(g.batch, g.out_ch, g.out_len, gy, gy2.data());
  std::vector<T> col(rows * ncols);
  gemm(true, false, rows, ncols, g.out_ch, w, gy2.data(), col.data());
  col2im(g, col.data(), gx);
}

template <typename T>
void conv1d_weight_grad(const ConvGeom& g, const T* x, const T* gy, T* gw) {
  const std::size_t rows = g.in_ch * g.kernel;
  const std::size_t ncols = g.batch * g.out_len;
  std::vector<T> col(rows * ncols);
  im2col(g, x, col.data());
  std::vector<T> gy2(g.out_ch * ncols);
  bcl_to_cbl(g.batch, g.out_ch, g.out_len, gy, gy2.data());
  gemm(false, true, g.out_ch, rows, ncols, gy2.data(), col.data(), gw);
}

}  // namespace parallel

#define TSGAN_INSTANTIATE_KERNELS(NS, T)                                                      \
  template void NS::gemm<T>(bool, bool, std::size_t, std::size_t, std::size_t, const T*,      \
                            const T*, T*);                                                    \
  template void NS::conv1d_forward<T>(const ConvGeom&, const T*, const T*, T*);               \
  template void NS::conv1d_adjoint<T>(const ConvGeom&, const T*, const T*, T*);               \
  template void NS::conv1d_weight_grad<T>(const ConvGeom&, const T*, const T*, T*);

TSGAN_INSTANTIATE_KERNELS(serial, float)
TSGAN_INSTANTIATE_KERNELS(serial, double)
TSGAN_INSTANTIATE_KERNELS(parallel, float)
TSGAN_INSTANTIATE_KERNELS(parallel, double)

#undef TSGAN_INSTANTIATE_KERNELS

}  // namespace tsgan::kernels
