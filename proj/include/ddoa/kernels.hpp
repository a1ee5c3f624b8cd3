// Copyright 2026 The ddoa Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef DDOA_KERNELS_HPP_
#define DDOA_KERNELS_HPP_

#include <cmath>
#include <cstddef>
#include <cstdint>

// OpenMP-parallel compute kernels. Every parallel loop writes disjoint
// outputs and every reduction runs serially in a fixed index order, so
// results are bitwise independent of the thread count. The serial
// counterparts live in reference.hpp and use the same accumulation
// order; the two must stay interchangeable (see the kernel tests and
// tools/bench_kernels.cpp).

namespace ddoa::kernels {

using std::size_t;

// Dilated valid cross-correlation, stride 1.
//   in   [B, H, W, Cin]
//   w    [fh, fw, Cin, Cout]
//   out  [B, Ho, Wo, Cout], Ho = H - dh*(fh-1), Wo = W - dw*(fw-1)
template <typename T>
void conv2d_forward(const T* __restrict in, size_t B, size_t H, size_t W, size_t Cin,
                    const T* __restrict w, size_t fh, size_t fw, size_t Cout,
                    const T* __restrict bias, size_t dh, size_t dw,
                    T* __restrict out) {
  const size_t Ho = H - dh * (fh - 1);
  const size_t Wo = W - dw * (fw - 1);
#pragma omp parallel for collapse(2) schedule(static)
  for (size_t b = 0; b < B; ++b) {
    for (size_t ho = 0; ho < Ho; ++ho) {
      for (size_t wo = 0; wo < Wo; ++wo) {
        T* __restrict o = out + ((b * Ho + ho) * Wo + wo) * Cout;
        for (size_t co = 0; co < Cout; ++co) o[co] = bias[co];
        for (size_t kh = 0; kh < fh; ++kh) {
          for (size_t kw = 0; kw < fw; ++kw) {
            const T* __restrict irow =
                in + ((b * H + ho + dh * kh) * W + wo + dw * kw) * Cin;
            const T* __restrict wrow = w + (kh * fw + kw) * Cin * Cout;
            for (size_t ci = 0; ci < Cin; ++ci) {
              const T iv = irow[ci];
              const T* __restrict wr = wrow + ci * Cout;
#pragma omp simd
              for (size_t co = 0; co < Cout; ++co) o[co] += iv * wr[co];
            }
          }
        }
      }
    }
  }
}

// Gradient w.r.t. the conv input: gathers from every output position the
// element contributed to. dout [B, Ho, Wo, Cout] -> din [B, H, W, Cin].
template <typename T>
void conv2d_backward_input(const T* __restrict w, size_t fh, size_t fw, size_t Cin,
                           size_t Cout, const T* __restrict dout, size_t B, size_t H,
                           size_t W, size_t dh, size_t dw, T* __restrict din) {
  const size_t Ho = H - dh * (fh - 1);
  const size_t Wo = W - dw * (fw - 1);
#pragma omp parallel for collapse(2) schedule(static)
  for (size_t b = 0; b < B; ++b) {
    for (size_t h = 0; h < H; ++h) {
      for (size_t ww = 0; ww < W; ++ww) {
        T* __restrict d = din + ((b * H + h) * W + ww) * Cin;
        for (size_t ci = 0; ci < Cin; ++ci) d[ci] = T(0);
        for (size_t kh = 0; kh < fh; ++kh) {
          if (h < dh * kh) continue;
          const size_t ho = h - dh * kh;
          if (ho >= Ho) continue;
          for (size_t kw = 0; kw < fw; ++kw) {
            if (ww < dw * kw) continue;
            const size_t wo = ww - dw * kw;
            if (wo >= Wo) continue;
            const T* __restrict g = dout + ((b * Ho + ho) * Wo + wo) * Cout;
            const T* __restrict wrow = w + (kh * fw + kw) * Cin * Cout;
            for (size_t ci = 0; ci < Cin; ++ci) {
              const T* __restrict wr = wrow + ci * Cout;
              T acc = T(0);
#pragma omp simd reduction(+ : acc)
              for (size_t co = 0; co < Cout; ++co) acc += wr[co] * g[co];
              d[ci] += acc;
            }
          }
        }
      }
    }
  }
}

// dw[kh,kw,ci,co] = sum over (b,ho,wo) of in[...] * dout[...]. Parallel
// over filter cells; the (b,ho,wo) reduction is serial per cell.
template <typename T>
void conv2d_backward_weights(const T* __restrict in, size_t B, size_t H, size_t W,
                             size_t Cin, const T* __restrict dout, size_t fh, size_t fw,
                             size_t Cout, size_t dh, size_t dw, T* __restrict dwgt) {
  const size_t Ho = H - dh * (fh - 1);
  const size_t Wo = W - dw * (fw - 1);
  const size_t cells = fh * fw * Cin;
#pragma omp parallel for schedule(static)
  for (size_t cell = 0; cell < cells; ++cell) {
    const size_t kh = cell / (fw * Cin);
    const size_t kw = (cell / Cin) % fw;
    const size_t ci = cell % Cin;
    T* __restrict dst = dwgt + cell * Cout;
    for (size_t co = 0; co < Cout; ++co) dst[co] = T(0);
    for (size_t b = 0; b < B; ++b) {
      for (size_t ho = 0; ho < Ho; ++ho) {
        const T* __restrict irow = in + ((b * H + ho + dh * kh) * W + dw * kw) * Cin + ci;
        const T* __restrict grow = dout + (b * Ho + ho) * Wo * Cout;
        for (size_t wo = 0; wo < Wo; ++wo) {
          const T iv = irow[wo * Cin];
          const T* __restrict g = grow + wo * Cout;
#pragma omp simd
          for (size_t co = 0; co < Cout; ++co) dst[co] += iv * g[co];
        }
      }
    }
  }
}

template <typename T>
void conv2d_backward_bias(const T* __restrict dout, size_t B, size_t Ho, size_t Wo,
                          size_t Cout, T* __restrict dbias) {
  const size_t n = B * Ho * Wo;
#pragma omp parallel for schedule(static)
  for (size_t co = 0; co < Cout; ++co) {
    T acc = T(0);
    for (size_t i = 0; i < n; ++i) acc += dout[i * Cout + co];
    dbias[co] = acc;
  }
}

// Y[b,:] = X[b,:] * W + bias, X [B, nin], W [nin, nout].
template <typename T>
void dense_forward(const T* __restrict x, size_t B, size_t nin,
                   const T* __restrict w, size_t nout, const T* __restrict bias,
                   T* __restrict y) {
  constexpr size_t kBlock = 128;
  const size_t nblocks = (nout + kBlock - 1) / kBlock;
#pragma omp parallel for schedule(static)
  for (size_t jb = 0; jb < nblocks; ++jb) {
    const size_t j0 = jb * kBlock;
    const size_t j1 = j0 + kBlock < nout ? j0 + kBlock : nout;
    for (size_t b = 0; b < B; ++b) {
      T* __restrict yr = y + b * nout;
      for (size_t j = j0; j < j1; ++j) yr[j] = bias[j];
    }
    for (size_t k = 0; k < nin; ++k) {
      const T* __restrict wr = w + k * nout;
      for (size_t b = 0; b < B; ++b) {
        const T xv = x[b * nin + k];
        T* __restrict yr = y + b * nout;
#pragma omp simd
        for (size_t j = j0; j < j1; ++j) yr[j] += xv * wr[j];
      }
    }
  }
}

// dX = dY * W^T; dX [B, nin].
template <typename T>
void dense_backward_input(const T* __restrict w, size_t nin, size_t nout,
                          const T* __restrict dy, size_t B, T* __restrict dx) {
#pragma omp parallel for schedule(static)
  for (size_t k = 0; k < nin; ++k) {
    const T* __restrict wr = w + k * nout;
    for (size_t b = 0; b < B; ++b) {
      const T* __restrict g = dy + b * nout;
      T acc = T(0);
#pragma omp simd reduction(+ : acc)
      for (size_t j = 0; j < nout; ++j) acc += wr[j] * g[j];
      dx[b * nin + k] = acc;
    }
  }
}

// dW = X^T * dY; parallel over input rows, serial over the batch.
template <typename T>
void dense_backward_weights(const T* __restrict x, size_t B, size_t nin,
                            const T* __restrict dy, size_t nout, T* __restrict dw) {
#pragma omp parallel for schedule(static)
  for (size_t k = 0; k < nin; ++k) {
    T* __restrict dst = dw + k * nout;
    for (size_t j = 0; j < nout; ++j) dst[j] = T(0);
    for (size_t b = 0; b < B; ++b) {
      const T xv = x[b * nin + k];
      if (xv == T(0)) continue;  // flattened relu outputs are often sparse
      const T* __restrict g = dy + b * nout;
#pragma omp simd
      for (size_t j = 0; j < nout; ++j) dst[j] += xv * g[j];
    }
  }
}

template <typename T>
void dense_backward_bias(const T* __restrict dy, size_t B, size_t nout,
                         T* __restrict dbias) {
#pragma omp parallel for schedule(static)
  for (size_t j = 0; j < nout; ++j) {
    T acc = T(0);
    for (size_t b = 0; b < B; ++b) acc += dy[b * nout + j];
    dbias[j] = acc;
  }
}

template <typename T>
void relu_inplace(T* __restrict a, size_t n) {
#pragma omp parallel for schedule(static)
  for (size_t i = 0; i < n; ++i) a[i] = a[i] > T(0) ? a[i] : T(0);
}

// grad *= (activation > 0); `act` is the post-rectifier value.
template <typename T>
void relu_backward_inplace(const T* __restrict act, T* __restrict grad, size_t n) {
#pragma omp parallel for schedule(static)
  for (size_t i = 0; i < n; ++i)
    if (!(act[i] > T(0))) grad[i] = T(0);
}

template <typename T>
void logistic_inplace(T* __restrict a, size_t n) {
#pragma omp parallel for schedule(static)
  for (size_t i = 0; i < n; ++i) a[i] = T(1) / (T(1) + std::exp(-a[i]));
}

// One Adam update on a parameter block; t is the already-incremented
// step counter.
template <typename T>
void adam_update(T* __restrict p, const T* __restrict g, T* __restrict m,
                 T* __restrict v, size_t n, double lr, double beta1, double beta2,
                 double eps, long t) {
  const T b1 = T(beta1), b2 = T(beta2);
  const T corr1 = T(1.0 / (1.0 - std::pow(beta1, double(t))));
  const T corr2 = T(1.0 / (1.0 - std::pow(beta2, double(t))));
  const T step = T(lr), e = T(eps);
#pragma omp parallel for schedule(static)
  for (size_t i = 0; i < n; ++i) {
    m[i] = b1 * m[i] + (T(1) - b1) * g[i];
    v[i] = b2 * v[i] + (T(1) - b2) * g[i] * g[i];
    const T mhat = m[i] * corr1;
    const T vhat = v[i] * corr2;
    p[i] -= step * mhat / (std::sqrt(vhat) + e);
  }
}

}  // namespace ddoa::kernels

#endif  // DDOA_KERNELS_HPP_
