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

#ifndef DDOA_REFERENCE_HPP_
#define DDOA_REFERENCE_HPP_

#include <cstddef>
#include <vector>

// Serial reference implementations of the compute kernels. Same
// accumulation order as ddoa::kernels, so the parallel kernels must
// match them bitwise on finite inputs; kept for the kernel equality
// tests and the serial side of tools/bench_kernels.cpp.

namespace ddoa::reference {

using std::size_t;

template <typename T>
void conv2d_forward(const T* in, size_t B, size_t H, size_t W, size_t Cin, const T* w,
                    size_t fh, size_t fw, size_t Cout, const T* bias, size_t dh,
                    size_t dw, T* out) {
  const size_t Ho = H - dh * (fh - 1);
  const size_t Wo = W - dw * (fw - 1);
  for (size_t b = 0; b < B; ++b)
    for (size_t ho = 0; ho < Ho; ++ho)
      for (size_t wo = 0; wo < Wo; ++wo) {
        T* o = out + ((b * Ho + ho) * Wo + wo) * Cout;
        for (size_t co = 0; co < Cout; ++co) o[co] = bias[co];
        for (size_t kh = 0; kh < fh; ++kh)
          for (size_t kw = 0; kw < fw; ++kw) {
            const T* irow = in + ((b * H + ho + dh * kh) * W + wo + dw * kw) * Cin;
            const T* wrow = w + (kh * fw + kw) * Cin * Cout;
            for (size_t ci = 0; ci < Cin; ++ci) {
              const T iv = irow[ci];
              const T* wr = wrow + ci * Cout;
              for (size_t co = 0; co < Cout; ++co) o[co] += iv * wr[co];
            }
          }
      }
}

// Contiguous (dilation 1) convolution; the baseline operator the dilated
// kernels are checked against.
template <typename T>
void conv2d_contiguous(const T* in, size_t B, size_t H, size_t W, size_t Cin,
                       const T* w, size_t fh, size_t fw, size_t Cout, const T* bias,
                       T* out) {
  conv2d_forward(in, B, H, W, Cin, w, fh, fw, Cout, bias, size_t(1), size_t(1), out);
}

// Expands a [fh, fw, Cin, Cout] filter into the equivalent
// zero-interleaved contiguous filter of size [1+dh*(fh-1), 1+dw*(fw-1),
// Cin, Cout]: a dilated convolution equals a contiguous convolution with
// this filter.
template <typename T>
std::vector<T> zero_stuff_filter(const T* w, size_t fh, size_t fw, size_t Cin,
                                 size_t Cout, size_t dh, size_t dw, size_t* out_fh,
                                 size_t* out_fw) {
  const size_t gh = 1 + dh * (fh - 1);
  const size_t gw = 1 + dw * (fw - 1);
  std::vector<T> big(gh * gw * Cin * Cout, T(0));
  for (size_t kh = 0; kh < fh; ++kh)
    for (size_t kw = 0; kw < fw; ++kw)
      for (size_t ci = 0; ci < Cin; ++ci)
        for (size_t co = 0; co < Cout; ++co)
          big[((kh * dh * gw + kw * dw) * Cin + ci) * Cout + co] =
              w[((kh * fw + kw) * Cin + ci) * Cout + co];
  *out_fh = gh;
  *out_fw = gw;
  return big;
}

template <typename T>
void dense_forward(const T* x, size_t B, size_t nin, const T* w, size_t nout,
                   const T* bias, T* y) {
  for (size_t b = 0; b < B; ++b) {
    T* yr = y + b * nout;
    for (size_t j = 0; j < nout; ++j) yr[j] = bias[j];
    for (size_t k = 0; k < nin; ++k) {
      const T xv = x[b * nin + k];
      const T* wr = w + k * nout;
      for (size_t j = 0; j < nout; ++j) yr[j] += xv * wr[j];
    }
  }
}

template <typename T>
void conv2d_backward_weights(const T* in, size_t B, size_t H, size_t W, size_t Cin,
                             const T* dout, size_t fh, size_t fw, size_t Cout,
                             size_t dh, size_t dw, T* dwgt) {
  const size_t Ho = H - dh * (fh - 1);
  const size_t Wo = W - dw * (fw - 1);
  const size_t cells = fh * fw * Cin;
  for (size_t cell = 0; cell < cells; ++cell) {
    const size_t kh = cell / (fw * Cin);
    const size_t kw = (cell / Cin) % fw;
    const size_t ci = cell % Cin;
    T* dst = dwgt + cell * Cout;
    for (size_t co = 0; co < Cout; ++co) dst[co] = T(0);
    for (size_t b = 0; b < B; ++b)
      for (size_t ho = 0; ho < Ho; ++ho)
        for (size_t wo = 0; wo < Wo; ++wo) {
          const T iv = in[((b * H + ho + dh * kh) * W + wo + dw * kw) * Cin + ci];
          const T* g = dout + ((b * Ho + ho) * Wo + wo) * Cout;
          for (size_t co = 0; co < Cout; ++co) dst[co] += iv * g[co];
        }
  }
}

template <typename T>
void dense_backward_weights(const T* x, size_t B, size_t nin, const T* dy, size_t nout,
                            T* dw) {
  for (size_t k = 0; k < nin; ++k) {
    T* dst = dw + k * nout;
    for (size_t j = 0; j < nout; ++j) dst[j] = T(0);
    for (size_t b = 0; b < B; ++b) {
      const T xv = x[b * nin + k];
      if (xv == T(0)) continue;
      const T* g = dy + b * nout;
      for (size_t j = 0; j < nout; ++j) dst[j] += xv * g[j];
    }
  }
}

}  // namespace ddoa::reference

#endif  // DDOA_REFERENCE_HPP_
