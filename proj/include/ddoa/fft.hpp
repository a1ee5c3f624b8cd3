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

#ifndef DDOA_FFT_HPP_
#define DDOA_FFT_HPP_

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace ddoa::fft {

// In-place iterative radix-2 transform; size must be a power of two.
// inverse=true applies the conjugate transform and the 1/N scale.
void transform(std::vector<std::complex<double>>& a, bool inverse);

// DFT of a real signal (zero-padded or truncated to n); returns the
// n/2+1 non-redundant bins.
std::vector<std::complex<double>> real_dft(std::span<const double> x, std::size_t n);

// Full linear convolution (length |a|+|b|-1) via frequency-domain
// multiply with power-of-two padding.
std::vector<double> convolve(std::span<const double> a, std::span<const double> b);

}  // namespace ddoa::fft

#endif  // DDOA_FFT_HPP_
