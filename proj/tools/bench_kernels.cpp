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

// Times the OpenMP kernels against the serial reference implementations
// on the hot shapes of the d1123 network and checks they agree bitwise.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "ddoa/kernels.hpp"
#include "ddoa/reference.hpp"
#include "ddoa/rng.hpp"

namespace {

using Clock = std::chrono::steady_clock;

double time_ms(const std::function<void()>& fn, int reps) {
  fn();  // warm up
  const auto t0 = Clock::now();
  for (int r = 0; r < reps; ++r) fn();
  const auto t1 = Clock::now();
  return std::chrono::duration<double, std::milli>(t1 - t0).count() / reps;
}

std::vector<float> random_vec(std::size_t n, std::uint64_t seed) {
  ddoa::Rng rng(seed);
  std::vector<float> v(n);
  for (auto& x : v) x = float(rng.uniform(-1.0, 1.0));
  return v;
}

double max_abs_diff(const std::vector<float>& a, const std::vector<float>& b) {
  double m = 0;
  for (std::size_t i = 0; i < a.size(); ++i)
    m = std::max(m, double(std::fabs(a[i] - b[i])));
  return m;
}

void row(const char* name, double serial_ms, double omp_ms, double gflop,
         double diff) {
  std::printf("%-22s %9.2f ms %9.2f ms %7.2fx %8.2f GF/s  max|d|=%g\n", name,
              serial_ms, omp_ms, serial_ms / omp_ms, gflop / (omp_ms / 1e3) / 1e9,
              diff);
}

}  // namespace

int main() {
#ifdef _OPENMP
  std::printf("threads: %d\n", omp_get_max_threads());
#else
  std::printf("threads: 1 (OpenMP disabled)\n");
#endif
  std::printf("%-22s %12s %12s %8s %12s\n", "kernel", "serial", "openmp", "speedup",
              "throughput");

  // conv2 of d1123: [B,257,7,64] * [1,2,64,64]
  {
    const std::size_t B = 32, H = 257, W = 7, Cin = 64, fw = 2, Cout = 64;
    const std::size_t Wo = W - 1;
    const auto in = random_vec(B * H * W * Cin, 1);
    const auto wgt = random_vec(fw * Cin * Cout, 2);
    const auto bias = random_vec(Cout, 3);
    std::vector<float> o1(B * H * Wo * Cout), o2(o1.size());
    const double flops = 2.0 * double(B * H * Wo * fw * Cin * Cout);
    const double ts = time_ms(
        [&] {
          ddoa::reference::conv2d_forward(in.data(), B, H, W, Cin, wgt.data(), 1, fw,
                                          Cout, bias.data(), 1, 1, o1.data());
        },
        3);
    const double tp = time_ms(
        [&] {
          ddoa::kernels::conv2d_forward(in.data(), B, H, W, Cin, wgt.data(), 1, fw,
                                        Cout, bias.data(), 1, 1, o2.data());
        },
        3);
    row("conv2d fwd", ts, tp, flops, max_abs_diff(o1, o2));
  }

  // conv2 weight gradient
  {
    const std::size_t B = 32, H = 257, W = 7, Cin = 64, fw = 2, Cout = 64;
    const std::size_t Wo = W - 1;
    const auto in = random_vec(B * H * W * Cin, 4);
    const auto dout = random_vec(B * H * Wo * Cout, 5);
    std::vector<float> g1(fw * Cin * Cout), g2(g1.size());
    const double flops = 2.0 * double(B * H * Wo * fw * Cin * Cout);
    const double ts = time_ms(
        [&] {
          ddoa::reference::conv2d_backward_weights(in.data(), B, H, W, Cin,
                                                   dout.data(), 1, fw, Cout, 1, 1,
                                                   g1.data());
        },
        3);
    const double tp = time_ms(
        [&] {
          ddoa::kernels::conv2d_backward_weights(in.data(), B, H, W, Cin, dout.data(),
                                                 1, fw, Cout, 1, 1, g2.data());
        },
        3);
    row("conv2d bwd weights", ts, tp, flops, max_abs_diff(g1, g2));
  }

  // fc1 of d1123: [B,16448] x [16448,512]
  {
    const std::size_t B = 32, nin = 16448, nout = 512;
    const auto x = random_vec(B * nin, 6);
    const auto w = random_vec(nin * nout, 7);
    const auto bias = random_vec(nout, 8);
    std::vector<float> y1(B * nout), y2(y1.size());
    const double flops = 2.0 * double(B * nin * nout);
    const double ts = time_ms(
        [&] {
          ddoa::reference::dense_forward(x.data(), B, nin, w.data(), nout, bias.data(),
                                         y1.data());
        },
        3);
    const double tp = time_ms(
        [&] {
          ddoa::kernels::dense_forward(x.data(), B, nin, w.data(), nout, bias.data(),
                                       y2.data());
        },
        3);
    row("dense fwd", ts, tp, flops, max_abs_diff(y1, y2));
  }

  // fc1 weight gradient
  {
    const std::size_t B = 32, nin = 16448, nout = 512;
    const auto x = random_vec(B * nin, 9);
    const auto dy = random_vec(B * nout, 10);
    std::vector<float> g1(nin * nout), g2(g1.size());
    const double flops = 2.0 * double(B * nin * nout);
    const double ts = time_ms(
        [&] {
          ddoa::reference::dense_backward_weights(x.data(), B, nin, dy.data(), nout,
                                                  g1.data());
        },
        3);
    const double tp = time_ms(
        [&] {
          ddoa::kernels::dense_backward_weights(x.data(), B, nin, dy.data(), nout,
                                                g2.data());
        },
        3);
    row("dense bwd weights", ts, tp, flops, max_abs_diff(g1, g2));
  }

  return 0;
}
