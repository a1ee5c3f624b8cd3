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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>

#include "ddoa/errors.hpp"
#include "ddoa/features.hpp"
#include "ddoa/fft.hpp"
#include "oracle_utils.hpp"

using namespace ddoa;

TEST_CASE("radix-2 fft agrees with the naive DFT") {
  for (std::size_t n : {8u, 64u, 512u}) {
    const std::vector<double> x = oracle::random_vector<double>(n, n + 17);
    const auto want = oracle::naive_dft(x);
    const auto got = fft::real_dft(x, n);
    REQUIRE(got.size() == n / 2 + 1);
    for (std::size_t k = 0; k < got.size(); ++k) {
      CHECK(got[k].real() == doctest::Approx(want[k].real()).epsilon(1e-9).scale(1.0));
      CHECK(got[k].imag() == doctest::Approx(want[k].imag()).epsilon(1e-9).scale(1.0));
    }
  }
  std::vector<std::complex<double>> odd(6);
  CHECK_THROWS_AS(fft::transform(odd, false), DimensionError);
}

TEST_CASE("fft convolution matches direct convolution") {
  const std::vector<double> a = oracle::random_vector<double>(37, 1);
  const std::vector<double> b = oracle::random_vector<double>(11, 2);
  const std::vector<double> got = fft::convolve(a, b);
  REQUIRE(got.size() == 47);
  for (std::size_t n = 0; n < got.size(); ++n) {
    double want = 0;
    for (std::size_t k = 0; k < b.size(); ++k)
      if (n >= k && n - k < a.size()) want += a[n - k] * b[k];
    CHECK(got[n] == doctest::Approx(want).epsilon(1e-10).scale(1.0));
  }
}

TEST_CASE("frame count follows the hop recursion") {
  const features::StftConfig cfg;  // 512/256
  CHECK(features::frame_count(512, cfg) == 1);
  CHECK(features::frame_count(767, cfg) == 1);
  CHECK(features::frame_count(768, cfg) == 2);
  // A 50-frame evaluation block needs n_fft + 49*hop samples.
  CHECK(features::samples_for_frames(50, cfg) == 13056);
  CHECK(features::frame_count(13056, cfg) == 50);
  CHECK_THROWS_AS(features::frame_count(511, cfg), DimensionError);

  // Property: count = floor((T - n_fft)/hop) + 1 over random lengths.
  Rng rng(99);
  for (int i = 0; i < 50; ++i) {
    const std::size_t t = 512 + rng.index(50000);
    CHECK(features::frame_count(t, cfg) == (t - 512) / 256 + 1);
  }
}

TEST_CASE("bin-centered cosine peaks at its own bin in every frame") {
  const features::StftConfig cfg;
  const double fs = 16000.0;
  const std::size_t k0 = 40;  // bin-center frequency k0*fs/512 = 1250 Hz
  std::vector<double> x(4096);
  for (std::size_t i = 0; i < x.size(); ++i)
    x[i] = std::cos(2.0 * std::numbers::pi * double(k0) * double(i) / 512.0);
  const features::Spectrogram spec = features::stft(x, cfg);
  REQUIRE(spec.bins == 257);
  for (std::size_t f = 0; f < spec.frames; ++f) {
    std::size_t peak = 0;
    double best = -1;
    for (std::size_t k = 0; k < spec.bins; ++k) {
      const double mag = std::abs(spec.at(f, k));
      if (mag > best) {
        best = mag;
        peak = k;
      }
    }
    CHECK(peak == k0);
  }
}

TEST_CASE("windowed frame energy is positive for nonzero input") {
  const std::vector<double> x = oracle::random_vector<double>(2048, 5);
  const features::Spectrogram spec = features::stft(x, {});
  for (std::size_t f = 0; f < spec.frames; ++f) {
    double energy = 0;
    for (std::size_t k = 0; k < spec.bins; ++k) energy += std::norm(spec.at(f, k));
    CHECK(energy > 0.0);
  }
}

TEST_CASE("phase map shape, range and symmetry") {
  const std::vector<double> x = oracle::random_vector<double>(3000, 8);
  features::MultichannelSignal sig;
  sig.channels.assign(8, x);  // identical channels
  const auto maps = features::signal_phase_maps(sig, {});
  REQUIRE(!maps.empty());
  CHECK(maps[0].bins == 257);
  CHECK(maps[0].mics == 8);
  for (const auto& pm : maps) {
    for (std::size_t k = 0; k < pm.bins; ++k)
      for (std::size_t m = 1; m < pm.mics; ++m)
        CHECK(pm.at(k, m) == pm.at(k, 0));  // all columns identical
    for (double v : pm.values) {
      CHECK(v > -std::numbers::pi);
      CHECK(v <= std::numbers::pi);
    }
  }
}

TEST_CASE("integer-sample delay shows the analytic phase slope") {
  // Far-field tone at a bin center; channel 2 is channel 1 delayed by
  // delta samples, so the cross-channel phase difference at bin k is
  // -2*pi*k*delta/n_fft modulo 2*pi.
  const std::size_t k0 = 32, delta = 3;
  std::vector<double> x(4000);
  for (std::size_t i = 0; i < x.size(); ++i)
    x[i] = std::sin(2.0 * std::numbers::pi * double(k0) * double(i) / 512.0);
  features::MultichannelSignal sig;
  sig.channels.resize(2);
  sig.channels[0].assign(x.begin() + long(delta), x.end());
  sig.channels[1].assign(x.begin(), x.end() - long(delta));
  const auto maps = features::signal_phase_maps(sig, {});
  const auto& pm = maps[1];
  const double measured = pm.at(k0, 1) - pm.at(k0, 0);
  const double want = -2.0 * std::numbers::pi * double(k0) * double(delta) / 512.0;
  const double wrapped = std::remainder(measured - want, 2.0 * std::numbers::pi);
  CHECK(std::fabs(wrapped) < 1e-6);
}

TEST_CASE("shifting by whole hops renumbers frames without changing them") {
  const features::StftConfig cfg;
  const std::vector<double> x = oracle::random_vector<double>(6000, 21);
  features::MultichannelSignal a, b;
  a.channels.assign(3, x);
  // Drop one hop of samples from the front: frame n of b equals frame
  // n+1 of a sample-for-sample.
  std::vector<double> shifted(x.begin() + cfg.hop, x.end());
  b.channels.assign(3, shifted);
  const auto ma = features::signal_phase_maps(a, cfg);
  const auto mb = features::signal_phase_maps(b, cfg);
  REQUIRE(mb.size() + 1 == ma.size());
  for (std::size_t f = 0; f < mb.size(); ++f) CHECK(mb[f].values == ma[f + 1].values);
}

TEST_CASE("phase map input validation") {
  const std::vector<double> x = oracle::random_vector<double>(1024, 3);
  std::vector<features::Spectrogram> chans = {features::stft(x, {}),
                                              features::stft(x, {})};
  CHECK_THROWS_AS(features::phase_map(chans, 99), DimensionError);
  std::vector<features::Spectrogram> bad = {features::stft(x, {}),
                                            features::stft(x, {256, 128})};
  CHECK_THROWS_AS(features::phase_map(bad, 0), DimensionError);
}
