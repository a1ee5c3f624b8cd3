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

#include "ddoa/features.hpp"

#include <cmath>
#include <numbers>

#include "ddoa/errors.hpp"
#include "ddoa/fft.hpp"

namespace ddoa::features {

std::vector<double> analysis_window(int n_fft) {
  std::vector<double> w(static_cast<std::size_t>(n_fft));
  for (int i = 0; i < n_fft; ++i)
    w[std::size_t(i)] =
        0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * double(i) / double(n_fft));
  return w;
}

std::size_t frame_count(std::size_t samples, const StftConfig& cfg) {
  if (cfg.n_fft < 2 || cfg.n_fft % 2 != 0)
    throw DimensionError("stft n_fft must be even and >= 2");
  if (cfg.hop < 1) throw DimensionError("stft hop must be positive");
  if (samples < std::size_t(cfg.n_fft))
    throw DimensionError("signal of " + std::to_string(samples) +
                         " samples is shorter than one " + std::to_string(cfg.n_fft) +
                         "-sample analysis frame");
  return (samples - std::size_t(cfg.n_fft)) / std::size_t(cfg.hop) + 1;
}

std::size_t samples_for_frames(std::size_t n_frames, const StftConfig& cfg) {
  return std::size_t(cfg.n_fft) + (n_frames - 1) * std::size_t(cfg.hop);
}

Spectrogram stft(std::span<const double> signal, const StftConfig& cfg) {
  const std::size_t n_frames = frame_count(signal.size(), cfg);
  const std::size_t n_fft = std::size_t(cfg.n_fft);
  const std::size_t bins = n_fft / 2 + 1;
  const std::vector<double> window = analysis_window(cfg.n_fft);

  Spectrogram spec;
  spec.frames = n_frames;
  spec.bins = bins;
  spec.coef.resize(n_frames * bins);

#pragma omp parallel for schedule(static)
  for (std::size_t f = 0; f < n_frames; ++f) {
    std::vector<double> frame(n_fft);
    const std::size_t off = f * std::size_t(cfg.hop);
    for (std::size_t i = 0; i < n_fft; ++i) frame[i] = signal[off + i] * window[i];
    const auto spectrum = fft::real_dft(frame, n_fft);
    for (std::size_t k = 0; k < bins; ++k) spec.coef[f * bins + k] = spectrum[k];
  }
  return spec;
}

PhaseMap phase_map(std::span<const Spectrogram> channels, std::size_t frame) {
  if (channels.empty()) throw DimensionError("phase_map: no channels");
  const std::size_t bins = channels[0].bins;
  for (const Spectrogram& ch : channels)
    if (ch.bins != bins || ch.frames != channels[0].frames)
      throw DimensionError("phase_map: channels analyzed with different STFT sizes");
  if (frame >= channels[0].frames)
    throw DimensionError("phase_map: frame " + std::to_string(frame) +
                         " out of range (" + std::to_string(channels[0].frames) +
                         " frames)");

  PhaseMap pm;
  pm.bins = bins;
  pm.mics = channels.size();
  pm.frame_index = long(frame);
  pm.values.resize(bins * channels.size());
  for (std::size_t k = 0; k < bins; ++k) {
    for (std::size_t m = 0; m < channels.size(); ++m) {
      const std::complex<double> c = channels[m].at(frame, k);
      double ph = 0.0;
      if (c.real() != 0.0 || c.imag() != 0.0) ph = std::atan2(c.imag(), c.real());
      // Principal value lives in (-pi, pi]; atan2 can return -pi.
      if (ph == -std::numbers::pi) ph = std::numbers::pi;
      pm.values[k * channels.size() + m] = ph;
    }
  }
  return pm;
}

std::vector<PhaseMap> phase_maps(std::span<const Spectrogram> channels) {
  if (channels.empty()) throw DimensionError("phase_maps: no channels");
  std::vector<PhaseMap> maps;
  maps.reserve(channels[0].frames);
  for (std::size_t f = 0; f < channels[0].frames; ++f)
    maps.push_back(phase_map(channels, f));
  return maps;
}

std::vector<PhaseMap> signal_phase_maps(const MultichannelSignal& sig,
                                        const StftConfig& cfg) {
  std::vector<Spectrogram> specs;
  specs.reserve(sig.channels.size());
  for (const auto& ch : sig.channels) specs.push_back(stft(ch, cfg));
  return phase_maps(specs);
}

}  // namespace ddoa::features
