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

#ifndef DDOA_FEATURES_HPP_
#define DDOA_FEATURES_HPP_

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace ddoa::features {

struct MultichannelSignal {
  std::vector<std::vector<double>> channels;  // equal lengths
  double sample_rate = 16000.0;

  std::size_t samples() const { return channels.empty() ? 0 : channels[0].size(); }
};

struct StftConfig {
  int n_fft = 512;
  int hop = 256;  // 50% overlap
};

// Analysis window; periodic Hann.
std::vector<double> analysis_window(int n_fft);

// floor((T - n_fft)/hop) + 1; throws DimensionError when T < n_fft.
std::size_t frame_count(std::size_t samples, const StftConfig& cfg = {});

// Samples needed for exactly n frames: n_fft + (n-1)*hop. Evaluation
// blocks of N frames are cut to this length.
std::size_t samples_for_frames(std::size_t n_frames, const StftConfig& cfg = {});

struct Spectrogram {
  std::size_t frames = 0;
  std::size_t bins = 0;  // n_fft/2 + 1
  std::vector<std::complex<double>> coef;  // [frame * bins + k]

  const std::complex<double>& at(std::size_t frame, std::size_t bin) const {
    return coef[frame * bins + bin];
  }
};

Spectrogram stft(std::span<const double> signal, const StftConfig& cfg = {});

// K x M matrix of principal-value STFT phases for one time frame.
struct PhaseMap {
  std::size_t bins = 0, mics = 0;
  long frame_index = 0;
  std::vector<double> values;  // row-major [bin][mic], radians in (-pi, pi]

  double at(std::size_t k, std::size_t m) const { return values[k * mics + m]; }
};

// All channels must share frame/bin counts (same STFT parameters).
// Zero-magnitude bins map to phase 0.
PhaseMap phase_map(std::span<const Spectrogram> channels, std::size_t frame);
std::vector<PhaseMap> phase_maps(std::span<const Spectrogram> channels);

// STFT of every channel followed by per-frame phase-map extraction.
std::vector<PhaseMap> signal_phase_maps(const MultichannelSignal& sig,
                                        const StftConfig& cfg = {});

}  // namespace ddoa::features

#endif  // DDOA_FEATURES_HPP_
