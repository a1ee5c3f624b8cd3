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

#ifndef DDOA_ACOUSTICS_HPP_
#define DDOA_ACOUSTICS_HPP_

#include <cstdint>
#include <span>
#include <vector>

#include "ddoa/features.hpp"

namespace ddoa::acoustics {

inline constexpr double kSpeedOfSound = 343.0;  // m/s

struct Vec3 {
  double x = 0, y = 0, z = 0;
};

// Uniform linear array in the horizontal plane. Azimuth convention:
// 0 deg points along the array axis toward microphone 0 (endfire),
// 90 deg is broadside, 180 deg the opposite endfire. yaw_rad rotates the
// array axis in the room's xy plane (yaw 0 = +x).
struct ArrayGeometry {
  int mics = 8;
  double spacing_m = 0.02;
  Vec3 center{0, 0, 1.2};
  double yaw_rad = 0.0;

  Vec3 axis() const;                  // unit vector toward microphone 0
  std::vector<Vec3> positions() const;
};

struct SourceSpec {
  double azimuth_deg = 90.0;  // in [0, 180]
  double distance_m = 1.5;
};

struct SceneConfig {
  Vec3 room_dims{6, 5, 3};
  double rt60_s = 0.0;  // 0 = anechoic (direct path only)
  ArrayGeometry array;
  std::vector<SourceSpec> sources;
  double snr_db = 30.0;
  std::uint64_t seed = 0;
  int max_image_order = 20;
  double duration_s = 0.5;
  double fs = 16000.0;
};

// Source position implied by the azimuth/distance convention above.
Vec3 source_position(const ArrayGeometry& array, const SourceSpec& src);

// Throws ConfigError when the array or a source sits outside the room
// (0.05 m margin) or parameters are out of range.
void validate_scene(const SceneConfig& cfg);

// Shoebox image-source room impulse response with 81-tap windowed-sinc
// fractional delays. Wall absorption follows from rt60 via Sabine's
// formula, uniform across surfaces; throws ConfigError when the implied
// absorption leaves (0, 1]. rt60 == 0 renders only the direct path.
// The response is at least max(min_length, rt60*fs + tail) samples.
std::vector<double> image_method_rir(const Vec3& room, double rt60_s, const Vec3& src,
                                     const Vec3& mic, int max_order, double fs,
                                     std::size_t min_length = 0);

struct SceneRender {
  features::MultichannelSignal mix;    // sources + scaled white noise
  features::MultichannelSignal clean;  // sources only
};

// Convolves each source with its per-microphone impulse response, sums,
// and adds white Gaussian noise scaled so the clean-to-noise power ratio
// equals snr_db. Deterministic given cfg.seed.
SceneRender simulate_scene(const SceneConfig& cfg,
                           std::span<const std::vector<double>> source_signals);

struct DoaGrid {
  double resolution_deg = 5.0;
  int n_classes() const { return int(180.0 / resolution_deg) + 1; }
};

// Nearest grid class; equidistant azimuths round toward the lower index.
// Throws ConfigError outside [0, 180].
int doa_to_class(double azimuth_deg, const DoaGrid& grid = {});
double class_to_doa(int cls, const DoaGrid& grid = {});

// Reproducible wideband test source: low-pass-tilted Gaussian noise with
// slow (2-8 Hz) amplitude modulation, peak-normalized to 0.5.
std::vector<double> synth_speech_like(double duration_s, double fs, std::uint64_t seed);

}  // namespace ddoa::acoustics

#endif  // DDOA_ACOUSTICS_HPP_
