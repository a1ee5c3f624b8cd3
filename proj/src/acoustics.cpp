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

#include "ddoa/acoustics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "ddoa/errors.hpp"
#include "ddoa/fft.hpp"
#include "ddoa/rng.hpp"

namespace ddoa::acoustics {

namespace {

constexpr int kSincHalf = 40;  // 81-tap windowed-sinc fractional delay

double sinc(double t) {
  if (t == 0.0) return 1.0;
  const double x = std::numbers::pi * t;
  return std::sin(x) / x;
}

bool inside_room(const Vec3& p, const Vec3& room, double margin) {
  return p.x >= margin && p.x <= room.x - margin && p.y >= margin &&
         p.y <= room.y - margin && p.z >= margin && p.z <= room.z - margin;
}

}  // namespace

Vec3 ArrayGeometry::axis() const {
  return {std::cos(yaw_rad), std::sin(yaw_rad), 0.0};
}

std::vector<Vec3> ArrayGeometry::positions() const {
  const Vec3 u = axis();
  std::vector<Vec3> pos(static_cast<std::size_t>(mics));
  for (int m = 0; m < mics; ++m) {
    // Microphone 0 sits on the +axis side so azimuth 0 is endfire
    // toward it.
    const double offset = (double(mics - 1) / 2.0 - double(m)) * spacing_m;
    pos[std::size_t(m)] = {center.x + offset * u.x, center.y + offset * u.y, center.z};
  }
  return pos;
}

Vec3 source_position(const ArrayGeometry& array, const SourceSpec& src) {
  const double az = src.azimuth_deg * std::numbers::pi / 180.0;
  const Vec3 u = array.axis();
  const Vec3 v{-u.y, u.x, 0.0};  // horizontal normal to the array axis
  const double ca = std::cos(az), sa = std::sin(az);
  return {array.center.x + src.distance_m * (ca * u.x + sa * v.x),
          array.center.y + src.distance_m * (ca * u.y + sa * v.y), array.center.z};
}

void validate_scene(const SceneConfig& cfg) {
  if (cfg.array.mics < 2) throw ConfigError("scene: array needs at least 2 microphones");
  if (cfg.array.spacing_m <= 0) throw ConfigError("scene: spacing must be positive");
  if (cfg.rt60_s < 0) throw ConfigError("scene: rt60 must be >= 0");
  if (cfg.duration_s <= 0) throw ConfigError("scene: duration must be positive");
  if (cfg.sources.empty()) throw ConfigError("scene: no sources");
  const double margin = 0.05;
  for (const Vec3& p : cfg.array.positions())
    if (!inside_room(p, cfg.room_dims, margin))
      throw ConfigError("scene: microphone outside the room");
  for (const SourceSpec& s : cfg.sources) {
    if (s.azimuth_deg < 0 || s.azimuth_deg > 180)
      throw ConfigError("scene: azimuth must lie in [0, 180] degrees");
    if (!inside_room(source_position(cfg.array, s), cfg.room_dims, margin))
      throw ConfigError("scene: source at azimuth " + std::to_string(s.azimuth_deg) +
                        " deg, distance " + std::to_string(s.distance_m) +
                        " m falls outside the room");
  }
}

std::vector<double> image_method_rir(const Vec3& room, double rt60_s, const Vec3& src,
                                     const Vec3& mic, int max_order, double fs,
                                     std::size_t min_length) {
  if (!inside_room(src, room, 0.0) || !inside_room(mic, room, 0.0))
    throw ConfigError("image_method_rir: source or microphone outside the room");
  if (rt60_s < 0) throw ConfigError("image_method_rir: rt60 must be >= 0");

  double beta = 0.0;
  if (rt60_s > 0) {
    const double volume = room.x * room.y * room.z;
    const double surface =
        2.0 * (room.x * room.y + room.x * room.z + room.y * room.z);
    const double alpha = 0.161 * volume / (surface * rt60_s);
    if (alpha <= 0.0 || alpha > 1.0)
      throw ConfigError("image_method_rir: rt60 " + std::to_string(rt60_s) +
                        " s implies wall absorption " + std::to_string(alpha) +
                        " outside (0, 1]");
    beta = std::sqrt(1.0 - alpha);
  }

  const double samples_per_m = fs / kSpeedOfSound;
  const double direct_dist = std::sqrt((src.x - mic.x) * (src.x - mic.x) +
                                       (src.y - mic.y) * (src.y - mic.y) +
                                       (src.z - mic.z) * (src.z - mic.z));
  std::size_t length = std::size_t(std::ceil(rt60_s * fs)) +
                       std::size_t(std::ceil(direct_dist * samples_per_m)) +
                       2 * kSincHalf + 2;
  length = std::max(length, min_length);
  std::vector<double> h(length, 0.0);

  const double max_dist = (double(length) + kSincHalf) / samples_per_m;
  const double order_cap = max_order >= 0 ? (double(max_order) + 1.0) / 2.0 : 1e9;
  const int nx = int(std::min(std::ceil(max_dist / (2.0 * room.x)), order_cap));
  const int ny = int(std::min(std::ceil(max_dist / (2.0 * room.y)), order_cap));
  const int nz = int(std::min(std::ceil(max_dist / (2.0 * room.z)), order_cap));

  for (int mx = -nx; mx <= nx; ++mx) {
    for (int my = -ny; my <= ny; ++my) {
      for (int mz = -nz; mz <= nz; ++mz) {
        for (int q = 0; q <= 1; ++q) {
          for (int j = 0; j <= 1; ++j) {
            for (int k = 0; k <= 1; ++k) {
              const int order = std::abs(2 * mx - q) + std::abs(2 * my - j) +
                                std::abs(2 * mz - k);
              if (max_order >= 0 && order > max_order) continue;
              if (beta == 0.0 && order > 0) continue;

              const double ix = (1 - 2 * q) * src.x - mic.x + 2.0 * mx * room.x;
              const double iy = (1 - 2 * j) * src.y - mic.y + 2.0 * my * room.y;
              const double iz = (1 - 2 * k) * src.z - mic.z + 2.0 * mz * room.z;
              const double dist = std::sqrt(ix * ix + iy * iy + iz * iz);
              const double delay = dist * samples_per_m;
              const long center = std::lround(delay);
              if (center - kSincHalf >= long(length)) continue;

              const double gain = std::pow(beta, order) /
                                  (4.0 * std::numbers::pi * std::max(dist, 1e-3));
              for (int i = -kSincHalf; i <= kSincHalf; ++i) {
                const long n = center + i;
                if (n < 0 || n >= long(length)) continue;
                const double t = double(n) - delay;
                const double win =
                    0.5 * (1.0 + std::cos(2.0 * std::numbers::pi * t /
                                          double(2 * kSincHalf + 1)));
                h[std::size_t(n)] += gain * win * sinc(t);
              }
            }
          }
        }
      }
    }
  }

  // 100 Hz high-pass (Allen-Berkley). All image gains are positive, so
  // the dense late field otherwise piles up into a sub-audio drift that
  // corrupts the energy decay.
  {
    const double w = 2.0 * std::numbers::pi * 100.0 / fs;
    const double r1 = std::exp(-w);
    const double b1 = 2.0 * r1 * std::cos(w);
    const double b2 = -r1 * r1;
    const double a1 = -(1.0 + r1);
    double y0 = 0, y1 = 0, y2 = 0;
    for (double& v : h) {
      const double x0 = v;
      y2 = y1;
      y1 = y0;
      y0 = b1 * y1 + b2 * y2 + x0;
      v = y0 + a1 * y1 + r1 * y2;
    }
  }
  return h;
}

SceneRender simulate_scene(const SceneConfig& cfg,
                           std::span<const std::vector<double>> source_signals) {
  validate_scene(cfg);
  if (source_signals.size() != cfg.sources.size())
    throw DimensionError("simulate_scene: " + std::to_string(cfg.sources.size()) +
                         " sources but " + std::to_string(source_signals.size()) +
                         " signals");
  const std::size_t n = std::size_t(std::lround(cfg.duration_s * cfg.fs));
  for (const auto& sig : source_signals)
    if (sig.size() < n)
      throw DimensionError("simulate_scene: source signal shorter than the scene (" +
                           std::to_string(sig.size()) + " < " + std::to_string(n) +
                           " samples)");

  const std::vector<Vec3> mics = cfg.array.positions();
  const std::size_t n_mics = mics.size();
  const std::size_t n_src = cfg.sources.size();

  // Each (source, mic) pair renders independently into its own buffer.
  std::vector<std::vector<double>> rendered(n_src * n_mics);
#pragma omp parallel for collapse(2) schedule(dynamic)
  for (std::size_t s = 0; s < n_src; ++s) {
    for (std::size_t m = 0; m < n_mics; ++m) {
      const Vec3 spos = source_position(cfg.array, cfg.sources[s]);
      const std::vector<double> rir =
          image_method_rir(cfg.room_dims, cfg.rt60_s, spos, mics[m],
                           cfg.max_image_order, cfg.fs);
      std::vector<double> full = fft::convolve(
          std::span<const double>(source_signals[s].data(), n), rir);
      full.resize(n);
      rendered[s * n_mics + m] = std::move(full);
    }
  }

  SceneRender out;
  out.clean.sample_rate = cfg.fs;
  out.clean.channels.assign(n_mics, std::vector<double>(n, 0.0));
  for (std::size_t m = 0; m < n_mics; ++m)
    for (std::size_t s = 0; s < n_src; ++s)
      for (std::size_t i = 0; i < n; ++i)
        out.clean.channels[m][i] += rendered[s * n_mics + m][i];

  double p_clean = 0.0;
  for (const auto& ch : out.clean.channels)
    for (double v : ch) p_clean += v * v;
  p_clean /= double(n_mics * n);
  if (p_clean <= 0.0)
    throw DataError("simulate_scene: sources render silent, cannot set an SNR");

  std::vector<std::vector<double>> noise(n_mics, std::vector<double>(n));
  double p_noise = 0.0;
  for (std::size_t m = 0; m < n_mics; ++m) {
    Rng rng(derive_seed(cfg.seed, 0xA0000 + m));
    for (std::size_t i = 0; i < n; ++i) {
      noise[m][i] = rng.normal();
      p_noise += noise[m][i] * noise[m][i];
    }
  }
  p_noise /= double(n_mics * n);
  const double scale =
      std::sqrt(p_clean / (p_noise * std::pow(10.0, cfg.snr_db / 10.0)));

  out.mix.sample_rate = cfg.fs;
  out.mix.channels.assign(n_mics, std::vector<double>(n));
  for (std::size_t m = 0; m < n_mics; ++m)
    for (std::size_t i = 0; i < n; ++i)
      out.mix.channels[m][i] = out.clean.channels[m][i] + scale * noise[m][i];
  return out;
}

int doa_to_class(double azimuth_deg, const DoaGrid& grid) {
  if (azimuth_deg < 0.0 || azimuth_deg > 180.0)
    throw ConfigError("azimuth " + std::to_string(azimuth_deg) +
                      " deg outside [0, 180]");
  // Nearest class; exact midpoints round toward the lower index.
  const double x = azimuth_deg / grid.resolution_deg;
  int cls = int(std::ceil(x - 0.5));
  cls = std::clamp(cls, 0, grid.n_classes() - 1);
  return cls;
}

double class_to_doa(int cls, const DoaGrid& grid) {
  if (cls < 0 || cls >= grid.n_classes())
    throw ConfigError("DOA class " + std::to_string(cls) + " outside [0, " +
                      std::to_string(grid.n_classes() - 1) + "]");
  return double(cls) * grid.resolution_deg;
}

std::vector<double> synth_speech_like(double duration_s, double fs,
                                      std::uint64_t seed) {
  if (duration_s <= 0) throw ConfigError("synth_speech_like: duration must be positive");
  const std::size_t n = std::size_t(std::lround(duration_s * fs));
  Rng rng(seed);

  // Syllabic envelope: two slow modulators, floor keeps every frame live.
  const double f1 = rng.uniform(2.0, 5.0), f2 = rng.uniform(5.0, 8.0);
  const double ph1 = rng.uniform(0.0, 2.0 * std::numbers::pi);
  const double ph2 = rng.uniform(0.0, 2.0 * std::numbers::pi);

  // Spectral tilt: one-pole low-pass around 450 Hz plus a small flat
  // floor so high bins keep usable phase.
  const double pole = std::exp(-2.0 * std::numbers::pi * 450.0 / fs);
  std::vector<double> x(n);
  double lp = 0.0;
  double peak = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double w = rng.normal();
    lp = pole * lp + (1.0 - pole) * w;
    const double t = double(i) / fs;
    const double env =
        0.2 + 0.8 * (0.5 + 0.5 * std::sin(2.0 * std::numbers::pi * f1 * t + ph1)) *
                  (0.6 + 0.4 * std::sin(2.0 * std::numbers::pi * f2 * t + ph2));
    x[i] = env * (lp + 0.04 * w);
    peak = std::max(peak, std::abs(x[i]));
  }
  if (peak > 0) {
    const double g = 0.5 / peak;
    for (double& v : x) v *= g;
  }
  return x;
}

}  // namespace ddoa::acoustics
