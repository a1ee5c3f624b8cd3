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

#include "ddoa/pipeline.hpp"

#include <atomic>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include <json.hpp>

#include "ddoa/rng.hpp"
#include "ddoa/wav.hpp"

namespace ddoa::pipeline {

namespace {

std::string fmt_vec3(const acoustics::Vec3& v) {
  std::ostringstream os;
  os << v.x << "x" << v.y << "x" << v.z;
  return os.str();
}

acoustics::Vec3 parse_room(const std::string& s) {
  const std::vector<std::string> parts = config::split(s, 'x');
  if (parts.size() != 3)
    throw ConfigError("room '" + s + "' must be WxDxH, e.g. 5x6x3");
  return {config::to_double(parts[0], "room width"),
          config::to_double(parts[1], "room depth"),
          config::to_double(parts[2], "room height")};
}

// Evenly spaced subset of [0, total); keeps everything when n <= 0 or
// n >= total.
std::vector<std::size_t> pick_frames(std::size_t total, int n) {
  std::vector<std::size_t> idx;
  if (n <= 0 || std::size_t(n) >= total) {
    idx.resize(total);
    std::iota(idx.begin(), idx.end(), 0);
    return idx;
  }
  idx.reserve(std::size_t(n));
  for (int j = 0; j < n; ++j) idx.push_back(std::size_t(j) * total / std::size_t(n));
  return idx;
}

std::uint64_t scene_seed(std::uint64_t master_seed, int index) {
  return derive_seed(master_seed, 0x5CE4E000ULL + std::uint64_t(index));
}

}  // namespace

GenConfig gen_config_from_kv(const config::KvMap& kv) {
  GenConfig g;
  g.scenes = config::get_int(kv, "scenes", g.scenes);
  g.sources_per_scene = config::get_int(kv, "sources_per_scene", g.sources_per_scene);
  g.duration_s = config::get_double(kv, "duration_s", g.duration_s);
  g.frames_per_scene = config::get_int(kv, "frames_per_scene", g.frames_per_scene);
  if (kv.count("rooms")) {
    g.rooms.clear();
    for (const std::string& r : config::split(kv.at("rooms"), ','))
      g.rooms.push_back(parse_room(r));
  }
  g.rt60_choices = config::get_double_list(kv, "rt60", g.rt60_choices);
  g.snr_choices = config::get_double_list(kv, "snr_db", g.snr_choices);
  if (kv.count("distance")) {
    const auto parts = config::split(kv.at("distance"), ':');
    if (parts.size() != 2)
      throw ConfigError("distance must be 'min:max', got '" + kv.at("distance") + "'");
    g.dist_min = config::to_double(parts[0], "distance min");
    g.dist_max = config::to_double(parts[1], "distance max");
  }
  if (kv.count("azimuths") && kv.at("azimuths") != "grid")
    g.azimuth_choices = config::get_double_list(kv, "azimuths", {});
  g.max_image_order = config::get_int(kv, "max_image_order", g.max_image_order);
  g.fs = config::get_double(kv, "fs", g.fs);
  g.min_separation_deg =
      config::get_double(kv, "min_separation_deg", g.min_separation_deg);
  g.grid.resolution_deg =
      config::get_double(kv, "grid_resolution_deg", g.grid.resolution_deg);
  if (std::fmod(180.0, g.grid.resolution_deg) != 0.0)
    throw ConfigError("grid resolution must divide 180 degrees");
  if (g.scenes < 1 || g.sources_per_scene < 1)
    throw ConfigError("scenes and sources_per_scene must be positive");
  if (g.dist_min <= 0 || g.dist_max < g.dist_min)
    throw ConfigError("distance range must satisfy 0 < min <= max");
  return g;
}

std::string gen_config_canonical(const GenConfig& cfg, std::uint64_t seed) {
  std::ostringstream os;
  os << "seed=" << seed << ";scenes=" << cfg.scenes
     << ";sources=" << cfg.sources_per_scene << ";duration=" << cfg.duration_s
     << ";frames=" << cfg.frames_per_scene << ";rooms=";
  for (const auto& r : cfg.rooms) os << fmt_vec3(r) << ",";
  os << ";rt60=";
  for (double v : cfg.rt60_choices) os << v << ",";
  os << ";snr=";
  for (double v : cfg.snr_choices) os << v << ",";
  os << ";dist=" << cfg.dist_min << ":" << cfg.dist_max << ";az=";
  for (double v : cfg.azimuth_choices) os << v << ",";
  os << ";order=" << cfg.max_image_order << ";fs=" << cfg.fs
     << ";sep=" << cfg.min_separation_deg << ";res=" << cfg.grid.resolution_deg;
  return os.str();
}

std::optional<DrawnScene> draw_scene(const GenConfig& cfg, std::uint64_t master_seed,
                                     int index) {
  Rng rng(scene_seed(master_seed, index));

  // Primary azimuth cycles the choice list (or the full grid) so every
  // class is covered evenly; secondary sources are drawn.
  std::vector<double> azimuths;
  if (!cfg.azimuth_choices.empty()) {
    azimuths.push_back(
        cfg.azimuth_choices[std::size_t(index) % cfg.azimuth_choices.size()]);
  } else {
    const int n_cls = cfg.grid.n_classes();
    azimuths.push_back(acoustics::class_to_doa(index % n_cls, cfg.grid));
  }
  for (int s = 1; s < cfg.sources_per_scene; ++s) {
    bool placed = false;
    for (int attempt = 0; attempt < 256 && !placed; ++attempt) {
      double az;
      if (!cfg.azimuth_choices.empty())
        az = cfg.azimuth_choices[rng.index(cfg.azimuth_choices.size())];
      else
        az = acoustics::class_to_doa(int(rng.index(std::uint64_t(cfg.grid.n_classes()))),
                                     cfg.grid);
      placed = true;
      for (double prev : azimuths)
        if (std::abs(prev - az) < cfg.min_separation_deg) placed = false;
      if (placed) azimuths.push_back(az);
    }
    if (!placed) return std::nullopt;
  }

  const acoustics::Vec3 room = cfg.rooms[rng.index(cfg.rooms.size())];
  const double rt60 = cfg.rt60_choices[rng.index(cfg.rt60_choices.size())];
  const double snr = cfg.snr_choices[rng.index(cfg.snr_choices.size())];

  for (int attempt = 0; attempt < 64; ++attempt) {
    acoustics::SceneConfig sc;
    sc.room_dims = room;
    sc.rt60_s = rt60;
    sc.snr_db = snr;
    sc.fs = cfg.fs;
    sc.duration_s = cfg.duration_s;
    sc.max_image_order = rt60 == 0.0 ? 0 : cfg.max_image_order;
    sc.seed = scene_seed(master_seed, index);
    sc.array.mics = 8;
    sc.array.spacing_m = 0.02;
    sc.array.center = {room.x / 2 + rng.uniform(-0.5, 0.5),
                       room.y / 2 + rng.uniform(-0.5, 0.5), rng.uniform(1.0, 1.6)};
    sc.array.yaw_rad = rng.uniform(0.0, 2.0 * 3.14159265358979323846);
    const double dist = rng.uniform(cfg.dist_min, cfg.dist_max);
    for (double az : azimuths) sc.sources.push_back({az, dist});
    try {
      acoustics::validate_scene(sc);
      return DrawnScene{std::move(sc), azimuths};
    } catch (const ConfigError&) {
      // placement fell outside the room; redraw pose
    }
  }
  return std::nullopt;
}

acoustics::SceneRender render_scene(const acoustics::SceneConfig& cfg) {
  std::vector<std::vector<double>> signals;
  signals.reserve(cfg.sources.size());
  for (std::size_t s = 0; s < cfg.sources.size(); ++s)
    signals.push_back(acoustics::synth_speech_like(
        cfg.duration_s, cfg.fs, derive_seed(cfg.seed, 0xB000 + s)));
  return acoustics::simulate_scene(cfg, signals);
}

dataset::Dataset generate_dataset(const GenConfig& cfg, std::uint64_t master_seed) {
  const features::StftConfig stft_cfg;
  const std::size_t K = std::size_t(stft_cfg.n_fft) / 2 + 1;
  const std::size_t M = 8;
  const int I = cfg.grid.n_classes();

  struct SceneOut {
    std::vector<float> feats;
    std::vector<std::uint8_t> labels;
    std::size_t frames = 0;
    bool skipped = false;
  };
  std::vector<SceneOut> outs(std::size_t(cfg.scenes));
  std::atomic<int> skipped{0};

#pragma omp parallel for schedule(dynamic)
  for (int i = 0; i < cfg.scenes; ++i) {
    SceneOut& so = outs[std::size_t(i)];
    const auto drawn = draw_scene(cfg, master_seed, i);
    if (!drawn) {
      so.skipped = true;
      ++skipped;
      continue;
    }
    const acoustics::SceneRender render = render_scene(drawn->cfg);
    const std::vector<features::PhaseMap> maps =
        features::signal_phase_maps(render.mix, stft_cfg);
    const std::vector<std::size_t> keep =
        pick_frames(maps.size(), cfg.frames_per_scene);

    std::vector<std::uint8_t> label(std::size_t(I), 0);
    for (double az : drawn->azimuths)
      label[std::size_t(acoustics::doa_to_class(az, cfg.grid))] = 1;

    so.frames = keep.size();
    so.feats.resize(keep.size() * K * M);
    so.labels.resize(keep.size() * std::size_t(I));
    for (std::size_t j = 0; j < keep.size(); ++j) {
      const features::PhaseMap& pm = maps[keep[j]];
      for (std::size_t v = 0; v < K * M; ++v)
        so.feats[j * K * M + v] = float(pm.values[v]);
      std::copy(label.begin(), label.end(), so.labels.begin() + long(j * std::size_t(I)));
    }
  }

  if (skipped > 0)
    std::cerr << "generate_dataset: skipped " << skipped
              << " infeasible scene draw(s)\n";

  dataset::Dataset ds;
  ds.bins = std::uint32_t(K);
  ds.mics = std::uint32_t(M);
  ds.n_classes = std::uint32_t(I);
  ds.config_digest = config::fnv1a64(gen_config_canonical(cfg, master_seed));
  for (int i = 0; i < cfg.scenes; ++i) {
    const SceneOut& so = outs[std::size_t(i)];
    if (so.skipped) continue;
    ds.features.insert(ds.features.end(), so.feats.begin(), so.feats.end());
    ds.labels.insert(ds.labels.end(), so.labels.begin(), so.labels.end());
    for (std::size_t j = 0; j < so.frames; ++j)
      ds.scene_ids.push_back(std::uint32_t(i));
  }
  ds.validate();
  return ds;
}

bool in_validation_fold(std::uint32_t scene_id, std::uint64_t seed) {
  return splitmix64(std::uint64_t(scene_id) ^ splitmix64(seed ^ 0x7A11DA7EULL)) % 10 == 0;
}

SceneEval match_estimates(const std::vector<double>& truth,
                          const std::vector<double>& estimates,
                          double correct_threshold_deg) {
  if (truth.size() != estimates.size())
    throw DimensionError("match_estimates: " + std::to_string(truth.size()) +
                         " truths vs " + std::to_string(estimates.size()) +
                         " estimates");
  const std::size_t n = truth.size();
  std::vector<double> cost(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      cost[i * n + j] = std::abs(truth[i] - estimates[j]);
  const std::vector<int> match = assignment::solve(cost, n);

  SceneEval ev;
  ev.truth = truth;
  ev.estimates = estimates;
  for (std::size_t i = 0; i < n; ++i) {
    const double err = cost[i * n + std::size_t(match[i])];
    ev.errors.push_back(err);
    if (err <= correct_threshold_deg) ++ev.correct;
    ev.mae += err;
  }
  ev.mae /= double(n);
  return ev;
}

EvalResult aggregate_evals(std::vector<SceneEval> scenes, bool block_level,
                           std::size_t L) {
  EvalResult res;
  double err_sum = 0.0;
  std::size_t correct = 0, block_correct = 0;
  for (const SceneEval& ev : scenes) {
    for (double e : ev.errors) err_sum += e;
    correct += std::size_t(ev.correct);
    if (std::size_t(ev.correct) == L) ++block_correct;
  }
  res.total_estimates = scenes.size() * L;
  res.mae_degrees = res.total_estimates ? err_sum / double(res.total_estimates) : 0.0;
  res.accuracy = block_level
                     ? double(block_correct) / double(scenes.size())
                     : double(correct) / double(res.total_estimates);
  res.scenes = std::move(scenes);
  return res;
}

std::vector<BlockSample> make_eval_blocks(const GenConfig& cfg,
                                          std::uint64_t master_seed,
                                          int block_frames) {
  const features::StftConfig stft_cfg;
  const std::size_t need =
      features::samples_for_frames(std::size_t(block_frames), stft_cfg);
  GenConfig local = cfg;
  local.duration_s = std::max(cfg.duration_s, double(need) / cfg.fs);

  std::vector<std::optional<BlockSample>> slots(std::size_t(local.scenes));
#pragma omp parallel for schedule(dynamic)
  for (int i = 0; i < local.scenes; ++i) {
    const auto drawn = draw_scene(local, master_seed, i);
    if (!drawn) continue;
    const acoustics::SceneRender render = render_scene(drawn->cfg);
    std::vector<features::PhaseMap> maps =
        features::signal_phase_maps(render.mix, stft_cfg);
    maps.resize(std::size_t(block_frames));
    slots[std::size_t(i)] = BlockSample{std::move(maps), drawn->azimuths};
  }
  std::vector<BlockSample> blocks;
  for (auto& s : slots)
    if (s) blocks.push_back(std::move(*s));
  return blocks;
}

SceneSetInfo write_scene_set(const GenConfig& cfg, std::uint64_t master_seed,
                             const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  SceneSetInfo info;
  info.seed = master_seed;
  info.config_digest = config::fnv1a64(gen_config_canonical(cfg, master_seed));
  info.frames_per_scene = cfg.frames_per_scene;
  info.fs = cfg.fs;

  std::vector<std::optional<SceneSetInfo::Entry>> slots(std::size_t(cfg.scenes));
  std::vector<features::MultichannelSignal> audio(std::size_t(cfg.scenes));
#pragma omp parallel for schedule(dynamic)
  for (int i = 0; i < cfg.scenes; ++i) {
    const auto drawn = draw_scene(cfg, master_seed, i);
    if (!drawn) continue;
    const acoustics::SceneRender render = render_scene(drawn->cfg);
    char name[32];
    std::snprintf(name, sizeof(name), "scene_%05d.wav", i);
    slots[std::size_t(i)] = SceneSetInfo::Entry{name, drawn->azimuths};
    audio[std::size_t(i)] = render.mix;
  }
  for (int i = 0; i < cfg.scenes; ++i) {
    if (!slots[std::size_t(i)]) continue;
    wav::write_pcm16(dir / slots[std::size_t(i)]->wav, audio[std::size_t(i)]);
    info.entries.push_back(*slots[std::size_t(i)]);
  }

  nlohmann::ordered_json j;
  j["tool"] = "ddoa";
  j["seed"] = info.seed;
  j["config_digest"] = config::hex64(info.config_digest);
  j["frames_per_scene"] = info.frames_per_scene;
  j["fs"] = info.fs;
  j["grid_resolution_deg"] = cfg.grid.resolution_deg;
  nlohmann::ordered_json scenes = nlohmann::ordered_json::array();
  for (const auto& e : info.entries)
    scenes.push_back({{"wav", e.wav}, {"azimuths", e.azimuths}});
  j["scenes"] = scenes;
  std::ofstream out(dir / "scenes.json");
  if (!out) throw DataError("cannot write " + (dir / "scenes.json").string());
  out << j.dump(2) << "\n";
  return info;
}

SceneSetInfo read_scene_set_info(const std::filesystem::path& dir) {
  std::ifstream in(dir / "scenes.json");
  if (!in) throw DataError("cannot open scene set: " + (dir / "scenes.json").string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw DataError("unreadable scenes.json: " + std::string(e.what()));
  }
  SceneSetInfo info;
  info.seed = j.value("seed", 0ULL);
  info.config_digest = std::stoull(j.value("config_digest", "0"), nullptr, 16);
  info.frames_per_scene = j.value("frames_per_scene", 0);
  info.fs = j.value("fs", 16000.0);
  for (const auto& e : j.at("scenes")) {
    SceneSetInfo::Entry entry;
    entry.wav = e.at("wav").get<std::string>();
    entry.azimuths = e.at("azimuths").get<std::vector<double>>();
    info.entries.push_back(std::move(entry));
  }
  return info;
}

dataset::Dataset featurize_scene_set(const std::filesystem::path& dir) {
  const SceneSetInfo info = read_scene_set_info(dir);
  if (info.entries.empty()) throw DataError("scene set is empty: " + dir.string());
  const features::StftConfig stft_cfg;
  const std::size_t K = std::size_t(stft_cfg.n_fft) / 2 + 1;
  const acoustics::DoaGrid grid;  // 5 degree classes
  const int I = grid.n_classes();

  dataset::Dataset ds;
  ds.n_classes = std::uint32_t(I);
  ds.config_digest = info.config_digest;
  for (std::size_t i = 0; i < info.entries.size(); ++i) {
    const auto& entry = info.entries[i];
    const features::MultichannelSignal sig = wav::read_pcm16(dir / entry.wav);
    const std::vector<features::PhaseMap> maps =
        features::signal_phase_maps(sig, stft_cfg);
    const std::vector<std::size_t> keep =
        pick_frames(maps.size(), info.frames_per_scene);
    if (ds.mics == 0) {
      ds.mics = std::uint32_t(sig.channels.size());
      ds.bins = std::uint32_t(K);
    }
    std::vector<std::uint8_t> label(std::size_t(I), 0);
    for (double az : entry.azimuths)
      label[std::size_t(acoustics::doa_to_class(az, grid))] = 1;
    for (std::size_t j : keep) {
      const features::PhaseMap& pm = maps[j];
      for (double v : pm.values) ds.features.push_back(float(v));
      ds.labels.insert(ds.labels.end(), label.begin(), label.end());
      ds.scene_ids.push_back(std::uint32_t(i));
    }
  }
  ds.validate();
  return ds;
}

std::vector<BlockSample> load_eval_blocks(const std::filesystem::path& dir,
                                          int block_frames) {
  const SceneSetInfo info = read_scene_set_info(dir);
  const features::StftConfig stft_cfg;
  std::vector<BlockSample> blocks;
  for (const auto& entry : info.entries) {
    const features::MultichannelSignal sig = wav::read_pcm16(dir / entry.wav);
    std::vector<features::PhaseMap> maps = features::signal_phase_maps(sig, stft_cfg);
    if (maps.size() < std::size_t(block_frames))
      throw DataError("scene " + entry.wav + " has only " +
                      std::to_string(maps.size()) + " frames, need " +
                      std::to_string(block_frames) + " per evaluation block");
    maps.resize(std::size_t(block_frames));
    blocks.push_back(BlockSample{std::move(maps), entry.azimuths});
  }
  return blocks;
}

std::string format_eval_report(const EvalResult& res, const std::string& digest_hex,
                               std::uint64_t seed, const EvalOptions& opts) {
  std::ostringstream os;
  auto list = [](const std::vector<double>& v) {
    std::ostringstream s;
    for (std::size_t i = 0; i < v.size(); ++i) s << (i ? " " : "") << v[i];
    return s.str();
  };
  os << "scene" << std::string(5, ' ') << "truth            estimates        mae_deg\n";
  os << std::string(56, '-') << "\n";
  for (std::size_t s = 0; s < res.scenes.size(); ++s) {
    const SceneEval& ev = res.scenes[s];
    std::ostringstream t, e;
    t << list(ev.truth);
    e << list(ev.estimates);
    os << std::left << std::setw(10) << s << std::setw(17) << t.str() << std::setw(17)
       << e.str() << ev.mae << "\n";
  }
  os << std::string(56, '-') << "\n\n";
  os << "# evaluation report\n";
  os << "config_digest = " << digest_hex << "\n";
  os << "seed = " << seed << "\n";
  os << "threshold_deg = " << opts.correct_threshold_deg << "\n";
  os << "accuracy_mode = " << (opts.block_level ? "block" : "estimate") << "\n";
  for (std::size_t s = 0; s < res.scenes.size(); ++s) {
    const SceneEval& ev = res.scenes[s];
    os << "scene." << s << ".truth = " << list(ev.truth) << "\n";
    os << "scene." << s << ".estimates = " << list(ev.estimates) << "\n";
    os << "scene." << s << ".mae_deg = " << ev.mae << "\n";
  }
  os << "mae_deg = " << res.mae_degrees << "\n";
  os << "accuracy = " << res.accuracy << "\n";
  return os.str();
}

}  // namespace ddoa::pipeline
