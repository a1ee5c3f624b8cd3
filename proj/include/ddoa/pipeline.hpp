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

#ifndef DDOA_PIPELINE_HPP_
#define DDOA_PIPELINE_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ddoa/acoustics.hpp"
#include "ddoa/arch.hpp"
#include "ddoa/assignment.hpp"
#include "ddoa/config.hpp"
#include "ddoa/dataset.hpp"
#include "ddoa/errors.hpp"
#include "ddoa/features.hpp"
#include "ddoa/nn.hpp"

namespace ddoa::pipeline {

// Scene-set recipe: which acoustic conditions to draw and how much
// material each scene contributes. Parsed from a key=value config (see
// README for the schema).
struct GenConfig {
  int scenes = 100;
  int sources_per_scene = 1;
  double duration_s = 0.25;
  int frames_per_scene = 8;  // <=0 keeps every frame
  std::vector<acoustics::Vec3> rooms = {
      {5.0, 6.0, 3.0}, {6.0, 4.5, 2.8}, {7.0, 5.0, 3.0}, {4.5, 7.0, 3.0}};
  std::vector<double> rt60_choices = {0.0, 0.16, 0.22, 0.28};
  std::vector<double> snr_choices = {30.0};
  double dist_min = 1.2, dist_max = 2.2;
  std::vector<double> azimuth_choices;  // empty = cycle the full DOA grid
  int max_image_order = 4;
  double fs = 16000.0;
  double min_separation_deg = 10.0;  // pairwise, multi-source scenes
  acoustics::DoaGrid grid;
};

GenConfig gen_config_from_kv(const config::KvMap& kv);
// Canonical text used to digest a generation run (config + seed).
std::string gen_config_canonical(const GenConfig& cfg, std::uint64_t seed);

struct DrawnScene {
  acoustics::SceneConfig cfg;
  std::vector<double> azimuths;  // ground truth, degrees
};

// Deterministic scene draw; nullopt when no in-room placement was found
// (the caller counts and skips it).
std::optional<DrawnScene> draw_scene(const GenConfig& cfg, std::uint64_t master_seed,
                                     int index);

// Synthesizes the scene's source signals from its seed and renders it.
acoustics::SceneRender render_scene(const acoustics::SceneConfig& cfg);

// Simulate + STFT + label every kept frame with the multi-hot of the
// active source classes. Scenes run concurrently; output is a pure
// function of (cfg, master_seed). Infeasible draws are skipped and
// counted (reported on stderr).
dataset::Dataset generate_dataset(const GenConfig& cfg, std::uint64_t master_seed);

// ---- training ----

struct Hyper {
  double lr = 1e-3;
  int batch = 64;
  int epochs = 10;
  double dropout = 0.0;
  std::uint64_t seed = 0;
};

template <typename T>
struct TrainResult {
  nn::Model<T> model;
  double initial_loss = 0.0;
  double final_loss = 0.0;
  double best_val_loss = 0.0;
  std::vector<double> epoch_train_loss;
  std::vector<double> epoch_val_loss;
};

// Scene-hashed 10% validation split; true if the frame belongs to the
// validation fold.
bool in_validation_fold(std::uint32_t scene_id, std::uint64_t seed);

template <typename T>
TrainResult<T> train(const dataset::Dataset& ds, const arch::ArchSpec& spec,
                     const Hyper& hp);

// ---- inference & evaluation ----

struct BlockEstimate {
  std::vector<double> averaged_posteriors;  // [I]
  std::vector<int> top_classes;             // L distinct argmax classes
  int L = 0;
};

template <typename T>
BlockEstimate infer_block(const nn::Model<T>& model,
                          std::span<const features::PhaseMap> frames, int L);

// One evaluation unit: a block of phase-map frames plus its true DOAs.
struct BlockSample {
  std::vector<features::PhaseMap> frames;
  std::vector<double> truth_deg;
};

struct EvalOptions {
  double correct_threshold_deg = 5.0;
  bool block_level = false;  // count a block correct only if all L match
  int block_frames = 50;     // frames per evaluation block
};

struct SceneEval {
  std::vector<double> truth, estimates;
  std::vector<double> errors;  // per matched pair, degrees
  double mae = 0.0;
  int correct = 0;
};

struct EvalResult {
  double mae_degrees = 0.0;
  double accuracy = 0.0;
  std::size_t total_estimates = 0;
  std::vector<SceneEval> scenes;
};

// Minimum-total-absolute-error one-to-one matching of estimates against
// ground truth (exact assignment).
SceneEval match_estimates(const std::vector<double>& truth,
                          const std::vector<double>& estimates,
                          double correct_threshold_deg);

EvalResult aggregate_evals(std::vector<SceneEval> scenes, bool block_level,
                           std::size_t L);

template <typename T>
EvalResult evaluate(const nn::Model<T>& model, std::span<const BlockSample> blocks,
                    int L, const EvalOptions& opts = {});

// Builds evaluation blocks by rendering drawn scenes; duration must
// cover opts.block_frames STFT frames.
std::vector<BlockSample> make_eval_blocks(const GenConfig& cfg,
                                          std::uint64_t master_seed, int block_frames);

// ---- scene-set artifacts (simulate / featurize / eval chain) ----

struct SceneSetInfo {
  std::uint64_t seed = 0;
  std::uint64_t config_digest = 0;
  int frames_per_scene = 0;
  double fs = 16000.0;
  struct Entry {
    std::string wav;
    std::vector<double> azimuths;
  };
  std::vector<Entry> entries;
};

// Renders every scene to <dir>/scene_NNNNN.wav plus <dir>/scenes.json.
SceneSetInfo write_scene_set(const GenConfig& cfg, std::uint64_t master_seed,
                             const std::filesystem::path& dir);
SceneSetInfo read_scene_set_info(const std::filesystem::path& dir);

// Phase-map extraction over a stored scene set (the featurize stage).
dataset::Dataset featurize_scene_set(const std::filesystem::path& dir);

// Evaluation blocks from a stored scene set.
std::vector<BlockSample> load_eval_blocks(const std::filesystem::path& dir,
                                          int block_frames);

std::string format_eval_report(const EvalResult& res, const std::string& digest_hex,
                               std::uint64_t seed, const EvalOptions& opts);

// ---- template implementations ----

template <typename T>
TrainResult<T> train(const dataset::Dataset& ds, const arch::ArchSpec& spec,
                     const Hyper& hp) {
  ds.validate();
  if (ds.bins != std::uint32_t(spec.bins) || ds.mics != std::uint32_t(spec.mics) ||
      ds.n_classes != std::uint32_t(spec.n_classes))
    throw DimensionError("train: dataset is " + std::to_string(ds.bins) + "x" +
                         std::to_string(ds.mics) + "/" + std::to_string(ds.n_classes) +
                         " classes but arch '" + spec.name + "' wants " +
                         std::to_string(spec.bins) + "x" + std::to_string(spec.mics) +
                         "/" + std::to_string(spec.n_classes));
  if (hp.batch < 1) throw ConfigError("train: batch size must be positive");
  if (hp.epochs < 0) throw ConfigError("train: epochs must be >= 0");

  const std::size_t n_frames = ds.frames();
  const std::size_t fsz = std::size_t(ds.bins) * ds.mics;
  const std::size_t I = ds.n_classes;

  std::vector<std::size_t> train_idx, val_idx;
  for (std::size_t f = 0; f < n_frames; ++f) {
    if (in_validation_fold(ds.scene_ids[f], hp.seed))
      val_idx.push_back(f);
    else
      train_idx.push_back(f);
  }
  if (train_idx.empty()) throw DataError("train: no training frames after the split");

  TrainResult<T> res;
  res.model = nn::build_model<T>(spec, hp.seed);
  res.model.dropout_rate = T(hp.dropout);

  auto gather = [&](std::span<const std::size_t> idx, Tensor<T>& x, std::vector<T>& y) {
    const std::size_t B = idx.size();
    x = Tensor<T>({B, std::size_t(ds.bins), std::size_t(ds.mics), 1});
    y.assign(B * I, T(0));
    for (std::size_t b = 0; b < B; ++b) {
      const float* src = ds.frame_data(idx[b]);
      T* dst = x.data() + b * fsz;
      for (std::size_t i = 0; i < fsz; ++i) dst[i] = T(src[i]);
      const std::uint8_t* lab = ds.frame_labels(idx[b]);
      for (std::size_t i = 0; i < I; ++i) y[b * I + i] = T(lab[i]);
    }
  };

  // Mean BCE over a frame subset, evaluated in inference mode in
  // manageable chunks.
  auto mean_loss = [&](std::span<const std::size_t> idx) {
    if (idx.empty()) return std::numeric_limits<double>::quiet_NaN();
    double total = 0.0;
    const std::size_t chunk = 256;
    for (std::size_t at = 0; at < idx.size(); at += chunk) {
      const std::size_t B = std::min(chunk, idx.size() - at);
      Tensor<T> x;
      std::vector<T> y;
      gather(idx.subspan(at, B), x, y);
      const std::vector<T> p = nn::model_forward_batch(res.model, x, false);
      const double eps = nn::kBceEpsilon;
      double loss = 0.0;
      for (std::size_t i = 0; i < p.size(); ++i) {
        double pv = double(p[i]);
        pv = pv < eps ? eps : (pv > 1.0 - eps ? 1.0 - eps : pv);
        const double yv = double(y[i]);
        loss += -(yv * std::log(pv) + (1.0 - yv) * std::log(1.0 - pv));
      }
      total += loss / double(I);
    }
    return total / double(idx.size());
  };

  // Loss metrics use a capped, seed-stable subsample of the training
  // fold so they stay cheap on large sets.
  std::vector<std::size_t> metric_idx = train_idx;
  {
    Rng rng(derive_seed(hp.seed, 7));
    std::shuffle(metric_idx.begin(), metric_idx.end(), rng.engine());
    if (metric_idx.size() > 2048) metric_idx.resize(2048);
  }

  res.initial_loss = mean_loss(metric_idx);
  res.best_val_loss = std::numeric_limits<double>::infinity();

  nn::Gradients<T> grads = nn::make_gradients(res.model);
  nn::AdamState<T> adam = nn::make_adam_state(res.model);
  nn::AdamHyper ah;
  ah.lr = hp.lr;
  auto params = res.model.param_views();

  std::vector<std::size_t> order = train_idx;
  for (int epoch = 0; epoch < hp.epochs; ++epoch) {
    Rng shuffle_rng(derive_seed(hp.seed, 100 + std::uint64_t(epoch)));
    std::shuffle(order.begin(), order.end(), shuffle_rng.engine());
    Rng dropout_rng(derive_seed(hp.seed, 500 + std::uint64_t(epoch)));

    double epoch_loss = 0.0;
    std::size_t batches = 0;
    for (std::size_t at = 0; at < order.size(); at += std::size_t(hp.batch)) {
      const std::size_t B = std::min(std::size_t(hp.batch), order.size() - at);
      Tensor<T> x;
      std::vector<T> y;
      gather(std::span<const std::size_t>(order).subspan(at, B), x, y);
      nn::ForwardCache<T> cache;
      nn::model_forward_batch(res.model, x, true, &cache, &dropout_rng);
      const double loss = nn::model_backward(res.model, cache,
                                             std::span<const T>(y), grads);
      if (!std::isfinite(loss))
        throw DataError("train: non-finite loss at epoch " + std::to_string(epoch) +
                        ", batch " + std::to_string(batches) +
                        " (lr too high or corrupt data)");
      nn::adam_step(params, grads, adam, ah);
      epoch_loss += loss;
      ++batches;
    }
    res.epoch_train_loss.push_back(epoch_loss / double(std::max<std::size_t>(1, batches)));
    const double vl = mean_loss(val_idx);
    res.epoch_val_loss.push_back(vl);
    if (!std::isnan(vl)) res.best_val_loss = std::min(res.best_val_loss, vl);
  }

  res.final_loss = mean_loss(metric_idx);
  if (!std::isfinite(res.best_val_loss)) res.best_val_loss = res.final_loss;
  return res;
}

template <typename T>
BlockEstimate infer_block(const nn::Model<T>& model,
                          std::span<const features::PhaseMap> frames, int L) {
  if (frames.empty()) throw DimensionError("infer_block: no frames");
  if (L < 1) throw DimensionError("infer_block: L must be >= 1");
  const std::size_t I = std::size_t(model.spec.n_classes);
  if (std::size_t(L) > I)
    throw DimensionError("infer_block: L = " + std::to_string(L) + " exceeds " +
                         std::to_string(I) + " classes");
  const std::size_t K = std::size_t(model.spec.bins);
  const std::size_t M = std::size_t(model.spec.mics);
  const std::size_t N = frames.size();
  Tensor<T> x({N, K, M, 1});
  for (std::size_t f = 0; f < N; ++f) {
    if (frames[f].bins != K || frames[f].mics != M)
      throw DimensionError("infer_block: frame " + std::to_string(f) + " is " +
                           std::to_string(frames[f].bins) + "x" +
                           std::to_string(frames[f].mics) + ", model expects " +
                           std::to_string(K) + "x" + std::to_string(M));
    T* dst = x.data() + f * K * M;
    for (std::size_t i = 0; i < K * M; ++i) dst[i] = T(frames[f].values[i]);
  }
  const std::vector<T> post = nn::model_forward_batch(model, x, false);

  BlockEstimate est;
  est.L = L;
  est.averaged_posteriors.assign(I, 0.0);
  for (std::size_t f = 0; f < N; ++f)
    for (std::size_t i = 0; i < I; ++i)
      est.averaged_posteriors[i] += double(post[f * I + i]);
  for (double& v : est.averaged_posteriors) v /= double(N);

  std::vector<int> idx(I);
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](int a, int b) {
    const double pa = est.averaged_posteriors[std::size_t(a)];
    const double pb = est.averaged_posteriors[std::size_t(b)];
    return pa != pb ? pa > pb : a < b;  // ties toward the lower index
  });
  est.top_classes.assign(idx.begin(), idx.begin() + L);
  return est;
}

template <typename T>
EvalResult evaluate(const nn::Model<T>& model, std::span<const BlockSample> blocks,
                    int L, const EvalOptions& opts) {
  if (blocks.empty()) throw DataError("evaluate: no test blocks");
  for (std::size_t s = 0; s < blocks.size(); ++s)
    if (blocks[s].truth_deg.size() != std::size_t(L))
      throw DataError("evaluate: block " + std::to_string(s) + " has " +
                      std::to_string(blocks[s].truth_deg.size()) +
                      " true DOAs, expected L = " + std::to_string(L));
  const acoustics::DoaGrid grid{180.0 / double(model.spec.n_classes - 1)};
  std::vector<SceneEval> evals(blocks.size());
  // The forward pass is already parallel inside; blocks run serially.
  for (std::size_t s = 0; s < blocks.size(); ++s) {
    const BlockEstimate be = infer_block(model, blocks[s].frames, L);
    std::vector<double> est_deg;
    est_deg.reserve(be.top_classes.size());
    for (int c : be.top_classes) est_deg.push_back(acoustics::class_to_doa(c, grid));
    evals[s] = match_estimates(blocks[s].truth_deg, est_deg,
                               opts.correct_threshold_deg);
  }
  return aggregate_evals(std::move(evals), opts.block_level, std::size_t(L));
}

}  // namespace ddoa::pipeline

#endif  // DDOA_PIPELINE_HPP_
