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

#ifndef DDOA_NN_HPP_
#define DDOA_NN_HPP_

#include <cmath>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "ddoa/arch.hpp"
#include "ddoa/errors.hpp"
#include "ddoa/kernels.hpp"
#include "ddoa/rng.hpp"
#include "ddoa/tensor.hpp"

namespace ddoa::nn {

// Posterior clamp applied before logarithms in the BCE loss.
inline constexpr double kBceEpsilon = 1e-7;

template <typename T>
struct ConvLayer {
  int filter_h = 1, filter_w = 2;
  int dilation_h = 1, dilation_w = 1;
  int in_channels = 1, out_channels = 64;
  Tensor<T> weights;     // [fh, fw, Cin, Cout]
  std::vector<T> bias;   // [Cout]
};

template <typename T>
struct DenseLayer {
  int in_dim = 0, out_dim = 0;
  Tensor<T> weights;     // [in_dim, out_dim]
  std::vector<T> bias;   // [out_dim]
};

// Conv stack + rectified hidden dense layers + logistic output, one unit
// per DOA class. Inference on a const Model is safe from any number of
// threads; training mutates optimizer state and is serialized by the
// trainer.
template <typename T>
struct Model {
  arch::ArchSpec spec;
  std::vector<ConvLayer<T>> conv;
  std::vector<DenseLayer<T>> dense;  // hidden layers then the output layer
  T dropout_rate = T(0);             // applied after hidden dense layers in training

  std::size_t parameter_count() const {
    std::size_t n = 0;
    for (const auto& c : conv) n += c.weights.numel() + c.bias.size();
    for (const auto& d : dense) n += d.weights.numel() + d.bias.size();
    return n;
  }

  std::vector<std::span<T>> param_views() {
    std::vector<std::span<T>> v;
    for (auto& c : conv) {
      v.emplace_back(c.weights.storage());
      v.emplace_back(c.bias);
    }
    for (auto& d : dense) {
      v.emplace_back(d.weights.storage());
      v.emplace_back(d.bias);
    }
    return v;
  }

  std::vector<std::span<const T>> param_views() const {
    std::vector<std::span<const T>> v;
    for (const auto& c : conv) {
      v.emplace_back(c.weights.storage());
      v.emplace_back(c.bias);
    }
    for (const auto& d : dense) {
      v.emplace_back(d.weights.storage());
      v.emplace_back(d.bias);
    }
    return v;
  }
};

// Uniform fan-scaled initialization, limit = sqrt(6/(fan_in+fan_out));
// biases start at zero. Deterministic per seed.
template <typename T>
Model<T> build_model(const arch::ArchSpec& spec, std::uint64_t seed) {
  arch::check_well_formed(spec);
  arch::final_width(spec);  // throws if infeasible
  Model<T> m;
  m.spec = spec;
  int cin = 1;
  for (std::size_t l = 0; l < spec.conv.size(); ++l) {
    const arch::ConvSpec& cs = spec.conv[l];
    ConvLayer<T> layer;
    layer.filter_w = cs.filter_w;
    layer.dilation_w = cs.dilation_w;
    layer.in_channels = cin;
    layer.out_channels = cs.out_channels;
    layer.weights = Tensor<T>({1, std::size_t(cs.filter_w), std::size_t(cin),
                               std::size_t(cs.out_channels)});
    layer.bias.assign(std::size_t(cs.out_channels), T(0));
    const double fan_in = double(cs.filter_w) * cin;
    const double fan_out = double(cs.filter_w) * cs.out_channels;
    const double limit = std::sqrt(6.0 / (fan_in + fan_out));
    Rng rng(derive_seed(seed, l));
    for (auto& wv : layer.weights.storage()) wv = T(rng.uniform(-limit, limit));
    m.conv.push_back(std::move(layer));
    cin = cs.out_channels;
  }
  int n_in = spec.flat_dim();
  std::vector<int> outs(spec.dense_hidden.begin(), spec.dense_hidden.end());
  outs.push_back(spec.n_classes);
  for (std::size_t j = 0; j < outs.size(); ++j) {
    DenseLayer<T> layer;
    layer.in_dim = n_in;
    layer.out_dim = outs[j];
    layer.weights = Tensor<T>({std::size_t(n_in), std::size_t(outs[j])});
    layer.bias.assign(std::size_t(outs[j]), T(0));
    const double limit = std::sqrt(6.0 / (double(n_in) + double(outs[j])));
    Rng rng(derive_seed(seed, 1000 + j));
    for (auto& wv : layer.weights.storage()) wv = T(rng.uniform(-limit, limit));
    m.dense.push_back(std::move(layer));
    n_in = outs[j];
  }
  return m;
}

// ---- single-sample layer ops ----

template <typename T>
Tensor<T> conv2d_forward(const Tensor<T>& input, const ConvLayer<T>& layer) {
  if (input.rank() != 3)
    throw DimensionError("conv2d_forward expects a rank-3 [H,W,C] input, got rank " +
                         std::to_string(input.rank()));
  const std::size_t H = input.extent(0), W = input.extent(1), C = input.extent(2);
  if (C != std::size_t(layer.in_channels))
    throw DimensionError("conv2d_forward: channel axis is " + std::to_string(C) +
                         ", layer expects " + std::to_string(layer.in_channels));
  const std::size_t needH = 1 + std::size_t(layer.dilation_h) * (layer.filter_h - 1);
  const std::size_t needW = 1 + std::size_t(layer.dilation_w) * (layer.filter_w - 1);
  if (H < needH)
    throw DimensionError("conv2d_forward: height axis " + std::to_string(H) +
                         " smaller than dilated filter extent " + std::to_string(needH));
  if (W < needW)
    throw DimensionError("conv2d_forward: width axis " + std::to_string(W) +
                         " smaller than dilated filter extent " + std::to_string(needW));
  const std::size_t Ho = H - (needH - 1), Wo = W - (needW - 1);
  Tensor<T> out({Ho, Wo, std::size_t(layer.out_channels)});
  kernels::conv2d_forward(input.data(), 1, H, W, C, layer.weights.data(),
                          std::size_t(layer.filter_h), std::size_t(layer.filter_w),
                          std::size_t(layer.out_channels), layer.bias.data(),
                          std::size_t(layer.dilation_h), std::size_t(layer.dilation_w),
                          out.data());
  return out;
}

template <typename T>
struct ConvGrads {
  Tensor<T> input;
  Tensor<T> weights;
  std::vector<T> bias;
};

template <typename T>
ConvGrads<T> conv2d_backward(const Tensor<T>& input, const ConvLayer<T>& layer,
                             const Tensor<T>& upstream) {
  const std::size_t H = input.extent(0), W = input.extent(1), C = input.extent(2);
  const std::size_t Ho = H - std::size_t(layer.dilation_h) * (layer.filter_h - 1);
  const std::size_t Wo = W - std::size_t(layer.dilation_w) * (layer.filter_w - 1);
  if (upstream.rank() != 3 || upstream.extent(0) != Ho || upstream.extent(1) != Wo ||
      upstream.extent(2) != std::size_t(layer.out_channels))
    throw DimensionError("conv2d_backward: upstream shape " + upstream.shape_str() +
                         " does not match forward output " + std::to_string(Ho) + "x" +
                         std::to_string(Wo) + "x" + std::to_string(layer.out_channels));
  ConvGrads<T> g;
  g.input = Tensor<T>({H, W, C});
  g.weights = Tensor<T>(layer.weights.shape());
  g.bias.assign(layer.bias.size(), T(0));
  kernels::conv2d_backward_input(layer.weights.data(), std::size_t(layer.filter_h),
                                 std::size_t(layer.filter_w), C,
                                 std::size_t(layer.out_channels), upstream.data(), 1, H,
                                 W, std::size_t(layer.dilation_h),
                                 std::size_t(layer.dilation_w), g.input.data());
  kernels::conv2d_backward_weights(input.data(), 1, H, W, C, upstream.data(),
                                   std::size_t(layer.filter_h),
                                   std::size_t(layer.filter_w),
                                   std::size_t(layer.out_channels),
                                   std::size_t(layer.dilation_h),
                                   std::size_t(layer.dilation_w), g.weights.data());
  kernels::conv2d_backward_bias(upstream.data(), 1, Ho, Wo,
                                std::size_t(layer.out_channels), g.bias.data());
  return g;
}

template <typename T>
std::vector<T> dense_forward(const std::vector<T>& input, const DenseLayer<T>& layer) {
  if (input.size() != std::size_t(layer.in_dim))
    throw DimensionError("dense_forward: input length " + std::to_string(input.size()) +
                         ", layer expects " + std::to_string(layer.in_dim));
  std::vector<T> out(std::size_t(layer.out_dim));
  kernels::dense_forward(input.data(), 1, input.size(), layer.weights.data(),
                         out.size(), layer.bias.data(), out.data());
  return out;
}

template <typename T>
struct DenseGrads {
  std::vector<T> input;
  Tensor<T> weights;
  std::vector<T> bias;
};

template <typename T>
DenseGrads<T> dense_backward(const std::vector<T>& input, const DenseLayer<T>& layer,
                             const std::vector<T>& upstream) {
  if (input.size() != std::size_t(layer.in_dim))
    throw DimensionError("dense_backward: input length mismatch");
  if (upstream.size() != std::size_t(layer.out_dim))
    throw DimensionError("dense_backward: upstream length " +
                         std::to_string(upstream.size()) + ", layer emits " +
                         std::to_string(layer.out_dim));
  DenseGrads<T> g;
  g.input.assign(input.size(), T(0));
  g.weights = Tensor<T>(layer.weights.shape());
  g.bias.assign(layer.bias.size(), T(0));
  kernels::dense_backward_input(layer.weights.data(), input.size(), upstream.size(),
                                upstream.data(), 1, g.input.data());
  kernels::dense_backward_weights(input.data(), 1, input.size(), upstream.data(),
                                  upstream.size(), g.weights.data());
  kernels::dense_backward_bias(upstream.data(), 1, upstream.size(), g.bias.data());
  return g;
}

// ---- batched model pass ----

template <typename T>
struct ForwardCache {
  std::size_t batch = 0;
  bool training = false;
  std::vector<Tensor<T>> conv_inputs;     // input to each conv layer
  std::vector<Tensor<T>> conv_outputs;    // post-rectifier maps
  std::vector<std::vector<T>> dense_inputs;  // input to each dense layer
  std::vector<T> posteriors;              // [B * I]
};

// input: [B, K, M, 1]. Returns [B * I] posteriors (also kept in the
// cache when one is supplied). With training=false the pass is a pure
// deterministic function of (model, input).
template <typename T>
std::vector<T> model_forward_batch(const Model<T>& model, const Tensor<T>& input,
                                   bool training = false,
                                   ForwardCache<T>* cache = nullptr,
                                   Rng* rng = nullptr) {
  if (input.rank() != 4)
    throw DimensionError("model_forward expects [B,K,M,C] input, got rank " +
                         std::to_string(input.rank()));
  const std::size_t B = input.extent(0);
  if (input.extent(1) != std::size_t(model.spec.bins) ||
      input.extent(2) != std::size_t(model.spec.mics) || input.extent(3) != 1)
    throw DimensionError("model_forward: input " + input.shape_str() +
                         " does not match architecture input " +
                         std::to_string(model.spec.bins) + "x" +
                         std::to_string(model.spec.mics) + "x1");
  ForwardCache<T> local;
  ForwardCache<T>& c = cache ? *cache : local;
  c.batch = B;
  c.training = training;
  c.conv_inputs.clear();
  c.conv_outputs.clear();
  c.dense_inputs.clear();

  Tensor<T> act = input;
  for (const ConvLayer<T>& layer : model.conv) {
    const std::size_t H = act.extent(1), W = act.extent(2), C = act.extent(3);
    const std::size_t Ho = H - std::size_t(layer.dilation_h) * (layer.filter_h - 1);
    const std::size_t Wo = W - std::size_t(layer.dilation_w) * (layer.filter_w - 1);
    Tensor<T> out({B, Ho, Wo, std::size_t(layer.out_channels)});
    kernels::conv2d_forward(act.data(), B, H, W, C, layer.weights.data(),
                            std::size_t(layer.filter_h), std::size_t(layer.filter_w),
                            std::size_t(layer.out_channels), layer.bias.data(),
                            std::size_t(layer.dilation_h),
                            std::size_t(layer.dilation_w), out.data());
    kernels::relu_inplace(out.data(), out.numel());
    c.conv_inputs.push_back(std::move(act));
    act = std::move(out);
  }
  // Row-major [B,H,W,C] is already [B, H*W*C]; reinterpret as the flat
  // dense input.
  std::vector<T> flat(act.storage());
  c.conv_outputs.push_back(std::move(act));

  const T keep = T(1) - model.dropout_rate;
  for (std::size_t j = 0; j < model.dense.size(); ++j) {
    const DenseLayer<T>& layer = model.dense[j];
    if (flat.size() != B * std::size_t(layer.in_dim))
      throw DimensionError("model_forward: dense layer " + std::to_string(j) +
                           " input mismatch");
    std::vector<T> out(B * std::size_t(layer.out_dim));
    kernels::dense_forward(flat.data(), B, std::size_t(layer.in_dim),
                           layer.weights.data(), std::size_t(layer.out_dim),
                           layer.bias.data(), out.data());
    c.dense_inputs.push_back(std::move(flat));
    if (j + 1 < model.dense.size()) {
      kernels::relu_inplace(out.data(), out.size());
      if (training && model.dropout_rate > T(0)) {
        if (!rng)
          throw DataError("training-mode forward with dropout requires an rng");
        const T inv = T(1) / keep;
        for (auto& v : out) v = rng->bernoulli(double(keep)) ? v * inv : T(0);
      }
    } else {
      kernels::logistic_inplace(out.data(), out.size());
    }
    flat = std::move(out);
  }
  c.posteriors = flat;
  return flat;
}

// Inference entry point for one phase map [K, M, 1] -> I posteriors.
template <typename T>
std::vector<T> model_forward(const Model<T>& model, const Tensor<T>& input,
                             bool training = false, Rng* rng = nullptr) {
  if (input.rank() != 3)
    throw DimensionError("model_forward expects a rank-3 [K,M,1] input");
  Tensor<T> batched({1, input.extent(0), input.extent(1), input.extent(2)},
                    input.storage());
  return model_forward_batch(model, batched, training,
                             static_cast<ForwardCache<T>*>(nullptr), rng);
}

template <typename T>
struct Gradients {
  std::vector<std::vector<T>> blocks;  // same order as Model::param_views

  std::vector<std::span<T>> views() {
    std::vector<std::span<T>> v;
    v.reserve(blocks.size());
    for (auto& b : blocks) v.emplace_back(b);
    return v;
  }
};

template <typename T>
Gradients<T> make_gradients(const Model<T>& model) {
  Gradients<T> g;
  for (const auto& c : model.conv) {
    g.blocks.emplace_back(c.weights.numel(), T(0));
    g.blocks.emplace_back(c.bias.size(), T(0));
  }
  for (const auto& d : model.dense) {
    g.blocks.emplace_back(d.weights.numel(), T(0));
    g.blocks.emplace_back(d.bias.size(), T(0));
  }
  return g;
}

// Mean binary cross-entropy over a posterior/label vector pair, with the
// kBceEpsilon clamp before each logarithm. Returns (loss, d loss / d p);
// the gradient is evaluated at the clamped posterior.
template <typename T>
std::pair<double, std::vector<T>> bce_loss(std::span<const T> posteriors,
                                           std::span<const T> labels) {
  if (posteriors.size() != labels.size())
    throw DimensionError("bce_loss: posterior length " +
                         std::to_string(posteriors.size()) + " vs label length " +
                         std::to_string(labels.size()));
  const std::size_t n = posteriors.size();
  const double eps = kBceEpsilon;
  double loss = 0.0;
  std::vector<T> grad(n);
  for (std::size_t i = 0; i < n; ++i) {
    double p = double(posteriors[i]);
    p = p < eps ? eps : (p > 1.0 - eps ? 1.0 - eps : p);
    const double y = double(labels[i]);
    loss += -(y * std::log(p) + (1.0 - y) * std::log(1.0 - p));
    grad[i] = T((-y / p + (1.0 - y) / (1.0 - p)) / double(n));
  }
  return {loss / double(n), std::move(grad)};
}

// Backward pass for the batched model under mean BCE over batch and
// classes. Gradient blocks are overwritten. The output-layer gradient
// uses the fused logistic+BCE form (p - y)/(B*I); the epsilon clamp only
// guards the reported loss value. Returns the batch loss.
template <typename T>
double model_backward(const Model<T>& model, const ForwardCache<T>& cache,
                      std::span<const T> labels, Gradients<T>& grads) {
  const std::size_t B = cache.batch;
  const std::size_t I = std::size_t(model.spec.n_classes);
  if (labels.size() != B * I)
    throw DimensionError("model_backward: labels length " +
                         std::to_string(labels.size()) + " != batch*classes " +
                         std::to_string(B * I));

  double loss = 0.0;
  std::vector<T> delta(B * I);
  {
    const double eps = kBceEpsilon;
    const T scale = T(1.0 / double(B * I));
    for (std::size_t i = 0; i < B * I; ++i) {
      double p = double(cache.posteriors[i]);
      const double y = double(labels[i]);
      const double pc = p < eps ? eps : (p > 1.0 - eps ? 1.0 - eps : p);
      loss += -(y * std::log(pc) + (1.0 - y) * std::log(1.0 - pc));
      delta[i] = (cache.posteriors[i] - labels[i]) * scale;
    }
    loss /= double(B * I);
  }

  const std::size_t n_conv = model.conv.size();
  const T keep = T(1) - model.dropout_rate;
  const bool dropped = cache.training && model.dropout_rate > T(0);

  // Dense stack, output layer first.
  for (std::size_t j = model.dense.size(); j-- > 0;) {
    const DenseLayer<T>& layer = model.dense[j];
    const std::vector<T>& x = cache.dense_inputs[j];
    T* dw = grads.blocks[2 * (n_conv + j)].data();
    T* db = grads.blocks[2 * (n_conv + j) + 1].data();
    kernels::dense_backward_weights(x.data(), B, std::size_t(layer.in_dim),
                                    delta.data(), std::size_t(layer.out_dim), dw);
    kernels::dense_backward_bias(delta.data(), B, std::size_t(layer.out_dim), db);
    std::vector<T> dx(B * std::size_t(layer.in_dim));
    kernels::dense_backward_input(layer.weights.data(), std::size_t(layer.in_dim),
                                  std::size_t(layer.out_dim), delta.data(), B,
                                  dx.data());
    if (j > 0) {
      // Through the rectifier (and the dropout scale, folded into the
      // same mask: a kept positive activation is positive, a dropped or
      // clipped one is zero).
      const T inv = dropped ? T(1) / keep : T(1);
      const std::vector<T>& act = cache.dense_inputs[j];
#pragma omp parallel for schedule(static)
      for (std::size_t i = 0; i < dx.size(); ++i)
        dx[i] = act[i] > T(0) ? dx[i] * inv : T(0);
    }
    delta = std::move(dx);
  }

  // Conv stack, last layer first; delta currently holds the flat
  // gradient, which is the row-major [B,H,W,C] gradient of the last map.
  for (std::size_t l = n_conv; l-- > 0;) {
    const ConvLayer<T>& layer = model.conv[l];
    const Tensor<T>& post = l + 1 < n_conv ? cache.conv_inputs[l + 1]
                                           : cache.conv_outputs.back();
    kernels::relu_backward_inplace(post.data(), delta.data(), delta.size());
    const Tensor<T>& x = cache.conv_inputs[l];
    const std::size_t H = x.extent(1), W = x.extent(2), C = x.extent(3);
    T* dw = grads.blocks[2 * l].data();
    T* db = grads.blocks[2 * l + 1].data();
    const std::size_t Ho = H - std::size_t(layer.dilation_h) * (layer.filter_h - 1);
    const std::size_t Wo = W - std::size_t(layer.dilation_w) * (layer.filter_w - 1);
    kernels::conv2d_backward_weights(x.data(), B, H, W, C, delta.data(),
                                     std::size_t(layer.filter_h),
                                     std::size_t(layer.filter_w),
                                     std::size_t(layer.out_channels),
                                     std::size_t(layer.dilation_h),
                                     std::size_t(layer.dilation_w), dw);
    kernels::conv2d_backward_bias(delta.data(), B, Ho, Wo,
                                  std::size_t(layer.out_channels), db);
    if (l > 0) {
      std::vector<T> dx(B * H * W * C);
      kernels::conv2d_backward_input(layer.weights.data(), std::size_t(layer.filter_h),
                                     std::size_t(layer.filter_w), C,
                                     std::size_t(layer.out_channels), delta.data(), B,
                                     H, W, std::size_t(layer.dilation_h),
                                     std::size_t(layer.dilation_w), dx.data());
      delta = std::move(dx);
    }
  }
  return loss;
}

// ---- optimizer ----

struct AdamHyper {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

template <typename T>
struct AdamState {
  std::vector<std::vector<T>> m, v;
  long t = 0;
};

template <typename T>
AdamState<T> make_adam_state(const Model<T>& model) {
  AdamState<T> s;
  auto add = [&s](std::size_t n) {
    s.m.emplace_back(n, T(0));
    s.v.emplace_back(n, T(0));
  };
  for (const auto& c : model.conv) {
    add(c.weights.numel());
    add(c.bias.size());
  }
  for (const auto& d : model.dense) {
    add(d.weights.numel());
    add(d.bias.size());
  }
  return s;
}

// One Adam step over matching parameter/gradient blocks.
template <typename T>
void adam_step(std::vector<std::span<T>> params, Gradients<T>& grads,
               AdamState<T>& state, const AdamHyper& hp) {
  if (params.size() != grads.blocks.size() || params.size() != state.m.size())
    throw DimensionError("adam_step: parameter/gradient/state block counts differ");
  ++state.t;
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (params[i].size() != grads.blocks[i].size())
      throw DimensionError("adam_step: block " + std::to_string(i) + " size mismatch");
    kernels::adam_update(params[i].data(), grads.blocks[i].data(), state.m[i].data(),
                         state.v[i].data(), params[i].size(), hp.lr, hp.beta1,
                         hp.beta2, hp.eps, state.t);
  }
}

}  // namespace ddoa::nn

#endif  // DDOA_NN_HPP_
