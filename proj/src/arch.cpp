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

#include "ddoa/arch.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "ddoa/config.hpp"
#include "ddoa/errors.hpp"

namespace ddoa::arch {

int ArchSpec::flat_dim() const {
  return bins * final_width(*this) * conv.back().out_channels;
}

void check_well_formed(const ArchSpec& spec) {
  if (spec.conv.empty())
    throw InfeasibleArchitectureError("arch '" + spec.name + "': conv list is empty");
  if (spec.mics < 2 || spec.bins < 1 || spec.n_classes < 1)
    throw InfeasibleArchitectureError("arch '" + spec.name +
                                      "': mics/bins/classes must be positive (mics >= 2)");
  for (std::size_t i = 0; i < spec.conv.size(); ++i) {
    const ConvSpec& c = spec.conv[i];
    if (c.filter_w < 1 || c.dilation_w < 1 || c.out_channels < 1)
      throw InfeasibleArchitectureError("arch '" + spec.name + "': conv layer " +
                                        std::to_string(i) + " has non-positive extent");
  }
  for (int h : spec.dense_hidden)
    if (h < 1)
      throw InfeasibleArchitectureError("arch '" + spec.name +
                                        "': dense hidden width must be positive");
}

int output_width(const ArchSpec& spec, int layer_index) {
  check_well_formed(spec);
  if (layer_index < 0 || layer_index >= int(spec.conv.size()))
    throw DimensionError("layer index " + std::to_string(layer_index) +
                         " out of range for " + std::to_string(spec.conv.size()) +
                         " conv layers");
  int w = spec.mics;
  for (int i = 0; i <= layer_index; ++i) {
    w -= spec.conv[i].dilation_w * (spec.conv[i].filter_w - 1);
    if (w < 1)
      throw InfeasibleArchitectureError(
          "arch '" + spec.name + "': feature width drops to " + std::to_string(w) +
          " after conv layer " + std::to_string(i));
  }
  return w;
}

int final_width(const ArchSpec& spec) {
  return output_width(spec, int(spec.conv.size()) - 1);
}

int receptive_field(const ArchSpec& spec) {
  check_well_formed(spec);
  int rf = 1;
  for (const ConvSpec& c : spec.conv) rf += c.dilation_w * (c.filter_w - 1);
  return rf;
}

ValidationReport validate(const ArchSpec& spec, bool strict) {
  check_well_formed(spec);
  ValidationReport rep;
  rep.receptive_field = receptive_field(spec);

  int coverage = 0;  // sum of dilation_w * (filter_w - 1)
  int w = spec.mics;
  bool underflow = false;
  for (std::size_t i = 0; i < spec.conv.size(); ++i) {
    coverage += spec.conv[i].dilation_w * (spec.conv[i].filter_w - 1);
    w = spec.mics - coverage;
    if (w < 1 && !underflow) {
      underflow = true;
      rep.violations.push_back(
          {"width-underflow", "feature width drops to " + std::to_string(w) +
                                  " after conv layer " + std::to_string(i)});
    }
  }
  rep.final_width = w;

  if (strict) {
    if (spec.conv.front().dilation_w != 1)
      rep.violations.push_back(
          {"first-layer-dilation",
           "first conv layer must use dilation 1, got " +
               std::to_string(spec.conv.front().dilation_w)});
    if (coverage != spec.mics - 1 && !underflow)
      rep.violations.push_back(
          {"dilation-sum",
           "sum of dilation_w*(filter_w-1) is " + std::to_string(coverage) +
               ", must equal M-1 = " + std::to_string(spec.mics - 1)});
  }
  rep.ok = rep.violations.empty();
  return rep;
}

namespace {

ArchSpec make(std::string name, int mics, int bins, std::vector<ConvSpec> conv) {
  ArchSpec s;
  s.name = std::move(name);
  s.mics = mics;
  s.bins = bins;
  s.conv = std::move(conv);
  return s;
}

}  // namespace

ArchSpec baseline(int n_layers, int mics, int bins) {
  if (n_layers < 2 || n_layers > mics - 1)
    throw InfeasibleArchitectureError("baseline layer count must be in [2, M-1] = [2, " +
                                      std::to_string(mics - 1) + "], got " +
                                      std::to_string(n_layers));
  std::vector<ConvSpec> conv(std::size_t(n_layers), ConvSpec{2, 1, 64});
  return make("baseline:" + std::to_string(n_layers), mics, bins, std::move(conv));
}

ArchSpec f2342(int mics, int bins) {
  ArchSpec s = make("f2342", mics, bins,
                    {{2, 1, 64}, {3, 1, 64}, {4, 1, 64}, {2, 1, 64}});
  s.note =
      "parameter total computed from layer shapes is 8,741,285 (8.74e6); "
      "this architecture is sometimes quoted with 8.84e6 trainable "
      "parameters, which the per-layer arithmetic does not reproduce";
  return s;
}

ArchSpec d1123(int mics, int bins) {
  return make("d1123", mics, bins, {{2, 1, 64}, {2, 1, 64}, {2, 2, 64}, {2, 3, 64}});
}

ArchSpec d133(int mics, int bins) {
  return make("d133", mics, bins, {{2, 1, 64}, {2, 3, 64}, {2, 3, 64}});
}

std::string to_config_text(const ArchSpec& spec) {
  std::ostringstream os;
  os << "arch.name = " << spec.name << "\n";
  os << "arch.mics = " << spec.mics << "\n";
  os << "arch.bins = " << spec.bins << "\n";
  os << "arch.classes = " << spec.n_classes << "\n";
  os << "arch.conv = ";
  for (std::size_t i = 0; i < spec.conv.size(); ++i) {
    if (i) os << ",";
    os << spec.conv[i].filter_w << ":" << spec.conv[i].dilation_w << ":"
       << spec.conv[i].out_channels;
  }
  os << "\n";
  os << "arch.dense = ";
  for (std::size_t i = 0; i < spec.dense_hidden.size(); ++i)
    os << (i ? "," : "") << spec.dense_hidden[i];
  os << "\n";
  return os.str();
}

ArchSpec from_config_text(const std::string& text) {
  const config::KvMap kv = config::parse_kv(text);
  ArchSpec s;
  s.name = config::get_string(kv, "arch.name", "custom");
  s.mics = config::get_int(kv, "arch.mics", 8);
  s.bins = config::get_int(kv, "arch.bins", 257);
  s.n_classes = config::get_int(kv, "arch.classes", 37);

  const std::string conv = config::require_string(kv, "arch.conv");
  s.conv.clear();
  for (const std::string& item : config::split(conv, ',')) {
    const std::vector<std::string> f = config::split(item, ':');
    if (f.size() != 3)
      throw ConfigError("arch.conv entry '" + item +
                        "' must be filter:dilation:channels");
    s.conv.push_back({config::to_int(f[0], "arch.conv filter"),
                      config::to_int(f[1], "arch.conv dilation"),
                      config::to_int(f[2], "arch.conv channels")});
  }
  const std::string dense = config::get_string(kv, "arch.dense", "512,512");
  s.dense_hidden.clear();
  for (const std::string& item : config::split(dense, ','))
    s.dense_hidden.push_back(config::to_int(item, "arch.dense"));

  check_well_formed(s);
  return s;
}

ArchSpec resolve(const std::string& selector) {
  if (selector == "f2342") return f2342();
  if (selector == "d1123") return d1123();
  if (selector == "d133") return d133();
  if (selector.rfind("baseline:", 0) == 0)
    return baseline(config::to_int(selector.substr(9), "baseline layer count"));
  if (std::filesystem::exists(selector)) {
    std::ifstream in(selector);
    std::ostringstream buf;
    buf << in.rdbuf();
    return from_config_text(buf.str());
  }
  throw ConfigError("unknown architecture '" + selector +
                    "' (expected baseline:N, f2342, d1123, d133 or a config file path)");
}

}  // namespace ddoa::arch
