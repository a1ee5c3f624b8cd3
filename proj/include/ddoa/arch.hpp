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

#ifndef DDOA_ARCH_HPP_
#define DDOA_ARCH_HPP_

#include <string>
#include <vector>

namespace ddoa::arch {

// One convolution stage. Filters are 1 x filter_w and slide along the
// microphone axis only; dilation likewise applies along that axis.
struct ConvSpec {
  int filter_w = 2;
  int dilation_w = 1;
  int out_channels = 64;
};

// Declarative network description: the conv stack over the K x M phase
// map followed by a fully connected head ending in one unit per DOA
// class.
struct ArchSpec {
  std::string name;
  int mics = 8;  // M, the input feature width
  int bins = 257;  // K, the input feature height
  std::vector<ConvSpec> conv;
  std::vector<int> dense_hidden = {512, 512};
  int n_classes = 37;
  std::string note;  // free-form remark shown by reporting tools

  int flat_dim() const;  // bins * final_width * last out_channels
};

struct Violation {
  std::string rule;  // stable identifier, e.g. "dilation-sum"
  std::string message;
};

struct ValidationReport {
  bool ok = true;
  std::vector<Violation> violations;
  int receptive_field = 0;
  int final_width = 0;
};

// Throws on structurally broken specs (empty conv list, non-positive
// extents); rule violations are reported, not thrown.
void check_well_formed(const ArchSpec& spec);

// Strict mode enforces the dilation design rules: first-layer dilation
// must be 1, and sum(dilation_w * (filter_w - 1)) must equal M-1 so the
// last feature map has width exactly 1. Lenient mode only rejects specs
// whose feature width would collapse below 1.
ValidationReport validate(const ArchSpec& spec, bool strict);

// Feature-map width after conv layer `layer_index` (0-based). Width
// recursion: W0 = M, W_{i+1} = W_i - dilation_w * (filter_w - 1).
// Throws InfeasibleArchitectureError if the width drops below 1.
int output_width(const ArchSpec& spec, int layer_index);
int final_width(const ArchSpec& spec);

// Span of input microphones influencing one feature of the last conv
// layer: 1 + sum(dilation_w * (filter_w - 1)).
int receptive_field(const ArchSpec& spec);

// Builders for the compared architecture families. All use 64 filters
// per conv layer, two hidden dense layers of 512 and 37 output classes.
ArchSpec baseline(int n_layers, int mics = 8, int bins = 257);
ArchSpec f2342(int mics = 8, int bins = 257);
ArchSpec d1123(int mics = 8, int bins = 257);
ArchSpec d133(int mics = 8, int bins = 257);

// Human-readable key=value block; also embedded in model files.
std::string to_config_text(const ArchSpec& spec);
ArchSpec from_config_text(const std::string& text);

// Resolves a CLI selector: "baseline:N", "f2342", "d1123", "d133", or a
// path to a config file containing an arch block.
ArchSpec resolve(const std::string& selector);

}  // namespace ddoa::arch

#endif  // DDOA_ARCH_HPP_
