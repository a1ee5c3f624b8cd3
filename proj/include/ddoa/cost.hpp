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

#ifndef DDOA_COST_HPP_
#define DDOA_COST_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "ddoa/arch.hpp"

namespace ddoa::cost {

struct LayerCost {
  std::string name;
  std::uint64_t flops = 0;   // multiply-accumulates; biases and activations count 0
  std::uint64_t params = 0;  // trainable scalars, including biases
  std::string out_shape;
};

struct CostReport {
  std::string arch_name;
  std::vector<LayerCost> per_layer;
  std::uint64_t total_flops = 0;
  std::uint64_t total_params = 0;
  double flops_ratio_vs_reference = 1.0;
  std::string reference_name;
  std::string note;
};

// FLOP and parameter accounting for a feasible spec.
//
// FLOPs: one multiply-accumulate counts as one FLOP. Conv layers cost
// H_out * W_out * filter_h * filter_w * C_in * C_out (output-map
// extent); dense layers cost n_in * n_out. Biases and activations are
// free.
//
// Parameters: conv layers hold fh*fw*Cin*Cout weights + Cout biases;
// dense layers n_in*n_out + n_out — except the first dense layer, which
// is counted with an augmented input column, (n_in+1)*n_out + n_out.
// The reference totals these reports are validated against use that
// convention; the model itself allocates n_in*n_out + n_out there (see
// allocated_params).
CostReport report(const arch::ArchSpec& spec);

// Spec-named entry points; both return the full report.
CostReport count_flops(const arch::ArchSpec& spec);
CostReport count_params(const arch::ArchSpec& spec);

// Number of scalars the nn module actually allocates for this spec.
std::uint64_t allocated_params(const arch::ArchSpec& spec);

double flops_ratio(const arch::ArchSpec& spec, const arch::ArchSpec& reference);

// Fills flops_ratio_vs_reference / reference_name against `reference`.
CostReport report_with_reference(const arch::ArchSpec& spec,
                                 const arch::ArchSpec& reference);

// Aligned table plus one key=value record per layer.
std::string format_report(const CostReport& rep);

}  // namespace ddoa::cost

#endif  // DDOA_COST_HPP_
