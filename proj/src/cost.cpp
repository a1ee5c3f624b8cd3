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

#include "ddoa/cost.hpp"

#include <iomanip>
#include <sstream>

#include "ddoa/errors.hpp"

namespace ddoa::cost {

namespace {

std::string with_commas(std::uint64_t v) {
  std::string s = std::to_string(v);
  for (int pos = int(s.size()) - 3; pos > 0; pos -= 3) s.insert(std::size_t(pos), ",");
  return s;
}

}  // namespace

CostReport report(const arch::ArchSpec& spec) {
  arch::check_well_formed(spec);
  CostReport rep;
  rep.arch_name = spec.name;
  rep.note = spec.note;

  const std::uint64_t h = std::uint64_t(spec.bins);
  std::uint64_t w = std::uint64_t(spec.mics);
  std::uint64_t cin = 1;
  for (std::size_t i = 0; i < spec.conv.size(); ++i) {
    const arch::ConvSpec& c = spec.conv[i];
    const int wi = arch::output_width(spec, int(i));  // throws on underflow
    const std::uint64_t wout = std::uint64_t(wi);
    const std::uint64_t cout = std::uint64_t(c.out_channels);
    const std::uint64_t fw = std::uint64_t(c.filter_w);
    LayerCost lc;
    lc.name = "conv" + std::to_string(i + 1);
    lc.flops = h * wout * 1 * fw * cin * cout;
    lc.params = 1 * fw * cin * cout + cout;
    lc.out_shape = std::to_string(h) + "x" + std::to_string(wout) + "x" +
                   std::to_string(cout);
    rep.per_layer.push_back(lc);
    w = wout;
    cin = cout;
  }

  std::uint64_t n_in = h * w * cin;
  rep.per_layer.push_back({"flatten", 0, 0, std::to_string(n_in)});

  std::vector<std::uint64_t> dense_out(spec.dense_hidden.begin(), spec.dense_hidden.end());
  dense_out.push_back(std::uint64_t(spec.n_classes));
  for (std::size_t i = 0; i < dense_out.size(); ++i) {
    const std::uint64_t n_out = dense_out[i];
    LayerCost lc;
    lc.name = "fc" + std::to_string(i + 1);
    lc.flops = n_in * n_out;
    // First dense layer counted with an augmented input column; see
    // cost.hpp.
    lc.params = (i == 0 ? (n_in + 1) * n_out : n_in * n_out) + n_out;
    lc.out_shape = std::to_string(n_out);
    rep.per_layer.push_back(lc);
    n_in = n_out;
  }

  for (const LayerCost& lc : rep.per_layer) {
    rep.total_flops += lc.flops;
    rep.total_params += lc.params;
  }
  return rep;
}

CostReport count_flops(const arch::ArchSpec& spec) { return report(spec); }
CostReport count_params(const arch::ArchSpec& spec) { return report(spec); }

std::uint64_t allocated_params(const arch::ArchSpec& spec) {
  // The augmented-input-column convention applies only to the reported
  // totals; the model stores n_in*n_out weights plus n_out biases for
  // every layer.
  const CostReport rep = report(spec);
  return rep.total_params - std::uint64_t(spec.dense_hidden.front());
}

double flops_ratio(const arch::ArchSpec& spec, const arch::ArchSpec& reference) {
  return double(report(spec).total_flops) / double(report(reference).total_flops);
}

CostReport report_with_reference(const arch::ArchSpec& spec,
                                 const arch::ArchSpec& reference) {
  CostReport rep = report(spec);
  rep.flops_ratio_vs_reference = double(rep.total_flops) /
                                 double(report(reference).total_flops);
  rep.reference_name = reference.name;
  return rep;
}

std::string format_report(const CostReport& rep) {
  std::ostringstream os;
  os << "architecture: " << rep.arch_name << "\n\n";
  os << std::left << std::setw(10) << "layer" << std::right << std::setw(14)
     << "out_shape" << std::setw(16) << "flops" << std::setw(14) << "params" << "\n";
  os << std::string(54, '-') << "\n";
  for (const LayerCost& lc : rep.per_layer) {
    os << std::left << std::setw(10) << lc.name << std::right << std::setw(14)
       << lc.out_shape << std::setw(16) << with_commas(lc.flops) << std::setw(14)
       << with_commas(lc.params) << "\n";
  }
  os << std::string(54, '-') << "\n";
  os << std::left << std::setw(10) << "total" << std::right << std::setw(14) << ""
     << std::setw(16) << with_commas(rep.total_flops) << std::setw(14)
     << with_commas(rep.total_params) << "\n\n";
  if (!rep.reference_name.empty()) {
    os << "flops ratio vs " << rep.reference_name << ": " << std::fixed
       << std::setprecision(2) << rep.flops_ratio_vs_reference << "\n";
  }
  if (!rep.note.empty()) os << "note: " << rep.note << "\n";
  os << "\n";
  for (const LayerCost& lc : rep.per_layer) {
    os << "layer=" << lc.name << " out_shape=" << lc.out_shape
       << " flops=" << lc.flops << " params=" << lc.params << "\n";
  }
  os << "total_flops=" << rep.total_flops << " total_params=" << rep.total_params;
  if (!rep.reference_name.empty()) {
    os << " flops_ratio_vs_" << rep.reference_name << "="
       << std::fixed << std::setprecision(4) << rep.flops_ratio_vs_reference;
  }
  os << "\n";
  return os.str();
}

}  // namespace ddoa::cost
