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

#ifndef DDOA_DATASET_HPP_
#define DDOA_DATASET_HPP_

#include <cstdint>
#include <filesystem>
#include <vector>

namespace ddoa::dataset {

// Labeled phase-map records. On disk (all little-endian):
//   magic "DDST", u32 version, u32 K, u32 M, u32 I,
//   u64 frame count, u64 config digest,
//   then per frame: K*M float32 phases followed by I label bytes.
// scene_ids group frames for the validation split; the file format does
// not carry them, so loaded datasets fall back to one group per frame.
struct Dataset {
  std::uint32_t bins = 0;       // K
  std::uint32_t mics = 0;       // M
  std::uint32_t n_classes = 0;  // I
  std::uint64_t config_digest = 0;
  std::vector<float> features;      // [frame][bin][mic]
  std::vector<std::uint8_t> labels;  // [frame][class], multi-hot
  std::vector<std::uint32_t> scene_ids;  // [frame]

  std::size_t frames() const {
    return bins && mics ? features.size() / (std::size_t(bins) * mics) : 0;
  }
  const float* frame_data(std::size_t f) const {
    return features.data() + f * std::size_t(bins) * mics;
  }
  const std::uint8_t* frame_labels(std::size_t f) const {
    return labels.data() + f * n_classes;
  }
  void validate() const;
};

void save(const Dataset& ds, const std::filesystem::path& path);
Dataset load(const std::filesystem::path& path);

}  // namespace ddoa::dataset

#endif  // DDOA_DATASET_HPP_
