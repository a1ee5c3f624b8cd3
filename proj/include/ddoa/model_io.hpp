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

#ifndef DDOA_MODEL_IO_HPP_
#define DDOA_MODEL_IO_HPP_

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "ddoa/nn.hpp"

// Model file layout (all integers little-endian):
//   bytes 0..3   magic "DDOA"
//   u32          format version (1)
//   u32          scalar width in bytes (4 or 8)
//   u32          descriptor length, then that many bytes of key=value
//                text (the architecture block plus meta.* provenance)
//   u64          tensor count; per tensor: u64 element count followed by
//                the raw little-endian scalars, in parameter-view order
//   u32          CRC32 of everything after the magic
namespace ddoa::model_io {

inline constexpr std::uint32_t kFormatVersion = 1;

// Extra key=value entries stored in the descriptor (seed, config digest).
using MetaMap = std::map<std::string, std::string>;

void save_model_f32(const nn::Model<float>& model, const std::filesystem::path& path,
                    const MetaMap& meta = {});
void save_model_f64(const nn::Model<double>& model, const std::filesystem::path& path,
                    const MetaMap& meta = {});

struct LoadedModel {
  arch::ArchSpec spec;
  std::uint32_t scalar_width = 0;
  MetaMap meta;
  std::vector<std::vector<double>> tensors;  // parameter-view order
};

// Parses and checksum-verifies a model file; throws DataError on any
// corruption or format mismatch.
LoadedModel load_model_raw(const std::filesystem::path& path);

nn::Model<float> load_model_f32(const std::filesystem::path& path, MetaMap* meta = nullptr);
nn::Model<double> load_model_f64(const std::filesystem::path& path, MetaMap* meta = nullptr);

}  // namespace ddoa::model_io

#endif  // DDOA_MODEL_IO_HPP_
