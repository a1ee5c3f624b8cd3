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

#include "ddoa/dataset.hpp"

#include <cstring>
#include <fstream>

#include "ddoa/errors.hpp"

namespace ddoa::dataset {

namespace {

constexpr char kMagic[4] = {'D', 'D', 'S', 'T'};
constexpr std::uint32_t kVersion = 1;

template <typename T>
void put(std::ofstream& out, T v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get(std::ifstream& in, const char* what) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!in) throw DataError(std::string("dataset file truncated reading ") + what);
  return v;
}

}  // namespace

void Dataset::validate() const {
  const std::size_t fsz = std::size_t(bins) * mics;
  if (fsz == 0 || n_classes == 0)
    throw DimensionError("dataset: zero bins/mics/classes");
  if (features.size() % fsz != 0)
    throw DimensionError("dataset: feature buffer not a whole number of frames");
  const std::size_t nf = features.size() / fsz;
  if (labels.size() != nf * n_classes)
    throw DimensionError("dataset: label buffer has " + std::to_string(labels.size()) +
                         " bytes, expected " + std::to_string(nf * n_classes));
  if (!scene_ids.empty() && scene_ids.size() != nf)
    throw DimensionError("dataset: scene_ids length mismatch");
  for (std::size_t f = 0; f < nf; ++f) {
    bool any = false;
    for (std::uint32_t i = 0; i < n_classes; ++i)
      any = any || labels[f * n_classes + i] != 0;
    if (!any)
      throw DataError("dataset: frame " + std::to_string(f) + " has no active class");
  }
}

void save(const Dataset& ds, const std::filesystem::path& path) {
  ds.validate();
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write dataset file: " + path.string());
  out.write(kMagic, 4);
  put<std::uint32_t>(out, kVersion);
  put<std::uint32_t>(out, ds.bins);
  put<std::uint32_t>(out, ds.mics);
  put<std::uint32_t>(out, ds.n_classes);
  put<std::uint64_t>(out, std::uint64_t(ds.frames()));
  put<std::uint64_t>(out, ds.config_digest);
  const std::size_t fsz = std::size_t(ds.bins) * ds.mics;
  for (std::size_t f = 0; f < ds.frames(); ++f) {
    out.write(reinterpret_cast<const char*>(ds.frame_data(f)),
              std::streamsize(fsz * sizeof(float)));
    out.write(reinterpret_cast<const char*>(ds.frame_labels(f)),
              std::streamsize(ds.n_classes));
  }
  if (!out) throw DataError("short write to dataset file: " + path.string());
}

Dataset load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open dataset file: " + path.string());
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, kMagic, 4) != 0)
    throw DataError("not a dataset file (bad magic): " + path.string());
  const auto version = get<std::uint32_t>(in, "version");
  if (version != kVersion)
    throw DataError("unsupported dataset version " + std::to_string(version));

  Dataset ds;
  ds.bins = get<std::uint32_t>(in, "bins");
  ds.mics = get<std::uint32_t>(in, "mics");
  ds.n_classes = get<std::uint32_t>(in, "classes");
  const auto nf = get<std::uint64_t>(in, "frame count");
  ds.config_digest = get<std::uint64_t>(in, "config digest");

  const std::size_t fsz = std::size_t(ds.bins) * ds.mics;
  ds.features.resize(nf * fsz);
  ds.labels.resize(nf * ds.n_classes);
  // Interleaved on disk (features then labels per frame).
  for (std::uint64_t f = 0; f < nf; ++f) {
    in.read(reinterpret_cast<char*>(ds.features.data() + f * fsz),
            std::streamsize(fsz * sizeof(float)));
    in.read(reinterpret_cast<char*>(ds.labels.data() + f * ds.n_classes),
            std::streamsize(ds.n_classes));
    if (!in)
      throw DataError("dataset file truncated at frame " + std::to_string(f) + ": " +
                      path.string());
  }
  // No grouping on disk; treat each frame as its own scene.
  ds.scene_ids.resize(nf);
  for (std::uint64_t f = 0; f < nf; ++f) ds.scene_ids[f] = std::uint32_t(f);
  ds.validate();
  return ds;
}

}  // namespace ddoa::dataset
