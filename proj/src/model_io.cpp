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

#include "ddoa/model_io.hpp"

#include <zlib.h>

#include <cstring>
#include <fstream>

#include "ddoa/config.hpp"
#include "ddoa/errors.hpp"

namespace ddoa::model_io {

namespace {

constexpr char kMagic[4] = {'D', 'D', 'O', 'A'};

void append_u32(std::string& buf, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) buf.push_back(char((v >> (8 * i)) & 0xff));
}

void append_u64(std::string& buf, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) buf.push_back(char((v >> (8 * i)) & 0xff));
}

std::uint32_t read_u32(const std::string& buf, std::size_t& off) {
  if (off + 4 > buf.size()) throw DataError("model file truncated (u32)");
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= std::uint32_t(std::uint8_t(buf[off + i])) << (8 * i);
  off += 4;
  return v;
}

std::uint64_t read_u64(const std::string& buf, std::size_t& off) {
  if (off + 8 > buf.size()) throw DataError("model file truncated (u64)");
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= std::uint64_t(std::uint8_t(buf[off + i])) << (8 * i);
  off += 8;
  return v;
}

template <typename T>
void save_impl(const nn::Model<T>& model, const std::filesystem::path& path,
               const MetaMap& meta) {
  std::string payload;
  append_u32(payload, kFormatVersion);
  append_u32(payload, std::uint32_t(sizeof(T)));

  std::string descriptor = arch::to_config_text(model.spec);
  for (const auto& [k, v] : meta) descriptor += "meta." + k + " = " + v + "\n";
  append_u32(payload, std::uint32_t(descriptor.size()));
  payload += descriptor;

  const auto views = model.param_views();
  append_u64(payload, views.size());
  for (const auto& view : views) {
    append_u64(payload, view.size());
    const std::size_t at = payload.size();
    payload.resize(at + view.size() * sizeof(T));
    std::memcpy(payload.data() + at, view.data(), view.size() * sizeof(T));
  }

  const std::uint32_t crc = std::uint32_t(
      crc32(0L, reinterpret_cast<const Bytef*>(payload.data()), uInt(payload.size())));

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write model file: " + path.string());
  out.write(kMagic, 4);
  out.write(payload.data(), std::streamsize(payload.size()));
  std::string tail;
  append_u32(tail, crc);
  out.write(tail.data(), 4);
  if (!out) throw DataError("short write to model file: " + path.string());
}

}  // namespace

void save_model_f32(const nn::Model<float>& model, const std::filesystem::path& path,
                    const MetaMap& meta) {
  save_impl(model, path, meta);
}

void save_model_f64(const nn::Model<double>& model, const std::filesystem::path& path,
                    const MetaMap& meta) {
  save_impl(model, path, meta);
}

LoadedModel load_model_raw(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open model file: " + path.string());
  std::string buf((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (buf.size() < 12 || std::memcmp(buf.data(), kMagic, 4) != 0)
    throw DataError("not a model file (bad magic): " + path.string());

  const std::string payload = buf.substr(4, buf.size() - 8);
  std::size_t tail_off = buf.size() - 4;
  std::uint32_t stored_crc = 0;
  for (int i = 0; i < 4; ++i)
    stored_crc |= std::uint32_t(std::uint8_t(buf[tail_off + i])) << (8 * i);
  const std::uint32_t crc = std::uint32_t(
      crc32(0L, reinterpret_cast<const Bytef*>(payload.data()), uInt(payload.size())));
  if (crc != stored_crc)
    throw DataError("model file checksum mismatch: " + path.string());

  std::size_t off = 0;
  const std::uint32_t version = read_u32(payload, off);
  if (version != kFormatVersion)
    throw DataError("unsupported model format version " + std::to_string(version));
  const std::uint32_t width = read_u32(payload, off);
  if (width != 4 && width != 8)
    throw DataError("unsupported scalar width " + std::to_string(width));
  const std::uint32_t desc_len = read_u32(payload, off);
  if (off + desc_len > payload.size()) throw DataError("model file truncated (descriptor)");
  const std::string descriptor = payload.substr(off, desc_len);
  off += desc_len;

  LoadedModel lm;
  lm.scalar_width = width;
  lm.spec = arch::from_config_text(descriptor);
  for (const auto& [k, v] : config::parse_kv(descriptor))
    if (k.rfind("meta.", 0) == 0) lm.meta[k.substr(5)] = v;

  const std::uint64_t n_tensors = read_u64(payload, off);
  lm.tensors.reserve(n_tensors);
  for (std::uint64_t t = 0; t < n_tensors; ++t) {
    const std::uint64_t count = read_u64(payload, off);
    if (off + count * width > payload.size())
      throw DataError("model file truncated (tensor " + std::to_string(t) + ")");
    std::vector<double> vals(count);
    if (width == 4) {
      for (std::uint64_t i = 0; i < count; ++i) {
        float f;
        std::memcpy(&f, payload.data() + off + i * 4, 4);
        vals[i] = double(f);
      }
    } else {
      std::memcpy(vals.data(), payload.data() + off, count * 8);
    }
    off += count * width;
    lm.tensors.push_back(std::move(vals));
  }
  if (off != payload.size())
    throw DataError("model file has trailing bytes: " + path.string());
  return lm;
}

namespace {

template <typename T>
nn::Model<T> instantiate(const LoadedModel& lm) {
  nn::Model<T> m = nn::build_model<T>(lm.spec, 0);
  auto views = m.param_views();
  if (views.size() != lm.tensors.size())
    throw DataError("model file tensor count " + std::to_string(lm.tensors.size()) +
                    " does not match architecture (" + std::to_string(views.size()) +
                    " parameter blocks)");
  for (std::size_t i = 0; i < views.size(); ++i) {
    if (views[i].size() != lm.tensors[i].size())
      throw DataError("model file tensor " + std::to_string(i) + " has " +
                      std::to_string(lm.tensors[i].size()) + " elements, expected " +
                      std::to_string(views[i].size()));
    for (std::size_t k = 0; k < views[i].size(); ++k) views[i][k] = T(lm.tensors[i][k]);
  }
  return m;
}

}  // namespace

nn::Model<float> load_model_f32(const std::filesystem::path& path, MetaMap* meta) {
  const LoadedModel lm = load_model_raw(path);
  if (meta) *meta = lm.meta;
  return instantiate<float>(lm);
}

nn::Model<double> load_model_f64(const std::filesystem::path& path, MetaMap* meta) {
  const LoadedModel lm = load_model_raw(path);
  if (meta) *meta = lm.meta;
  return instantiate<double>(lm);
}

}  // namespace ddoa::model_io
