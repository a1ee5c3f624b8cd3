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

#include "ddoa/wav.hpp"

#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>

#include "ddoa/errors.hpp"

namespace ddoa::wav {

namespace {

void put_u32(std::string& s, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) s.push_back(char((v >> (8 * i)) & 0xff));
}
void put_u16(std::string& s, std::uint16_t v) {
  s.push_back(char(v & 0xff));
  s.push_back(char((v >> 8) & 0xff));
}

std::uint32_t get_u32(const std::string& s, std::size_t off) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= std::uint32_t(std::uint8_t(s[off + i])) << (8 * i);
  return v;
}
std::uint16_t get_u16(const std::string& s, std::size_t off) {
  return std::uint16_t(std::uint8_t(s[off]) | (std::uint8_t(s[off + 1]) << 8));
}

}  // namespace

void write_pcm16(const std::filesystem::path& path,
                 const features::MultichannelSignal& sig) {
  const std::size_t n_ch = sig.channels.size();
  if (n_ch == 0) throw DataError("wav write: no channels");
  const std::size_t n = sig.samples();
  for (const auto& ch : sig.channels)
    if (ch.size() != n) throw DimensionError("wav write: channel lengths differ");

  const std::uint32_t data_bytes = std::uint32_t(n * n_ch * 2);
  std::string out;
  out.reserve(44 + data_bytes);
  out += "RIFF";
  put_u32(out, 36 + data_bytes);
  out += "WAVEfmt ";
  put_u32(out, 16);
  put_u16(out, 1);  // PCM
  put_u16(out, std::uint16_t(n_ch));
  put_u32(out, std::uint32_t(sig.sample_rate));
  put_u32(out, std::uint32_t(sig.sample_rate) * std::uint32_t(n_ch) * 2);
  put_u16(out, std::uint16_t(n_ch * 2));
  put_u16(out, 16);
  out += "data";
  put_u32(out, data_bytes);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t c = 0; c < n_ch; ++c) {
      double v = sig.channels[c][i];
      v = v < -1.0 ? -1.0 : (v > 1.0 ? 1.0 : v);
      const auto q = std::int16_t(std::lrint(v * 32767.0));
      put_u16(out, std::uint16_t(q));
    }
  }
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw DataError("cannot write wav file: " + path.string());
  f.write(out.data(), std::streamsize(out.size()));
  if (!f) throw DataError("short write to wav file: " + path.string());
}

features::MultichannelSignal read_pcm16(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw DataError("cannot open wav file: " + path.string());
  std::string buf((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
  if (buf.size() < 44 || buf.compare(0, 4, "RIFF") != 0 || buf.compare(8, 4, "WAVE") != 0)
    throw DataError("not a RIFF/WAVE file: " + path.string());

  std::size_t off = 12;
  int n_ch = 0;
  std::uint32_t rate = 0;
  int bits = 0;
  std::size_t data_off = 0, data_len = 0;
  while (off + 8 <= buf.size()) {
    const std::string id = buf.substr(off, 4);
    const std::uint32_t len = get_u32(buf, off + 4);
    const std::size_t body = off + 8;
    if (id == "fmt ") {
      if (len < 16 || body + 16 > buf.size())
        throw DataError("wav fmt chunk truncated: " + path.string());
      const std::uint16_t format = get_u16(buf, body);
      n_ch = get_u16(buf, body + 2);
      rate = get_u32(buf, body + 4);
      bits = get_u16(buf, body + 14);
      if (format != 1)
        throw DataError("wav format " + std::to_string(format) +
                        " unsupported (PCM only): " + path.string());
    } else if (id == "data") {
      data_off = body;
      data_len = len;
    }
    off = body + len + (len & 1);  // chunks are word-aligned
  }
  if (n_ch <= 0 || rate == 0 || data_off == 0)
    throw DataError("wav file missing fmt or data chunk: " + path.string());
  if (bits != 16)
    throw DataError("wav bit depth " + std::to_string(bits) +
                    " unsupported (16-bit PCM only): " + path.string());
  if (data_off + data_len > buf.size())
    throw DataError("wav data chunk truncated: " + path.string());

  const std::size_t n = data_len / (std::size_t(n_ch) * 2);
  features::MultichannelSignal sig;
  sig.sample_rate = double(rate);
  sig.channels.assign(std::size_t(n_ch), std::vector<double>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (int c = 0; c < n_ch; ++c) {
      const auto raw = std::int16_t(get_u16(buf, data_off + (i * n_ch + c) * 2));
      sig.channels[std::size_t(c)][i] = double(raw) / 32767.0;
    }
  return sig;
}

}  // namespace ddoa::wav
