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

#ifndef DDOA_WAV_HPP_
#define DDOA_WAV_HPP_

#include <filesystem>

#include "ddoa/features.hpp"

namespace ddoa::wav {

// 16-bit PCM RIFF/WAVE, interleaved channels. Samples are scaled by
// 32767 on write (clipped to [-1, 1]) and by 1/32767 on read, so a
// round trip only costs quantization error.
void write_pcm16(const std::filesystem::path& path,
                 const features::MultichannelSignal& sig);
features::MultichannelSignal read_pcm16(const std::filesystem::path& path);

}  // namespace ddoa::wav

#endif  // DDOA_WAV_HPP_
