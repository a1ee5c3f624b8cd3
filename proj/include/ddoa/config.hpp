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

#ifndef DDOA_CONFIG_HPP_
#define DDOA_CONFIG_HPP_

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace ddoa::config {

// "key = value" lines; '#' starts a comment; blank lines ignored.
// Ordered map so serialization is stable.
using KvMap = std::map<std::string, std::string>;

KvMap parse_kv(const std::string& text);
KvMap load_kv(const std::filesystem::path& path);
std::string serialize_kv(const KvMap& kv);

std::vector<std::string> split(const std::string& s, char sep);
std::string trim(const std::string& s);

int to_int(const std::string& s, const std::string& what);
double to_double(const std::string& s, const std::string& what);

std::string get_string(const KvMap& kv, const std::string& key, const std::string& def);
std::string require_string(const KvMap& kv, const std::string& key);
int get_int(const KvMap& kv, const std::string& key, int def);
double get_double(const KvMap& kv, const std::string& key, double def);
std::vector<double> get_double_list(const KvMap& kv, const std::string& key,
                                    const std::vector<double>& def);

// FNV-1a, used as the stable content digest embedded in artifacts.
std::uint64_t fnv1a64(const void* data, std::size_t len);
std::uint64_t fnv1a64(const std::string& s);
std::uint64_t file_digest(const std::filesystem::path& path);
std::string hex64(std::uint64_t v);

// Per-artifact provenance sidecar (<artifact>.manifest.json).
struct Manifest {
  std::string subcommand;
  std::uint64_t seed = 0;
  std::string config_digest;                       // hex64 of the run config
  std::map<std::string, std::string> input_digests;  // path -> hex64
  std::string output_digest;                       // hex64 of the artifact
};

void write_manifest(const std::filesystem::path& artifact, const Manifest& m);

// If a manifest sidecar exists for `artifact`, recompute its digest and
// throw DataError on mismatch (the artifact changed since it was
// produced). Returns true when a manifest was found and verified.
bool verify_against_manifest(const std::filesystem::path& artifact);

}  // namespace ddoa::config

#endif  // DDOA_CONFIG_HPP_
