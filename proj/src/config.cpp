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

#include "ddoa/config.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "ddoa/errors.hpp"

namespace ddoa::config {

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) {
    cur = trim(cur);
    if (!cur.empty()) out.push_back(cur);
  }
  return out;
}

KvMap parse_kv(const std::string& text) {
  KvMap kv;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(lineno) +
                        " is not 'key = value': '" + line + "'");
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    if (key.empty())
      throw ConfigError("config line " + std::to_string(lineno) + " has empty key");
    kv[key] = val;
  }
  return kv;
}

KvMap load_kv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_kv(buf.str());
}

std::string serialize_kv(const KvMap& kv) {
  std::ostringstream os;
  for (const auto& [k, v] : kv) os << k << " = " << v << "\n";
  return os.str();
}

int to_int(const std::string& s, const std::string& what) {
  try {
    std::size_t pos = 0;
    const int v = std::stoi(s, &pos);
    if (pos != s.size()) throw std::invalid_argument("trailing");
    return v;
  } catch (const std::exception&) {
    throw ConfigError(what + ": expected integer, got '" + s + "'");
  }
}

double to_double(const std::string& s, const std::string& what) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument("trailing");
    return v;
  } catch (const std::exception&) {
    throw ConfigError(what + ": expected number, got '" + s + "'");
  }
}

std::string get_string(const KvMap& kv, const std::string& key, const std::string& def) {
  auto it = kv.find(key);
  return it == kv.end() ? def : it->second;
}

std::string require_string(const KvMap& kv, const std::string& key) {
  auto it = kv.find(key);
  if (it == kv.end()) throw ConfigError("missing required config key '" + key + "'");
  return it->second;
}

int get_int(const KvMap& kv, const std::string& key, int def) {
  auto it = kv.find(key);
  return it == kv.end() ? def : to_int(it->second, key);
}

double get_double(const KvMap& kv, const std::string& key, double def) {
  auto it = kv.find(key);
  return it == kv.end() ? def : to_double(it->second, key);
}

std::vector<double> get_double_list(const KvMap& kv, const std::string& key,
                                    const std::vector<double>& def) {
  auto it = kv.find(key);
  if (it == kv.end()) return def;
  std::vector<double> out;
  for (const std::string& item : split(it->second, ',')) out.push_back(to_double(item, key));
  return out;
}

std::uint64_t fnv1a64(const void* data, std::size_t len) {
  const auto* p = static_cast<const unsigned char*>(data);
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (std::size_t i = 0; i < len; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t fnv1a64(const std::string& s) { return fnv1a64(s.data(), s.size()); }

std::uint64_t file_digest(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open file for digest: " + path.string());
  std::uint64_t h = 0xcbf29ce484222325ULL;
  char buf[1 << 16];
  while (in) {
    in.read(buf, sizeof(buf));
    const std::streamsize got = in.gcount();
    for (std::streamsize i = 0; i < got; ++i) {
      h ^= static_cast<unsigned char>(buf[i]);
      h *= 0x100000001b3ULL;
    }
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

void write_manifest(const std::filesystem::path& artifact, const Manifest& m) {
  nlohmann::ordered_json j;
  j["tool"] = "ddoa";
  j["format_version"] = 1;
  j["subcommand"] = m.subcommand;
  j["seed"] = m.seed;
  j["config_digest"] = m.config_digest;
  j["inputs"] = m.input_digests;
  j["output_digest"] = m.output_digest;
  const std::filesystem::path path = artifact.string() + ".manifest.json";
  std::ofstream out(path);
  if (!out) throw DataError("cannot write manifest: " + path.string());
  out << j.dump(2) << "\n";
}

bool verify_against_manifest(const std::filesystem::path& artifact) {
  const std::filesystem::path path = artifact.string() + ".manifest.json";
  if (!std::filesystem::exists(path)) return false;
  std::ifstream in(path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw DataError("unreadable manifest " + path.string() + ": " + e.what());
  }
  const std::string recorded = j.value("output_digest", "");
  const std::string actual = hex64(file_digest(artifact));
  if (!recorded.empty() && recorded != actual)
    throw DataError("digest mismatch for " + artifact.string() + ": manifest records " +
                    recorded + " but file hashes to " + actual +
                    "; the artifact changed since it was produced, refusing to resume");
  return true;
}

}  // namespace ddoa::config
