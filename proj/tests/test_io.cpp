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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <unistd.h>

#include <filesystem>
#include <fstream>

#include "ddoa/config.hpp"
#include "ddoa/dataset.hpp"
#include "ddoa/model_io.hpp"
#include "ddoa/wav.hpp"
#include "oracle_utils.hpp"

using namespace ddoa;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("ddoa_test_" + std::to_string(::getpid()) + "_" +
            std::to_string(counter()++));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  static int& counter() {
    static int c = 0;
    return c;
  }
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return std::string((std::istreambuf_iterator<char>(in)),
                     std::istreambuf_iterator<char>());
}

arch::ArchSpec small_spec() {
  arch::ArchSpec s;
  s.name = "small";
  s.mics = 8;
  s.bins = 17;
  s.conv = {{2, 1, 3}, {2, 2, 3}, {2, 2, 3}};
  s.dense_hidden = {10, 10};
  s.n_classes = 5;
  return s;
}

}  // namespace

TEST_CASE("model file round trip preserves parameters and metadata") {
  TempDir tmp;
  const fs::path path = tmp.path / "model.ddoa";
  nn::Model<float> m = nn::build_model<float>(small_spec(), 123);
  model_io::MetaMap meta = {{"seed", "123"}, {"config_digest", "abcd"}};
  model_io::save_model_f32(m, path, meta);

  model_io::MetaMap got_meta;
  nn::Model<float> back = model_io::load_model_f32(path, &got_meta);
  CHECK(got_meta.at("seed") == "123");
  CHECK(got_meta.at("config_digest") == "abcd");
  CHECK(back.spec.name == "small");
  auto a = m.param_views();
  auto b = back.param_views();
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t k = 0; k < a[i].size(); ++k) CHECK(a[i][k] == b[i][k]);

  // Loading and saving again reproduces the file byte for byte.
  const fs::path path2 = tmp.path / "model2.ddoa";
  model_io::save_model_f32(back, path2, got_meta);
  CHECK(slurp(path) == slurp(path2));

  // 64-bit models round trip as well.
  const fs::path path64 = tmp.path / "model64.ddoa";
  nn::Model<double> md = nn::build_model<double>(small_spec(), 9);
  model_io::save_model_f64(md, path64);
  nn::Model<double> backd = model_io::load_model_f64(path64);
  auto ad = md.param_views();
  auto bd = backd.param_views();
  for (std::size_t i = 0; i < ad.size(); ++i)
    for (std::size_t k = 0; k < ad[i].size(); ++k) CHECK(ad[i][k] == bd[i][k]);
}

TEST_CASE("model file corruption is detected") {
  TempDir tmp;
  const fs::path path = tmp.path / "model.ddoa";
  nn::Model<float> m = nn::build_model<float>(small_spec(), 5);
  model_io::save_model_f32(m, path);

  std::string bytes = slurp(path);
  bytes[bytes.size() / 2] ^= 0x40;  // flip a payload bit
  std::ofstream(path, std::ios::binary) << bytes;
  CHECK_THROWS_WITH_AS(model_io::load_model_raw(path),
                       doctest::Contains("checksum"), DataError);

  std::ofstream(tmp.path / "junk.bin", std::ios::binary) << "not a model";
  CHECK_THROWS_AS(model_io::load_model_raw(tmp.path / "junk.bin"), DataError);
}

TEST_CASE("dataset file round trip") {
  TempDir tmp;
  dataset::Dataset ds;
  ds.bins = 4;
  ds.mics = 3;
  ds.n_classes = 5;
  ds.config_digest = 0xDEADBEEFCAFEF00DULL;
  const std::size_t frames = 7;
  ds.features = oracle::random_vector<float>(frames * 12, 5, -3.14, 3.14);
  ds.labels.assign(frames * 5, 0);
  for (std::size_t f = 0; f < frames; ++f) ds.labels[f * 5 + f % 5] = 1;
  for (std::size_t f = 0; f < frames; ++f) ds.scene_ids.push_back(std::uint32_t(f / 2));

  const fs::path path = tmp.path / "data.ds";
  dataset::save(ds, path);
  const dataset::Dataset back = dataset::load(path);
  CHECK(back.bins == 4);
  CHECK(back.mics == 3);
  CHECK(back.n_classes == 5);
  CHECK(back.frames() == frames);
  CHECK(back.config_digest == ds.config_digest);
  CHECK(back.features == ds.features);
  CHECK(back.labels == ds.labels);

  // Truncated file rejected.
  std::string bytes = slurp(path);
  std::ofstream(path, std::ios::binary) << bytes.substr(0, bytes.size() - 3);
  CHECK_THROWS_AS(dataset::load(path), DataError);
}

TEST_CASE("dataset invariants") {
  dataset::Dataset ds;
  ds.bins = 2;
  ds.mics = 2;
  ds.n_classes = 3;
  ds.features.assign(4, 0.0f);
  ds.labels.assign(3, 0);  // no active class
  CHECK_THROWS_AS(ds.validate(), DataError);
  ds.labels[1] = 1;
  CHECK_NOTHROW(ds.validate());
}

TEST_CASE("wav round trip within quantization error") {
  TempDir tmp;
  features::MultichannelSignal sig;
  sig.sample_rate = 16000;
  sig.channels = {oracle::random_vector<double>(500, 1, -0.9, 0.9),
                  oracle::random_vector<double>(500, 2, -0.9, 0.9)};
  const fs::path path = tmp.path / "x.wav";
  wav::write_pcm16(path, sig);
  const features::MultichannelSignal back = wav::read_pcm16(path);
  REQUIRE(back.channels.size() == 2);
  CHECK(back.sample_rate == 16000);
  for (std::size_t c = 0; c < 2; ++c)
    for (std::size_t i = 0; i < 500; ++i)
      CHECK(std::fabs(back.channels[c][i] - sig.channels[c][i]) <= 0.51 / 32767.0);

  std::ofstream(tmp.path / "bad.wav", std::ios::binary) << "RIFFxxxxWAVE";
  CHECK_THROWS_AS(wav::read_pcm16(tmp.path / "bad.wav"), DataError);
}

TEST_CASE("key=value parsing") {
  const config::KvMap kv = config::parse_kv(
      "# comment line\n"
      "alpha = 3\n"
      "  beta.gamma = hello world  # trailing comment\n"
      "\n"
      "list = 1, 2, 3\n");
  CHECK(config::get_int(kv, "alpha", 0) == 3);
  CHECK(config::get_string(kv, "beta.gamma", "") == "hello world");
  CHECK(config::get_double_list(kv, "list", {}) == std::vector<double>{1, 2, 3});
  CHECK(config::get_int(kv, "missing", 7) == 7);
  CHECK_THROWS_AS(config::parse_kv("noequals\n"), ConfigError);
  CHECK_THROWS_AS(config::to_int("3.5", "x"), ConfigError);
  CHECK_THROWS_AS(config::require_string(kv, "absent"), ConfigError);
}

TEST_CASE("digests are stable and sensitive") {
  CHECK(config::fnv1a64(std::string("")) == 0xcbf29ce484222325ULL);
  CHECK(config::fnv1a64(std::string("a")) == 0xaf63dc4c8601ec8cULL);
  CHECK(config::fnv1a64(std::string("ab")) != config::fnv1a64(std::string("ba")));
  CHECK(config::hex64(0xdeadbeefULL) == "00000000deadbeef");
}

TEST_CASE("manifest verification catches modified artifacts") {
  TempDir tmp;
  const fs::path artifact = tmp.path / "artifact.bin";
  std::ofstream(artifact, std::ios::binary) << "payload-v1";

  config::Manifest m;
  m.subcommand = "test";
  m.seed = 1;
  m.config_digest = "00";
  m.output_digest = config::hex64(config::file_digest(artifact));
  config::write_manifest(artifact, m);

  CHECK(config::verify_against_manifest(artifact));

  std::ofstream(artifact, std::ios::binary) << "payload-v2";
  CHECK_THROWS_WITH_AS(config::verify_against_manifest(artifact),
                       doctest::Contains("digest mismatch"), DataError);

  // No manifest: nothing to verify.
  const fs::path other = tmp.path / "other.bin";
  std::ofstream(other, std::ios::binary) << "data";
  CHECK_FALSE(config::verify_against_manifest(other));
}
