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

// Drives the installed binary end to end through /bin/sh; exercises the
// exit-code contract and the simulate -> featurize -> train -> eval
// chain on a small scene set.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "ddoa/arch.hpp"
#include "ddoa/config.hpp"

using namespace ddoa;
namespace fs = std::filesystem;

namespace {

const char* cli() { return DDOA_CLI_PATH; }

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("ddoa_cli_" + std::to_string(::getpid()));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

int run(const std::string& cmd, const fs::path& stdout_file = {}) {
  std::string full = cmd;
  if (!stdout_file.empty()) full += " > " + stdout_file.string();
  full += " 2>/dev/null";
  const int status = std::system(full.c_str());
  REQUIRE(status != -1);
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return std::string((std::istreambuf_iterator<char>(in)),
                     std::istreambuf_iterator<char>());
}

}  // namespace

TEST_CASE("analyze prints the cost table with exact totals") {
  TempDir tmp;
  const fs::path out = tmp.path / "out.txt";

  CHECK(run(std::string(cli()) + " analyze --arch d133", out) == 0);
  std::string text = slurp(out);
  CHECK(text.find("19,459,456") != std::string::npos);
  CHECK(text.find("0.37") != std::string::npos);  // ratio vs baseline:7

  CHECK(run(std::string(cli()) + " analyze --arch baseline:7", out) == 0);
  text = slurp(out);
  CHECK(text.find("8,753,765") != std::string::npos);

  CHECK(run(std::string(cli()) + " analyze --arch f2342", out) == 0);
  text = slurp(out);
  CHECK(text.find("8,741,285") != std::string::npos);
  CHECK(text.find("8.84") != std::string::npos);  // discrepancy note
}

TEST_CASE("exit codes: usage 2, validation 3") {
  CHECK(run(std::string(cli()) + " analyze --arch resnet50") == 2);
  CHECK(run(std::string(cli()) + " analyze") == 2);               // missing option
  CHECK(run(std::string(cli()) + " analyze --arch baseline:1 --strict") == 3);
  CHECK(run(std::string(cli()) + " analyze --arch baseline:3 --strict") == 3);
  CHECK(run(std::string(cli()) + " analyze --arch baseline:3") == 0);  // lenient
}

TEST_CASE("simulate -> featurize -> train -> eval chain") {
  TempDir tmp;
  const fs::path cfg_path = tmp.path / "scenes.cfg";
  {
    std::ofstream cfg(cfg_path);
    cfg << "seed = 11\n"
           "scenes = 6\n"
           "sources_per_scene = 1\n"
           "duration_s = 0.45\n"
           "frames_per_scene = 6\n"
           "rooms = 5x6x3\n"
           "rt60 = 0\n"
           "snr_db = 30\n"
           "distance = 1.0:1.6\n"
           "azimuths = 30, 90, 150\n";
  }
  const fs::path scenes = tmp.path / "scenes";
  const fs::path data = tmp.path / "data.ds";
  const fs::path model = tmp.path / "model.ddoa";
  const fs::path report = tmp.path / "report.txt";
  const std::string base = std::string(cli());

  CHECK(run(base + " simulate --config " + cfg_path.string() + " --out " +
            scenes.string()) == 0);
  CHECK(fs::exists(scenes / "scenes.json"));
  CHECK(fs::exists(scenes / "scene_00000.wav"));
  CHECK(fs::exists(scenes / "scenes.json.manifest.json"));

  CHECK(run(base + " featurize --in " + scenes.string() + " --out " + data.string()) ==
        0);
  CHECK(fs::exists(data));

  CHECK(run(base + " train --data " + data.string() +
            " --arch d133 --epochs 1 --batch 8 --seed 3 --out " + model.string()) ==
        0);
  CHECK(fs::exists(model));

  CHECK(run(base + " eval --model " + model.string() + " --scenes " + scenes.string() +
            " --block-frames 8 --out " + report.string()) == 0);
  const std::string rep = slurp(report);
  CHECK(rep.find("mae_deg = ") != std::string::npos);
  CHECK(rep.find("accuracy = ") != std::string::npos);
  CHECK(rep.find("config_digest = ") != std::string::npos);

  SUBCASE("rerunning with the same config reproduces artifacts byte for byte") {
    const fs::path scenes2 = tmp.path / "scenes2";
    const fs::path data2 = tmp.path / "data2.ds";
    const fs::path model2 = tmp.path / "model2.ddoa";
    CHECK(run(base + " simulate --config " + cfg_path.string() + " --out " +
              scenes2.string()) == 0);
    CHECK(slurp(scenes2 / "scene_00003.wav") == slurp(scenes / "scene_00003.wav"));
    CHECK(run(base + " featurize --in " + scenes2.string() + " --out " +
              data2.string()) == 0);
    CHECK(slurp(data2) == slurp(data));
    CHECK(run(base + " train --data " + data2.string() +
              " --arch d133 --epochs 1 --batch 8 --seed 3 --out " + model2.string()) ==
          0);
    CHECK(slurp(model2) == slurp(model));
  }

  SUBCASE("resume with a tampered artifact refuses with exit 4") {
    std::string bytes = slurp(data);
    bytes[bytes.size() - 1] ^= 0x01;
    std::ofstream(data, std::ios::binary) << bytes;
    CHECK(run(base + " train --data " + data.string() +
              " --arch d133 --epochs 1 --out " + (tmp.path / "m2.ddoa").string()) ==
          4);
  }
}

TEST_CASE("train rejects datasets that do not match the architecture") {
  TempDir tmp;
  // d1123 expects 257 bins; hand the trainer a tiny mismatched dataset.
  const fs::path cfg_path = tmp.path / "s.cfg";
  std::ofstream(cfg_path) << "seed = 1\nscenes = 2\nduration_s = 0.2\n"
                             "frames_per_scene = 2\nrt60 = 0\nazimuths = 90\n";
  const fs::path scenes = tmp.path / "s";
  const fs::path data = tmp.path / "d.ds";
  const std::string base = std::string(cli());
  REQUIRE(run(base + " simulate --config " + cfg_path.string() + " --out " +
              scenes.string()) == 0);
  REQUIRE(run(base + " featurize --in " + scenes.string() + " --out " + data.string()) ==
          0);
  arch::ArchSpec bad = arch::d133();
  bad.bins = 100;
  const fs::path bad_arch = tmp.path / "bad.arch";
  std::ofstream(bad_arch) << arch::to_config_text(bad);
  CHECK(run(base + " train --data " + data.string() + " --arch " + bad_arch.string() +
            " --epochs 1 --out " + (tmp.path / "m.ddoa").string()) == 3);
}
