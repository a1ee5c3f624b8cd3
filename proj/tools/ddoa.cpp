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

// Command-line surface: simulate -> featurize -> train -> eval plus the
// standalone cost analyzer. Exit codes: 0 success, 2 usage error,
// 3 validation failure, 4 runtime/data error.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "ddoa/arch.hpp"
#include "ddoa/config.hpp"
#include "ddoa/cost.hpp"
#include "ddoa/dataset.hpp"
#include "ddoa/errors.hpp"
#include "ddoa/model_io.hpp"
#include "ddoa/pipeline.hpp"

namespace {

namespace fs = std::filesystem;
using namespace ddoa;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitValidation = 3;
constexpr int kExitData = 4;

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  out << text;
}

int cmd_analyze(const std::string& sel, bool strict, const std::string& out_path,
                const std::string& reference_sel) {
  const arch::ArchSpec spec = arch::resolve(sel);
  const arch::ValidationReport vr = arch::validate(spec, strict);
  if (!vr.ok) {
    std::cerr << "architecture '" << spec.name << "' fails "
              << (strict ? "strict" : "lenient") << " validation:\n";
    for (const auto& v : vr.violations)
      std::cerr << "  [" << v.rule << "] " << v.message << "\n";
    return kExitValidation;
  }

  cost::CostReport rep;
  if (!reference_sel.empty()) {
    rep = cost::report_with_reference(spec, arch::resolve(reference_sel));
  } else if (spec.mics >= 3) {
    rep = cost::report_with_reference(
        spec, arch::baseline(spec.mics - 1, spec.mics, spec.bins));
  } else {
    rep = cost::report(spec);
  }
  const std::string text = cost::format_report(rep);
  std::cout << text;
  if (!out_path.empty()) write_text(out_path, text);
  return kExitOk;
}

int cmd_simulate(const std::string& config_path, const std::string& out_dir,
                 std::uint64_t seed, bool seed_given) {
  const config::KvMap kv = config::load_kv(config_path);
  const pipeline::GenConfig gen = pipeline::gen_config_from_kv(kv);
  const std::uint64_t run_seed =
      seed_given ? seed : std::uint64_t(config::get_int(kv, "seed", 1));

  const pipeline::SceneSetInfo info = pipeline::write_scene_set(gen, run_seed, out_dir);

  config::Manifest m;
  m.subcommand = "simulate";
  m.seed = run_seed;
  m.config_digest = config::hex64(info.config_digest);
  m.input_digests["config"] = config::hex64(config::file_digest(config_path));
  m.output_digest = config::hex64(config::file_digest(fs::path(out_dir) / "scenes.json"));
  config::write_manifest(fs::path(out_dir) / "scenes.json", m);

  std::cout << "wrote " << info.entries.size() << " scene(s) to " << out_dir
            << " (config digest " << config::hex64(info.config_digest) << ")\n";
  return kExitOk;
}

int cmd_featurize(const std::string& in_dir, const std::string& out_path) {
  config::verify_against_manifest(fs::path(in_dir) / "scenes.json");
  const dataset::Dataset ds = pipeline::featurize_scene_set(in_dir);
  dataset::save(ds, out_path);

  const pipeline::SceneSetInfo info = pipeline::read_scene_set_info(in_dir);
  config::Manifest m;
  m.subcommand = "featurize";
  m.seed = info.seed;
  m.config_digest = config::hex64(info.config_digest);
  m.input_digests["scenes"] =
      config::hex64(config::file_digest(fs::path(in_dir) / "scenes.json"));
  m.output_digest = config::hex64(config::file_digest(out_path));
  config::write_manifest(out_path, m);

  std::cout << "wrote " << ds.frames() << " frames (" << ds.bins << "x" << ds.mics
            << ", " << ds.n_classes << " classes) to " << out_path << "\n";
  return kExitOk;
}

template <typename T>
void run_training(const dataset::Dataset& ds, const arch::ArchSpec& spec,
                  const pipeline::Hyper& hp, const std::string& out_path,
                  const std::string& config_digest) {
  const pipeline::TrainResult<T> tr = pipeline::train<T>(ds, spec, hp);
  model_io::MetaMap meta;
  meta["seed"] = std::to_string(hp.seed);
  meta["config_digest"] = config_digest;
  meta["final_loss"] = std::to_string(tr.final_loss);
  meta["best_val_loss"] = std::to_string(tr.best_val_loss);
  if constexpr (sizeof(T) == 4)
    model_io::save_model_f32(tr.model, out_path, meta);
  else
    model_io::save_model_f64(tr.model, out_path, meta);
  std::cout << "initial loss " << tr.initial_loss << ", final loss " << tr.final_loss
            << ", best validation loss " << tr.best_val_loss << "\n";
}

int cmd_train(const std::string& data_path, const std::string& arch_sel,
              const std::string& out_path, const pipeline::Hyper& hp,
              const std::string& precision) {
  config::verify_against_manifest(data_path);
  const dataset::Dataset ds = dataset::load(data_path);
  const arch::ArchSpec spec = arch::resolve(arch_sel);

  std::ostringstream canon;
  canon << "arch=" << spec.name << ";lr=" << hp.lr << ";batch=" << hp.batch
        << ";epochs=" << hp.epochs << ";dropout=" << hp.dropout << ";seed=" << hp.seed
        << ";data=" << config::hex64(ds.config_digest) << ";precision=" << precision;
  const std::string digest = config::hex64(config::fnv1a64(canon.str()));

  if (precision == "f64")
    run_training<double>(ds, spec, hp, out_path, digest);
  else if (precision == "f32")
    run_training<float>(ds, spec, hp, out_path, digest);
  else
    throw ConfigError("precision must be f32 or f64, got '" + precision + "'");

  config::Manifest m;
  m.subcommand = "train";
  m.seed = hp.seed;
  m.config_digest = digest;
  m.input_digests["dataset"] = config::hex64(config::file_digest(data_path));
  m.output_digest = config::hex64(config::file_digest(out_path));
  config::write_manifest(out_path, m);
  std::cout << "wrote model to " << out_path << "\n";
  return kExitOk;
}

template <typename T>
pipeline::EvalResult eval_with(const nn::Model<T>& model,
                               const std::vector<pipeline::BlockSample>& blocks, int L,
                               const pipeline::EvalOptions& opts) {
  return pipeline::evaluate(model, blocks, L, opts);
}

int cmd_eval(const std::string& model_path, const std::string& scenes_dir, int L,
             const std::string& out_path, pipeline::EvalOptions opts) {
  config::verify_against_manifest(model_path);
  config::verify_against_manifest(fs::path(scenes_dir) / "scenes.json");

  const pipeline::SceneSetInfo info = pipeline::read_scene_set_info(scenes_dir);
  const std::vector<pipeline::BlockSample> blocks =
      pipeline::load_eval_blocks(scenes_dir, opts.block_frames);
  if (blocks.empty()) throw DataError("scene set is empty: " + scenes_dir);
  if (L <= 0) L = int(blocks.front().truth_deg.size());

  const model_io::LoadedModel raw = model_io::load_model_raw(model_path);
  pipeline::EvalResult res;
  if (raw.scalar_width == 4)
    res = eval_with(model_io::load_model_f32(model_path), blocks, L, opts);
  else
    res = eval_with(model_io::load_model_f64(model_path), blocks, L, opts);

  const std::string text = pipeline::format_eval_report(
      res, config::hex64(info.config_digest), info.seed, opts);
  std::cout << text;
  if (!out_path.empty()) {
    write_text(out_path, text);
    config::Manifest m;
    m.subcommand = "eval";
    m.seed = info.seed;
    m.config_digest = config::hex64(info.config_digest);
    m.input_digests["model"] = config::hex64(config::file_digest(model_path));
    m.input_digests["scenes"] =
        config::hex64(config::file_digest(fs::path(scenes_dir) / "scenes.json"));
    m.output_digest = config::hex64(config::file_digest(out_path));
    config::write_manifest(out_path, m);
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ddoa: multi-speaker direction-of-arrival estimation toolkit"};
  app.require_subcommand(1);

  // analyze
  auto* analyze = app.add_subcommand("analyze", "FLOP/parameter cost report");
  std::string an_arch, an_out, an_ref;
  bool an_strict = false;
  analyze->add_option("--arch", an_arch, "baseline:N | f2342 | d1123 | d133 | file")
      ->required();
  analyze->add_flag("--strict", an_strict, "enforce the dilation design rules");
  analyze->add_option("--out", an_out, "also write the report to this file");
  analyze->add_option("--reference", an_ref, "ratio reference architecture");

  // simulate
  auto* simulate = app.add_subcommand("simulate", "render scene audio from a config");
  std::string si_config, si_out;
  std::uint64_t si_seed = 0;
  simulate->add_option("--config", si_config, "scene-set config file")->required();
  simulate->add_option("--out", si_out, "output directory")->required();
  auto* si_seed_opt = simulate->add_option("--seed", si_seed, "override config seed");

  // featurize
  auto* featurize = app.add_subcommand("featurize", "phase-map dataset from scenes");
  std::string fe_in, fe_out;
  featurize->add_option("--in", fe_in, "scene directory from `simulate`")->required();
  featurize->add_option("--out", fe_out, "dataset file to write")->required();

  // train
  auto* train = app.add_subcommand("train", "train a model on a dataset");
  std::string tr_data, tr_arch = "d1123", tr_out, tr_precision = "f32";
  pipeline::Hyper hp;
  train->add_option("--data", tr_data, "dataset file")->required();
  train->add_option("--arch", tr_arch, "architecture selector");
  train->add_option("--out", tr_out, "model file to write")->required();
  train->add_option("--lr", hp.lr, "Adam learning rate");
  train->add_option("--batch", hp.batch, "batch size");
  train->add_option("--epochs", hp.epochs, "training epochs");
  train->add_option("--dropout", hp.dropout, "hidden-layer dropout rate");
  train->add_option("--seed", hp.seed, "training seed");
  train->add_option("--precision", tr_precision, "f32 or f64");

  // eval
  auto* eval = app.add_subcommand("eval", "evaluate a model on a scene set");
  std::string ev_model, ev_scenes, ev_out;
  int ev_L = 0;
  pipeline::EvalOptions ev_opts;
  eval->add_option("--model", ev_model, "model file")->required();
  eval->add_option("--scenes", ev_scenes, "scene directory from `simulate`")->required();
  eval->add_option("--L", ev_L, "number of sources (default: from scene truth)");
  eval->add_option("--out", ev_out, "also write the report to this file");
  eval->add_option("--block-frames", ev_opts.block_frames, "frames per block");
  eval->add_option("--threshold", ev_opts.correct_threshold_deg,
                   "correctness threshold in degrees");
  eval->add_flag("--block-level", ev_opts.block_level,
                 "count a block correct only when all L estimates match");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*analyze) return cmd_analyze(an_arch, an_strict, an_out, an_ref);
    if (*simulate) return cmd_simulate(si_config, si_out, si_seed, si_seed_opt->count() > 0);
    if (*featurize) return cmd_featurize(fe_in, fe_out);
    if (*train) return cmd_train(tr_data, tr_arch, tr_out, hp, tr_precision);
    if (*eval) return cmd_eval(ev_model, ev_scenes, ev_L, ev_out, ev_opts);
  } catch (const InfeasibleArchitectureError& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const DimensionError& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const ConfigError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  }
  return kExitUsage;
}
