// Copyright 2026 The fovdiff Authors.
// SPDX-License-Identifier: Apache-2.0

// fovdiff command-line front end. Progress goes to stderr; summaries that
// scripts may want to parse go to stdout as single-line JSON.

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "fovdiff/config.hpp"
#include "fovdiff/dataset.hpp"
#include "fovdiff/error.hpp"
#include "fovdiff/grid_io.hpp"
#include "fovdiff/hu.hpp"
#include "fovdiff/metrics.hpp"
#include "fovdiff/pipeline.hpp"
#include "fovdiff/plot.hpp"
#include "fovdiff/simd/kernels.hpp"

namespace fs = std::filesystem;
using fovdiff::Grid;
using fovdiff::RunConfig;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitInvalid = 2;

class Progress {
 public:
  explicit Progress(bool quiet) : quiet_(quiet), start_(std::chrono::steady_clock::now()) {}

  void operator()(const std::string& message) const {
    if (quiet_) return;
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    std::fprintf(stderr, "[%8.2fs] %s\n", elapsed, message.c_str());
  }

  fovdiff::ProgressFn fn() const {
    return [this](const std::string& m) { (*this)(m); };
  }

 private:
  bool quiet_;
  std::chrono::steady_clock::time_point start_;
};

void write_text(const std::string& path, const std::string& text) {
  const fs::path p(path);
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  out << text;
  if (!out) throw std::runtime_error("cannot write " + path);
}

RunConfig load_config(const std::string& path) {
  RunConfig config = path.empty() ? RunConfig{} : fovdiff::parse_config(path);
  fovdiff::apply_env_overrides(config);
  config.validate();
  return config;
}

Grid::Shape sample_shape(const RunConfig& config) {
  if (config.denoiser.kind == fovdiff::DenoiserKind::kGmm) {
    return Grid::Shape{1, config.denoiser.gmm.dim(), 1};
  }
  return Grid::Shape{2, config.data.phantom.rows, config.data.phantom.cols};
}

// Training images: the ground-truth images of a simulated dataset, or fresh
// phantoms drawn from the data section of the config.
std::vector<Grid> training_images(const RunConfig& config, const std::string& dataset_dir,
                                  std::size_t workers) {
  if (dataset_dir.empty()) return fovdiff::generate_training_set(config, workers);
  const auto manifest = fovdiff::read_manifest(dataset_dir);
  std::vector<Grid> images;
  images.reserve(manifest.samples.size());
  for (const auto& s : manifest.samples) {
    images.push_back(fovdiff::read_grid(fovdiff::sample_path(dataset_dir, s.id, "image")));
  }
  return images;
}

nlohmann::json aggregate_json(const fovdiff::AgreementAggregate& a) {
  return {{"tci_low", a.tci_low},
          {"tci_high", a.tci_high},
          {"count", a.count},
          {"truncated_mae", a.truncated_mae},
          {"completed_mae", a.completed_mae}};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Zero-shot field-of-view completion with resampling diffusion samplers"};
  app.require_subcommand(1);

  std::string config_path;
  std::size_t workers = 1;
  bool quiet = false;
  app.add_option("-c,--config", config_path, "run configuration file (key = value lines)");
  app.add_option("-w,--workers", workers, "per-sample worker threads")->check(CLI::PositiveNumber);
  app.add_flag("-q,--quiet", quiet, "suppress progress output on stderr");

  auto* train_cmd = app.add_subcommand("train", "train the MLP denoiser and write a checkpoint");
  std::string train_out;
  std::string train_data;
  train_cmd->add_option("-o,--out", train_out, "checkpoint path")->required();
  train_cmd->add_option("--data", train_data, "dataset directory to train on (default: fresh phantoms)");

  auto* sample_cmd = app.add_subcommand("sample", "draw unconditional samples");
  std::string sample_out;
  std::size_t sample_count = 0;
  sample_cmd->add_option("-o,--out", sample_out, "output directory")->required();
  sample_cmd->add_option("-n,--count", sample_count, "number of samples (default: sampler.count)");

  auto* inpaint_cmd = app.add_subcommand("inpaint", "complete the masked-out region of one image");
  std::string inpaint_in;
  std::string inpaint_mask;
  std::string inpaint_out;
  std::string dump_dir;
  bool inpaint_hu = false;
  inpaint_cmd->add_option("-i,--input", inpaint_in, "truncated image grid")->required();
  inpaint_cmd->add_option("-m,--mask", inpaint_mask, "mask grid, 1 = known")->required();
  inpaint_cmd->add_option("-o,--out", inpaint_out, "completed image grid")->required();
  inpaint_cmd->add_flag("--hu", inpaint_hu, "input is in HU; output is written in HU");
  inpaint_cmd->add_option("--dump-dir", dump_dir,
                          "write every output.dump_every-th intermediate state here");

  auto* simulate_cmd = app.add_subcommand("simulate", "generate a phantom/truncation dataset");
  std::string sim_out;
  std::size_t sim_count = 0;
  std::string sim_split = "test";
  simulate_cmd->add_option("-o,--out", sim_out, "dataset directory")->required();
  simulate_cmd->add_option("-n,--count", sim_count, "number of samples (default: data.count)");
  simulate_cmd->add_option("--split", sim_split, "split name recorded in the manifest");

  auto* evaluate_cmd = app.add_subcommand("evaluate", "measure SAT agreement of completions");
  std::string eval_dataset;
  std::string eval_completed;
  std::string eval_out;
  std::string eval_plot;
  evaluate_cmd->add_option("--dataset", eval_dataset, "dataset directory")->required();
  evaluate_cmd->add_option("--completed", eval_completed, "directory of <id>.completed.difg")
      ->required();
  evaluate_cmd->add_option("-o,--out", eval_out, "report prefix; writes <prefix>.json and .csv")
      ->required();
  evaluate_cmd->add_option("--plot", eval_plot, "write an SVG of SAT error against TCI");

  auto* bench_cmd = app.add_subcommand("benchmark", "simulate, inpaint and evaluate end to end");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInvalid;
  }

  const Progress progress(quiet);
  try {
    RunConfig config = load_config(config_path);
    progress(std::string("kernels: ") + fovdiff::simd::to_string(fovdiff::simd::kernels().level));

    if (*train_cmd) {
      const auto images = training_images(config, train_data, workers);
      progress("training on " + std::to_string(images.size()) + " images");
      const auto result = fovdiff::train_from_config(config, images, progress.fn());
      fovdiff::write_checkpoint(result.params, train_out);
      const auto [first, last] = fovdiff::loss_window_means(result.losses, 100);
      std::cout << nlohmann::json{{"checkpoint", train_out},
                                  {"iterations", result.losses.size()},
                                  {"initial_loss", first},
                                  {"final_loss", last}}
                       .dump()
                << "\n";
    } else if (*sample_cmd) {
      const auto schedule = fovdiff::schedule_from_config(config);
      const auto denoiser = fovdiff::make_denoiser(config);
      const std::size_t count = sample_count > 0 ? sample_count : config.sampler.count;
      progress("sampling " + std::to_string(count) + " with " +
               fovdiff::to_string(config.sampler.variant));
      const auto samples = fovdiff::sample_from_config(config, *denoiser, schedule,
                                                       sample_shape(config), count, workers);
      for (std::size_t i = 0; i < samples.size(); ++i) {
        fovdiff::write_grid((fs::path(sample_out) / (fovdiff::sample_id(i) + ".sample.difg")).string(),
                            samples[i]);
      }
    } else if (*inpaint_cmd) {
      const auto schedule = fovdiff::schedule_from_config(config);
      const auto denoiser = fovdiff::make_denoiser(config);
      Grid observed = fovdiff::read_grid(inpaint_in);
      const Grid mask = fovdiff::read_grid(inpaint_mask);
      if (inpaint_hu) {
        observed = fovdiff::normalize_hu(observed, config.data.hu_low, config.data.hu_high);
      }
      fovdiff::StepObserver dump;
      if (!dump_dir.empty()) {
        fs::create_directories(dump_dir);
        dump = [&](int level, const Grid& state) {
          char name[32];
          std::snprintf(name, sizeof name, "step_%04d.difg", level);
          fovdiff::write_grid((fs::path(dump_dir) / name).string(), state);
        };
      }
      // Same streams as sample 0 of a dataset run.
      fovdiff::Rng noise(config.sampler.seed, 0);
      fovdiff::Rng resample(config.sampler.seed, 1);
      Grid out = fovdiff::inpaint(config, *denoiser, schedule, observed, mask, noise, resample, dump);
      if (inpaint_hu) out = fovdiff::denormalize_hu(out, config.data.hu_low, config.data.hu_high);
      fovdiff::write_grid(inpaint_out, out);
    } else if (*simulate_cmd) {
      const std::size_t count = sim_count > 0 ? sim_count : config.data.count;
      progress("simulating " + std::to_string(count) + " samples");
      const auto manifest =
          fovdiff::simulate_dataset(sim_out, sim_split, count, config.data.seed,
                                    config.data.phantom, config.data.truncation, workers);
      std::cout << nlohmann::json{{"dataset", sim_out}, {"samples", manifest.samples.size()}}.dump()
                << "\n";
    } else if (*evaluate_cmd) {
      const auto eval = fovdiff::evaluate_dataset(eval_dataset, eval_completed, config.metrics.sat,
                                                  config.metrics.tci_bins);
      for (const auto& id : eval.missing) progress("no completed image for " + id);
      write_text(eval_out + ".json", fovdiff::report_to_json(eval.report));
      write_text(eval_out + ".csv", fovdiff::records_to_csv(eval.report.records));
      if (!eval_plot.empty()) write_text(eval_plot, fovdiff::agreement_svg(eval.report));
      std::cout << nlohmann::json{{"overall", aggregate_json(eval.report.overall)},
                                  {"missing", eval.missing.size()}}
                       .dump()
                << "\n";
      // Excluded samples make the report incomplete.
      if (!eval.missing.empty()) return kExitFailure;
    } else if (*bench_cmd) {
      const auto result = fovdiff::run_benchmark(config, workers, progress.fn());
      const auto& overall = result.report.overall;
      const double reduction =
          overall.truncated_mae > 0.0 ? 1.0 - overall.completed_mae / overall.truncated_mae : 0.0;
      nlohmann::json bins = nlohmann::json::array();
      for (const auto& b : result.report.bins) bins.push_back(aggregate_json(b));
      std::cout << nlohmann::json{{"output", config.output.dir},
                                  {"overall", aggregate_json(overall)},
                                  {"bins", bins},
                                  {"sat_mae_reduction", reduction},
                                  {"trained", result.trained},
                                  {"initial_loss", result.initial_loss},
                                  {"final_loss", result.final_loss},
                                  {"missing", result.missing.size()}}
                       .dump()
                << "\n";
    }
  } catch (const fovdiff::ValidationError& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return kExitInvalid;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitOk;
}
