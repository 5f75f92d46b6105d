// Copyright 2026 The fovdiff Authors.
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "fovdiff/config.hpp"
#include "fovdiff/dataset.hpp"
#include "fovdiff/error.hpp"
#include "fovdiff/grid_io.hpp"
#include "fovdiff/hu.hpp"
#include "fovdiff/rng.hpp"

namespace fovdiff {
namespace {

namespace fs = std::filesystem;

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("fovdiff_cli_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void spit(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(FOVDIFF_CLI_PATH) + " -q " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

// Key named by the ConfigError thrown for `text`, or "" if parsing succeeds.
std::string failing_key(const std::string& text) {
  try {
    parse_config_text(text).validate();
  } catch (const ConfigError& e) {
    return e.key();
  }
  return "";
}

TEST(Config, EmptyTextKeepsDefaults) {
  const RunConfig c = parse_config_text("");
  EXPECT_EQ(c.schedule.steps, 1000);
  EXPECT_EQ(c.sampler.n_steps, 50);
  EXPECT_EQ(c.sampler.resample_count, 20);
  EXPECT_TRUE(c.sampler.reuse_eps);
  EXPECT_FALSE(c.sampler.clip_x0);
  EXPECT_EQ(c.train.embed_dim, 16u);
  EXPECT_NO_THROW(c.validate());
  EXPECT_EQ(config_to_text(parse_config_text(config_to_text(c))), config_to_text(c));
}

TEST(Config, ErrorsNameTheOffendingKey) {
  EXPECT_EQ(failing_key("sampler.n_steps = 0\n"), "sampler.n_steps");
  EXPECT_EQ(failing_key("sampler.eta = 0.0\n"), "sampler.eta");
  EXPECT_EQ(failing_key("sampler.U = 2\nsampler.U = 3\n"), "sampler.U");
  EXPECT_EQ(failing_key("schedule.T = ten\n"), "schedule.T");
  EXPECT_EQ(failing_key("sampler.n_steps = 2000\n"), "sampler.n_steps");
  EXPECT_EQ(failing_key("# comment only\nsampler.U = 5  # trailing\n"), "");
}

TEST(Config, SeedEnvironmentOverride) {
  RunConfig c = parse_config_text("sampler.seed = 1\n");
  ::setenv("DIFG_SEED", "77", 1);
  apply_env_overrides(c);
  ::unsetenv("DIFG_SEED");
  EXPECT_EQ(c.sampler.seed, 77u);
  EXPECT_EQ(c.data.seed, 77u);
  EXPECT_EQ(c.train.seed, 77u);
}

TEST(GridIo, SmallFloat32Layout) {
  const Grid g = Grid::image(2, 2, {1.0, -2.0, 0.5, 0.25});
  const std::string bytes = encode_grid(g, GridDtype::kF32);
  // magic 4 + version 4 + ndim 4 + dims 8 + dtype 1 + payload 16 = 37
  EXPECT_EQ(bytes.size(), 37u);
  EXPECT_EQ(bytes.substr(0, 4), "DIFG");
  const DecodedGrid d = decode_grid(bytes);
  EXPECT_EQ(d.grid, g);
  EXPECT_EQ(d.dtype, GridDtype::kF32);
}

TEST(GridIo, MalformedInputs) {
  EXPECT_THROW(decode_grid("XXXX"), FormatError);
  EXPECT_THROW(decode_grid(""), FormatError);
  const std::string good = encode_grid(Grid::image(3, 3, std::vector<double>(9, 1.0)));
  EXPECT_THROW(decode_grid(good.substr(0, good.size() - 1)), FormatError);
  EXPECT_THROW(decode_grid(good + "x"), FormatError);
  std::string huge = good.substr(0, 12);
  huge += std::string("\xff\xff\xff\xff\xff\xff\xff\xff", 8);
  huge += '\x02';
  EXPECT_THROW(decode_grid(huge), FormatError);
  std::string bad_version = good;
  bad_version[4] = 9;
  EXPECT_THROW(decode_grid(bad_version), FormatError);
}

TEST(GridIo, RoundTripBothDtypesAndFiles) {
  Rng rng(41);
  const fs::path dir = fresh_dir("gridio");
  for (int trial = 0; trial < 20; ++trial) {
    const auto rows = static_cast<std::size_t>(rng.uniform_int(1, 20));
    const auto cols = static_cast<std::size_t>(rng.uniform_int(1, 20));
    Grid g(rows, cols);
    rng.fill_normal(g.values());
    EXPECT_EQ(decode_grid(encode_grid(g)).grid, g);
    const Grid f32 = decode_grid(encode_grid(g, GridDtype::kF32)).grid;
    for (std::size_t i = 0; i < g.size(); ++i) {
      EXPECT_EQ(f32[i], static_cast<double>(static_cast<float>(g[i])));
    }
    write_grid((dir / "g.difg").string(), g);
    EXPECT_EQ(read_grid((dir / "g.difg").string()), g);
  }
  EXPECT_THROW(read_grid((dir / "missing.difg").string()), FormatError);
  fs::remove_all(dir);
}

TEST(Hu, WindowExamples) {
  EXPECT_DOUBLE_EQ(normalize_hu(-1000.0), -1.0);
  EXPECT_DOUBLE_EQ(normalize_hu(600.0), 1.0);
  EXPECT_DOUBLE_EQ(normalize_hu(-200.0), 0.0);
  EXPECT_DOUBLE_EQ(normalize_hu(-3000.0), -1.0);
  EXPECT_DOUBLE_EQ(normalize_hu(2000.0), 1.0);
  EXPECT_DOUBLE_EQ(denormalize_hu(0.0), -200.0);
  EXPECT_THROW(normalize_hu(0.0, 10.0, 10.0), ValidationError);
}

TEST(Hu, InverseInsideWindow) {
  Rng rng(42);
  for (int i = 0; i < 1000; ++i) {
    const double hu = rng.uniform(-1000.0, 600.0);
    EXPECT_NEAR(denormalize_hu(normalize_hu(hu)), hu, 1e-6);
  }
  const Grid g = Grid::vector({-1000.0, 0.0, 600.0});
  EXPECT_LT(max_abs_diff(denormalize_hu(normalize_hu(g)), g), 1e-9);
}

TEST(Manifest, JsonRoundTrip) {
  Rng rng(43);
  DatasetManifest m{"val", 64, 48, -1.0, 9, {}};
  for (std::size_t i = 0; i < 5; ++i) {
    m.samples.push_back({sample_id(i), rng.engine()(),
                         {rng.uniform(), rng.uniform(), rng.uniform(), rng.uniform(), rng.uniform()},
                         rng.uniform(), rng.uniform(), rng.uniform(), rng.uniform()});
  }
  const DatasetManifest back = manifest_from_json(manifest_to_json(m));
  EXPECT_EQ(manifest_to_json(back), manifest_to_json(m));
  EXPECT_EQ(back.samples.size(), 5u);
  EXPECT_EQ(back.samples[3].seed, m.samples[3].seed);
  EXPECT_EQ(back.samples[3].tci, m.samples[3].tci);
}

TEST(Cli, ExitCodes) {
  const fs::path dir = fresh_dir("exit");
  spit(dir / "bad_steps.cfg", "sampler.n_steps = 0\n");
  spit(dir / "unknown.cfg", "sampler.eta = 0\n");
  EXPECT_EQ(run_cli("-c " + (dir / "bad_steps.cfg").string() + " sample -o " +
                    (dir / "s").string()),
            2);
  EXPECT_EQ(run_cli("-c " + (dir / "unknown.cfg").string() + " sample -o " +
                    (dir / "s").string()),
            2);
  EXPECT_EQ(run_cli(""), 2);
  EXPECT_EQ(run_cli("inpaint -i " + (dir / "nope.difg").string() + " -m " +
                    (dir / "nope.difg").string() + " -o " + (dir / "out.difg").string()),
            1);
  EXPECT_EQ(run_cli("simulate -n 2 -o " + (dir / "ds").string()), 0);
  fs::remove_all(dir);
}

TEST(Cli, WorkerCountDoesNotChangeArtifacts) {
  const fs::path dir = fresh_dir("workers");
  spit(dir / "run.cfg",
       "data.rows = 32\ndata.cols = 32\nsampler.n_steps = 10\nsampler.U = 2\n"
       "denoiser.gmm.means = 0, 0, 0, 0 ; 1, 1, 1, 1\n"
       "denoiser.gmm.variances = 1, 1, 1, 1 ; 0.5, 0.5, 0.5, 0.5\n"
       "denoiser.gmm.weights = 0.5, 0.5\n");
  const std::string cfg = "-c " + (dir / "run.cfg").string();
  for (const char* w : {"1", "3"}) {
    const fs::path ds = dir / (std::string("ds") + w);
    const fs::path smp = dir / (std::string("smp") + w);
    ASSERT_EQ(run_cli(cfg + " -w " + w + " simulate -n 5 -o " + ds.string()), 0);
    ASSERT_EQ(run_cli(cfg + " -w " + w + " sample -n 4 -o " + smp.string()), 0);
  }
  for (const char* sub : {"ds", "smp"}) {
    const fs::path a = dir / (std::string(sub) + "1");
    const fs::path b = dir / (std::string(sub) + "3");
    std::size_t files = 0;
    for (const auto& entry : fs::directory_iterator(a)) {
      const fs::path other = b / entry.path().filename();
      ASSERT_TRUE(fs::exists(other)) << other;
      EXPECT_EQ(slurp(entry.path()), slurp(other)) << entry.path().filename();
      ++files;
    }
    EXPECT_GT(files, 0u);
  }
  fs::remove_all(dir);
}

}  // namespace
}  // namespace fovdiff
