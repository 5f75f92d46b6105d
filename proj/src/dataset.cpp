// Copyright 2026 The fovdiff Authors.
// SPDX-License-Identifier: Apache-2.0

#include "fovdiff/dataset.hpp"

#include <cstdio>
#include <filesystem>

#include <json.hpp>

#include "binary_io.hpp"
#include "fovdiff/error.hpp"
#include "fovdiff/grid_io.hpp"
#include "fovdiff/parallel.hpp"

namespace fovdiff {

using nlohmann::json;

std::string sample_id(std::size_t index) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "s%05zu", index);
  return buf;
}

SimulatedSample simulate_sample(std::size_t index, std::uint64_t seed,
                                const PhantomConfig& phantom, const TruncationConfig& truncation) {
  SimulatedSample s;
  s.record.id = sample_id(index);
  s.record.seed = derive_seed(seed, index);
  Rng rng(s.record.seed);
  s.phantom = generate_phantom(rng, phantom);
  Truncation tr = sample_truncation(rng, s.phantom, truncation);
  s.record.geometry = s.phantom.geometry;
  s.record.fov_center_row = tr.center_row;
  s.record.fov_center_col = tr.center_col;
  s.record.fov_radius = tr.radius;
  s.record.tci = tr.tci;
  s.truncated = apply_truncation(s.phantom.image, tr.mask, truncation.fill);
  s.mask = std::move(tr.mask);
  return s;
}

std::string sample_path(const std::string& dir, const std::string& id, const std::string& kind) {
  return (std::filesystem::path(dir) / (id + "." + kind + ".difg")).string();
}

DatasetManifest simulate_dataset(const std::string& dir, const std::string& split,
                                 std::size_t count, std::uint64_t seed,
                                 const PhantomConfig& phantom, const TruncationConfig& truncation,
                                 std::size_t workers) {
  phantom.validate();
  truncation.validate();
  DatasetManifest manifest{split, phantom.rows, phantom.cols, truncation.fill, seed, {}};
  manifest.samples.resize(count);
  std::filesystem::create_directories(dir);
  parallel_for(count, workers, [&](std::size_t i) {
    SimulatedSample s = simulate_sample(i, seed, phantom, truncation);
    write_grid(sample_path(dir, s.record.id, "image"), s.phantom.image);
    write_grid(sample_path(dir, s.record.id, "labels"), s.phantom.labels, GridDtype::kF32);
    write_grid(sample_path(dir, s.record.id, "mask"), s.mask, GridDtype::kF32);
    write_grid(sample_path(dir, s.record.id, "truncated"), s.truncated);
    manifest.samples[i] = std::move(s.record);
  });
  write_manifest(dir, manifest);
  return manifest;
}

std::string manifest_to_json(const DatasetManifest& manifest) {
  json samples = json::array();
  for (const auto& r : manifest.samples) {
    samples.push_back({
        {"id", r.id},
        {"seed", r.seed},
        {"geometry",
         {{"center_row", r.geometry.center_row},
          {"center_col", r.geometry.center_col},
          {"semi_axis_row", r.geometry.semi_axis_row},
          {"semi_axis_col", r.geometry.semi_axis_col},
          {"fat_thickness", r.geometry.fat_thickness}}},
        {"fov", {{"center_row", r.fov_center_row}, {"center_col", r.fov_center_col}, {"radius", r.fov_radius}}},
        {"tci", r.tci},
    });
  }
  json doc = {{"split", manifest.split}, {"rows", manifest.rows}, {"cols", manifest.cols},
              {"fill", manifest.fill},   {"seed", manifest.seed}, {"samples", samples}};
  return doc.dump(2) + "\n";
}

DatasetManifest manifest_from_json(const std::string& text) {
  try {
    const json doc = json::parse(text);
    DatasetManifest m;
    m.split = doc.at("split").get<std::string>();
    m.rows = doc.at("rows").get<std::size_t>();
    m.cols = doc.at("cols").get<std::size_t>();
    m.fill = doc.at("fill").get<double>();
    m.seed = doc.at("seed").get<std::uint64_t>();
    for (const auto& s : doc.at("samples")) {
      SampleRecord r;
      r.id = s.at("id").get<std::string>();
      r.seed = s.at("seed").get<std::uint64_t>();
      const auto& g = s.at("geometry");
      r.geometry = {g.at("center_row").get<double>(), g.at("center_col").get<double>(),
                    g.at("semi_axis_row").get<double>(), g.at("semi_axis_col").get<double>(),
                    g.at("fat_thickness").get<double>()};
      const auto& f = s.at("fov");
      r.fov_center_row = f.at("center_row").get<double>();
      r.fov_center_col = f.at("center_col").get<double>();
      r.fov_radius = f.at("radius").get<double>();
      r.tci = s.at("tci").get<double>();
      m.samples.push_back(std::move(r));
    }
    return m;
  } catch (const json::exception& e) {
    throw FormatError(std::string("manifest: ") + e.what());
  }
}

void write_manifest(const std::string& dir, const DatasetManifest& manifest) {
  detail::write_file_bytes((std::filesystem::path(dir) / "manifest.json").string(),
                           manifest_to_json(manifest));
}

DatasetManifest read_manifest(const std::string& dir) {
  return manifest_from_json(
      detail::read_file_bytes((std::filesystem::path(dir) / "manifest.json").string()));
}

}  // namespace fovdiff
