// Copyright 2026 The fovdiff Authors.
// SPDX-License-Identifier: Apache-2.0

#include "fovdiff/grid_io.hpp"

#include <filesystem>
#include <fstream>
#include <iterator>
#include <limits>

#include "binary_io.hpp"
#include "fovdiff/error.hpp"

namespace fovdiff {

namespace detail {

std::string read_file_bytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path);
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

void write_file_bytes(const std::string& path, std::string_view bytes) {
  const std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw FormatError("cannot write " + path);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw FormatError("short write to " + path);
}

}  // namespace detail

namespace {
constexpr std::string_view kGridMagic = "DIFG";
}

std::string encode_grid(const Grid& grid, GridDtype dtype) {
  constexpr auto kMax = std::numeric_limits<std::uint32_t>::max();
  if (grid.rows() > kMax || grid.cols() > kMax) throw ValidationError("grid too large to encode");
  detail::ByteWriter w;
  w.raw(kGridMagic);
  w.u32(kGridFormatVersion);
  w.u32(static_cast<std::uint32_t>(grid.ndim()));
  w.u32(static_cast<std::uint32_t>(grid.rows()));
  if (grid.ndim() == 2) w.u32(static_cast<std::uint32_t>(grid.cols()));
  w.u8(static_cast<std::uint8_t>(dtype));
  switch (dtype) {
    case GridDtype::kF32:
      for (double v : grid.values()) w.f32(static_cast<float>(v));
      break;
    case GridDtype::kF64:
      for (double v : grid.values()) w.f64(v);
      break;
    default:
      throw ValidationError("unknown grid dtype");
  }
  return w.take();
}

DecodedGrid decode_grid(std::string_view bytes) {
  detail::ByteReader r(bytes, "grid file");
  if (bytes.size() < 4 || r.raw(4) != kGridMagic) throw FormatError("grid file: bad magic");
  const std::uint32_t version = r.u32();
  if (version != kGridFormatVersion) {
    throw FormatError("grid file: unsupported version " + std::to_string(version));
  }
  const std::uint32_t ndim = r.u32();
  if (ndim != 1 && ndim != 2) throw FormatError("grid file: ndim must be 1 or 2");
  const std::uint64_t rows = r.u32();
  const std::uint64_t cols = ndim == 2 ? r.u32() : 1;
  const std::uint8_t tag = r.u8();
  std::uint64_t width = 0;
  if (tag == static_cast<std::uint8_t>(GridDtype::kF32)) {
    width = 4;
  } else if (tag == static_cast<std::uint8_t>(GridDtype::kF64)) {
    width = 8;
  } else {
    throw FormatError("grid file: unknown dtype tag " + std::to_string(tag));
  }
  // rows, cols < 2^32 so the element count fits; the byte count may not.
  const std::uint64_t count = rows * cols;
  if (count > std::numeric_limits<std::size_t>::max() / width) {
    throw FormatError("grid file: dimension overflow");
  }
  if (count * width > r.remaining()) throw FormatError("grid file: truncated payload");
  if (count * width != r.remaining()) throw FormatError("grid file: trailing bytes");

  Grid grid = ndim == 1 ? Grid(static_cast<std::size_t>(rows))
                        : Grid(static_cast<std::size_t>(rows), static_cast<std::size_t>(cols));
  for (double& v : grid.values()) v = width == 4 ? static_cast<double>(r.f32()) : r.f64();
  return {std::move(grid), static_cast<GridDtype>(tag)};
}

void write_grid(const std::string& path, const Grid& grid, GridDtype dtype) {
  detail::write_file_bytes(path, encode_grid(grid, dtype));
}

Grid read_grid(const std::string& path) {
  return decode_grid(detail::read_file_bytes(path)).grid;
}

}  // namespace fovdiff
