// Copyright 2026 The fovdiff Authors.
// SPDX-License-Identifier: Apache-2.0

#include "fovdiff/grid.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

#include "fovdiff/error.hpp"

namespace fovdiff {

std::string Grid::Shape::to_string() const {
  if (ndim == 1) return "[" + std::to_string(rows) + "]";
  return "[" + std::to_string(rows) + "x" + std::to_string(cols) + "]";
}

Grid::Grid(Shape shape, double fill) : shape_(shape), values_(shape.size(), fill) {
  if (shape.ndim != 1 && shape.ndim != 2) throw ValidationError("grid ndim must be 1 or 2");
  if (shape.ndim == 1 && shape.cols != 1) throw ValidationError("1-D grid must have cols == 1");
}

Grid::Grid(std::size_t length, double fill) : Grid(Shape{1, length, 1}, fill) {}

Grid::Grid(std::size_t rows, std::size_t cols, double fill) : Grid(Shape{2, rows, cols}, fill) {}

Grid Grid::vector(std::vector<double> values) {
  Grid g;
  g.shape_ = Shape{1, values.size(), 1};
  g.values_ = std::move(values);
  return g;
}

Grid Grid::image(std::size_t rows, std::size_t cols, std::vector<double> values) {
  if (values.size() != rows * cols) {
    throw ShapeError("image payload has " + std::to_string(values.size()) + " values, expected " +
                     std::to_string(rows * cols));
  }
  Grid g;
  g.shape_ = Shape{2, rows, cols};
  g.values_ = std::move(values);
  return g;
}

bool Grid::operator==(const Grid& other) const {
  if (shape_ != other.shape_) return false;
  return values_.empty() ||
         std::memcmp(values_.data(), other.values_.data(), values_.size() * sizeof(double)) == 0;
}

void require_same_shape(const Grid& a, const Grid& b, const char* what) {
  if (!a.same_shape(b)) {
    throw ShapeError(std::string(what) + ": shape mismatch " + a.shape().to_string() + " vs " +
                     b.shape().to_string());
  }
}

double max_abs_diff(const Grid& a, const Grid& b) {
  require_same_shape(a, b, "max_abs_diff");
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a[i] - b[i]));
  return worst;
}

}  // namespace fovdiff
