// Copyright 2026 The fovdiff Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace fovdiff {

/// Dense row-major array of doubles, either a 1-D vector or a 2-D image.
///
/// Every sample, noisy state, mask and label map in the engine is a Grid.
/// Masks hold exact 0/1 values and label maps exact 0/1/2 values.
class Grid {
 public:
  struct Shape {
    std::size_t ndim = 1;
    std::size_t rows = 0;
    std::size_t cols = 1;

    std::size_t size() const { return rows * cols; }
    bool operator==(const Shape&) const = default;
    std::string to_string() const;
  };

  Grid() = default;
  explicit Grid(Shape shape, double fill = 0.0);
  explicit Grid(std::size_t length, double fill = 0.0);
  Grid(std::size_t rows, std::size_t cols, double fill = 0.0);

  static Grid vector(std::vector<double> values);
  static Grid image(std::size_t rows, std::size_t cols, std::vector<double> values);

  const Shape& shape() const { return shape_; }
  std::size_t ndim() const { return shape_.ndim; }
  std::size_t rows() const { return shape_.rows; }
  std::size_t cols() const { return shape_.cols; }
  std::size_t size() const { return values_.size(); }
  bool empty() const { return values_.empty(); }

  double& operator[](std::size_t i) { return values_[i]; }
  double operator[](std::size_t i) const { return values_[i]; }
  double& at(std::size_t r, std::size_t c) { return values_[r * shape_.cols + c]; }
  double at(std::size_t r, std::size_t c) const { return values_[r * shape_.cols + c]; }

  std::span<double> values() { return values_; }
  std::span<const double> values() const { return values_; }
  double* data() { return values_.data(); }
  const double* data() const { return values_.data(); }

  bool same_shape(const Grid& other) const { return shape_ == other.shape_; }

  // Bitwise equality of shape and payload.
  bool operator==(const Grid& other) const;

 private:
  Shape shape_{};
  std::vector<double> values_;
};

// Throws ShapeError naming `what` when the shapes differ.
void require_same_shape(const Grid& a, const Grid& b, const char* what);

double max_abs_diff(const Grid& a, const Grid& b);

}  // namespace fovdiff
