// Copyright 2026 The fovdiff Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace fovdiff {

// Input violated a documented precondition (bad range, bad shape, bad config).
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Shapes of two grids that must agree do not.
class ShapeError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

// A file on disk does not follow its binary/text layout.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Numerical failure detected at runtime (non-finite loss, etc).
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace fovdiff
