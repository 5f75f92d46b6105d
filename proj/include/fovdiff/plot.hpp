// Copyright 2026 The fovdiff Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>

#include "fovdiff/metrics.hpp"

namespace fovdiff {

// Signed SAT error against TCI for truncated and completed images, with
// per-bin means. Plain SVG text.
std::string agreement_svg(const AgreementReport& report);

}  // namespace fovdiff
