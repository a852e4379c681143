// Copyright 2026 The Apollo Optimizer Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <vector>

#include "apollo/harness.hpp"

namespace apollo {

struct PlotSeries {
  std::string label;
  std::vector<TrainRecord> trace;
};

/// Loss-versus-step line chart as a standalone SVG document. The y axis is
/// logarithmic when every finite loss is positive. Non-finite rows are
/// skipped.
std::string render_loss_svg(const std::vector<PlotSeries>& series, const std::string& title);

}  // namespace apollo
