// Copyright 2026 The Scalefit Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <string>
#include <vector>

namespace scalefit::svg {

struct Series {
    std::string label;
    std::vector<std::pair<double, double>> points;  // (x, y), x > 0
};

struct BaselineBand {
    double mean = 0.0;
    double stddev = 0.0;
    std::string label;
};

// Static log-x line plot: one polyline per series, optional horizontal
// baseline band. Output bytes depend only on the inputs.
std::string line_plot_logx(const std::vector<Series>& series,
                           const std::string& title,
                           const std::string& x_label,
                           const std::string& y_label,
                           const std::optional<BaselineBand>& baseline = std::nullopt);

}  // namespace scalefit::svg
