// Copyright 2026 The Scalefit Authors.
// SPDX-License-Identifier: Apache-2.0

#include "scalefit/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "scalefit/errors.hpp"

namespace scalefit::svg {

namespace {

constexpr double kWidth = 880.0, kHeight = 560.0;
constexpr double kLeft = 72.0, kRight = 30.0, kTop = 42.0, kBottom = 54.0;

const char* kPalette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
                          "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

std::string fmt_tick(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4g", v);
    return buf;
}

std::string escape(const std::string& s) {
    std::string out;
    for (const char c : s) {
        if (c == '&')
            out += "&amp;";
        else if (c == '<')
            out += "&lt;";
        else if (c == '>')
            out += "&gt;";
        else
            out += c;
    }
    return out;
}

}  // namespace

std::string line_plot_logx(const std::vector<Series>& series, const std::string& title,
                           const std::string& x_label, const std::string& y_label,
                           const std::optional<BaselineBand>& baseline) {
    double x_min = std::numeric_limits<double>::infinity(), x_max = 0.0;
    double y_min = std::numeric_limits<double>::infinity();
    double y_max = -std::numeric_limits<double>::infinity();
    for (const auto& s : series)
        for (const auto& [x, y] : s.points) {
            if (!(x > 0.0)) throw Error("svg: log axis needs positive x");
            x_min = std::min(x_min, x);
            x_max = std::max(x_max, x);
            y_min = std::min(y_min, y);
            y_max = std::max(y_max, y);
        }
    if (!(x_min <= x_max)) throw Error("svg: nothing to plot");
    if (baseline) {
        y_min = std::min(y_min, baseline->mean - baseline->stddev);
        y_max = std::max(y_max, baseline->mean + baseline->stddev);
    }
    if (x_min == x_max) {
        x_min /= 2.0;
        x_max *= 2.0;
    }
    if (y_min == y_max) {
        y_min -= 0.5;
        y_max += 0.5;
    }
    const double y_pad = 0.06 * (y_max - y_min);
    y_min -= y_pad;
    y_max += y_pad;

    const double lx_min = std::log10(x_min), lx_max = std::log10(x_max);
    const auto sx = [&](double x) {
        return kLeft + (std::log10(x) - lx_min) / (lx_max - lx_min) * (kWidth - kLeft - kRight);
    };
    const auto sy = [&](double y) {
        return kHeight - kBottom - (y - y_min) / (y_max - y_min) * (kHeight - kTop - kBottom);
    };

    std::string out;
    out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fmt(kWidth) + "\" height=\"" +
           fmt(kHeight) + "\" viewBox=\"0 0 " + fmt(kWidth) + " " + fmt(kHeight) + "\">\n";
    out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out += "<text x=\"" + fmt(kWidth / 2) + "\" y=\"24\" text-anchor=\"middle\" "
           "font-family=\"sans-serif\" font-size=\"16\">" + escape(title) + "</text>\n";

    // axes frame
    out += "<rect x=\"" + fmt(kLeft) + "\" y=\"" + fmt(kTop) + "\" width=\"" +
           fmt(kWidth - kLeft - kRight) + "\" height=\"" + fmt(kHeight - kTop - kBottom) +
           "\" fill=\"none\" stroke=\"#333333\"/>\n";

    // x ticks at integer decades
    for (int dec = static_cast<int>(std::ceil(lx_min)); dec <= static_cast<int>(std::floor(lx_max));
         ++dec) {
        const double x = sx(std::pow(10.0, dec));
        out += "<line x1=\"" + fmt(x) + "\" y1=\"" + fmt(kHeight - kBottom) + "\" x2=\"" + fmt(x) +
               "\" y2=\"" + fmt(kHeight - kBottom + 5) + "\" stroke=\"#333333\"/>\n";
        out += "<text x=\"" + fmt(x) + "\" y=\"" + fmt(kHeight - kBottom + 18) +
               "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">1e" +
               std::to_string(dec) + "</text>\n";
    }
    // y ticks
    for (int i = 0; i <= 5; ++i) {
        const double yv = y_min + (y_max - y_min) * i / 5.0;
        const double y = sy(yv);
        out += "<line x1=\"" + fmt(kLeft - 5) + "\" y1=\"" + fmt(y) + "\" x2=\"" + fmt(kLeft) +
               "\" y2=\"" + fmt(y) + "\" stroke=\"#333333\"/>\n";
        out += "<text x=\"" + fmt(kLeft - 8) + "\" y=\"" + fmt(y + 4) +
               "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" +
               fmt_tick(yv) + "</text>\n";
    }
    out += "<text x=\"" + fmt(kWidth / 2) + "\" y=\"" + fmt(kHeight - 12) +
           "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">" +
           escape(x_label) + "</text>\n";
    out += "<text x=\"18\" y=\"" + fmt(kHeight / 2) + "\" text-anchor=\"middle\" "
           "font-family=\"sans-serif\" font-size=\"13\" transform=\"rotate(-90 18 " +
           fmt(kHeight / 2) + ")\">" + escape(y_label) + "</text>\n";

    if (baseline) {
        const double top = sy(baseline->mean + baseline->stddev);
        const double bottom = sy(baseline->mean - baseline->stddev);
        out += "<rect x=\"" + fmt(kLeft) + "\" y=\"" + fmt(top) + "\" width=\"" +
               fmt(kWidth - kLeft - kRight) + "\" height=\"" + fmt(bottom - top) +
               "\" fill=\"#bbbbbb\" fill-opacity=\"0.35\"/>\n";
        out += "<line x1=\"" + fmt(kLeft) + "\" y1=\"" + fmt(sy(baseline->mean)) + "\" x2=\"" +
               fmt(kWidth - kRight) + "\" y2=\"" + fmt(sy(baseline->mean)) +
               "\" stroke=\"#111111\" stroke-dasharray=\"6,3\"/>\n";
        if (!baseline->label.empty())
            out += "<text x=\"" + fmt(kWidth - kRight - 4) + "\" y=\"" +
                   fmt(sy(baseline->mean) - 5) +
                   "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" +
                   escape(baseline->label) + "</text>\n";
    }

    for (std::size_t s = 0; s < series.size(); ++s) {
        const char* color = kPalette[s % (sizeof(kPalette) / sizeof(kPalette[0]))];
        std::string points;
        for (const auto& [x, y] : series[s].points)
            points += fmt(sx(x)) + "," + fmt(sy(y)) + " ";
        out += "<polyline fill=\"none\" stroke=\"" + std::string(color) +
               "\" stroke-width=\"1.8\" points=\"" + points + "\"/>\n";
        // legend entry
        const double ly = kTop + 16.0 + 16.0 * static_cast<double>(s);
        out += "<line x1=\"" + fmt(kLeft + 10) + "\" y1=\"" + fmt(ly - 4) + "\" x2=\"" +
               fmt(kLeft + 34) + "\" y2=\"" + fmt(ly - 4) + "\" stroke=\"" + color +
               "\" stroke-width=\"2\"/>\n";
        out += "<text x=\"" + fmt(kLeft + 40) + "\" y=\"" + fmt(ly) +
               "\" font-family=\"sans-serif\" font-size=\"11\">" + escape(series[s].label) +
               "</text>\n";
    }

    out += "</svg>\n";
    return out;
}

}  // namespace scalefit::svg
