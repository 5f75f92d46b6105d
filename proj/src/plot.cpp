// Copyright 2026 The fovdiff Authors.
// SPDX-License-Identifier: Apache-2.0

#include "fovdiff/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace fovdiff {

namespace {

constexpr double kWidth = 640.0;
constexpr double kHeight = 400.0;
constexpr double kLeft = 70.0;
constexpr double kRight = 20.0;
constexpr double kTop = 30.0;
constexpr double kBottom = 50.0;

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

}  // namespace

std::string agreement_svg(const AgreementReport& report) {
  double lo = -1.0;
  double hi = 1.0;
  double tci_max = 0.0;
  for (const auto& r : report.records) {
    lo = std::min({lo, r.sat_truncated - r.sat_true, r.sat_completed - r.sat_true});
    hi = std::max({hi, r.sat_truncated - r.sat_true, r.sat_completed - r.sat_true});
    tci_max = std::max(tci_max, r.tci);
  }
  const double x_max = std::max(0.4, std::ceil(tci_max * 10.0) / 10.0);
  const double pad = 0.05 * (hi - lo);
  lo -= pad;
  hi += pad;
  const double plot_w = kWidth - kLeft - kRight;
  const double plot_h = kHeight - kTop - kBottom;
  auto px = [&](double tci) { return kLeft + plot_w * tci / x_max; };
  auto py = [&](double err) { return kTop + plot_h * (hi - err) / (hi - lo); };

  std::string svg;
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(kWidth) + "\" height=\"" +
         num(kHeight) + "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg += "<text x=\"" + num(kWidth / 2) + "\" y=\"18\" text-anchor=\"middle\">SAT error vs TCI</text>\n";
  // axes and zero line
  svg += "<line x1=\"" + num(kLeft) + "\" y1=\"" + num(kTop + plot_h) + "\" x2=\"" +
         num(kLeft + plot_w) + "\" y2=\"" + num(kTop + plot_h) + "\" stroke=\"black\"/>\n";
  svg += "<line x1=\"" + num(kLeft) + "\" y1=\"" + num(kTop) + "\" x2=\"" + num(kLeft) +
         "\" y2=\"" + num(kTop + plot_h) + "\" stroke=\"black\"/>\n";
  svg += "<line x1=\"" + num(kLeft) + "\" y1=\"" + num(py(0.0)) + "\" x2=\"" +
         num(kLeft + plot_w) + "\" y2=\"" + num(py(0.0)) + "\" stroke=\"#888\" stroke-dasharray=\"4 3\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double tci = x_max * i / 4.0;
    svg += "<text x=\"" + num(px(tci)) + "\" y=\"" + num(kTop + plot_h + 16) +
           "\" text-anchor=\"middle\">" + num(tci) + "</text>\n";
    const double err = lo + (hi - lo) * i / 4.0;
    svg += "<text x=\"" + num(kLeft - 6) + "\" y=\"" + num(py(err) + 4) +
           "\" text-anchor=\"end\">" + num(err) + "</text>\n";
  }
  svg += "<text x=\"" + num(kLeft + plot_w / 2) + "\" y=\"" + num(kHeight - 10) +
         "\" text-anchor=\"middle\">TCI</text>\n";
  svg += "<text x=\"16\" y=\"" + num(kTop + plot_h / 2) + "\" transform=\"rotate(-90 16 " +
         num(kTop + plot_h / 2) + ")\" text-anchor=\"middle\">SAT error (pixels)</text>\n";
  // bin separators
  for (std::size_t b = 1; b < report.bin_edges.size(); ++b) {
    if (report.bin_edges[b] > x_max) break;
    svg += "<line x1=\"" + num(px(report.bin_edges[b])) + "\" y1=\"" + num(kTop) + "\" x2=\"" +
           num(px(report.bin_edges[b])) + "\" y2=\"" + num(kTop + plot_h) +
           "\" stroke=\"#ddd\"/>\n";
  }
  for (const auto& r : report.records) {
    svg += "<circle cx=\"" + num(px(r.tci)) + "\" cy=\"" + num(py(r.sat_truncated - r.sat_true)) +
           "\" r=\"3\" fill=\"#d62728\" fill-opacity=\"0.6\"/>\n";
    svg += "<circle cx=\"" + num(px(r.tci)) + "\" cy=\"" + num(py(r.sat_completed - r.sat_true)) +
           "\" r=\"3\" fill=\"#1f77b4\" fill-opacity=\"0.6\"/>\n";
  }
  for (const auto& b : report.bins) {
    if (b.count == 0) continue;
    const double x0 = px(std::min(b.tci_low, x_max));
    const double x1 = px(std::min(b.tci_high, x_max));
    svg += "<line x1=\"" + num(x0) + "\" y1=\"" + num(py(b.truncated_mean_error)) + "\" x2=\"" +
           num(x1) + "\" y2=\"" + num(py(b.truncated_mean_error)) +
           "\" stroke=\"#d62728\" stroke-width=\"2\"/>\n";
    svg += "<line x1=\"" + num(x0) + "\" y1=\"" + num(py(b.completed_mean_error)) + "\" x2=\"" +
           num(x1) + "\" y2=\"" + num(py(b.completed_mean_error)) +
           "\" stroke=\"#1f77b4\" stroke-width=\"2\"/>\n";
  }
  svg += "<text x=\"" + num(kLeft + plot_w - 150) + "\" y=\"" + num(kTop + 14) +
         "\" fill=\"#d62728\">truncated</text>\n";
  svg += "<text x=\"" + num(kLeft + plot_w - 70) + "\" y=\"" + num(kTop + 14) +
         "\" fill=\"#1f77b4\">completed</text>\n";
  svg += "</svg>\n";
  return svg;
}

}  // namespace fovdiff
