// Copyright 2026 The Apollo Optimizer Authors
// SPDX-License-Identifier: Apache-2.0

#include "apollo/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "apollo/error.hpp"

namespace apollo {
namespace {

constexpr double kWidth = 720.0;
constexpr double kHeight = 440.0;
constexpr double kLeft = 80.0;
constexpr double kRight = 20.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 50.0;

const char* const kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                               "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

std::string tick_label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3g", v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

std::string render_loss_svg(const std::vector<PlotSeries>& series, const std::string& title) {
  double x_max = 0.0;
  double y_min = std::numeric_limits<double>::infinity();
  double y_max = -std::numeric_limits<double>::infinity();
  bool any = false;
  for (const PlotSeries& s : series)
    for (const TrainRecord& r : s.trace) {
      if (!std::isfinite(r.loss)) continue;
      any = true;
      x_max = std::max(x_max, static_cast<double>(r.step));
      y_min = std::min(y_min, r.loss);
      y_max = std::max(y_max, r.loss);
    }
  if (!any) throw FormatError("plot: no finite loss values to draw");

  const bool log_y = y_min > 0.0;
  auto ty = [&](double v) { return log_y ? std::log10(v) : v; };
  double lo = ty(y_min);
  double hi = ty(y_max);
  if (hi - lo < 1e-12) {
    lo -= 0.5;
    hi += 0.5;
  }
  if (x_max <= 0.0) x_max = 1.0;
  const double pw = kWidth - kLeft - kRight;
  const double ph = kHeight - kTop - kBottom;
  auto px = [&](double step) { return kLeft + pw * step / x_max; };
  auto py = [&](double loss) { return kTop + ph * (1.0 - (ty(loss) - lo) / (hi - lo)); };

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
     << kHeight << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << kWidth / 2 << "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" "
        "font-size=\"16\">"
     << escape(title) << "</text>\n";
  os << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << pw << "\" height=\"" << ph
     << "\" fill=\"none\" stroke=\"black\"/>\n";

  for (int i = 0; i <= 4; ++i) {
    const double frac = i / 4.0;
    const double yv = lo + (hi - lo) * frac;
    const double ypix = kTop + ph * (1.0 - frac);
    os << "<text x=\"" << kLeft - 6 << "\" y=\"" << num(ypix + 4)
       << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">"
       << tick_label(log_y ? std::pow(10.0, yv) : yv) << "</text>\n";
    const double xpix = kLeft + pw * frac;
    os << "<text x=\"" << num(xpix) << "\" y=\"" << kTop + ph + 16
       << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">"
       << tick_label(x_max * frac) << "</text>\n";
  }
  os << "<text x=\"" << kLeft + pw / 2 << "\" y=\"" << kHeight - 12
     << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">step</text>\n";
  os << "<text x=\"16\" y=\"" << kTop + ph / 2
     << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\" transform=\"rotate(-90 16 "
     << kTop + ph / 2 << ")\">" << (log_y ? "loss (log)" : "loss") << "</text>\n";

  for (std::size_t k = 0; k < series.size(); ++k) {
    const char* color = kColors[k % (sizeof(kColors) / sizeof(kColors[0]))];
    os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    bool first = true;
    for (const TrainRecord& r : series[k].trace) {
      if (!std::isfinite(r.loss)) continue;
      os << (first ? "" : " ") << num(px(static_cast<double>(r.step))) << ',' << num(py(r.loss));
      first = false;
    }
    os << "\"/>\n";
    const double ly = kTop + 16 + 16.0 * static_cast<double>(k);
    os << "<text x=\"" << kLeft + pw - 8 << "\" y=\"" << num(ly) << "\" text-anchor=\"end\" fill=\""
       << color << "\" font-family=\"sans-serif\" font-size=\"12\">" << escape(series[k].label)
       << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace apollo
