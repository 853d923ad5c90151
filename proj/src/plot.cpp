#include "tao/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "tao/csv.hpp"

namespace tao {

namespace {

constexpr double kWidth = 820.0;
constexpr double kHeight = 460.0;
constexpr double kLeft = 70.0;
constexpr double kRight = 20.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 60.0;

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

std::string coord(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      default: out += c;
    }
  }
  return out;
}

std::vector<double> nice_ticks(double lo, double hi, int target) {
  if (!(hi > lo)) return {lo};
  const double raw = (hi - lo) / target;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  const double norm = raw / mag;
  const double step = (norm < 1.5 ? 1.0 : norm < 3.0 ? 2.0 : norm < 7.0 ? 5.0 : 10.0) * mag;
  std::vector<double> ticks;
  for (double t = std::ceil(lo / step) * step; t <= hi + 1e-9 * step; t += step) ticks.push_back(t);
  return ticks;
}

}  // namespace

void render_plot(const std::filesystem::path& csv_path, const std::filesystem::path& svg_path, const PlotSpec& spec) {
  const CsvTable table = read_csv(csv_path);
  const auto& xs = table.column(spec.x_column);
  if (xs.empty()) throw std::invalid_argument(csv_path.string() + ": no rows to plot");

  double x_lo = *std::min_element(xs.begin(), xs.end());
  double x_hi = *std::max_element(xs.begin(), xs.end());
  double y_lo = std::numeric_limits<double>::infinity();
  double y_hi = -y_lo;
  for (const auto& s : spec.series) {
    for (double v : table.column(s.column)) {
      y_lo = std::min(y_lo, v);
      y_hi = std::max(y_hi, v);
    }
  }
  if (spec.limit_column) {
    for (double v : table.column(*spec.limit_column)) {
      if (spec.bars) {
        x_lo = std::min(x_lo, v);
        x_hi = std::max(x_hi, v);
      } else {
        y_lo = std::min(y_lo, v);
        y_hi = std::max(y_hi, v);
      }
    }
  }
  if (spec.bars) {
    y_lo = 0.0;
    const double half = xs.size() > 1 ? 0.5 * (xs[1] - xs[0]) : 0.5;
    x_lo -= half;
    x_hi += half;
  }
  if (!(x_hi > x_lo)) x_hi = x_lo + 1.0;
  if (!(y_hi > y_lo)) {
    y_lo -= 1.0;
    y_hi += 1.0;
  }
  const double pad = 0.05 * (y_hi - y_lo);
  y_hi += pad;
  if (!spec.bars) y_lo -= pad;

  const double plot_w = kWidth - kLeft - kRight;
  const double plot_h = kHeight - kTop - kBottom;
  auto px = [&](double x) { return kLeft + (x - x_lo) / (x_hi - x_lo) * plot_w; };
  auto py = [&](double y) { return kTop + (y_hi - y) / (y_hi - y_lo) * plot_h; };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
      << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg << "<text x=\"" << kWidth / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">" << escape(spec.title)
      << "</text>\n";
  svg << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << plot_w << "\" height=\"" << plot_h
      << "\" fill=\"none\" stroke=\"black\"/>\n";

  for (double t : nice_ticks(x_lo, x_hi, 8)) {
    svg << "<line x1=\"" << coord(px(t)) << "\" y1=\"" << kTop + plot_h << "\" x2=\"" << coord(px(t)) << "\" y2=\""
        << kTop + plot_h + 5 << "\" stroke=\"black\"/>\n";
    svg << "<text x=\"" << coord(px(t)) << "\" y=\"" << kTop + plot_h + 18 << "\" text-anchor=\"middle\">" << fmt(t)
        << "</text>\n";
  }
  for (double t : nice_ticks(y_lo, y_hi, 6)) {
    svg << "<line x1=\"" << kLeft - 5 << "\" y1=\"" << coord(py(t)) << "\" x2=\"" << kLeft + plot_w << "\" y2=\""
        << coord(py(t)) << "\" stroke=\"#dddddd\"/>\n";
    svg << "<text x=\"" << kLeft - 8 << "\" y=\"" << coord(py(t) + 4) << "\" text-anchor=\"end\">" << fmt(t)
        << "</text>\n";
  }
  svg << "<text x=\"" << kLeft + plot_w / 2 << "\" y=\"" << kHeight - 15 << "\" text-anchor=\"middle\">"
      << escape(spec.x_label) << "</text>\n";
  svg << "<text transform=\"translate(18," << kTop + plot_h / 2 << ") rotate(-90)\" text-anchor=\"middle\">"
      << escape(spec.y_label) << "</text>\n";

  if (spec.bars) {
    const double width = xs.size() > 1 ? xs[1] - xs[0] : 1.0;
    for (const auto& s : spec.series) {
      const auto& ys = table.column(s.column);
      for (std::size_t i = 0; i < xs.size(); ++i) {
        if (ys[i] <= 0.0) continue;
        svg << "<rect x=\"" << coord(px(xs[i] - width / 2)) << "\" y=\"" << coord(py(ys[i])) << "\" width=\""
            << coord(px(xs[i] + width / 2) - px(xs[i] - width / 2)) << "\" height=\"" << coord(py(0) - py(ys[i]))
            << "\" fill=\"" << s.color << "\" fill-opacity=\"0.5\" stroke=\"" << s.color << "\"/>\n";
      }
    }
  } else {
    for (const auto& s : spec.series) {
      const auto& ys = table.column(s.column);
      svg << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.5\"";
      if (s.dashed) svg << " stroke-dasharray=\"6,4\"";
      svg << " points=\"";
      for (std::size_t i = 0; i < xs.size(); ++i) svg << coord(px(xs[i])) << ',' << coord(py(ys[i])) << ' ';
      svg << "\"/>\n";
    }
  }
  if (spec.limit_column) {
    // histograms carry the limit on the x axis
    const double limit = table.column(*spec.limit_column).front();
    const double x1 = spec.bars ? px(limit) : kLeft;
    const double x2 = spec.bars ? px(limit) : kLeft + plot_w;
    const double y1 = spec.bars ? kTop : py(limit);
    const double y2 = spec.bars ? kTop + plot_h : py(limit);
    svg << "<line x1=\"" << coord(x1) << "\" y1=\"" << coord(y1) << "\" x2=\"" << coord(x2) << "\" y2=\""
        << coord(y2) << "\" stroke=\"red\" stroke-dasharray=\"2,3\" stroke-width=\"1.5\"/>\n";
  }
  if (spec.marker_column) {
    const auto& marks = table.column(*spec.marker_column);
    for (std::size_t i = 0; i < xs.size(); ++i) {
      if (marks[i] < 0.5) continue;
      const double x = px(xs[i]);
      const double y = kTop + plot_h - 2;
      svg << "<polygon points=\"" << coord(x) << ',' << coord(y) << ' ' << coord(x - 4) << ',' << coord(y - 9) << ' '
          << coord(x + 4) << ',' << coord(y - 9) << "\" fill=\"black\"/>\n";
    }
  }
  double legend_y = kTop + 16;
  for (const auto& s : spec.series) {
    svg << "<line x1=\"" << kLeft + plot_w - 170 << "\" y1=\"" << legend_y - 4 << "\" x2=\"" << kLeft + plot_w - 145
        << "\" y2=\"" << legend_y - 4 << "\" stroke=\"" << s.color << "\" stroke-width=\"2\"";
    if (s.dashed) svg << " stroke-dasharray=\"6,4\"";
    svg << "/>\n<text x=\"" << kLeft + plot_w - 140 << "\" y=\"" << legend_y << "\">" << escape(s.label) << "</text>\n";
    legend_y += 16;
  }
  svg << "</svg>\n";

  std::ofstream out(svg_path, std::ios::binary);
  if (!out) throw std::runtime_error(svg_path.string() + ": cannot open for writing");
  out << svg.str();
}

}  // namespace tao
