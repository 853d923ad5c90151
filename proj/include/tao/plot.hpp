#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace tao {

struct PlotSeries {
  std::string column;
  std::string label;
  std::string color;
  bool dashed = false;
};

struct PlotSpec {
  std::string title;
  std::string x_column;
  std::string x_label;
  std::string y_label;
  std::vector<PlotSeries> series;
  /// Column holding a constant limit drawn as a dotted red line.
  std::optional<std::string> limit_column;
  /// Column with 1 at rows where an arrival marker is drawn.
  std::optional<std::string> marker_column;
  bool bars = false;  // draw the first series as a bar chart
};

/// Renders an SVG from the CSV at csv_path; the CSV is the only data source.
void render_plot(const std::filesystem::path& csv_path, const std::filesystem::path& svg_path,
                 const PlotSpec& spec);

}  // namespace tao
