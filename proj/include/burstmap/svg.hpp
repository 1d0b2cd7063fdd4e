#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace burstmap {

enum class SeriesStyle { Line, Points };

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
  SeriesStyle style = SeriesStyle::Line;
  std::string color = "#1f4e9a";
  // x positions where a line series is broken (map discontinuities).
  // A segment between samples that straddle one of them is not drawn.
  std::vector<double> breaks;
};

struct Panel {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<Series> series;
  std::optional<std::pair<double, double>> x_range;
  std::optional<std::pair<double, double>> y_range;
};

struct PlotSpec {
  int width = 640;
  int panel_height = 260;
  std::string title;
};

// Panels stacked top to bottom. Output depends only on the inputs.
// Throws std::invalid_argument when no series holds a point.
std::string emit_svg(const std::vector<Panel>& panels, const PlotSpec& spec = {});

}  // namespace burstmap
