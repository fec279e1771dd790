#pragma once

// Minimal SVG output for run diagnostics.

#include <filesystem>
#include <string>
#include <vector>

#include "shearlab/io.hpp"

namespace shearlab {

struct PlotSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

struct PlotOptions {
  std::string title;
  std::string x_label;
  std::string y_label;
  bool log_x = true;
  bool log_y = true;
};

// Line plot; non-positive values are skipped on log axes.
std::string line_plot_svg(const std::vector<PlotSeries>& series, const PlotOptions& options);

// Scatter of (eps, mu) cells from a threshold table coloured by label.
std::string threshold_map_svg(const Table& cells);

void write_svg(const std::string& svg, const std::filesystem::path& path);

}  // namespace shearlab
