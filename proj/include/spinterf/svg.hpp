#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace spinterf::svg {

struct Series {
  std::string label;
  std::vector<double> xs;
  std::vector<double> ys;
};

struct Plot {
  std::string title;
  std::string x_label;
  std::string y_label;
  bool log_x = false;
  bool log_y = false;
  std::vector<Series> series;
};

/// Line plot with axes, ticks and a legend. Non-finite points (and
/// non-positive ones on a log axis) break the line.
std::string render(const Plot& plot);
void write(const Plot& plot, const std::filesystem::path& path);

}  // namespace spinterf::svg
