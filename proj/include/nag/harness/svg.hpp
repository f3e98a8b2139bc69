#pragma once

#include <filesystem>
#include <string>
#include <vector>

// Minimal standalone SVG line plots.
namespace nag::harness {

struct PlotSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
  std::string color = "#1f77b4";
  bool dashed = false;
};

struct PlotSpec {
  std::string title;
  std::string x_label;
  std::string y_label;
  bool log_x = true;
  bool log_y = true;
  std::vector<PlotSeries> series;
};

// Points that are non-finite, or non-positive on a log axis, are dropped.
std::string render_svg(const PlotSpec& spec);
void write_svg(const std::filesystem::path& path, const PlotSpec& spec);

// Roughly log-spaced indices 1..n-1 (plus 0 when keep_zero), at most `count`.
std::vector<std::size_t> log_spaced_indices(std::size_t n, std::size_t count, bool keep_zero = false);

}  // namespace nag::harness
