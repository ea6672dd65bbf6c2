#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

namespace hybridopt {

/// One seed's per-iteration values.
struct PlotSeries {
  std::string label;
  std::vector<double> values;
};

struct PlotSpec {
  std::string title;
  std::string y_label;  // "gap" or "reward"
  std::size_t rolling_window = 50;
  std::vector<PlotSeries> series;
};

/// Scatter of every value plus one rolling-average polyline per series.
/// With no values at all the chart carries an "empty input" notice.
std::string render_svg(const PlotSpec& spec);

std::string xml_escape(const std::string& text);

/// Writes <function>_<method>.svg into `out` for every (function, method)
/// found in manifests under `dir`. The scatter shows |optimum - reward| per
/// row, or the raw reward when the optimum is unknown. Returns the files written.
std::vector<std::filesystem::path> plot_directory(const std::filesystem::path& dir, const std::filesystem::path& out);

}  // namespace hybridopt
