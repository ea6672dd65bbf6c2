#include "hybridopt/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "hybridopt/error.hpp"
#include "hybridopt/experiment.hpp"
#include "hybridopt/stats.hpp"

namespace hybridopt {
namespace fs = std::filesystem;

namespace {

constexpr double kWidth = 800, kHeight = 500;
constexpr double kLeft = 80, kRight = 20, kTop = 40, kBottom = 60;
const char* const kLineColors[] = {"#1f4fbf", "#2a9d3f", "#8e44ad", "#d08700", "#117a8b", "#555555"};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string tick(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

}  // namespace

std::string xml_escape(const std::string& text) {
  std::string out;
  out.reserve(text.size());
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string render_svg(const PlotSpec& spec) {
  std::size_t longest = 0;
  double lo = 0.0, hi = 0.0;
  bool any = false;
  for (const auto& s : spec.series) {
    longest = std::max(longest, s.values.size());
    for (double v : s.values) {
      if (!std::isfinite(v)) continue;
      lo = any ? std::min(lo, v) : v;
      hi = any ? std::max(hi, v) : v;
      any = true;
    }
  }
  if (hi - lo < 1e-12) {
    const double pad = std::max(1.0, std::fabs(hi)) * 0.5;
    lo -= pad;
    hi += pad;
  }
  const double pw = kWidth - kLeft - kRight, ph = kHeight - kTop - kBottom;
  const double xmax = longest > 1 ? static_cast<double>(longest - 1) : 1.0;
  auto sx = [&](double t) { return kLeft + pw * t / xmax; };
  auto sy = [&](double v) { return kTop + ph * (hi - v) / (hi - lo); };

  std::ostringstream o;
  o << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
    << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
    << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\">\n"
    << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
    << "<text x=\"" << kWidth / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">" << xml_escape(spec.title)
    << "</text>\n";
  o << "<g id=\"axes\" stroke=\"black\">\n"
    << "<line x1=\"" << kLeft << "\" y1=\"" << kTop + ph << "\" x2=\"" << kLeft + pw << "\" y2=\"" << kTop + ph
    << "\"/>\n"
    << "<line x1=\"" << kLeft << "\" y1=\"" << kTop << "\" x2=\"" << kLeft << "\" y2=\"" << kTop + ph << "\"/>\n"
    << "</g>\n";
  o << "<text id=\"x-label\" x=\"" << kLeft + pw / 2 << "\" y=\"" << kHeight - 15
    << "\" text-anchor=\"middle\" font-size=\"13\">iterations</text>\n"
    << "<text id=\"y-label\" x=\"20\" y=\"" << kTop + ph / 2 << "\" text-anchor=\"middle\" font-size=\"13\" transform=\"rotate(-90 20 "
    << kTop + ph / 2 << ")\">" << xml_escape(spec.y_label) << "</text>\n";
  o << "<g id=\"ticks\" font-size=\"11\">\n";
  for (int i = 0; i <= 4; ++i) {
    const double v = lo + (hi - lo) * i / 4.0;
    o << "<text x=\"" << kLeft - 6 << "\" y=\"" << num(sy(v) + 4) << "\" text-anchor=\"end\">" << tick(v) << "</text>\n";
    const double t = xmax * i / 4.0;
    o << "<text x=\"" << num(sx(t)) << "\" y=\"" << kTop + ph + 16 << "\" text-anchor=\"middle\">" << tick(t)
      << "</text>\n";
  }
  o << "</g>\n";

  if (!any) {
    o << "<text id=\"notice\" x=\"" << kWidth / 2 << "\" y=\"" << kHeight / 2
      << "\" text-anchor=\"middle\" font-size=\"14\">empty input: no trajectory rows</text>\n</svg>\n";
    return o.str();
  }

  o << "<g id=\"scatter\" fill=\"#d62728\" fill-opacity=\"0.5\">\n";
  for (const auto& s : spec.series) {
    for (std::size_t i = 0; i < s.values.size(); ++i) {
      if (!std::isfinite(s.values[i])) continue;
      o << "<circle cx=\"" << num(sx(static_cast<double>(i))) << "\" cy=\"" << num(sy(s.values[i])) << "\" r=\"2\"/>\n";
    }
  }
  o << "</g>\n<g id=\"rolling\" fill=\"none\" stroke-width=\"1.5\">\n";
  std::size_t k = 0;
  for (const auto& s : spec.series) {
    if (s.values.empty()) continue;
    const auto avg = rolling_average(s.values, std::max<std::size_t>(spec.rolling_window, 1));
    o << "<polyline stroke=\"" << kLineColors[k++ % std::size(kLineColors)] << "\" points=\"";
    for (std::size_t i = 0; i < avg.size(); ++i) {
      if (i) o << ' ';
      o << num(sx(static_cast<double>(i))) << ',' << num(sy(avg[i]));
    }
    o << "\"><title>" << xml_escape(s.label) << "</title></polyline>\n";
  }
  o << "</g>\n</svg>\n";
  return o.str();
}

std::vector<fs::path> plot_directory(const fs::path& dir, const fs::path& out) {
  if (!fs::is_directory(dir)) throw Error(dir.string() + " is not a directory");
  std::vector<fs::path> manifests;
  for (const auto& entry : fs::recursive_directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().filename() == "manifest.json") manifests.push_back(entry.path());
  }
  std::sort(manifests.begin(), manifests.end());

  std::map<std::pair<std::string, std::string>, PlotSpec> charts;
  for (const auto& path : manifests) {
    const auto manifest = load_json_file(path);
    const std::string function = manifest.at("function").at("name").get<std::string>();
    const auto& optimum = manifest.at("function").at("known_optimum");
    const std::size_t window = manifest.at("config").value("rolling_window", std::size_t{50});
    for (const auto& run : manifest.at("runs")) {
      const std::string method = run.at("method").get<std::string>();
      PlotSpec& spec = charts[{function, method}];
      spec.title = function + " / " + method;
      spec.y_label = optimum.is_null() ? "reward" : "gap";
      spec.rolling_window = window;
      PlotSeries series;
      series.label = run.at("run_id").get<std::string>();
      for (const auto& row : read_trajectory(path.parent_path() / run.at("file").get<std::string>())) {
        series.values.push_back(optimum.is_null() ? row.reward
                                                  : std::fabs(optimum.at("value").get<double>() - row.reward));
      }
      spec.series.push_back(std::move(series));
    }
  }

  std::error_code ec;
  fs::create_directories(out, ec);
  if (ec) throw Error("cannot create " + out.string() + ": " + ec.message());
  std::vector<fs::path> written;
  if (charts.empty()) {
    PlotSpec empty;
    empty.title = "no trajectories under " + dir.string();
    empty.y_label = "gap";
    charts[{"empty", "input"}] = std::move(empty);
  }
  for (const auto& [key, spec] : charts) {
    const fs::path file = out / (key.first + "_" + key.second + ".svg");
    std::ofstream f(file, std::ios::binary | std::ios::trunc);
    f << render_svg(spec);
    if (!f) throw Error("failed writing " + file.string());
    written.push_back(file);
  }
  return written;
}

}  // namespace hybridopt
