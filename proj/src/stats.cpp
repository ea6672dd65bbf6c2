#include "hybridopt/stats.hpp"

#include <cmath>

#include "hybridopt/error.hpp"

namespace hybridopt {

std::vector<double> rolling_average(std::span<const double> series, std::size_t window) {
  if (window == 0) throw InvalidArgument("rolling_average: window must be at least 1");
  std::vector<double> out(series.size());
  // Each window is summed directly; a running sum would accumulate drift
  // over long trajectories.
  for (std::size_t i = 0; i < series.size(); ++i) {
    const std::size_t start = i + 1 >= window ? i + 1 - window : 0;
    double sum = 0.0;
    for (std::size_t k = start; k <= i; ++k) sum += series[k];
    out[i] = sum / static_cast<double>(i + 1 - start);
  }
  return out;
}

double mean(std::span<const double> values) {
  if (values.empty()) return 0.0;
  double sum = 0.0;
  for (double v : values) sum += v;
  return sum / static_cast<double>(values.size());
}

double sample_std(std::span<const double> values) {
  if (values.size() < 2) return 0.0;
  const double m = mean(values);
  double ss = 0.0;
  for (double v : values) ss += (v - m) * (v - m);
  return std::sqrt(ss / static_cast<double>(values.size() - 1));
}

}  // namespace hybridopt
