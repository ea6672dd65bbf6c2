#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace hybridopt {

/// Trailing moving average; element i averages the last min(i + 1, window)
/// values, so the output has the same length as the input.
std::vector<double> rolling_average(std::span<const double> series, std::size_t window);

double mean(std::span<const double> values);

/// Sample standard deviation (n - 1 denominator); 0 for fewer than two values.
double sample_std(std::span<const double> values);

}  // namespace hybridopt
