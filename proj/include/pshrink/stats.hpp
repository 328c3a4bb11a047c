#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <vector>

#include "errors.hpp"

namespace pshrink {

struct MeanEstimate {
    double mean = 0.0;
    double std_error = 0.0;  // NaN when fewer than two samples
};

/// Sample mean and its standard error (two-pass, n - 1 denominator).
inline MeanEstimate mean_with_error(std::span<const double> xs) {
    if (xs.empty()) throw InputError("mean_with_error: no samples");
    const double n = static_cast<double>(xs.size());
    double sum = 0.0;
    for (double x : xs) sum += x;
    const double mean = sum / n;
    if (xs.size() < 2) return {mean, std::numeric_limits<double>::quiet_NaN()};
    double ss = 0.0;
    for (double x : xs) ss += (x - mean) * (x - mean);
    return {mean, std::sqrt(ss / (n - 1.0) / n)};
}

/// Mean of a - b over paired replicates with the paired standard error.
inline MeanEstimate paired_difference(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw InputError("paired_difference: length mismatch");
    std::vector<double> diff(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) diff[i] = a[i] - b[i];
    return mean_with_error(diff);
}

inline double median(std::vector<double> xs) {
    if (xs.empty()) throw InputError("median: no samples");
    const std::size_t mid = xs.size() / 2;
    std::nth_element(xs.begin(), xs.begin() + static_cast<std::ptrdiff_t>(mid), xs.end());
    const double upper = xs[mid];
    if (xs.size() % 2 == 1) return upper;
    const double lower = *std::max_element(xs.begin(), xs.begin() + static_cast<std::ptrdiff_t>(mid));
    return 0.5 * (lower + upper);
}

/// Sample standard deviation with the n - 1 denominator.
inline double sample_sd(std::span<const double> xs) {
    if (xs.size() < 2) throw InputError("sample_sd: need at least two samples");
    double sum = 0.0;
    for (double x : xs) sum += x;
    const double mean = sum / static_cast<double>(xs.size());
    double ss = 0.0;
    for (double x : xs) ss += (x - mean) * (x - mean);
    return std::sqrt(ss / static_cast<double>(xs.size() - 1));
}

}  // namespace pshrink
