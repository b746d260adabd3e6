#pragma once

#include <cmath>
#include <span>

namespace mintrace {

/// Mean and one standard error (sample SD / sqrt(count)).
struct MeanSe {
    double mean = 0.0;
    double se = 0.0;
};

[[nodiscard]] inline MeanSe mean_se(std::span<const double> values) {
    MeanSe out;
    const auto n = static_cast<double>(values.size());
    if (values.empty()) return out;
    double sum = 0.0;
    for (double v : values) sum += v;
    out.mean = sum / n;
    if (values.size() < 2) return out;
    double ss = 0.0;
    for (double v : values) ss += (v - out.mean) * (v - out.mean);
    out.se = std::sqrt(ss / (n - 1.0)) / std::sqrt(n);
    return out;
}

}  // namespace mintrace
