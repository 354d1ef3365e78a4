#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "errors.hpp"

namespace cfkit {

// Descriptive statistics in the conventions used when summarising loss data:
// sd uses the n-1 divisor, skewness and kurtosis are the biased moment ratios
// m3/m2^(3/2) and m4/m2^2 (kurtosis is raw, not excess).
struct SummaryStats {
    std::size_t n = 0;
    double mean = 0.0;
    double sd = 0.0;
    double skewness = 0.0;
    double kurtosis = 0.0;
    double min = 0.0;
    double max = 0.0;
};

inline SummaryStats summarize(const std::vector<double>& xs) {
    if (xs.empty()) throw invalid_argument_error("summarize: empty data");
    SummaryStats s;
    s.n = xs.size();
    double n = static_cast<double>(xs.size());
    double sum = 0.0;
    s.min = xs[0];
    s.max = xs[0];
    for (double x : xs) {
        sum += x;
        if (x < s.min) s.min = x;
        if (x > s.max) s.max = x;
    }
    s.mean = sum / n;
    double m2 = 0.0, m3 = 0.0, m4 = 0.0;
    for (double x : xs) {
        double d = x - s.mean;
        double d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
    }
    m2 /= n;
    m3 /= n;
    m4 /= n;
    s.sd = xs.size() > 1 ? std::sqrt(m2 * n / (n - 1.0)) : 0.0;
    if (m2 > 0.0) {
        s.skewness = m3 / std::pow(m2, 1.5);
        s.kurtosis = m4 / (m2 * m2);
    }
    return s;
}

} // namespace cfkit
