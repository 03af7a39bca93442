#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <span>
#include <vector>

#include "ctlnav/core/errors.hpp"

namespace ctlnav {

inline double median(std::vector<double> v)
{
    if (v.empty())
        throw DomainError("median of an empty sample");
    std::sort(v.begin(), v.end());
    const auto n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

inline double mean(std::span<const double> v)
{
    if (v.empty())
        return 0.0;
    double s = 0.0;
    for (double x : v)
        s += x;
    return s / static_cast<double>(v.size());
}

// Population variance.
inline double variance(std::span<const double> v)
{
    if (v.empty())
        return 0.0;
    const double m = mean(v);
    double s = 0.0;
    for (double x : v)
        s += (x - m) * (x - m);
    return s / static_cast<double>(v.size());
}

// Trailing moving average; the first window-1 entries average what is available.
inline std::vector<double> moving_average(std::span<const double> v, int window)
{
    if (window < 1)
        throw DomainError("moving average window must be >= 1");
    std::vector<double> out(v.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        acc += v[i];
        if (i >= static_cast<std::size_t>(window))
            acc -= v[i - static_cast<std::size_t>(window)];
        const auto n = std::min<std::size_t>(i + 1, static_cast<std::size_t>(window));
        out[i] = acc / static_cast<double>(n);
    }
    return out;
}

// Value nearest to the given percentile (0..100) of a sample.
inline double percentile(std::vector<double> v, double pct)
{
    if (v.empty())
        throw DomainError("percentile of an empty sample");
    std::sort(v.begin(), v.end());
    const double rank = pct / 100.0 * static_cast<double>(v.size() - 1);
    return v[static_cast<std::size_t>(std::lround(rank))];
}

} // namespace ctlnav
