#pragma once

#include <cmath>
#include <vector>

namespace vfbd {

struct MeanStd {
    double mean = 0.0;
    double std = 0.0;
    std::size_t count = 0;
};

/// Sample mean and (n - 1)-normalized standard deviation.
inline MeanStd mean_std(const std::vector<double>& v)
{
    MeanStd out;
    out.count = v.size();
    if (v.empty()) {
        return out;
    }
    double sum = 0.0;
    for (double x : v) {
        sum += x;
    }
    out.mean = sum / static_cast<double>(v.size());
    if (v.size() > 1) {
        double ss = 0.0;
        for (double x : v) {
            ss += (x - out.mean) * (x - out.mean);
        }
        out.std = std::sqrt(ss / static_cast<double>(v.size() - 1));
    }
    return out;
}

} // namespace vfbd
