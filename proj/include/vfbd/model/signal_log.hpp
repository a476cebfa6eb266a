#pragma once

#include <vector>

#include "vfbd/model/types.hpp"

namespace vfbd::model {

/// One row of a signal log. The inputs of row k act over (t_{k-1}, t_k]; y is
/// the outlet moisture measured at t_k. Row 0 fixes the initial operating point.
struct SignalSample {
    double t = 0.0;
    PlantInputs u;
    Disturbances w;
    double y = 0.0;
};

struct SignalLog {
    std::vector<SignalSample> samples;

    std::size_t size() const { return samples.size(); }
    bool empty() const { return samples.empty(); }
    /// Spacing of the first two time stamps, 0 for fewer than two rows.
    double dt() const { return samples.size() < 2 ? 0.0 : samples[1].t - samples[0].t; }
    double duration() const { return samples.empty() ? 0.0 : samples.back().t - samples.front().t; }
};

} // namespace vfbd::model
