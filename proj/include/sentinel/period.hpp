#pragma once

#include "sentinel/types.hpp"

namespace sentinel {

struct PeriodEstimate {
    Real period_samples = 1.0;
    Index crossings = 0;  // upward crossings used
    bool confident = false;
};

struct PeriodOptions {
    Index smoothing = 5;  // centred moving-average width
    // After an upward crossing, the centred signal must fall below -hysteresis * sigma before
    // another upward crossing counts. 0 counts every sign change.
    Real hysteresis = 0.1;
};

// Zero-crossing cycle length: mean gap between upward crossings of the smoothed, mean-centred
// window. Fewer than three crossings yields window_length / 8 with confident = false.
PeriodEstimate estimate_period(const Eigen::Ref<const Vector>& window, const PeriodOptions& opts = {});

// Centred moving average; the kernel is truncated at the edges.
Vector moving_average(const Eigen::Ref<const Vector>& x, Index width);

} // namespace sentinel
