#include "sentinel/period.hpp"

#include <cmath>
#include <vector>

namespace sentinel {

Vector moving_average(const Eigen::Ref<const Vector>& x, Index width) {
    const Index n = x.size();
    if (width <= 1 || n == 0) return x;
    const Index left = (width - 1) / 2;
    const Index right = width - 1 - left;
    Vector prefix(n + 1);
    prefix[0] = 0.0;
    for (Index i = 0; i < n; ++i) prefix[i + 1] = prefix[i] + x[i];
    Vector out(n);
    for (Index i = 0; i < n; ++i) {
        const Index lo = std::max<Index>(0, i - left);
        const Index hi = std::min<Index>(n, i + right + 1);
        out[i] = (prefix[hi] - prefix[lo]) / static_cast<Real>(hi - lo);
    }
    return out;
}

PeriodEstimate estimate_period(const Eigen::Ref<const Vector>& window, const PeriodOptions& opts) {
    const Index n = window.size();
    PeriodEstimate fallback{n > 0 ? static_cast<Real>(n) / 8.0 : 1.0, 0, false};
    if (n < 8 || !window.allFinite()) return fallback;

    Vector x = moving_average(window, opts.smoothing);
    x.array() -= x.mean();
    const Real sigma = std::sqrt(x.squaredNorm() / static_cast<Real>(n));
    if (!(sigma > 1e-12 * (1.0 + window.cwiseAbs().maxCoeff()))) return fallback;

    const Real low = -opts.hysteresis * sigma;
    std::vector<Real> crossings;
    bool armed = true;
    for (Index i = 0; i + 1 < n; ++i) {
        if (x[i] < low) armed = true;
        if (armed && x[i] <= 0.0 && x[i + 1] > 0.0) {
            crossings.push_back(static_cast<Real>(i) + (-x[i]) / (x[i + 1] - x[i]));
            armed = opts.hysteresis <= 0.0;
        }
    }
    fallback.crossings = static_cast<Index>(crossings.size());
    if (crossings.size() < 3) return fallback;
    const Real span = crossings.back() - crossings.front();
    return {span / static_cast<Real>(crossings.size() - 1), static_cast<Index>(crossings.size()), true};
}

} // namespace sentinel
