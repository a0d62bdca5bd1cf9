#include "sentinel/triage.hpp"
#include "sentinel/errors.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace sentinel {

CategoryThresholds calibrate(const std::string& sensor_id, const Eigen::Ref<const Vector>& baseline_scores,
                             const CalibrationOptions& opts) {
    if (baseline_scores.size() == 0)
        throw CalibrationError("no baseline scores for sensor '" + sensor_id + "'");
    if (!(opts.buffer_factor >= 1.0))
        throw CalibrationError("buffer factor must be at least 1");

    Real upper = baseline_scores.maxCoeff();
    if (opts.percentile) {
        const Real p = *opts.percentile;
        if (!(p > 0.0 && p <= 100.0)) throw CalibrationError("percentile must lie in (0, 100]");
        std::vector<Real> v(baseline_scores.begin(), baseline_scores.end());
        std::sort(v.begin(), v.end());
        // Nearest-rank definition.
        const auto rank = static_cast<std::size_t>(std::ceil(p / 100.0 * static_cast<Real>(v.size())));
        upper = v[std::max<std::size_t>(rank, 1) - 1];
    }
    return {sensor_id, upper, opts.buffer_factor * upper};
}

std::vector<Category> categorize(const Eigen::Ref<const Vector>& scores, const CategoryThresholds& th) {
    std::vector<Category> out(static_cast<std::size_t>(scores.size()));
    for (Index i = 0; i < scores.size(); ++i) out[static_cast<std::size_t>(i)] = categorize(scores[i], th);
    return out;
}

std::vector<OverviewRegion> overview_regions(const std::vector<SensorCategories>& sensors, Index gap) {
    if (gap < 0) throw ArgumentError("gap must be non-negative");
    if (sensors.empty()) return {};
    const std::size_t n = sensors.front().categories.size();
    for (const auto& s : sensors)
        if (s.categories.size() != n)
            throw ArgumentError("category sequence of '" + s.sensor_id + "' has a different length");

    std::vector<Category> worst(n, Category::I);
    for (const auto& s : sensors)
        for (std::size_t t = 0; t < n; ++t) worst[t] = std::max(worst[t], s.categories[t]);

    std::vector<OverviewRegion> regions;
    std::size_t t = 0;
    while (t < n) {
        if (worst[t] == Category::I) { ++t; continue; }
        std::size_t end = t + 1;  // one past the last suspicious sample of the run
        std::size_t probe = end;
        while (probe < n) {
            if (worst[probe] != Category::I) {
                end = ++probe;
            } else if (probe - end < static_cast<std::size_t>(gap)) {
                ++probe;
            } else {
                break;
            }
        }
        OverviewRegion r;
        r.frame = {static_cast<Index>(t), static_cast<Index>(end)};
        std::set<std::string> ids;
        for (const auto& s : sensors)
            for (std::size_t u = t; u < end; ++u)
                if (s.categories[u] != Category::I) {
                    ids.insert(s.sensor_id);
                    r.severity = std::max(r.severity, s.categories[u]);
                }
        r.sensor_ids.assign(ids.begin(), ids.end());
        regions.push_back(std::move(r));
        t = end;
    }
    return regions;
}

} // namespace sentinel
