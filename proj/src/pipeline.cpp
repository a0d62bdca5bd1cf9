#include "sentinel/pipeline.hpp"
#include "sentinel/period.hpp"

#include <atomic>
#include <cmath>
#include <exception>
#include <thread>

namespace sentinel {

Index default_subsequence_length(const Eigen::Ref<const Vector>& baseline) {
    Index m = 100;
    const PeriodEstimate est = estimate_period(baseline);
    if (est.confident) m = static_cast<Index>(std::llround(est.period_samples));
    return std::clamp<Index>(m, 4, std::max<Index>(4, baseline.size() / 2));
}

SensorAnalysis analyze_sensor(const std::string& sensor_id, const Eigen::Ref<const Vector>& values,
                              Index baseline_len, const DetectOptions& opts) {
    if (baseline_len <= 0 || baseline_len > values.size())
        throw CalibrationError("sensor '" + sensor_id + "' has no usable baseline");
    const auto baseline = values.head(baseline_len);
    const Index m = opts.m ? *opts.m : default_subsequence_length(baseline);
    if (baseline_len < 2 * m)
        throw CalibrationError("baseline of " + std::to_string(baseline_len) + " samples is too short for m = " +
                               std::to_string(m));

    SensorAnalysis a;
    a.sensor_id = sensor_id;
    a.baseline = matrix_profile(baseline, {m, opts.delta, opts.adjust});
    a.baseline.sensor_id = sensor_id;
    a.profile = matrix_profile(values, {m, a.baseline.delta, opts.adjust});
    a.profile.sensor_id = sensor_id;
    a.thresholds = calibrate(sensor_id, a.baseline.score, opts.calibration);
    refresh_categories(a, values.size());
    return a;
}

std::vector<SensorAnalysis> analyze_dataset(const Dataset& ds, const DetectOptions& opts) {
    const auto& sensors = ds.sensors();
    std::vector<SensorAnalysis> out(sensors.size());
    std::vector<std::exception_ptr> errors(sensors.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i; (i = next.fetch_add(1)) < sensors.size();) {
            try {
                out[i] = analyze_sensor(sensors[i].id, sensors[i].values(), ds.baseline_len(), opts);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    const std::size_t threads =
        std::min<std::size_t>(sensors.size(), std::max(1u, std::thread::hardware_concurrency()));
    std::vector<std::thread> pool;
    for (std::size_t k = 1; k < threads; ++k) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);
    return out;
}

void refresh_categories(SensorAnalysis& a, Index n) {
    a.scores = timestep_scores(a.profile, n);
    a.categories = categorize(a.scores, a.thresholds);
}

std::vector<SensorCategories> collect_categories(const std::vector<SensorAnalysis>& analyses) {
    std::vector<SensorCategories> out;
    out.reserve(analyses.size());
    for (const auto& a : analyses) out.push_back({a.sensor_id, a.categories});
    return out;
}

} // namespace sentinel
