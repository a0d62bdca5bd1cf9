#pragma once

#include "sentinel/ingest.hpp"
#include "sentinel/mprofile.hpp"
#include "sentinel/triage.hpp"

#include <optional>
#include <string>
#include <vector>

namespace sentinel {

struct DetectOptions {
    std::optional<Index> m;      // empty: rounded baseline period estimate, fallback 100
    std::optional<Real> delta;   // empty: auto_delta on the baseline profile
    CalibrationOptions calibration;
    ScoreAdjustment adjust = log_damped_score;
};

// Scores and categories for one sensor. The baseline profile is a self-join of the attack-free
// prefix alone; its scores calibrate the thresholds. The monitoring profile is a self-join of
// the whole series.
struct SensorAnalysis {
    std::string sensor_id;
    AnomalyProfile baseline;
    AnomalyProfile profile;
    CategoryThresholds thresholds;
    Vector scores;                  // per sample
    std::vector<Category> categories;
};

Index default_subsequence_length(const Eigen::Ref<const Vector>& baseline);

SensorAnalysis analyze_sensor(const std::string& sensor_id, const Eigen::Ref<const Vector>& values,
                              Index baseline_len, const DetectOptions& opts = {});

// Sensors are analysed concurrently, one worker per hardware thread.
std::vector<SensorAnalysis> analyze_dataset(const Dataset& ds, const DetectOptions& opts = {});

// Recomputes per-sample scores and categories after the profile changed.
void refresh_categories(SensorAnalysis& a, Index n);

std::vector<SensorCategories> collect_categories(const std::vector<SensorAnalysis>& analyses);

} // namespace sentinel
