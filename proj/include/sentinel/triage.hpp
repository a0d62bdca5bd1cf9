#pragma once

#include "sentinel/types.hpp"

#include <optional>
#include <string>
#include <vector>

namespace sentinel {

struct CategoryThresholds {
    std::string sensor_id;
    Real theta_ii = 0.0;
    Real theta_iii = 0.0;
};

struct CalibrationOptions {
    Real buffer_factor = 1.2;
    // Use this percentile (0, 100] of the baseline instead of its maximum. With a percentile
    // the baseline is no longer guaranteed to classify entirely as category I.
    std::optional<Real> percentile;
};

// theta_II from the baseline score range, theta_III = buffer_factor * theta_II.
CategoryThresholds calibrate(const std::string& sensor_id, const Eigen::Ref<const Vector>& baseline_scores,
                             const CalibrationOptions& opts = {});

inline Category categorize(Real score, const CategoryThresholds& th) {
    if (score <= th.theta_ii) return Category::I;
    if (score <= th.theta_iii) return Category::II;
    return Category::III;
}

std::vector<Category> categorize(const Eigen::Ref<const Vector>& scores, const CategoryThresholds& th);

struct SensorCategories {
    std::string sensor_id;
    std::vector<Category> categories;
};

struct OverviewRegion {
    TimeFrame frame;
    Category severity = Category::II;
    std::vector<std::string> sensor_ids;  // sorted, unique
};

// Maximal runs of samples where any sensor is at least category II. Runs separated by at most
// `gap` unsuspicious samples are merged.
std::vector<OverviewRegion> overview_regions(const std::vector<SensorCategories>& sensors, Index gap = 0);

} // namespace sentinel
