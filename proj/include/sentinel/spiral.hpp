#pragma once

#include "sentinel/colormap.hpp"
#include "sentinel/triage.hpp"
#include "sentinel/types.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace sentinel {

enum class ColorRange { Global, Local };

std::string_view to_string(ColorRange range);
std::optional<ColorRange> parse_color_range(std::string_view text);

// Spiral geometry and rendering parameters. Drawing units are abstract; the spiral is centred
// on (cx, cy) with the most recent sample at 12 o'clock on r_outer.
struct SpiralConfig {
    Real cycle_samples = 100.0;  // samples per revolution
    Real r_outer = 100.0;
    Real r_hub = 10.0;
    Real cx = 0.0;
    Real cy = 0.0;
    Index revolution_cap = 12;
    std::optional<Real> epsilon;  // value-merge threshold; empty: 1% of the colour range
    Index k = 100;                // max samples per segment
    Real w_min = 1.0;
    Real w_max = 6.0;
    Colormap colormap = Colormap::Parula;
    ColorRange range = ColorRange::Global;
    bool thickness_on = true;
};

// Throws ArgumentError on r_hub >= r_outer, w_min > w_max, negative epsilon, k < 1, ...
void validate(const SpiralConfig& cfg);

struct Point {
    Real x = 0.0;
    Real y = 0.0;
};

// Radial distance between successive revolutions for a frame.
Real ring_spacing(const TimeFrame& frame, const SpiralConfig& cfg);

// Revolutions back in time from the outer endpoint.
inline Real revolutions_back(Index t, const TimeFrame& frame, const SpiralConfig& cfg) {
    return static_cast<Real>(frame.end - 1 - t) / cfg.cycle_samples;
}

Point point_at(Index t, const TimeFrame& frame, const SpiralConfig& cfg);

// Nearest sample on the spiral to `cursor`, resolved analytically from angle and radius.
Index spotlight_timestep(Point cursor, const TimeFrame& frame, const SpiralConfig& cfg);

// Line width for a score: w_min up to theta_II, w_max from theta_III, linear in between.
Real thickness(Real score, const CategoryThresholds& th, Real w_min, Real w_max);

struct SpiralSegment {
    Index t_start = 0;
    Index len = 0;
    Real anchor_value = 0.0;
    int color_index = 0;
    Real thickness = 0.0;
    Category category = Category::I;
    std::vector<Point> polyline;
};

struct SpiralLayout {
    std::string sensor_id;
    TimeFrame frame;
    SpiralConfig config;
    Real ring_spacing = 0.0;
    Real color_lo = 0.0;
    Real color_hi = 0.0;
    Real epsilon = 0.0;  // resolved merge threshold
    std::vector<SpiralSegment> segments;
    Point end_marker;
    int end_color_index = 0;

    Category worst_category() const;
};

struct ValueRange {
    Real lo = 0.0;
    Real hi = 0.0;
};

// Greedy epsilon/k segment merging over a frame. `values`, `scores` and `categories` cover the
// frame only (index 0 is frame.start). A segment also closes when the category changes.
SpiralLayout merge_segments(const Eigen::Ref<const Vector>& values, const Eigen::Ref<const Vector>& scores,
                            const std::vector<Category>& categories, const CategoryThresholds& th,
                            const TimeFrame& frame, const SpiralConfig& cfg, ValueRange color_range);

enum class Theme { Light, Dark };

std::optional<Theme> parse_theme(std::string_view text);

// Standalone SVG 1.1 with one group per layout laid out on a square grid.
std::string render_svg(const std::vector<SpiralLayout>& layouts, Theme theme = Theme::Light);

} // namespace sentinel
