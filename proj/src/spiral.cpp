#include "sentinel/spiral.hpp"
#include "sentinel/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace sentinel {

namespace {
constexpr Real kTwoPi = 2.0 * std::numbers::pi;
}

std::string_view to_string(ColorRange range) { return range == ColorRange::Local ? "local" : "global"; }

std::optional<ColorRange> parse_color_range(std::string_view text) {
    if (text == "global") return ColorRange::Global;
    if (text == "local") return ColorRange::Local;
    return std::nullopt;
}

void validate(const SpiralConfig& cfg) {
    if (!(cfg.cycle_samples > 0.0) || !std::isfinite(cfg.cycle_samples))
        throw ArgumentError("cycle length must be positive");
    if (!(cfg.r_hub >= 0.0 && cfg.r_hub < cfg.r_outer)) throw ArgumentError("need 0 <= r_hub < r_outer");
    if (cfg.revolution_cap < 1) throw ArgumentError("revolution cap must be at least 1");
    if (cfg.epsilon && !(*cfg.epsilon >= 0.0)) throw ArgumentError("epsilon must be non-negative");
    if (cfg.k < 1) throw ArgumentError("k must be at least 1");
    if (!(cfg.w_min >= 0.0 && cfg.w_min <= cfg.w_max)) throw ArgumentError("need 0 <= w_min <= w_max");
}

Real ring_spacing(const TimeFrame& frame, const SpiralConfig& cfg) {
    const Real revolutions = std::ceil(static_cast<Real>(frame.size() - 1) / cfg.cycle_samples);
    return (cfg.r_outer - cfg.r_hub) / std::max(static_cast<Real>(cfg.revolution_cap), revolutions);
}

Point point_at(Index t, const TimeFrame& frame, const SpiralConfig& cfg) {
    if (!frame.contains(t)) throw ArgumentError("sample " + std::to_string(t) + " outside frame");
    const Real u = revolutions_back(t, frame, cfg);
    const Real r = cfg.r_outer - ring_spacing(frame, cfg) * u;
    const Real beta = -kTwoPi * u;
    return {cfg.cx + r * std::sin(beta), cfg.cy - r * std::cos(beta)};
}

Index spotlight_timestep(Point cursor, const TimeFrame& frame, const SpiralConfig& cfg) {
    const Real dx = cursor.x - cfg.cx;
    const Real dy = cursor.y - cfg.cy;
    Real angle = std::atan2(dx, -dy);  // clockwise from 12 o'clock
    if (angle < 0.0) angle += kTwoPi;

    const Real s = ring_spacing(frame, cfg);
    const Real u_max = revolutions_back(frame.start, frame, cfg);
    Real frac = -angle / kTwoPi;
    frac -= std::floor(frac);
    if (frac > 1.0 - 1e-12) frac = 0.0;

    // Candidates share the cursor's angle, plus both ends of the curve; pick the nearest point.
    constexpr Real slack = 1e-9;
    Real best_u = 0.0;
    Real best_err = std::numeric_limits<Real>::infinity();
    auto consider = [&](Real u) {
        const Real r = cfg.r_outer - s * u;
        const Real beta = -kTwoPi * u;
        const Real err = std::hypot(dx - r * std::sin(beta), dy + r * std::cos(beta));
        if (err < best_err) { best_err = err; best_u = u; }
    };
    consider(0.0);
    consider(u_max);
    for (Index j = 0; frac + static_cast<Real>(j) <= u_max + slack; ++j) consider(std::min(frac + static_cast<Real>(j), u_max));
    const auto t = static_cast<Index>(std::llround(static_cast<Real>(frame.end - 1) - best_u * cfg.cycle_samples));
    return std::clamp(t, frame.start, frame.end - 1);
}

Real thickness(Real score, const CategoryThresholds& th, Real w_min, Real w_max) {
    if (score <= th.theta_ii) return w_min;
    if (score >= th.theta_iii) return w_max;
    return w_min + (w_max - w_min) * (score - th.theta_ii) / (th.theta_iii - th.theta_ii);
}

Category SpiralLayout::worst_category() const {
    Category c = Category::I;
    for (const auto& seg : segments) c = std::max(c, seg.category);
    return c;
}

SpiralLayout merge_segments(const Eigen::Ref<const Vector>& values, const Eigen::Ref<const Vector>& scores,
                            const std::vector<Category>& categories, const CategoryThresholds& th,
                            const TimeFrame& frame, const SpiralConfig& cfg, ValueRange color_range) {
    validate(cfg);
    if (frame.start < 0 || frame.end <= frame.start) throw ArgumentError("empty frame");
    const Index n = frame.size();
    if (values.size() != n || scores.size() != n || static_cast<Index>(categories.size()) != n)
        throw ArgumentError("values, scores and categories must all cover the frame");

    SpiralLayout layout;
    layout.frame = frame;
    layout.config = cfg;
    layout.ring_spacing = ring_spacing(frame, cfg);
    layout.color_lo = color_range.lo;
    layout.color_hi = color_range.hi;
    layout.epsilon = cfg.epsilon ? *cfg.epsilon : 0.01 * (color_range.hi - color_range.lo);

    const Real w_max = std::min(cfg.w_max, 0.8 * layout.ring_spacing);
    const Real w_min = std::min(cfg.w_min, w_max);

    std::vector<Point> pts(static_cast<std::size_t>(n));
    for (Index i = 0; i < n; ++i) pts[static_cast<std::size_t>(i)] = point_at(frame.start + i, frame, cfg);

    Index i = 0;
    while (i < n) {
        const Real anchor = values[i];
        const Category cat = categories[static_cast<std::size_t>(i)];
        Index len = 1;
        Real peak = scores[i];
        while (i + len < n && len < cfg.k && std::abs(values[i + len] - anchor) <= layout.epsilon &&
               categories[static_cast<std::size_t>(i + len)] == cat) {
            peak = std::max(peak, scores[i + len]);
            ++len;
        }
        SpiralSegment seg;
        seg.t_start = frame.start + i;
        seg.len = len;
        seg.anchor_value = anchor;
        seg.color_index = colormap_index(anchor, color_range.lo, color_range.hi);
        seg.thickness = cfg.thickness_on ? thickness(peak, th, w_min, w_max) : w_min;
        seg.category = cat;
        const Index last = std::min(i + len, n - 1);
        seg.polyline.assign(pts.begin() + i, pts.begin() + last + 1);
        layout.segments.push_back(std::move(seg));
        i += len;
    }
    layout.end_marker = pts.back();
    layout.end_color_index = colormap_index(values[n - 1], color_range.lo, color_range.hi);
    return layout;
}

} // namespace sentinel
