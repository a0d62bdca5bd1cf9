#pragma once

#include <Eigen/Core>

#include <cstddef>
#include <cstdint>
#include <string_view>

namespace sentinel {

using Real = double;
using Vector = Eigen::Matrix<Real, Eigen::Dynamic, 1>;
using Index = Eigen::Index;

// Upper bound on a visualized frame: four hours at 1 Hz.
inline constexpr Index kMaxFrameSamples = 14'400;

// Severity of an anomaly score. Ordered: I < II < III.
enum class Category : std::uint8_t { I = 1, II = 2, III = 3 };

inline std::string_view to_string(Category c) {
    switch (c) {
    case Category::I: return "I";
    case Category::II: return "II";
    case Category::III: return "III";
    }
    return "?";
}

// Half-open sample-index window [start, end).
struct TimeFrame {
    Index start = 0;
    Index end = 0;

    Index size() const { return end - start; }
    bool contains(Index t) const { return t >= start && t < end; }
    bool intersects(const TimeFrame& o) const { return start < o.end && o.start < end; }

    friend bool operator==(const TimeFrame&, const TimeFrame&) = default;
};

// Throws ArgumentError unless 0 <= start < end and size <= cap.
void validate_frame(const TimeFrame& frame, Index cap = kMaxFrameSamples);

} // namespace sentinel
