#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>

namespace sentinel {

enum class Colormap { Parula, Jet };

std::string_view to_string(Colormap map);
std::optional<Colormap> parse_colormap(std::string_view text);

struct Rgb {
    std::uint8_t r = 0, g = 0, b = 0;
    friend bool operator==(const Rgb&, const Rgb&) = default;
};

using ColorTable = std::array<Rgb, 256>;

// 256-entry table, linearly interpolated between the map's anchor colours.
const ColorTable& colormap_table(Colormap map);

// clamp((v - lo) / (hi - lo), 0, 1) on 0..255, rounded half up. lo == hi gives 128.
int colormap_index(double v, double lo, double hi);

std::string to_hex(Rgb c);

// `index,r,g,b` with a header row.
void write_colormap_csv(std::ostream& out, const ColorTable& table);
ColorTable read_colormap_csv(std::istream& in);
ColorTable read_colormap_csv(const std::filesystem::path& path);

// Fixed highlight colours for category II / III markings.
inline constexpr Rgb kSuspiciousYellow{0xE6, 0xC7, 0x00};
inline constexpr Rgb kAnomalyRed{0xD4, 0x00, 0x00};

} // namespace sentinel
