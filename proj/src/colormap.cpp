#include "sentinel/colormap.hpp"
#include "sentinel/errors.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <vector>

namespace sentinel {

std::string_view to_string(Colormap map) { return map == Colormap::Jet ? "jet" : "parula"; }

std::optional<Colormap> parse_colormap(std::string_view text) {
    if (text == "parula") return Colormap::Parula;
    if (text == "jet") return Colormap::Jet;
    return std::nullopt;
}

namespace {

struct Anchor {
    double pos, r, g, b;
};

// Sampled from the Parula map; a perceptually ordered blue-green-yellow ramp.
const std::vector<Anchor> kParula{
    {0.000, 0.2081, 0.1663, 0.5292}, {0.125, 0.2810, 0.3228, 0.9579},
    {0.250, 0.1786, 0.5289, 0.9682}, {0.375, 0.0689, 0.6948, 0.8394},
    {0.500, 0.2161, 0.7843, 0.5923}, {0.625, 0.6720, 0.7793, 0.2227},
    {0.750, 0.9970, 0.7659, 0.2199}, {0.875, 0.9661, 0.8828, 0.1493},
    {1.000, 0.9763, 0.9831, 0.0538},
};

const std::vector<Anchor> kJet{
    {0.000, 0.0, 0.0, 0.5}, {0.125, 0.0, 0.0, 1.0}, {0.375, 0.0, 1.0, 1.0},
    {0.625, 1.0, 1.0, 0.0}, {0.875, 1.0, 0.0, 0.0}, {1.000, 0.5, 0.0, 0.0},
};

ColorTable build(const std::vector<Anchor>& anchors) {
    ColorTable table{};
    auto channel = [](double v) {
        return static_cast<std::uint8_t>(std::clamp(std::floor(v * 255.0 + 0.5), 0.0, 255.0));
    };
    for (int i = 0; i < 256; ++i) {
        const double x = i / 255.0;
        std::size_t k = 1;
        while (k + 1 < anchors.size() && anchors[k].pos < x) ++k;
        const Anchor& a = anchors[k - 1];
        const Anchor& b = anchors[k];
        const double f = std::clamp((x - a.pos) / (b.pos - a.pos), 0.0, 1.0);
        table[static_cast<std::size_t>(i)] = {channel(a.r + f * (b.r - a.r)), channel(a.g + f * (b.g - a.g)),
                                              channel(a.b + f * (b.b - a.b))};
    }
    return table;
}

} // namespace

const ColorTable& colormap_table(Colormap map) {
    static const ColorTable parula = build(kParula);
    static const ColorTable jet = build(kJet);
    return map == Colormap::Jet ? jet : parula;
}

int colormap_index(double v, double lo, double hi) {
    if (!(hi > lo)) return 128;
    const double u = std::clamp((v - lo) / (hi - lo), 0.0, 1.0);
    return static_cast<int>(std::floor(u * 255.0 + 0.5));
}

std::string to_hex(Rgb c) {
    static constexpr char digits[] = "0123456789abcdef";
    std::string s = "#";
    for (std::uint8_t v : {c.r, c.g, c.b}) {
        s += digits[v >> 4];
        s += digits[v & 0xF];
    }
    return s;
}

void write_colormap_csv(std::ostream& out, const ColorTable& table) {
    out << "index,r,g,b\n";
    for (std::size_t i = 0; i < table.size(); ++i)
        out << i << ',' << int(table[i].r) << ',' << int(table[i].g) << ',' << int(table[i].b) << '\n';
}

ColorTable read_colormap_csv(std::istream& in) {
    ColorTable table{};
    std::vector<bool> seen(256, false);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (lineno == 1 || line.empty() || line == "\r") continue;
        std::istringstream row(line);
        int idx, r, g, b;
        char c1, c2, c3;
        if (!(row >> idx >> c1 >> r >> c2 >> g >> c3 >> b) || c1 != ',' || c2 != ',' || c3 != ',')
            throw ParseError("malformed colormap row", lineno);
        if (idx < 0 || idx > 255 || r < 0 || r > 255 || g < 0 || g > 255 || b < 0 || b > 255)
            throw ParseError("colormap entry out of range", lineno);
        table[static_cast<std::size_t>(idx)] = {static_cast<std::uint8_t>(r), static_cast<std::uint8_t>(g),
                                                static_cast<std::uint8_t>(b)};
        seen[static_cast<std::size_t>(idx)] = true;
    }
    if (std::find(seen.begin(), seen.end(), false) != seen.end())
        throw ParseError("colormap must define all 256 entries");
    return table;
}

ColorTable read_colormap_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open '" + path.string() + "'");
    return read_colormap_csv(in);
}

} // namespace sentinel
