#include "sentinel/spiral.hpp"

#include <charconv>
#include <cmath>

namespace sentinel {

std::optional<Theme> parse_theme(std::string_view text) {
    if (text == "light") return Theme::Light;
    if (text == "dark") return Theme::Dark;
    return std::nullopt;
}

namespace {

void put(std::string& out, Real v) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::fixed, 2);
    std::string_view s(buf, static_cast<std::size_t>(res.ptr - buf));
    if (s == "-0.00") s = "0.00";
    out.append(s);
}

std::string escape(std::string_view s) {
    std::string out;
    for (char c : s) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '"': out += "&quot;"; break;
        default: out += c;
        }
    }
    return out;
}

} // namespace

std::string render_svg(const std::vector<SpiralLayout>& layouts, Theme theme) {
    const auto columns = static_cast<Index>(std::ceil(std::sqrt(static_cast<double>(std::max<std::size_t>(layouts.size(), 1)))));
    const auto rows = static_cast<Index>((static_cast<Index>(layouts.size()) + columns - 1) / columns);
    Real cell = 0.0;
    for (const auto& l : layouts) cell = std::max(cell, 2.0 * l.config.r_outer + 2.0 * l.config.w_max + 40.0);
    if (cell == 0.0) cell = 100.0;

    const bool dark = theme == Theme::Dark;
    const char* background = dark ? "#1e1e1e" : "#ffffff";
    const char* foreground = dark ? "#e0e0e0" : "#202020";

    std::string out;
    std::size_t reserve = 1024;
    for (const auto& l : layouts) reserve += l.segments.size() * 64;
    out.reserve(reserve);

    out += "<?xml version=\"1.0\" encoding=\"UTF-8\" standalone=\"no\"?>\n";
    out += "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"";
    put(out, cell * static_cast<Real>(columns));
    out += "\" height=\"";
    put(out, cell * static_cast<Real>(rows));
    out += "\">\n<rect width=\"100%\" height=\"100%\" fill=\"";
    out += background;
    out += "\"/>\n";

    for (std::size_t idx = 0; idx < layouts.size(); ++idx) {
        const SpiralLayout& l = layouts[idx];
        const ColorTable& table = colormap_table(l.config.colormap);
        const Real ox = cell * (static_cast<Real>(static_cast<Index>(idx) % columns) + 0.5) - l.config.cx;
        const Real oy = cell * (static_cast<Real>(static_cast<Index>(idx) / columns) + 0.5) - l.config.cy + 10.0;

        out += "<g class=\"spiral\" data-sensor=\"";
        out += escape(l.sensor_id);
        out += "\" transform=\"translate(";
        put(out, ox);
        out += ',';
        put(out, oy);
        out += ")\" fill=\"none\" stroke-linecap=\"round\" stroke-linejoin=\"round\">\n";

        out += "<text class=\"label\" x=\"";
        put(out, l.config.cx);
        out += "\" y=\"";
        put(out, l.config.cy - l.config.r_outer - l.config.w_max - 6.0);
        out += "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\" fill=\"";
        out += foreground;
        out += "\">";
        out += escape(l.sensor_id);
        out += "</text>\n";

        for (const auto& seg : l.segments) {
            out += "<path d=\"M";
            put(out, seg.polyline.front().x);
            out += ' ';
            put(out, seg.polyline.front().y);
            if (seg.polyline.size() == 1) {
                out += " l0 0";
            } else {
                for (std::size_t p = 1; p < seg.polyline.size(); ++p) {
                    out += " L";
                    put(out, seg.polyline[p].x);
                    out += ' ';
                    put(out, seg.polyline[p].y);
                }
            }
            out += "\" stroke=\"";
            out += to_hex(table[static_cast<std::size_t>(seg.color_index)]);
            out += "\" stroke-width=\"";
            put(out, seg.thickness);
            out += "\"/>\n";
        }

        out += "<circle class=\"end-marker\" cx=\"";
        put(out, l.end_marker.x);
        out += "\" cy=\"";
        put(out, l.end_marker.y);
        out += "\" r=\"";
        put(out, std::max(3.0, l.config.w_max * 0.75));
        out += "\" fill=\"";
        out += to_hex(table[static_cast<std::size_t>(l.end_color_index)]);
        out += "\" stroke=\"";
        out += foreground;
        out += "\" stroke-width=\"1.00\"/>\n";

        const Category worst = l.worst_category();
        if (worst != Category::I) {
            const bool severe = worst == Category::III;
            out += "<text class=\"glyph\" x=\"";
            put(out, l.config.cx);
            out += "\" y=\"";
            put(out, l.config.cy);
            out += "\" text-anchor=\"middle\" dominant-baseline=\"central\" font-family=\"sans-serif\" "
                   "font-weight=\"bold\" font-size=\"";
            put(out, std::max(10.0, 1.6 * l.config.r_hub));
            out += "\" fill=\"";
            out += to_hex(severe ? kAnomalyRed : kSuspiciousYellow);
            out += "\">";
            out += severe ? "!" : "?";
            out += "</text>\n";
        }
        out += "</g>\n";
    }
    out += "</svg>\n";
    return out;
}

} // namespace sentinel
