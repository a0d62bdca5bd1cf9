#include "sentinel/ingest.hpp"
#include "sentinel/errors.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

namespace sentinel {

void validate_frame(const TimeFrame& frame, Index cap) {
    if (frame.start < 0 || frame.end <= frame.start)
        throw ArgumentError("invalid frame [" + std::to_string(frame.start) + ", " +
                            std::to_string(frame.end) + ")");
    if (frame.size() > cap)
        throw ArgumentError("frame of " + std::to_string(frame.size()) +
                            " samples exceeds the cap of " + std::to_string(cap));
}

SensorSeries::SensorSeries(std::string id_, Vector values, double t0_, double dt_)
    : id(std::move(id_)), name(id), t0(t0_), dt(dt_), values_(std::move(values)) {
    if (values_.size() == 0) throw ArgumentError("sensor '" + id + "' has no samples");
    if (!(dt > 0.0)) throw ArgumentError("sensor '" + id + "' has non-positive dt");
    if (!values_.allFinite()) throw ArgumentError("sensor '" + id + "' has non-finite samples");
    refresh_extrema();
}

void SensorSeries::append(Real v) {
    if (!std::isfinite(v)) throw ArgumentError("non-finite sample for sensor '" + id + "'");
    const Index n = values_.size();
    values_.conservativeResize(n + 1);
    values_[n] = v;
    if (n == 0) {
        min_ = max_ = v;
    } else {
        min_ = std::min(min_, v);
        max_ = std::max(max_, v);
    }
}

void SensorSeries::refresh_extrema() {
    min_ = values_.minCoeff();
    max_ = values_.maxCoeff();
}

Dataset::Dataset(std::vector<SensorSeries> sensors, Index baseline_len)
    : sensors_(std::move(sensors)), baseline_len_(baseline_len) {
    check_consistency();
}

const SensorSeries* Dataset::find(std::string_view id) const {
    auto it = std::find_if(sensors_.begin(), sensors_.end(),
                           [&](const SensorSeries& s) { return s.id == id; });
    return it == sensors_.end() ? nullptr : &*it;
}

void Dataset::check_consistency() const {
    for (const auto& s : sensors_) {
        const auto& ref = sensors_.front();
        if (s.size() != ref.size() || s.t0 != ref.t0 || s.dt != ref.dt)
            throw ValidationError("sensor '" + s.id + "' disagrees with '" + ref.id +
                                  "' on length, t0 or dt");
    }
    if (baseline_len_ < 0 || baseline_len_ > length())
        throw ValidationError("baseline length " + std::to_string(baseline_len_) +
                              " outside [0, " + std::to_string(length()) + "]");
}

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
        s.remove_suffix(1);
    return s;
}

std::vector<std::string_view> split(std::string_view line) {
    std::vector<std::string_view> cells;
    std::size_t pos = 0;
    while (true) {
        auto comma = line.find(',', pos);
        cells.push_back(trim(line.substr(pos, comma - pos)));
        if (comma == std::string_view::npos) break;
        pos = comma + 1;
    }
    return cells;
}

std::optional<double> parse_number(std::string_view s) {
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) return std::nullopt;
    return v;
}

bool parse_digits(std::string_view s, std::size_t pos, std::size_t count, int& out) {
    if (pos + count > s.size()) return false;
    out = 0;
    for (std::size_t i = pos; i < pos + count; ++i) {
        if (s[i] < '0' || s[i] > '9') return false;
        out = out * 10 + (s[i] - '0');
    }
    return true;
}

// Days since 1970-01-01 in the proleptic Gregorian calendar.
long long days_from_civil(long long y, unsigned m, unsigned d) {
    y -= m <= 2;
    const long long era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<long long>(doe) - 719468;
}

std::string format_shortest(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

} // namespace

std::optional<double> parse_iso8601(std::string_view s) {
    int year, month, day, hour, minute, second;
    if (s.size() < 19 || !parse_digits(s, 0, 4, year) || s[4] != '-' ||
        !parse_digits(s, 5, 2, month) || s[7] != '-' || !parse_digits(s, 8, 2, day) ||
        (s[10] != 'T' && s[10] != ' ') || !parse_digits(s, 11, 2, hour) || s[13] != ':' ||
        !parse_digits(s, 14, 2, minute) || s[16] != ':' || !parse_digits(s, 17, 2, second))
        return std::nullopt;
    if (month < 1 || month > 12 || day < 1 || day > 31 || hour > 23 || minute > 59 || second > 60)
        return std::nullopt;

    std::size_t pos = 19;
    double frac = 0.0;
    if (pos < s.size() && s[pos] == '.') {
        std::size_t end = pos + 1;
        while (end < s.size() && s[end] >= '0' && s[end] <= '9') ++end;
        if (end == pos + 1) return std::nullopt;
        auto f = parse_number(s.substr(pos, end - pos));
        if (!f) return std::nullopt;
        frac = *f;
        pos = end;
    }
    long long offset = 0;
    if (pos < s.size()) {
        if (s[pos] == 'Z' && pos + 1 == s.size()) {
            pos += 1;
        } else if ((s[pos] == '+' || s[pos] == '-') && pos + 6 == s.size() && s[pos + 3] == ':') {
            int oh, om;
            if (!parse_digits(s, pos + 1, 2, oh) || !parse_digits(s, pos + 4, 2, om))
                return std::nullopt;
            offset = (s[pos] == '+' ? 1 : -1) * (oh * 3600LL + om * 60LL);
            pos += 6;
        } else {
            return std::nullopt;
        }
    }
    const long long days = days_from_civil(year, static_cast<unsigned>(month),
                                           static_cast<unsigned>(day));
    const long long secs = days * 86400 + hour * 3600LL + minute * 60LL + second - offset;
    return static_cast<double>(secs) + frac;
}

IngestReport ingest_csv(const std::filesystem::path& path, Index baseline_len, bool resample) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open '" + path.string() + "'");
    return ingest_csv(in, baseline_len, resample);
}

IngestReport ingest_csv(std::istream& in, Index baseline_len, bool resample) {
    std::string line;
    std::size_t lineno = 0;
    std::vector<std::string> ids;
    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty()) continue;
        auto cells = split(line);
        if (!cells.empty() && cells.front().substr(0, 3) == "\xEF\xBB\xBF")
            cells.front().remove_prefix(3);
        if (cells.size() < 2) throw ParseError("header needs a timestamp and at least one sensor", lineno);
        for (std::size_t c = 1; c < cells.size(); ++c) {
            if (cells[c].empty()) throw ParseError("empty sensor id in column " + std::to_string(c + 1), lineno);
            ids.emplace_back(cells[c]);
        }
        break;
    }
    if (ids.empty()) throw ParseError("missing header row");

    std::vector<double> times;
    std::vector<std::vector<double>> columns(ids.size());
    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty()) continue;
        auto cells = split(line);
        if (cells.size() != ids.size() + 1)
            throw ParseError("expected " + std::to_string(ids.size() + 1) + " cells, found " +
                                 std::to_string(cells.size()),
                             lineno);
        auto ts = parse_number(cells[0]);
        if (!ts) ts = parse_iso8601(cells[0]);
        if (!ts || !std::isfinite(*ts))
            throw ParseError("unrecognised timestamp '" + std::string(cells[0]) + "'", lineno);
        if (!times.empty() && *ts <= times.back())
            throw ParseError("timestamps must be strictly increasing", lineno);
        times.push_back(*ts);
        for (std::size_t c = 0; c < ids.size(); ++c) {
            auto v = parse_number(cells[c + 1]);
            if (!v || !std::isfinite(*v))
                throw ParseError("non-numeric value '" + std::string(cells[c + 1]) + "' for sensor '" +
                                     ids[c] + "'",
                                 lineno);
            columns[c].push_back(*v);
        }
    }
    if (times.empty()) throw ParseError("no data rows");

    // Modal spacing; exact comparison is fine for the integer/ISO timestamps we accept,
    // a relative tolerance absorbs decimal epoch noise.
    double dt = 1.0;
    bool uniform = true;
    if (times.size() > 1) {
        std::map<double, std::size_t> hist;
        for (std::size_t i = 1; i < times.size(); ++i) ++hist[times[i] - times[i - 1]];
        dt = std::max_element(hist.begin(), hist.end(), [](const auto& a, const auto& b) {
                 return a.second < b.second;
             })->first;
        const double tol = 1e-9 * std::max(1.0, std::abs(dt));
        for (std::size_t i = 1; i < times.size(); ++i)
            if (std::abs((times[i] - times[i - 1]) - dt) > tol) uniform = false;
    }
    if (!uniform && !resample)
        throw ValidationError("non-uniform sampling (modal spacing " + format_shortest(dt) +
                              "s); re-run with resampling enabled to forward-fill");

    IngestReport report;
    const double t0 = times.front();
    std::vector<SensorSeries> sensors;
    if (uniform) {
        for (std::size_t c = 0; c < ids.size(); ++c)
            sensors.emplace_back(ids[c], Eigen::Map<const Vector>(columns[c].data(), columns[c].size()), t0, dt);
    } else {
        const double tol = 1e-9 * std::max(1.0, std::abs(dt));
        const auto steps = static_cast<Index>(std::floor((times.back() - t0) / dt + 1e-9)) + 1;
        std::vector<std::size_t> source(static_cast<std::size_t>(steps));
        std::size_t row = 0;
        for (Index k = 0; k < steps; ++k) {
            const double g = t0 + static_cast<double>(k) * dt;
            while (row + 1 < times.size() && times[row + 1] <= g + tol) ++row;
            source[static_cast<std::size_t>(k)] = row;
            if (std::abs(times[row] - g) > tol) ++report.filled_gaps;
        }
        for (std::size_t c = 0; c < ids.size(); ++c) {
            Vector v(steps);
            for (Index k = 0; k < steps; ++k) v[k] = columns[c][source[static_cast<std::size_t>(k)]];
            sensors.emplace_back(ids[c], std::move(v), t0, dt);
        }
    }
    const Index n = sensors.front().size();
    if (baseline_len < 0 || baseline_len > n)
        throw ValidationError("baseline length " + std::to_string(baseline_len) + " exceeds the " +
                              std::to_string(n) + " available samples");
    report.dataset = Dataset(std::move(sensors), baseline_len);
    return report;
}

void write_csv(std::ostream& out, const Dataset& ds) {
    out << "timestamp";
    for (const auto& s : ds.sensors()) out << ',' << s.id;
    out << '\n';
    for (Index i = 0; i < ds.length(); ++i) {
        out << format_shortest(ds.t0() + static_cast<double>(i) * ds.dt());
        for (const auto& s : ds.sensors()) out << ',' << format_shortest(s.values()[i]);
        out << '\n';
    }
}

void write_csv(const std::filesystem::path& path, const Dataset& ds) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
    write_csv(out, ds);
}

} // namespace sentinel
