#include "sentinel/errors.hpp"
#include "sentinel/ingest.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <random>

namespace sentinel {

std::string_view to_string(ScenarioKind kind) {
    switch (kind) {
    case ScenarioKind::PeriodDisruption: return "periodDisruption";
    case ScenarioKind::AbnormalDwell: return "abnormalDwell";
    case ScenarioKind::PhaseShift: return "phaseShift";
    case ScenarioKind::AbnormalValues: return "abnormalValues";
    case ScenarioKind::None: return "none";
    }
    return "none";
}

std::optional<ScenarioKind> parse_scenario_kind(std::string_view text) {
    for (auto k : {ScenarioKind::PeriodDisruption, ScenarioKind::AbnormalDwell,
                   ScenarioKind::PhaseShift, ScenarioKind::AbnormalValues, ScenarioKind::None})
        if (text == to_string(k)) return k;
    return std::nullopt;
}

std::pair<SensorSeries, ScenarioLabel> generate_scenario(ScenarioKind kind, Index n, Index period,
                                                         double noise_sigma, std::uint64_t seed) {
    if (period < 4) throw ArgumentError("period must be at least 4 samples");
    if (n < 4 * period) throw ArgumentError("need at least four periods of samples");
    if (!(noise_sigma >= 0.0) || !std::isfinite(noise_sigma))
        throw ArgumentError("noise sigma must be finite and non-negative");

    constexpr double two_pi = 2.0 * std::numbers::pi;
    const double p = static_cast<double>(period);
    const Index centre = static_cast<Index>(std::floor(0.75 * static_cast<double>(n)));
    const TimeFrame window{centre - period / 2, centre - period / 2 + period};

    Vector v(n);
    for (Index t = 0; t < n; ++t) v[t] = std::sin(two_pi * static_cast<double>(t) / p);

    switch (kind) {
    case ScenarioKind::PeriodDisruption: {
        // Integrate the phase so the signal stays continuous across the slowed cycle.
        double phase = two_pi * static_cast<double>(window.start) / p;
        for (Index t = window.start; t < n; ++t) {
            v[t] = std::sin(phase);
            phase += two_pi / (window.contains(t) ? 1.5 * p : p);
        }
        break;
    }
    case ScenarioKind::AbnormalDwell:
        v.segment(window.start, period).setConstant(-1.0);
        break;
    case ScenarioKind::PhaseShift:
        // Half a period ahead of sin(x) is exactly -sin(x).
        v.tail(n - window.start) = -v.tail(n - window.start);
        break;
    case ScenarioKind::AbnormalValues:
        v.segment(window.start, period).array() += 3.0;
        break;
    case ScenarioKind::None:
        break;
    }

    if (noise_sigma > 0.0) {
        std::mt19937_64 rng(seed);
        std::normal_distribution<double> noise(0.0, noise_sigma);
        for (Index t = 0; t < n; ++t) v[t] += noise(rng);
    }

    ScenarioLabel label{kind, std::nullopt};
    if (kind != ScenarioKind::None) label.window = window;
    SensorSeries series(std::string(to_string(kind)), std::move(v));
    return {std::move(series), label};
}

namespace {

enum class Shape { Sine, Triangle, Square };

struct Channel {
    const char* id;
    const char* unit;
    Shape shape;
    double level;
    double amplitude;
};

// Six process stages: raw water, pre-treatment, ultrafiltration, dechlorination,
// reverse osmosis, disposal.
constexpr std::array<Channel, 51> kChannels{{
    {"FIT101", "m3/h", Shape::Sine, 2.4, 0.3},     {"LIT101", "mm", Shape::Triangle, 650, 150},
    {"MV101", "", Shape::Square, 1.5, 0.5},        {"P101", "", Shape::Square, 1.5, 0.5},
    {"P102", "", Shape::Square, 1.0, 0.0},         {"AIT201", "uS/cm", Shape::Sine, 260, 4},
    {"AIT202", "pH", Shape::Sine, 8.4, 0.05},      {"AIT203", "mV", Shape::Sine, 330, 6},
    {"FIT201", "m3/h", Shape::Sine, 2.4, 0.3},     {"MV201", "", Shape::Square, 1.5, 0.5},
    {"P201", "", Shape::Square, 1.0, 0.0},         {"P202", "", Shape::Square, 1.0, 0.0},
    {"P203", "", Shape::Square, 1.5, 0.5},         {"P204", "", Shape::Square, 1.0, 0.0},
    {"P205", "", Shape::Square, 1.5, 0.5},         {"P206", "", Shape::Square, 1.0, 0.0},
    {"DPIT301", "kPa", Shape::Sine, 19, 2.5},      {"FIT301", "m3/h", Shape::Sine, 2.2, 0.2},
    {"LIT301", "mm", Shape::Triangle, 900, 80},    {"MV301", "", Shape::Square, 1.5, 0.5},
    {"MV302", "", Shape::Square, 1.5, 0.5},        {"MV303", "", Shape::Square, 1.5, 0.5},
    {"MV304", "", Shape::Square, 1.5, 0.5},        {"P301", "", Shape::Square, 1.0, 0.0},
    {"P302", "", Shape::Square, 1.5, 0.5},         {"AIT401", "ppm", Shape::Sine, 148, 2},
    {"AIT402", "mV", Shape::Sine, 156, 3},         {"FIT401", "m3/h", Shape::Sine, 1.7, 0.1},
    {"LIT401", "mm", Shape::Triangle, 880, 100},   {"P401", "", Shape::Square, 1.0, 0.0},
    {"P402", "", Shape::Square, 1.5, 0.5},         {"P403", "", Shape::Square, 1.0, 0.0},
    {"P404", "", Shape::Square, 1.0, 0.0},         {"UV401", "", Shape::Square, 1.5, 0.5},
    {"AIT501", "pH", Shape::Sine, 7.9, 0.05},      {"AIT502", "mV", Shape::Sine, 145, 4},
    {"AIT503", "uS/cm", Shape::Sine, 264, 3},      {"AIT504", "uS/cm", Shape::Sine, 12, 0.6},
    {"FIT501", "m3/h", Shape::Sine, 1.7, 0.1},     {"FIT502", "m3/h", Shape::Sine, 1.3, 0.1},
    {"FIT503", "m3/h", Shape::Sine, 0.7, 0.05},    {"FIT504", "m3/h", Shape::Sine, 0.3, 0.02},
    {"P501", "", Shape::Square, 1.5, 0.5},         {"P502", "", Shape::Square, 1.0, 0.0},
    {"PIT501", "kPa", Shape::Sine, 250, 5},        {"PIT502", "kPa", Shape::Sine, 1.2, 0.2},
    {"PIT503", "kPa", Shape::Sine, 190, 4},        {"FIT601", "m3/h", Shape::Sine, 0.2, 0.05},
    {"P601", "", Shape::Square, 1.0, 0.0},         {"P602", "", Shape::Square, 1.5, 0.5},
    {"P603", "", Shape::Square, 1.0, 0.0},
}};

double wave(Shape shape, double phase) {
    constexpr double two_pi = 2.0 * std::numbers::pi;
    const double cycle = phase / two_pi - std::floor(phase / two_pi);
    switch (shape) {
    case Shape::Sine: return std::sin(phase);
    case Shape::Triangle: return cycle < 0.5 ? 4.0 * cycle - 1.0 : 3.0 - 4.0 * cycle;
    case Shape::Square: return cycle < 0.5 ? 1.0 : -1.0;
    }
    return 0.0;
}

} // namespace

PlantAnalogue generate_plant_analogue(Index length, Index baseline_len, std::uint64_t seed) {
    if (baseline_len < 1 || length <= baseline_len)
        throw ArgumentError("plant analogue needs 0 < baseline < length");
    const Index attack_span = length - baseline_len;
    const Index attack_len = std::max<Index>(40, attack_span / 90);
    if (attack_span < 10 * attack_len) throw ArgumentError("attack segment too short for five attacks");

    PlantAnalogue out;
    for (int k = 0; k < 5; ++k) {
        const Index start = baseline_len + attack_span * (2 * k + 1) / 10 - attack_len / 2;
        out.attacks.push_back({start, start + attack_len});
    }

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    constexpr double two_pi = 2.0 * std::numbers::pi;

    std::vector<SensorSeries> sensors;
    sensors.reserve(kChannels.size());
    for (std::size_t c = 0; c < kChannels.size(); ++c) {
        const Channel& ch = kChannels[c];
        const double period = 60.0 + 30.0 * static_cast<double>(c % 8);
        const double offset = two_pi * unit(rng);
        const double noise = ch.shape == Shape::Square ? 0.0 : 0.02 * std::max(ch.amplitude, 1e-3);
        const std::string id = ch.id;

        Vector v(length);
        for (Index t = 0; t < length; ++t) {
            const double phase = two_pi * static_cast<double>(t) / period + offset;
            v[t] = ch.level + ch.amplitude * wave(ch.shape, phase) + noise * gauss(rng);
        }
        if (id == "DPIT301") {
            // Attacks drive the transmitter to a high reading.
            for (const auto& a : out.attacks)
                for (Index t = a.start; t < a.end; ++t)
                    v[t] = ch.level + 3.0 * ch.amplitude + noise * gauss(rng);
        } else if (id == "LIT401") {
            // The first attack freezes the tank level.
            const auto& a = out.attacks.front();
            const double held = v[a.start];
            for (Index t = a.start; t < a.end; ++t) v[t] = held + noise * gauss(rng);
        }
        SensorSeries s(id, std::move(v));
        s.unit = ch.unit;
        sensors.push_back(std::move(s));
    }
    out.dataset = Dataset(std::move(sensors), baseline_len);
    return out;
}

} // namespace sentinel
