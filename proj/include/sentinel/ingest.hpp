#pragma once

#include "sentinel/types.hpp"

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace sentinel {

// One channel of uniformly sampled readings.
class SensorSeries {
public:
    SensorSeries() = default;
    SensorSeries(std::string id, Vector values, double t0 = 0.0, double dt = 1.0);

    std::string id;
    std::string name;
    std::string unit;
    double t0 = 0.0;
    double dt = 1.0;

    const Vector& values() const { return values_; }
    Index size() const { return values_.size(); }
    Real global_min() const { return min_; }
    Real global_max() const { return max_; }

    // Live-mode growth; keeps the cached extrema current.
    void append(Real v);

private:
    void refresh_extrema();

    Vector values_;
    Real min_ = 0.0;
    Real max_ = 0.0;
};

// Sensors sharing t0/dt/length, plus the count of leading attack-free samples.
class Dataset {
public:
    Dataset() = default;
    Dataset(std::vector<SensorSeries> sensors, Index baseline_len);

    const std::vector<SensorSeries>& sensors() const { return sensors_; }
    std::vector<SensorSeries>& sensors() { return sensors_; }
    Index baseline_len() const { return baseline_len_; }
    Index length() const { return sensors_.empty() ? 0 : sensors_.front().size(); }
    double t0() const { return sensors_.empty() ? 0.0 : sensors_.front().t0; }
    double dt() const { return sensors_.empty() ? 1.0 : sensors_.front().dt; }
    bool empty() const { return sensors_.empty(); }

    const SensorSeries* find(std::string_view id) const;

    // Throws ValidationError if sensors disagree on length/t0/dt or baseline is out of range.
    void check_consistency() const;

private:
    std::vector<SensorSeries> sensors_;
    Index baseline_len_ = 0;
};

struct IngestReport {
    Dataset dataset;
    Index filled_gaps = 0; // grid points synthesized by forward fill
};

// CSV with header `timestamp,<id1>,...`. Timestamps are epoch seconds or ISO-8601.
IngestReport ingest_csv(const std::filesystem::path& path, Index baseline_len, bool resample);
IngestReport ingest_csv(std::istream& in, Index baseline_len, bool resample);

// Epoch seconds from an ISO-8601 date-time (`YYYY-MM-DD[T ]hh:mm:ss[.fff][Z|±hh:mm]`).
std::optional<double> parse_iso8601(std::string_view text);

// Shortest round-trip decimal representation of every value.
void write_csv(std::ostream& out, const Dataset& ds);
void write_csv(const std::filesystem::path& path, const Dataset& ds);

enum class ScenarioKind { PeriodDisruption, AbnormalDwell, PhaseShift, AbnormalValues, None };

std::string_view to_string(ScenarioKind kind);
std::optional<ScenarioKind> parse_scenario_kind(std::string_view text);

struct ScenarioLabel {
    ScenarioKind kind = ScenarioKind::None;
    std::optional<TimeFrame> window;
};

// Noisy sinusoid with one injected anomaly of length `period` centred on floor(0.75 n).
std::pair<SensorSeries, ScenarioLabel> generate_scenario(ScenarioKind kind, Index n, Index period,
                                                         double noise_sigma, std::uint64_t seed);

// Water-treatment-plant analogue: 51 channels named after the six-stage process, a clean
// baseline prefix and five attack windows. DPIT301 reacts to every attack, LIT401 to the first.
struct PlantAnalogue {
    Dataset dataset;
    std::vector<TimeFrame> attacks;
};
PlantAnalogue generate_plant_analogue(Index length = 38'000, Index baseline_len = 10'000,
                                      std::uint64_t seed = 1);

} // namespace sentinel
