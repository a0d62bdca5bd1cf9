#pragma once

#include "sentinel/ingest.hpp"
#include "sentinel/mprofile.hpp"
#include "sentinel/pipeline.hpp"
#include "sentinel/spiral.hpp"
#include "sentinel/triage.hpp"

#include <filesystem>
#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace sentinel {

// Flat `key=value` files; `#` starts a comment line.
using KeyValues = std::map<std::string, std::string>;

KeyValues read_key_values(std::istream& in);
KeyValues read_key_values(const std::filesystem::path& path);
void write_key_values(std::ostream& out, const KeyValues& kv);

struct ServiceConfig {
    int port = 8080;
    std::filesystem::path data_path = "data";
    std::optional<Index> baseline_len;  // empty: from dataset.meta
    std::optional<Index> m;
    Real buffer_factor = 1.2;
    std::optional<Real> delta;          // empty: auto
    std::optional<Real> epsilon;        // empty: 1% of the colour range
    Index k = 100;
    Real w_min = 1.0;
    Real w_max = 6.0;
    Index revolution_cap = 12;
    Index max_frame_samples = kMaxFrameSamples;
    int live_interval_ms = 1000;
    std::optional<std::filesystem::path> live_source;

    DetectOptions detect_options() const;
    SpiralConfig spiral_defaults() const;
};

// Unknown keys and non-positive numbers raise ParseError.
ServiceConfig parse_service_config(const KeyValues& kv, ServiceConfig base = {});

// SENTINEL_PORT and SENTINEL_DATA; `getenv` is injectable for tests.
void apply_env_overrides(ServiceConfig& cfg,
                         const std::function<const char*(const char*)>& getenv = [](const char* k) {
                             return std::getenv(k);
                         });

// Data directory convention shared by the CLI and the service:
//   dataset.csv, dataset.meta, thresholds.conf, profiles/<id>.csv, baseline/<id>.csv
struct DataDir {
    std::filesystem::path root;

    std::filesystem::path dataset_csv() const { return root / "dataset.csv"; }
    std::filesystem::path dataset_meta() const { return root / "dataset.meta"; }
    std::filesystem::path thresholds() const { return root / "thresholds.conf"; }
    std::filesystem::path profile(const std::string& id) const { return root / "profiles" / (id + ".csv"); }
    std::filesystem::path baseline_profile(const std::string& id) const { return root / "baseline" / (id + ".csv"); }
};

void save_dataset(const DataDir& dir, const Dataset& ds);
Dataset load_dataset(const DataDir& dir, std::optional<Index> baseline_override = std::nullopt);

// `index,nnDist,closeCount,score`.
void write_profile_csv(std::ostream& out, const AnomalyProfile& p);
AnomalyProfile read_profile_csv(std::istream& in);

// `<id>.thetaII=...` / `<id>.thetaIII=...`
void write_thresholds(std::ostream& out, const std::vector<CategoryThresholds>& th);
std::vector<CategoryThresholds> read_thresholds(const KeyValues& kv);

std::string format_real(Real v);

} // namespace sentinel
