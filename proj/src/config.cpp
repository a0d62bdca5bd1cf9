#include "sentinel/config.hpp"
#include "sentinel/errors.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace sentinel {

namespace {

std::string trimmed(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

template <typename T>
T parse_as(const std::string& key, const std::string& text) {
    T v{};
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || ptr != text.data() + text.size())
        throw ParseError("invalid value '" + text + "' for '" + key + "'");
    return v;
}

template <typename T>
T positive(const std::string& key, const std::string& text) {
    const T v = parse_as<T>(key, text);
    if (!(v > T(0))) throw ParseError("'" + key + "' must be positive");
    return v;
}

} // namespace

std::string format_real(Real v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

KeyValues read_key_values(std::istream& in) {
    KeyValues kv;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string t = trimmed(line);
        if (t.empty() || t.front() == '#') continue;
        const auto eq = t.find('=');
        if (eq == std::string::npos || eq == 0) throw ParseError("expected key=value", lineno);
        kv[trimmed(t.substr(0, eq))] = trimmed(t.substr(eq + 1));
    }
    return kv;
}

KeyValues read_key_values(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open '" + path.string() + "'");
    return read_key_values(in);
}

void write_key_values(std::ostream& out, const KeyValues& kv) {
    for (const auto& [k, v] : kv) out << k << '=' << v << '\n';
}

ServiceConfig parse_service_config(const KeyValues& kv, ServiceConfig cfg) {
    for (const auto& [key, value] : kv) {
        if (key == "port") cfg.port = positive<int>(key, value);
        else if (key == "data") cfg.data_path = value;
        else if (key == "baseline") cfg.baseline_len = positive<Index>(key, value);
        else if (key == "m") cfg.m = positive<Index>(key, value);
        else if (key == "buffer") cfg.buffer_factor = positive<Real>(key, value);
        else if (key == "delta") cfg.delta = value == "auto" ? std::nullopt : std::optional<Real>(positive<Real>(key, value));
        else if (key == "epsilon") cfg.epsilon = value == "auto" ? std::nullopt : std::optional<Real>(positive<Real>(key, value));
        else if (key == "k") cfg.k = positive<Index>(key, value);
        else if (key == "wmin") cfg.w_min = positive<Real>(key, value);
        else if (key == "wmax") cfg.w_max = positive<Real>(key, value);
        else if (key == "revolution_cap") cfg.revolution_cap = positive<Index>(key, value);
        else if (key == "max_frame") cfg.max_frame_samples = positive<Index>(key, value);
        else if (key == "live_interval_ms") cfg.live_interval_ms = positive<int>(key, value);
        else if (key == "live") cfg.live_source = value == "none" ? std::nullopt : std::optional<std::filesystem::path>(value);
        else throw ParseError("unknown configuration key '" + key + "'");
    }
    if (cfg.w_min > cfg.w_max) throw ParseError("wmin exceeds wmax");
    if (cfg.buffer_factor < 1.0) throw ParseError("buffer must be at least 1");
    return cfg;
}

void apply_env_overrides(ServiceConfig& cfg, const std::function<const char*(const char*)>& getenv) {
    if (const char* port = getenv("SENTINEL_PORT"); port && *port) cfg.port = positive<int>("SENTINEL_PORT", port);
    if (const char* data = getenv("SENTINEL_DATA"); data && *data) cfg.data_path = data;
}

DetectOptions ServiceConfig::detect_options() const {
    DetectOptions o;
    o.m = m;
    o.delta = delta;
    o.calibration.buffer_factor = buffer_factor;
    return o;
}

SpiralConfig ServiceConfig::spiral_defaults() const {
    SpiralConfig c;
    c.epsilon = epsilon;
    c.k = k;
    c.w_min = w_min;
    c.w_max = w_max;
    c.revolution_cap = revolution_cap;
    return c;
}

void save_dataset(const DataDir& dir, const Dataset& ds) {
    std::filesystem::create_directories(dir.root);
    write_csv(dir.dataset_csv(), ds);
    KeyValues meta{{"baseline", std::to_string(ds.baseline_len())},
                   {"length", std::to_string(ds.length())},
                   {"sensors", std::to_string(ds.sensors().size())}};
    for (const auto& s : ds.sensors()) {
        if (!s.unit.empty()) meta["unit." + s.id] = s.unit;
        if (s.name != s.id) meta["name." + s.id] = s.name;
    }
    std::ofstream out(dir.dataset_meta());
    write_key_values(out, meta);
}

Dataset load_dataset(const DataDir& dir, std::optional<Index> baseline_override) {
    KeyValues meta;
    if (std::filesystem::exists(dir.dataset_meta())) meta = read_key_values(dir.dataset_meta());
    Index baseline = 0;
    if (baseline_override) baseline = *baseline_override;
    else if (auto it = meta.find("baseline"); it != meta.end()) baseline = parse_as<Index>("baseline", it->second);
    Dataset ds = ingest_csv(dir.dataset_csv(), baseline, false).dataset;
    for (auto& s : ds.sensors()) {
        if (auto it = meta.find("unit." + s.id); it != meta.end()) s.unit = it->second;
        if (auto it = meta.find("name." + s.id); it != meta.end()) s.name = it->second;
    }
    return ds;
}

void write_profile_csv(std::ostream& out, const AnomalyProfile& p) {
    out << "index,nnDist,closeCount,score\n";
    for (Index i = 0; i < p.size(); ++i)
        out << i << ',' << format_real(p.nn_dist[i]) << ',' << p.close_count[i] << ',' << format_real(p.score[i]) << '\n';
}

AnomalyProfile read_profile_csv(std::istream& in) {
    std::vector<Real> nn, score;
    std::vector<int> close;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (lineno == 1 || trimmed(line).empty()) continue;
        std::istringstream row(line);
        std::string cell[4];
        for (auto& c : cell)
            if (!std::getline(row, c, ',')) throw ParseError("expected 4 columns", lineno);
        if (parse_as<Index>("index", trimmed(cell[0])) != static_cast<Index>(nn.size()))
            throw ParseError("profile indices must be consecutive from 0", lineno);
        nn.push_back(parse_as<Real>("nnDist", trimmed(cell[1])));
        close.push_back(parse_as<int>("closeCount", trimmed(cell[2])));
        score.push_back(parse_as<Real>("score", trimmed(cell[3])));
    }
    AnomalyProfile p;
    p.nn_dist = Eigen::Map<Vector>(nn.data(), static_cast<Index>(nn.size()));
    p.close_count = Eigen::Map<Eigen::VectorXi>(close.data(), static_cast<Index>(close.size()));
    p.score = Eigen::Map<Vector>(score.data(), static_cast<Index>(score.size()));
    p.nn_index = Eigen::VectorXi::Constant(p.nn_dist.size(), -1);
    return p;
}

void write_thresholds(std::ostream& out, const std::vector<CategoryThresholds>& th) {
    for (const auto& t : th) {
        out << t.sensor_id << ".thetaII=" << format_real(t.theta_ii) << '\n';
        out << t.sensor_id << ".thetaIII=" << format_real(t.theta_iii) << '\n';
    }
}

std::vector<CategoryThresholds> read_thresholds(const KeyValues& kv) {
    std::map<std::string, CategoryThresholds> by_id;
    std::map<std::string, int> seen;
    for (const auto& [key, value] : kv) {
        const auto dot = key.rfind('.');
        if (dot == std::string::npos) throw ParseError("threshold key '" + key + "' lacks a sensor prefix");
        const std::string id = key.substr(0, dot);
        const std::string field = key.substr(dot + 1);
        auto& t = by_id[id];
        t.sensor_id = id;
        if (field == "thetaII") t.theta_ii = parse_as<Real>(key, value);
        else if (field == "thetaIII") t.theta_iii = parse_as<Real>(key, value);
        else throw ParseError("unknown threshold field '" + field + "'");
        ++seen[id];
    }
    std::vector<CategoryThresholds> out;
    for (auto& [id, t] : by_id) {
        if (seen[id] != 2) throw ParseError("sensor '" + id + "' needs both thetaII and thetaIII");
        if (!(t.theta_ii >= 0.0 && t.theta_ii <= t.theta_iii))
            throw ParseError("sensor '" + id + "' violates 0 <= thetaII <= thetaIII");
        out.push_back(t);
    }
    return out;
}

} // namespace sentinel
