#include "sentinel/cli.hpp"
#include "sentinel/colormap.hpp"
#include "sentinel/config.hpp"
#include "sentinel/errors.hpp"
#include "sentinel/ingest.hpp"
#include "sentinel/pipeline.hpp"
#include "sentinel/service.hpp"
#include "sentinel/spiral.hpp"

#include <CLI11.hpp>

#include <charconv>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

namespace sentinel {

namespace fs = std::filesystem;

namespace {

std::ofstream open_output(const fs::path& path) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ArgumentError("cannot write '" + path.string() + "'");
    return out;
}

fs::path detect_conf(const DataDir& dir) { return dir.root / "detect.conf"; }

// m/delta recorded by `detect`, so later stages reproduce the same profiles.
DetectOptions stored_detect_options(const DataDir& dir) {
    ServiceConfig cfg;
    if (fs::exists(detect_conf(dir))) cfg = parse_service_config(read_key_values(detect_conf(dir)));
    return cfg.detect_options();
}

std::optional<Real> parse_delta(const std::string& text) {
    if (text == "auto") return std::nullopt;
    Real v = 0.0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || ptr != text.data() + text.size() || !(v > 0.0))
        throw ArgumentError("--delta must be 'auto' or a positive number");
    return v;
}

std::vector<std::string> split_list(const std::vector<std::string>& items) {
    std::vector<std::string> out;
    for (const auto& item : items) {
        std::stringstream ss(item);
        std::string part;
        while (std::getline(ss, part, ','))
            if (!part.empty()) out.push_back(part);
    }
    return out;
}

std::map<std::string, CategoryThresholds> stored_thresholds(const DataDir& dir) {
    std::map<std::string, CategoryThresholds> out;
    if (!fs::exists(dir.thresholds())) return out;
    for (auto& t : read_thresholds(read_key_values(dir.thresholds()))) out.emplace(t.sensor_id, t);
    return out;
}

// Rebuilds a sensor's analysis from the persisted profiles, computing it when absent.
SensorAnalysis stored_analysis(const DataDir& dir, const Dataset& ds, const SensorSeries& s,
                               const std::map<std::string, CategoryThresholds>& thresholds) {
    SensorAnalysis a;
    const fs::path profile_path = dir.profile(s.id);
    const fs::path baseline_path = dir.baseline_profile(s.id);
    if (fs::exists(profile_path) && fs::exists(baseline_path)) {
        std::ifstream pin(profile_path), bin(baseline_path);
        a.sensor_id = s.id;
        a.profile = read_profile_csv(pin);
        a.profile.m = s.size() - a.profile.size() + 1;
        a.baseline = read_profile_csv(bin);
        a.baseline.m = a.profile.m;
        if (a.profile.size() < 1 || a.profile.m < 2)
            throw ValidationError("profile for '" + s.id + "' does not match the dataset; rerun detect");
        a.thresholds = calibrate(s.id, a.baseline.score);
    } else {
        a = analyze_sensor(s.id, s.values(), ds.baseline_len(), stored_detect_options(dir));
    }
    if (auto it = thresholds.find(s.id); it != thresholds.end()) a.thresholds = it->second;
    refresh_categories(a, s.size());
    return a;
}

struct Globals {
    std::string data = [] {
        const char* env = std::getenv("SENTINEL_DATA");
        return std::string(env && *env ? env : "data");
    }();
};

int cmd_ingest(const Globals& g, const std::string& csv, Index baseline, bool resample, std::ostream& out,
               std::ostream& err) {
    IngestReport report = ingest_csv(fs::path(csv), baseline, resample);
    save_dataset(DataDir{g.data}, report.dataset);
    if (report.filled_gaps > 0)
        err << "warning: resampling filled " << report.filled_gaps << " missing sample"
            << (report.filled_gaps == 1 ? "" : "s") << " by forward fill\n";
    out << report.dataset.sensors().size() << " sensors, " << report.dataset.length() << " samples\n";
    return 0;
}

int cmd_detect(const Globals& g, std::optional<Index> m, const std::string& delta_text, std::ostream& out) {
    const DataDir dir{g.data};
    const Dataset ds = load_dataset(dir);
    DetectOptions opts;
    opts.m = m;
    opts.delta = parse_delta(delta_text);
    if (m && (*m < 4 || 2 * *m > ds.baseline_len()))
        throw ArgumentError("--m " + std::to_string(*m) + " is invalid for a baseline of " +
                            std::to_string(ds.baseline_len()) + " samples");

    std::vector<SensorAnalysis> analyses = analyze_dataset(ds, opts);
    const auto thresholds = stored_thresholds(dir);
    fs::create_directories(dir.root / "profiles");
    fs::create_directories(dir.root / "baseline");
    KeyValues conf;
    if (m) conf["m"] = std::to_string(*m);
    if (opts.delta) conf["delta"] = format_real(*opts.delta);
    {
        auto f = open_output(detect_conf(dir));
        write_key_values(f, conf);
    }

    const auto row = [&out](const std::string& id, const std::string& m_text, const std::string& max,
                            const std::string& th2, const std::string& th3, const std::string& regions) {
        out << std::left << std::setw(12) << id << std::right << ' ' << std::setw(5) << m_text << ' '
            << std::setw(22) << max << ' ' << std::setw(22) << th2 << ' ' << std::setw(22) << th3 << ' '
            << std::setw(7) << regions << '\n';
    };
    row("sensor", "m", "maxScore", "thetaII", "thetaIII", "regions");
    for (auto& a : analyses) {
        if (auto it = thresholds.find(a.sensor_id); it != thresholds.end()) {
            a.thresholds = it->second;
            refresh_categories(a, ds.length());
        }
        {
            auto f = open_output(dir.profile(a.sensor_id));
            write_profile_csv(f, a.profile);
        }
        {
            auto f = open_output(dir.baseline_profile(a.sensor_id));
            write_profile_csv(f, a.baseline);
        }
        const auto regions = overview_regions({{a.sensor_id, a.categories}});
        row(a.sensor_id, std::to_string(a.profile.m), format_real(a.profile.score.maxCoeff()),
            format_real(a.thresholds.theta_ii), format_real(a.thresholds.theta_iii), std::to_string(regions.size()));
    }
    const auto all = overview_regions(collect_categories(analyses));
    out << all.size() << " overview region" << (all.size() == 1 ? "" : "s") << '\n';
    return 0;
}

int cmd_calibrate(const Globals& g, Real buffer, std::optional<Real> percentile, std::ostream& out) {
    const DataDir dir{g.data};
    const Dataset ds = load_dataset(dir);
    CalibrationOptions opts{buffer, percentile};
    std::vector<CategoryThresholds> thresholds;
    for (const auto& s : ds.sensors()) {
        const fs::path path = dir.baseline_profile(s.id);
        AnomalyProfile baseline;
        if (fs::exists(path)) {
            std::ifstream in(path);
            baseline = read_profile_csv(in);
        } else {
            baseline = analyze_sensor(s.id, s.values(), ds.baseline_len(), stored_detect_options(dir)).baseline;
        }
        thresholds.push_back(calibrate(s.id, baseline.score, opts));
    }
    auto f = open_output(dir.thresholds());
    write_thresholds(f, thresholds);
    for (const auto& t : thresholds)
        out << t.sensor_id << ": thetaII=" << format_real(t.theta_ii) << " thetaIII=" << format_real(t.theta_iii)
            << '\n';
    return 0;
}

struct RenderArgs {
    std::vector<std::string> sensors;
    Index from = 0;
    Index to = 0;
    std::optional<Real> period;
    std::string map = "parula";
    std::string range = "global";
    std::string theme = "light";
    std::string thickness = "on";
    std::optional<Real> epsilon;
    std::optional<Index> k;
    std::string out;
};

int cmd_render(const Globals& g, const RenderArgs& r, std::ostream& out) {
    const DataDir dir{g.data};
    const Dataset ds = load_dataset(dir);
    const TimeFrame frame{r.from, r.to};
    if (r.from < 0 || r.to > ds.length() || r.from >= r.to)
        throw ArgumentError("need 0 <= from < to <= " + std::to_string(ds.length()));
    validate_frame(frame, kMaxFrameSamples);
    if (r.period && !(*r.period > 0.0)) throw ArgumentError("--period must be positive");

    SpiralConfig cfg = ServiceConfig{}.spiral_defaults();
    cfg.colormap = *parse_colormap(r.map);
    cfg.range = *parse_color_range(r.range);
    cfg.thickness_on = r.thickness == "on";
    if (r.epsilon) cfg.epsilon = r.epsilon;
    if (r.k) cfg.k = *r.k;

    std::vector<std::string> ids = split_list(r.sensors);
    if (ids.size() == 1 && ids.front() == "all") {
        ids.clear();
        for (const auto& s : ds.sensors()) ids.push_back(s.id);
    }
    const auto thresholds = stored_thresholds(dir);
    std::vector<SpiralLayout> layouts;
    for (const auto& id : ids) {
        const SensorSeries* s = ds.find(id);
        if (!s) throw ArgumentError("unknown sensor '" + id + "'");
        const SensorAnalysis a = stored_analysis(dir, ds, *s, thresholds);
        layouts.push_back(sensor_layout(*s, a, frame, cfg, r.period));
    }
    auto f = open_output(r.out);
    f << render_svg(layouts, *parse_theme(r.theme));
    std::size_t segments = 0;
    for (const auto& l : layouts) segments += l.segments.size();
    out << "wrote " << r.out << " (" << layouts.size() << " spiral" << (layouts.size() == 1 ? "" : "s") << ", "
        << segments << " segments)\n";
    return 0;
}

int cmd_generate(const std::string& kind_text, Index n, Index period, Real noise, std::uint64_t seed,
                 const std::string& out_path, std::ostream& out) {
    const auto kind = parse_scenario_kind(kind_text);
    if (!kind) throw ArgumentError("unknown scenario kind '" + kind_text + "'");
    auto [series, label] = generate_scenario(*kind, n, period, noise, seed);
    const Dataset ds({std::move(series)}, n / 2);
    {
        auto f = open_output(out_path);
        write_csv(f, ds);
    }
    KeyValues meta{{"kind", std::string(to_string(label.kind))}, {"baseline", std::to_string(n / 2)}};
    if (label.window) {
        meta["start"] = std::to_string(label.window->start);
        meta["end"] = std::to_string(label.window->end);
    }
    auto f = open_output(out_path + ".label");
    write_key_values(f, meta);
    out << "wrote " << out_path << " (" << n << " samples, kind " << to_string(label.kind) << ")\n";
    return 0;
}

int cmd_plant(Index length, Index baseline, std::uint64_t seed, const std::string& out_path, std::ostream& out) {
    const PlantAnalogue plant = generate_plant_analogue(length, baseline, seed);
    {
        auto f = open_output(out_path);
        write_csv(f, plant.dataset);
    }
    KeyValues meta{{"baseline", std::to_string(baseline)}, {"attacks", std::to_string(plant.attacks.size())}};
    for (std::size_t i = 0; i < plant.attacks.size(); ++i) {
        meta["attack." + std::to_string(i + 1) + ".start"] = std::to_string(plant.attacks[i].start);
        meta["attack." + std::to_string(i + 1) + ".end"] = std::to_string(plant.attacks[i].end);
    }
    auto f = open_output(out_path + ".label");
    write_key_values(f, meta);
    out << "wrote " << out_path << " (" << plant.dataset.sensors().size() << " sensors, " << length
        << " samples)\n";
    return 0;
}

int cmd_colormap(const std::string& dir, std::ostream& out) {
    for (Colormap map : {Colormap::Parula, Colormap::Jet}) {
        const fs::path path = fs::path(dir) / (std::string(to_string(map)) + ".csv");
        auto f = open_output(path);
        write_colormap_csv(f, colormap_table(map));
        out << "wrote " << path.string() << '\n';
    }
    return 0;
}

int cmd_serve(const Globals& g, bool data_given, std::optional<int> port, std::optional<std::string> live,
              const std::string& config_path) {
    ServiceConfig cfg;
    if (!config_path.empty()) cfg = parse_service_config(read_key_values(fs::path(config_path)));
    apply_env_overrides(cfg);
    if (data_given || config_path.empty()) cfg.data_path = g.data;
    const DataDir dir{cfg.data_path};
    if (fs::is_directory(dir.root) && fs::exists(detect_conf(dir))) {
        const ServiceConfig stored = parse_service_config(read_key_values(detect_conf(dir)));
        if (!cfg.m) cfg.m = stored.m;
        if (!cfg.delta) cfg.delta = stored.delta;
    }
    if (port) cfg.port = *port;
    if (live) {
        if (*live == "none") cfg.live_source.reset();
        else cfg.live_source = *live;
    }
    return run_server(cfg);
}

} // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Triage analysis of periodic sensor streams"};
    app.require_subcommand(1);
    Globals g;
    auto* data_opt = app.add_option("--data", g.data, "Data directory")->capture_default_str();

    std::string csv;
    Index baseline = 0;
    bool resample = false;
    auto* ingest = app.add_subcommand("ingest", "Load a CSV into the data directory");
    ingest->add_option("--csv", csv, "Input CSV")->required();
    ingest->add_option("--baseline", baseline, "Leading attack-free samples")->required()->check(CLI::NonNegativeNumber);
    ingest->add_flag("--resample", resample, "Forward-fill gaps onto a uniform grid");

    std::optional<Index> m;
    std::string delta = "auto";
    auto* detect = app.add_subcommand("detect", "Compute anomaly profiles");
    detect->add_option("--m", m, "Subsequence length (default: baseline period estimate)");
    detect->add_option("--delta", delta, "Closeness radius, or auto")->capture_default_str();

    Real buffer = 1.2;
    std::optional<Real> percentile;
    auto* calib = app.add_subcommand("calibrate", "Derive category thresholds from the baseline");
    calib->add_option("--buffer", buffer, "thetaIII / thetaII")->capture_default_str()->check(CLI::Range(1.0, 1e9));
    calib->add_option("--p", percentile, "Baseline percentile for thetaII")->check(CLI::Range(0.0, 100.0));

    RenderArgs r;
    auto* render = app.add_subcommand("render", "Render spirals to SVG");
    render->add_option("--sensor", r.sensors, "Sensor id(s), comma separated, or all")->required();
    render->add_option("--from", r.from, "First sample")->required();
    render->add_option("--to", r.to, "One past the last sample")->required();
    render->add_option("--period", r.period, "Samples per revolution (default: estimate)");
    render->add_option("--map", r.map)->check(CLI::IsMember({"parula", "jet"}))->capture_default_str();
    render->add_option("--range", r.range)->check(CLI::IsMember({"global", "local"}))->capture_default_str();
    render->add_option("--theme", r.theme)->check(CLI::IsMember({"light", "dark"}))->capture_default_str();
    render->add_option("--thickness", r.thickness)->check(CLI::IsMember({"on", "off"}))->capture_default_str();
    render->add_option("--epsilon", r.epsilon, "Value-merge threshold")->check(CLI::NonNegativeNumber);
    render->add_option("--k", r.k, "Max samples per segment")->check(CLI::PositiveNumber);
    render->add_option("--out", r.out, "Output SVG")->required();

    std::string kind, gen_out;
    Index n = 4000, period = 100;
    Real noise = 0.0;
    std::uint64_t seed = 1;
    auto* generate = app.add_subcommand("generate", "Write a synthetic scenario CSV and label");
    generate->add_option("--kind", kind, "periodDisruption|abnormalDwell|phaseShift|abnormalValues|none")->required();
    generate->add_option("--n", n)->required();
    generate->add_option("--period", period)->required();
    generate->add_option("--noise", noise)->capture_default_str();
    generate->add_option("--seed", seed)->capture_default_str();
    generate->add_option("--out", gen_out)->required();

    Index plant_len = 38'000, plant_baseline = 10'000;
    std::uint64_t plant_seed = 1;
    std::string plant_out;
    auto* plant = app.add_subcommand("plant", "Write the 51-sensor plant analogue CSV and label");
    plant->add_option("--length", plant_len)->capture_default_str();
    plant->add_option("--baseline", plant_baseline)->capture_default_str();
    plant->add_option("--seed", plant_seed)->capture_default_str();
    plant->add_option("--out", plant_out)->required();

    std::string colormap_dir = "data/colormaps";
    auto* colormap = app.add_subcommand("colormap", "Export the colour tables as CSV");
    colormap->add_option("--dir", colormap_dir)->capture_default_str();

    std::optional<int> port;
    std::optional<std::string> live;
    std::string config_path;
    auto* serve = app.add_subcommand("serve", "Run the HTTP service");
    serve->add_option("--port", port)->check(CLI::Range(0, 65535));
    serve->add_option("--live", live, "Replay CSV for live mode, or none");
    serve->add_option("--config", config_path, "key=value service configuration");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err) == 0 ? 0 : 1;
    }

    try {
        if (*ingest) return cmd_ingest(g, csv, baseline, resample, out, err);
        if (*detect) return cmd_detect(g, m, delta, out);
        if (*calib) return cmd_calibrate(g, buffer, percentile, out);
        if (*render) return cmd_render(g, r, out);
        if (*generate) return cmd_generate(kind, n, period, noise, seed, gen_out, out);
        if (*plant) return cmd_plant(plant_len, plant_baseline, plant_seed, plant_out, out);
        if (*colormap) return cmd_colormap(colormap_dir, out);
        if (*serve) return cmd_serve(g, data_opt->count() > 0, port, live, config_path);
    } catch (const ParseError& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    } catch (const ArgumentError& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    } catch (const ValidationError& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    } catch (const CalibrationError& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    } catch (const fs::filesystem_error& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << '\n';
        return 2;
    }
    return 1;
}

} // namespace sentinel
