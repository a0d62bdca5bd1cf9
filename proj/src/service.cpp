#include "sentinel/service.hpp"
#include "sentinel/errors.hpp"
#include "sentinel/period.hpp"
#include "sentinel/spiral.hpp"

#include <httplib.h>
#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <csignal>
#include <iostream>

namespace sentinel {

using nlohmann::json;

namespace {

struct HttpError {
    int status;
    std::string message;
};

HttpResponse error_response(int status, const std::string& message) {
    return {status, json{{"error", message}}.dump()};
}

HttpResponse ok(const json& body) { return {200, body.dump()}; }

std::optional<std::string> param(const QueryParams& q, const std::string& key) {
    auto it = q.find(key);
    if (it == q.end() || it->second.empty()) return std::nullopt;
    return it->second;
}

template <typename T>
std::optional<T> numeric_param(const QueryParams& q, const std::string& key) {
    auto text = param(q, key);
    if (!text) return std::nullopt;
    T v{};
    auto [ptr, ec] = std::from_chars(text->data(), text->data() + text->size(), v);
    if (ec != std::errc() || ptr != text->data() + text->size())
        throw HttpError{400, "parameter '" + key + "' is not a valid number"};
    return v;
}

TimeFrame requested_frame(const QueryParams& q, Index length, Index cap) {
    auto from = numeric_param<Index>(q, "from");
    auto to = numeric_param<Index>(q, "to");
    if (!from || !to) throw HttpError{400, "parameters 'from' and 'to' are required"};
    if (*from < 0 || *to > length || *from >= *to)
        throw HttpError{400, "need 0 <= from < to <= " + std::to_string(length)};
    if (*to - *from > cap)
        throw HttpError{400, "frame of " + std::to_string(*to - *from) + " samples exceeds the maximum of " +
                                 std::to_string(cap)};
    return {*from, *to};
}

const SensorAnalysis* find_analysis(const std::vector<SensorAnalysis>& analyses, const std::string& id) {
    for (const auto& a : analyses)
        if (a.sensor_id == id) return &a;
    return nullptr;
}

std::vector<std::string> split_ids(const std::string& text) {
    std::vector<std::string> ids;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        auto comma = text.find(',', pos);
        if (comma == std::string::npos) comma = text.size();
        if (comma > pos) ids.push_back(text.substr(pos, comma - pos));
        pos = comma + 1;
    }
    return ids;
}

json frame_json(const TimeFrame& f) { return {{"start", f.start}, {"end", f.end}}; }

json layout_json(const SpiralLayout& l) {
    json segments = json::array();
    for (const auto& s : l.segments) {
        json poly = json::array();
        for (const auto& p : s.polyline) poly.push_back({p.x, p.y});
        segments.push_back({{"tStart", s.t_start},
                            {"len", s.len},
                            {"anchorValue", s.anchor_value},
                            {"colorIndex", s.color_index},
                            {"thickness", s.thickness},
                            {"category", static_cast<int>(s.category)},
                            {"polyline", std::move(poly)}});
    }
    const SpiralConfig& c = l.config;
    return {{"sensor", l.sensor_id},
            {"frame", frame_json(l.frame)},
            {"cycleSamples", c.cycle_samples},
            {"ringSpacing", l.ring_spacing},
            {"epsilon", l.epsilon},
            {"colorRange", {{"lo", l.color_lo}, {"hi", l.color_hi}}},
            {"config",
             {{"cycleSamples", c.cycle_samples},
              {"rOuter", c.r_outer},
              {"rHub", c.r_hub},
              {"cx", c.cx},
              {"cy", c.cy},
              {"revolutionCap", c.revolution_cap},
              {"k", c.k},
              {"wMin", c.w_min},
              {"wMax", c.w_max},
              {"colormap", to_string(c.colormap)},
              {"range", to_string(c.range)},
              {"thickness", c.thickness_on}}},
            {"segments", std::move(segments)},
            {"endMarker", {{"x", l.end_marker.x}, {"y", l.end_marker.y}, {"colorIndex", l.end_color_index}}}};
}

template <typename F>
HttpResponse guarded(const Store& store, F&& body) {
    try {
        return store.read([&](const Store::Snapshot& snap) -> HttpResponse {
            if (!snap.dataset) return error_response(503, "dataset not loaded");
            return body(snap);
        });
    } catch (const HttpError& e) {
        return error_response(e.status, e.message);
    } catch (const ArgumentError& e) {
        return error_response(400, e.what());
    } catch (const std::exception& e) {
        return error_response(500, e.what());
    }
}

} // namespace

std::string to_json(const LiveEvent& e) {
    return json{{"sensorId", e.sensor_id},
                {"t", e.t},
                {"value", e.value},
                {"score", e.score},
                {"category", static_cast<int>(e.category)}}
        .dump();
}

std::string sse_frame(const LiveEvent& e) {
    return "id: " + std::to_string(e.t) + "\nevent: sample\ndata: " + to_json(e) + "\n\n";
}

SpiralLayout sensor_layout(const SensorSeries& series, const SensorAnalysis& analysis, const TimeFrame& frame,
                           SpiralConfig cfg, std::optional<Real> period) {
    if (frame.start < 0 || frame.end > series.size() || frame.start >= frame.end)
        throw ArgumentError("frame outside the series");
    const auto values = series.values().segment(frame.start, frame.size());
    cfg.cycle_samples = period ? *period : estimate_period(values).period_samples;
    const ValueRange range = cfg.range == ColorRange::Local ? ValueRange{values.minCoeff(), values.maxCoeff()}
                                                            : ValueRange{series.global_min(), series.global_max()};
    const std::vector<Category> cats(analysis.categories.begin() + frame.start,
                                     analysis.categories.begin() + frame.end);
    SpiralLayout layout = merge_segments(values, analysis.scores.segment(frame.start, frame.size()), cats,
                                         analysis.thresholds, frame, cfg, range);
    layout.sensor_id = series.id;
    return layout;
}

// ---------------------------------------------------------------------------- Store

Store::Store(ServiceConfig cfg) : cfg_(std::move(cfg)) {}

bool Store::loaded() const {
    std::shared_lock lock(mutex_);
    return dataset_.has_value();
}

void Store::load_from_config() {
    namespace fs = std::filesystem;
    const fs::path& path = cfg_.data_path;
    if (fs::is_directory(path)) {
        const DataDir dir{path};
        if (!fs::exists(dir.dataset_csv())) return;
        std::vector<CategoryThresholds> overrides;
        if (fs::exists(dir.thresholds())) overrides = read_thresholds(read_key_values(dir.thresholds()));
        load(load_dataset(dir, cfg_.baseline_len), overrides);
    } else if (fs::is_regular_file(path)) {
        load(ingest_csv(path, cfg_.baseline_len.value_or(0), false).dataset);
    }
}

void Store::load(Dataset ds, const std::vector<CategoryThresholds>& overrides) {
    auto analyses = analyze_dataset(ds, cfg_.detect_options());
    for (const auto& th : overrides) {
        auto it = std::find_if(analyses.begin(), analyses.end(),
                               [&](const SensorAnalysis& a) { return a.sensor_id == th.sensor_id; });
        if (it == analyses.end()) continue;
        it->thresholds = th;
        refresh_categories(*it, ds.length());
    }
    std::unique_lock lock(mutex_);
    dataset_ = std::move(ds);
    analyses_ = std::move(analyses);
    rebuild_regions();
}

void Store::rebuild_regions() { regions_ = overview_regions(collect_categories(analyses_)); }

std::vector<LiveEvent> Store::append(const std::vector<Real>& row) {
    std::unique_lock lock(mutex_);
    if (!dataset_) throw ArgumentError("no dataset loaded");
    auto& sensors = dataset_->sensors();
    if (row.size() != sensors.size())
        throw ArgumentError("row has " + std::to_string(row.size()) + " values for " +
                            std::to_string(sensors.size()) + " sensors");
    for (Real v : row)
        if (!std::isfinite(v)) throw ArgumentError("live sample must be finite");

    const auto adjust = cfg_.detect_options().adjust;
    std::vector<LiveEvent> events;
    events.reserve(row.size());
    for (std::size_t s = 0; s < sensors.size(); ++s) {
        SensorSeries& series = sensors[s];
        SensorAnalysis& a = analyses_[s];
        series.append(row[s]);
        extend_profile(a.profile, series.values(), adjust);
        refresh_categories(a, series.size());
        const Index t = series.size() - 1;
        events.push_back({series.id, t, row[s], a.scores[t], a.categories[static_cast<std::size_t>(t)]});
    }
    rebuild_regions();
    return events;
}

// ---------------------------------------------------------------------------- Api

HttpResponse Api::sensors() const {
    return guarded(store_, [](const Store::Snapshot& snap) {
        json list = json::array();
        for (const auto& s : snap.dataset->sensors())
            list.push_back({{"id", s.id},
                            {"name", s.name},
                            {"unit", s.unit},
                            {"length", s.size()},
                            {"t0", s.t0},
                            {"dt", s.dt},
                            {"globalMin", s.global_min()},
                            {"globalMax", s.global_max()}});
        return ok(list);
    });
}

HttpResponse Api::overview() const {
    return guarded(store_, [](const Store::Snapshot& snap) {
        json regions = json::array();
        for (const auto& r : snap.regions)
            regions.push_back({{"frame", frame_json(r.frame)},
                               {"severity", static_cast<int>(r.severity)},
                               {"sensorIds", r.sensor_ids}});
        return ok({{"length", snap.dataset->length()}, {"regions", std::move(regions)}});
    });
}

HttpResponse Api::window(const QueryParams& q) const {
    const Index cap = store_.config().max_frame_samples;
    return guarded(store_, [&](const Store::Snapshot& snap) {
        const TimeFrame f = requested_frame(q, snap.dataset->length(), cap);
        std::vector<std::string> ids;
        if (auto list = param(q, "sensors")) ids = split_ids(*list);
        else
            for (const auto& s : snap.dataset->sensors()) ids.push_back(s.id);

        json out = json::array();
        for (const auto& id : ids) {
            const SensorSeries* s = snap.dataset->find(id);
            const SensorAnalysis* a = find_analysis(snap.analyses, id);
            if (!s || !a) throw HttpError{404, "unknown sensor '" + id + "'"};
            const auto values = s->values().segment(f.start, f.size());
            const PeriodEstimate est = estimate_period(values);
            json cats = json::array();
            for (Index t = f.start; t < f.end; ++t) cats.push_back(static_cast<int>(a->categories[static_cast<std::size_t>(t)]));
            out.push_back({{"id", id},
                           {"values", std::vector<Real>(values.begin(), values.end())},
                           {"scores", std::vector<Real>(a->scores.data() + f.start, a->scores.data() + f.end)},
                           {"categories", std::move(cats)},
                           {"periodEstimate",
                            {{"periodSamples", est.period_samples},
                             {"crossings", est.crossings},
                             {"confident", est.confident}}}});
        }
        return ok({{"frame", frame_json(f)}, {"sensors", std::move(out)}});
    });
}

HttpResponse Api::spiral(const QueryParams& q) const {
    const ServiceConfig& cfg = store_.config();
    return guarded(store_, [&](const Store::Snapshot& snap) {
        auto id = param(q, "sensor");
        if (!id) throw HttpError{400, "parameter 'sensor' is required"};
        const SensorSeries* s = snap.dataset->find(*id);
        const SensorAnalysis* a = find_analysis(snap.analyses, *id);
        if (!s || !a) throw HttpError{404, "unknown sensor '" + *id + "'"};
        const TimeFrame f = requested_frame(q, snap.dataset->length(), cfg.max_frame_samples);

        SpiralConfig sc = cfg.spiral_defaults();
        auto period = numeric_param<Real>(q, "period");
        if (period && (!(*period > 0.0) || !std::isfinite(*period))) throw HttpError{400, "period must be positive"};
        if (auto eps = numeric_param<Real>(q, "epsilon")) {
            if (!(*eps >= 0.0)) throw HttpError{400, "epsilon must be non-negative"};
            sc.epsilon = *eps;
        }
        if (auto k = numeric_param<Index>(q, "k")) {
            if (*k < 1) throw HttpError{400, "k must be at least 1"};
            sc.k = *k;
        }
        if (auto r = param(q, "range")) {
            auto parsed = parse_color_range(*r);
            if (!parsed) throw HttpError{400, "range must be global or local"};
            sc.range = *parsed;
        }
        if (auto m = param(q, "map")) {
            auto parsed = parse_colormap(*m);
            if (!parsed) throw HttpError{400, "map must be parula or jet"};
            sc.colormap = *parsed;
        }
        if (auto t = param(q, "thickness")) {
            if (*t != "on" && *t != "off") throw HttpError{400, "thickness must be on or off"};
            sc.thickness_on = *t == "on";
        }
        const SpiralLayout layout = sensor_layout(*s, *a, f, sc, period);
        return ok(layout_json(layout));
    });
}

// ---------------------------------------------------------------------------- LiveHub

bool LiveHub::Subscription::pop(std::string& frame, std::chrono::milliseconds wait) {
    std::unique_lock lock(mutex_);
    cv_.wait_for(lock, wait, [&] { return !frames_.empty() || closed_; });
    if (frames_.empty()) return false;
    frame = std::move(frames_.front());
    frames_.pop_front();
    return true;
}

void LiveHub::Subscription::push(std::string frame) {
    {
        std::lock_guard lock(mutex_);
        if (closed_) return;
        frames_.push_back(std::move(frame));
    }
    cv_.notify_all();
}

void LiveHub::Subscription::close() {
    {
        std::lock_guard lock(mutex_);
        closed_ = true;
    }
    cv_.notify_all();
}

bool LiveHub::Subscription::closed() const {
    std::lock_guard lock(mutex_);
    return closed_;
}

std::shared_ptr<LiveHub::Subscription> LiveHub::subscribe() {
    auto sub = std::make_shared<Subscription>();
    std::lock_guard lock(mutex_);
    if (closed_) sub->close();
    else subs_.push_back(sub);
    return sub;
}

void LiveHub::publish(const std::vector<LiveEvent>& events) {
    std::lock_guard lock(mutex_);
    std::erase_if(subs_, [](const auto& w) { return w.expired(); });
    for (const auto& w : subs_)
        if (auto sub = w.lock())
            for (const auto& e : events) sub->push(sse_frame(e));
}

void LiveHub::close() {
    std::lock_guard lock(mutex_);
    closed_ = true;
    for (const auto& w : subs_)
        if (auto sub = w.lock()) sub->close();
    subs_.clear();
}

std::size_t LiveHub::subscribers() const {
    std::lock_guard lock(mutex_);
    return static_cast<std::size_t>(std::count_if(subs_.begin(), subs_.end(), [](const auto& w) { return !w.expired(); }));
}

// ---------------------------------------------------------------------------- LiveFeed

LiveFeed::LiveFeed(Store& store, LiveHub& hub, Dataset source, std::chrono::milliseconds interval)
    : store_(store), hub_(hub), source_(std::move(source)), interval_(interval) {
    store_.read([&](const Store::Snapshot& snap) {
        if (!snap.dataset) throw ArgumentError("live mode needs a loaded dataset");
        for (const auto& s : snap.dataset->sensors()) {
            const auto& src = source_.sensors();
            auto it = std::find_if(src.begin(), src.end(), [&](const SensorSeries& x) { return x.id == s.id; });
            if (it == src.end()) throw ArgumentError("live source lacks sensor '" + s.id + "'");
            column_of_.push_back(static_cast<std::size_t>(it - src.begin()));
        }
        return 0;
    });
}

LiveFeed::~LiveFeed() { stop(); }

Index LiveFeed::remaining() const { return source_.length() - next_.load(); }

bool LiveFeed::step() {
    const Index t = next_.load();
    if (t >= source_.length()) return false;
    std::vector<Real> row;
    row.reserve(column_of_.size());
    for (std::size_t c : column_of_) row.push_back(source_.sensors()[c].values()[t]);
    hub_.publish(store_.append(row));
    next_.store(t + 1);
    return true;
}

void LiveFeed::start() {
    if (running_.exchange(true)) return;
    thread_ = std::thread([this] {
        while (running_.load()) {
            if (!step()) break;
            std::unique_lock lock(wait_mutex_);
            wait_cv_.wait_for(lock, interval_, [this] { return !running_.load(); });
        }
        running_.store(false);
    });
}

void LiveFeed::stop() {
    running_.store(false);
    wait_cv_.notify_all();
    if (thread_.joinable()) thread_.join();
}

// ---------------------------------------------------------------------------- Server

Server::Server(ServiceConfig cfg) : cfg_(cfg), store_(std::move(cfg)), http_(std::make_unique<httplib::Server>()) {
    Api api(store_);
    auto reply = [](httplib::Response& res, const HttpResponse& r) {
        res.status = r.status;
        res.set_content(r.body, r.content_type);
    };
    auto params = [](const httplib::Request& req) {
        QueryParams q;
        for (const auto& [k, v] : req.params) q.emplace(k, v);
        return q;
    };
    http_->Get("/api/sensors", [api, reply](const httplib::Request&, httplib::Response& res) { reply(res, api.sensors()); });
    http_->Get("/api/overview", [api, reply](const httplib::Request&, httplib::Response& res) { reply(res, api.overview()); });
    http_->Get("/api/window", [api, reply, params](const httplib::Request& req, httplib::Response& res) {
        reply(res, api.window(params(req)));
    });
    http_->Get("/api/spiral", [api, reply, params](const httplib::Request& req, httplib::Response& res) {
        reply(res, api.spiral(params(req)));
    });
    http_->Get("/api/live", [this](const httplib::Request&, httplib::Response& res) {
        if (!store_.loaded()) {
            res.status = 503;
            res.set_content(json{{"error", "dataset not loaded"}}.dump(), "application/json");
            return;
        }
        auto sub = hub_.subscribe();
        res.set_header("Cache-Control", "no-cache");
        res.set_chunked_content_provider(
            "text/event-stream",
            [sub](std::size_t, httplib::DataSink& sink) {
                std::string frame;
                if (sub->pop(frame, std::chrono::milliseconds(1000))) return sink.write(frame.data(), frame.size());
                if (sub->closed()) {
                    sink.done();
                    return true;
                }
                static const std::string keepalive = ": keepalive\n\n";
                return sink.write(keepalive.data(), keepalive.size());
            },
            [sub](bool) { sub->close(); });
    });
}

Server::~Server() { stop(); }

int Server::start(const std::string& host) {
    port_ = cfg_.port == 0 ? http_->bind_to_any_port(host) : (http_->bind_to_port(host, cfg_.port) ? cfg_.port : -1);
    if (port_ <= 0) throw std::runtime_error("cannot bind " + host + ":" + std::to_string(cfg_.port));
    thread_ = std::thread([this] { http_->listen_after_bind(); });
    http_->wait_until_ready();
    return port_;
}

void Server::start_live() {
    if (!cfg_.live_source) return;
    Dataset source = ingest_csv(*cfg_.live_source, 0, false).dataset;
    feed_ = std::make_unique<LiveFeed>(store_, hub_, std::move(source), std::chrono::milliseconds(cfg_.live_interval_ms));
    feed_->start();
}

void Server::stop() {
    if (feed_) feed_->stop();
    hub_.close();
    if (http_) http_->stop();
    if (thread_.joinable()) thread_.join();
}

namespace {
std::atomic<bool> g_stop{false};
extern "C" void on_signal(int) { g_stop.store(true); }
} // namespace

int run_server(const ServiceConfig& cfg) {
    Server server(cfg);
    server.store().load_from_config();
    if (!server.store().loaded())
        std::cerr << "warning: no dataset at '" << cfg.data_path.string() << "'; API answers 503 until one is ingested\n";
    const int port = server.start("0.0.0.0");
    std::cout << "listening on port " << port << std::endl;
    if (cfg.live_source && server.store().loaded()) server.start_live();
    std::signal(SIGINT, on_signal);
    std::signal(SIGTERM, on_signal);
    while (!g_stop.load()) std::this_thread::sleep_for(std::chrono::milliseconds(200));
    server.stop();
    return 0;
}

} // namespace sentinel
