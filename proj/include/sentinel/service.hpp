#pragma once

#include "sentinel/config.hpp"
#include "sentinel/ingest.hpp"
#include "sentinel/pipeline.hpp"
#include "sentinel/spiral.hpp"
#include "sentinel/triage.hpp"

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <deque>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <thread>
#include <vector>

namespace httplib {
class Server;
}

namespace sentinel {

struct LiveEvent {
    std::string sensor_id;
    Index t = 0;
    Real value = 0.0;
    Real score = 0.0;
    Category category = Category::I;
};

std::string to_json(const LiveEvent& e);

// Spiral layout of one sensor over `frame`. Without `period` the cycle length is the period
// estimate of the windowed values. The colour range follows `cfg.range`.
SpiralLayout sensor_layout(const SensorSeries& series, const SensorAnalysis& analysis, const TimeFrame& frame,
                           SpiralConfig cfg, std::optional<Real> period = std::nullopt);

// Dataset, precomputed analyses and overview regions behind a reader/writer lock.
class Store {
public:
    explicit Store(ServiceConfig cfg = {});

    const ServiceConfig& config() const { return cfg_; }

    // Loads `dataset.csv` (+ meta, thresholds.conf) from a data directory, or a CSV file
    // directly. A missing dataset leaves the store unloaded; malformed data throws.
    void load_from_config();
    void load(Dataset ds, const std::vector<CategoryThresholds>& threshold_overrides = {});
    bool loaded() const;

    // One value per sensor in dataset order. Returns one event per sensor.
    std::vector<LiveEvent> append(const std::vector<Real>& row);

    // `dataset` is null until loaded.
    struct Snapshot {
        const Dataset* dataset;
        const std::vector<SensorAnalysis>& analyses;
        const std::vector<OverviewRegion>& regions;
    };

    template <typename F>
    auto read(F&& f) const {
        std::shared_lock lock(mutex_);
        return f(Snapshot{dataset_ ? &*dataset_ : nullptr, analyses_, regions_});
    }

private:
    void rebuild_regions();

    ServiceConfig cfg_;
    mutable std::shared_mutex mutex_;
    std::optional<Dataset> dataset_;
    std::vector<SensorAnalysis> analyses_;
    std::vector<OverviewRegion> regions_;
};

struct HttpResponse {
    int status = 200;
    std::string body;
    std::string content_type = "application/json";
};

using QueryParams = std::map<std::string, std::string>;

// Transport-independent handlers for the JSON API.
class Api {
public:
    explicit Api(const Store& store) : store_(store) {}

    HttpResponse sensors() const;
    HttpResponse overview() const;
    HttpResponse window(const QueryParams& q) const;
    HttpResponse spiral(const QueryParams& q) const;

private:
    const Store& store_;
};

// Fan-out of server-sent event frames to connected clients.
class LiveHub {
public:
    class Subscription {
    public:
        bool pop(std::string& frame, std::chrono::milliseconds wait);
        void push(std::string frame);
        void close();
        bool closed() const;

    private:
        mutable std::mutex mutex_;
        std::condition_variable cv_;
        std::deque<std::string> frames_;
        bool closed_ = false;
    };

    std::shared_ptr<Subscription> subscribe();
    void publish(const std::vector<LiveEvent>& events);
    void close();
    std::size_t subscribers() const;

private:
    mutable std::mutex mutex_;
    std::vector<std::weak_ptr<Subscription>> subs_;
    bool closed_ = false;
};

std::string sse_frame(const LiveEvent& e);

// Replays rows of a source dataset into the store at a fixed cadence.
class LiveFeed {
public:
    LiveFeed(Store& store, LiveHub& hub, Dataset source, std::chrono::milliseconds interval);
    ~LiveFeed();

    // Appends the next row; false once the source is exhausted.
    bool step();
    void start();
    void stop();
    Index remaining() const;

private:
    Store& store_;
    LiveHub& hub_;
    Dataset source_;
    std::vector<std::size_t> column_of_;  // store sensor -> source column
    std::chrono::milliseconds interval_;
    std::atomic<Index> next_{0};
    std::atomic<bool> running_{false};
    std::thread thread_;
    std::mutex wait_mutex_;
    std::condition_variable wait_cv_;
};

// HTTP front end: the JSON API plus `/api/live` as a text/event-stream.
class Server {
public:
    explicit Server(ServiceConfig cfg);
    ~Server();

    Store& store() { return store_; }
    LiveHub& hub() { return hub_; }

    // Binds and serves on a background thread. Port 0 picks a free port. Returns the bound port.
    int start(const std::string& host = "127.0.0.1");
    void start_live();
    void stop();
    int port() const { return port_; }

private:
    ServiceConfig cfg_;
    Store store_;
    LiveHub hub_;
    std::unique_ptr<httplib::Server> http_;
    std::unique_ptr<LiveFeed> feed_;
    std::thread thread_;
    int port_ = 0;
};

// Blocks until SIGINT/SIGTERM.
int run_server(const ServiceConfig& cfg);

} // namespace sentinel
