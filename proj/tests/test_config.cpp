#include "oracles.hpp"

#include "sentinel/config.hpp"
#include "sentinel/errors.hpp"

#include <doctest.h>

#include <filesystem>
#include <sstream>

using namespace sentinel;

namespace {

KeyValues kv_from(const std::string& text) {
    std::istringstream in(text);
    return read_key_values(in);
}

std::filesystem::path scratch_dir(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / ("sentinel_test_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

} // namespace

TEST_CASE("key value files skip comments and blank lines") {
    const KeyValues kv = kv_from("# header\n\nport = 9000\ndata=/srv/plant\n  m=60  \n");
    CHECK(kv.size() == 3);
    CHECK(kv.at("port") == "9000");
    CHECK(kv.at("data") == "/srv/plant");
    CHECK(kv.at("m") == "60");
    CHECK_THROWS_AS(kv_from("port 9000\n"), ParseError);

    std::ostringstream out;
    write_key_values(out, kv);
    CHECK(kv_from(out.str()) == kv);
}

TEST_CASE("service config parsing") {
    const ServiceConfig cfg = parse_service_config(kv_from(
        "port=9000\ndata=/srv\nbaseline=10000\nm=60\nbuffer=1.5\ndelta=auto\nepsilon=0.25\nk=50\n"
        "wmin=0.5\nwmax=4\nrevolution_cap=8\nmax_frame=7200\nlive_interval_ms=250\nlive=/srv/tail.csv\n"));
    CHECK(cfg.port == 9000);
    CHECK(cfg.data_path == "/srv");
    CHECK(cfg.baseline_len == 10000);
    CHECK(cfg.m == 60);
    CHECK(cfg.buffer_factor == 1.5);
    CHECK_FALSE(cfg.delta);
    CHECK(cfg.epsilon == 0.25);
    CHECK(cfg.k == 50);
    CHECK(cfg.w_min == 0.5);
    CHECK(cfg.w_max == 4.0);
    CHECK(cfg.revolution_cap == 8);
    CHECK(cfg.max_frame_samples == 7200);
    CHECK(cfg.live_interval_ms == 250);
    CHECK(cfg.live_source == std::filesystem::path("/srv/tail.csv"));

    const DetectOptions d = cfg.detect_options();
    CHECK(d.m == 60);
    CHECK(d.calibration.buffer_factor == 1.5);
    const SpiralConfig s = cfg.spiral_defaults();
    CHECK(s.k == 50);
    CHECK(s.epsilon == 0.25);
    CHECK(s.revolution_cap == 8);

    CHECK(parse_service_config(kv_from("delta=0.5\n")).delta == 0.5);
    CHECK_FALSE(parse_service_config(kv_from("live=none\n")).live_source);
    CHECK_THROWS_AS(parse_service_config(kv_from("colour=red\n")), ParseError);
    CHECK_THROWS_AS(parse_service_config(kv_from("k=0\n")), ParseError);
    CHECK_THROWS_AS(parse_service_config(kv_from("port=-1\n")), ParseError);
    CHECK_THROWS_AS(parse_service_config(kv_from("buffer=abc\n")), ParseError);
}

TEST_CASE("defaults") {
    const ServiceConfig cfg;
    CHECK(cfg.max_frame_samples == 14'400);
    CHECK(cfg.live_interval_ms == 1000);
    CHECK(cfg.buffer_factor == 1.2);
    CHECK(cfg.k == 100);
}

TEST_CASE("environment overrides") {
    ServiceConfig cfg;
    apply_env_overrides(cfg, [](const char* key) -> const char* {
        if (std::string(key) == "SENTINEL_PORT") return "7070";
        if (std::string(key) == "SENTINEL_DATA") return "/tmp/x";
        return nullptr;
    });
    CHECK(cfg.port == 7070);
    CHECK(cfg.data_path == "/tmp/x");
    ServiceConfig untouched;
    apply_env_overrides(untouched, [](const char*) -> const char* { return nullptr; });
    CHECK(untouched.port == 8080);
}

TEST_CASE("profile csv round trip") {
    std::mt19937_64 rng(1);
    const AnomalyProfile p = matrix_profile(oracle::random_walk(300, rng), {20, std::nullopt});
    std::ostringstream out;
    write_profile_csv(out, p);
    CHECK(out.str().rfind("index,nnDist,closeCount,score\n", 0) == 0);
    std::istringstream in(out.str());
    const AnomalyProfile back = read_profile_csv(in);
    CHECK(back.nn_dist == p.nn_dist);
    CHECK(back.close_count == p.close_count);
    CHECK(back.score == p.score);
    std::istringstream bad("index,nnDist,closeCount,score\n0,1,2,3\n2,1,2,3\n");
    CHECK_THROWS_AS(read_profile_csv(bad), ParseError);
}

TEST_CASE("threshold file round trip and validation") {
    const std::vector<CategoryThresholds> th{{"FIT101", 0.4, 0.48}, {"LIT101", 0.1, 0.1}};
    std::ostringstream out;
    write_thresholds(out, th);
    const auto back = read_thresholds(kv_from(out.str()));
    REQUIRE(back.size() == 2);
    CHECK(back[0].sensor_id == "FIT101");
    CHECK(back[0].theta_ii == 0.4);
    CHECK(back[0].theta_iii == 0.48);
    CHECK_THROWS_AS(read_thresholds(kv_from("A.thetaII=1\n")), ParseError);
    CHECK_THROWS_AS(read_thresholds(kv_from("A.thetaII=1\nA.thetaIII=0.5\n")), ParseError);
    CHECK_THROWS_AS(read_thresholds(kv_from("A.gamma=1\n")), ParseError);
}

TEST_CASE("dataset directory round trip") {
    const auto dir = scratch_dir("config_dataset");
    SensorSeries a("A", Vector::LinSpaced(20, 0.0, 1.0), 5.0, 2.0);
    a.unit = "mm";
    a.name = "Tank level";
    const Dataset ds({a, SensorSeries("B", Vector::Constant(20, 3.0), 5.0, 2.0)}, 8);
    save_dataset(DataDir{dir}, ds);
    const Dataset back = load_dataset(DataDir{dir});
    CHECK(back.baseline_len() == 8);
    CHECK(back.dt() == 2.0);
    CHECK(back.find("A")->unit == "mm");
    CHECK(back.find("A")->name == "Tank level");
    CHECK(back.find("B")->values() == ds.find("B")->values());
    CHECK(load_dataset(DataDir{dir}, 4).baseline_len() == 4);
    std::filesystem::remove_all(dir);
}

TEST_CASE("shortest round-trip number formatting") {
    CHECK(format_real(0.1) == "0.1");
    CHECK(format_real(2.0) == "2");
    CHECK(std::stod(format_real(1.0 / 3.0)) == 1.0 / 3.0);
}
