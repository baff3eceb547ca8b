// Command-line entry points: serve, synth, replay, bench, record.

#include "mocap/core/error.hpp"
#include "mocap/server/bench.hpp"
#include "mocap/server/client.hpp"
#include "mocap/server/config.hpp"
#include "mocap/server/log.hpp"
#include "mocap/server/server.hpp"
#include "mocap/sources/replay.hpp"
#include "mocap/sources/scenario.hpp"

#include <CLI11.hpp>

#include <atomic>
#include <csignal>
#include <cstdio>
#include <iostream>
#include <map>
#include <thread>

namespace {

using namespace mocap;
using namespace mocap::server;

std::atomic<bool> g_stop{false};
std::atomic<bool> g_dump{false};

extern "C" void on_stop_signal(int) { g_stop = true; }
extern "C" void on_dump_signal(int) { g_dump = true; }

void install_signals() {
    std::signal(SIGINT, on_stop_signal);
    std::signal(SIGTERM, on_stop_signal);
    std::signal(SIGUSR1, on_dump_signal);
}

ServerConfig make_config(const std::string& path, const std::vector<std::string>& overrides) {
    return path.empty() ? parse_config("", overrides) : load_config(path, overrides);
}

struct ConnectOptions {
    std::string host = "127.0.0.1";
    int port = 7878;
    std::string room = "lobby";
};

void add_connect_options(CLI::App* app, ConnectOptions& o) {
    app->add_option("--host", o.host, "Server address");
    app->add_option("--port", o.port, "Server port")->check(CLI::Range(1, 65535));
    app->add_option("--room", o.room, "Room to join (created on demand)");
}

int run_serve(const std::string& config_path, const std::vector<std::string>& overrides,
              const std::vector<std::string>& records, double duration) {
    const ServerConfig cfg = make_config(config_path, overrides);
    Server server(cfg);
    install_signals();
    server.start();
    for (const std::string& r : records) {
        const auto eq = r.find('=');
        if (eq == std::string::npos || eq == 0) {
            throw ConfigError("--record expects ROOM=PATH, got '" + r + "'");
        }
        server.record_room(r.substr(0, eq), r.substr(eq + 1));
    }
    std::printf("listening %s:%u\n", cfg.host.c_str(), static_cast<unsigned>(server.port()));
    if (server.metrics_port()) {
        std::printf("metrics http://%s:%u/metrics\n", cfg.host.c_str(), static_cast<unsigned>(server.metrics_port()));
    }
    std::fflush(stdout);
    const auto deadline = std::chrono::steady_clock::now() + std::chrono::duration<double>(duration);
    while (!g_stop && (duration <= 0 || std::chrono::steady_clock::now() < deadline)) {
        std::this_thread::sleep_for(std::chrono::milliseconds(50));
        if (g_dump.exchange(false)) {
            std::fputs(server.metrics_text().c_str(), stderr);
        }
    }
    server.stop_recording();
    server.stop();
    std::fputs(server.metrics_text().c_str(), stdout);
    return 0;
}

/// Streams frames to a server, one connection per camera id in the stream.
int stream_frames(const ConnectOptions& o, const std::string& display_name, const std::vector<DetectionFrame>& frames,
                  double speed) {
    std::map<std::string, std::unique_ptr<RoomClient>> clients;
    for (const auto& f : frames) {
        if (clients.count(f.camera_id)) continue;
        auto c = std::make_unique<RoomClient>(o.host, static_cast<std::uint16_t>(o.port));
        room::JoinMsg req;
        req.room_id = o.room;
        req.display_name = display_name;
        req.camera_id = f.camera_id;
        const auto ok = c->join(req);
        std::printf("joined %s as %s (camera %s, roster %zu)\n", o.room.c_str(), ok.participant_id.c_str(),
                    f.camera_id.c_str(), ok.roster.size());
        clients.emplace(f.camera_id, std::move(c));
    }
    // Batches are not consumed; drain them so the inbox stays small.
    std::atomic<bool> done{false};
    std::vector<std::thread> drains;
    for (auto& [cam, c] : clients) {
        drains.emplace_back([&done, client = c.get()] {
            while (!done) client->next(std::chrono::milliseconds(50));
        });
    }
    install_signals();
    std::size_t sent = 0;
    sources::deliver_paced(frames, speed, [&](const DetectionFrame& f) {
        if (g_stop) return false;
        if (!clients.at(f.camera_id)->ingest(f)) {
            std::fputs("connection lost\n", stderr);
            return false;
        }
        ++sent;
        return true;
    });
    done = true;
    for (auto& t : drains) t.join();
    for (auto& [cam, c] : clients) c->close();
    std::printf("sent %zu frames\n", sent);
    return sent == frames.size() ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Room-based motion streaming server and tools"};
    app.require_subcommand(1);
    std::string log_level = "info";
    app.add_option("--log-level", log_level, "debug, info, warn or error")
        ->check(CLI::IsMember({"debug", "info", "warn", "error"}));

    // serve
    auto* serve = app.add_subcommand("serve", "Run the room server");
    std::string config_path;
    std::vector<std::string> overrides;
    std::vector<std::string> records;
    double serve_duration = 0.0;
    int serve_port = -1, metrics_port = -1;
    double tick_rate = 0.0;
    std::string serve_host;
    serve->add_option("--config", config_path, "Config file")->check(CLI::ExistingFile);
    serve->add_option("--set", overrides, "Override a config key: section.key=value");
    serve->add_option("--host", serve_host, "server.host");
    serve->add_option("--port", serve_port, "server.port");
    serve->add_option("--metrics-port", metrics_port, "server.metrics_port");
    serve->add_option("--tick-rate", tick_rate, "room.tick_rate");
    serve->add_option("--record", records, "Record a room's detections: ROOM=PATH");
    serve->add_option("--duration", serve_duration, "Stop after this many seconds (0 = until signalled)");

    // synth
    auto* synth = app.add_subcommand("synth", "Stream a synthetic scenario into a running server");
    ConnectOptions synth_conn;
    add_connect_options(synth, synth_conn);
    SourceSpec synth_spec;
    synth_spec.name = "synth";
    std::string spec_path;
    synth->add_option("--spec", spec_path, "Source spec file (keys of a [source.NAME] section)")
        ->check(CLI::ExistingFile);
    synth->add_option("--scenario", synth_spec.scenario, "walkers, crossing, noisy or mixed");
    synth->add_option("--persons", synth_spec.persons, "Number of people");
    synth->add_option("--duration", synth_spec.duration, "Seconds of motion");
    synth->add_option("--rate", synth_spec.rate, "Frames per second");
    synth->add_option("--seed", synth_spec.seed, "Random seed");
    synth->add_option("--camera-id", synth_spec.camera_id, "Camera id");
    synth->add_option("--speed", synth_spec.speed, "Playback speed (0 = as fast as possible)");

    // replay
    auto* replay = app.add_subcommand("replay", "Stream a recorded detection file into a running server");
    ConnectOptions replay_conn;
    add_connect_options(replay, replay_conn);
    std::string replay_file;
    double replay_speed = 1.0;
    replay->add_option("--file", replay_file, "Replay file")->required();
    replay->add_option("--speed", replay_speed, "Playback speed (0 = as fast as possible)")->check(CLI::NonNegativeNumber);

    // bench
    auto* bench = app.add_subcommand("bench", "Measure pipeline throughput and loopback latency");
    std::string bench_config;
    BenchOptions bench_opt;
    bool skip_network = false;
    bench->add_option("--config", bench_config, "Config file")->check(CLI::ExistingFile);
    bench->add_option("--cameras", bench_opt.cameras, "Cameras")->check(CLI::PositiveNumber);
    bench->add_option("--persons", bench_opt.persons, "People per camera")->check(CLI::PositiveNumber);
    bench->add_option("--duration", bench_opt.duration, "Seconds of motion per camera")->check(CLI::PositiveNumber);
    bench->add_option("--rate", bench_opt.rate, "Frames per second")->check(CLI::PositiveNumber);
    bench->add_option("--seed", bench_opt.seed, "Random seed");
    bench->add_flag("--compute-only", skip_network, "Skip the networked loopback run");

    // record
    auto* record = app.add_subcommand("record", "Run a server with its configured sources and record one room");
    std::string record_config, record_room, record_out;
    std::vector<std::string> record_overrides;
    double record_duration = 0.0;
    record->add_option("--config", record_config, "Config file")->check(CLI::ExistingFile);
    record->add_option("--set", record_overrides, "Override a config key: section.key=value");
    record->add_option("--room", record_room, "Room to record")->required();
    record->add_option("--out", record_out, "Output replay file")->required();
    record->add_option("--duration", record_duration,
                       "Keep recording for this many seconds after the configured sources finish");

    CLI11_PARSE(app, argc, argv);
    set_log_threshold(log_level == "debug"  ? LogLevel::Debug
                      : log_level == "warn" ? LogLevel::Warn
                      : log_level == "error" ? LogLevel::Error
                                             : LogLevel::Info);

    try {
        if (*serve) {
            if (!serve_host.empty()) overrides.push_back("server.host=" + serve_host);
            if (serve_port >= 0) overrides.push_back("server.port=" + std::to_string(serve_port));
            if (metrics_port >= 0) overrides.push_back("server.metrics_port=" + std::to_string(metrics_port));
            if (tick_rate > 0) overrides.push_back("room.tick_rate=" + std::to_string(tick_rate));
            return run_serve(config_path, overrides, records, serve_duration);
        }
        if (*synth) {
            SourceSpec spec = spec_path.empty() ? synth_spec : load_source_spec(spec_path);
            spec.validate();
            const auto frames = sources::generate(spec.scenario_spec()).frames;
            return stream_frames(synth_conn, "synth:" + spec.scenario, frames, spec.speed);
        }
        if (*replay) {
            sources::ReplayStats stats;
            const auto frames = sources::load_replay(replay_file, &stats);
            if (stats.malformed_lines) {
                std::fprintf(stderr, "warning: skipped %zu malformed lines\n", stats.malformed_lines);
            }
            return stream_frames(replay_conn, "replay", frames, replay_speed);
        }
        if (*bench) {
            const ServerConfig cfg = make_config(bench_config, {});
            std::fputs(format_report(run_compute_bench(cfg, bench_opt)).c_str(), stdout);
            std::fflush(stdout);
            if (!skip_network) {
                std::fputs(format_report(run_network_bench(cfg, bench_opt)).c_str(), stdout);
            }
            return 0;
        }
        if (*record) {
            ServerConfig cfg = make_config(record_config, record_overrides);
            auto sources = std::move(cfg.sources);
            cfg.sources.clear();
            Server server(cfg);
            server.start();
            server.record_room(record_room, record_out);
            for (const SourceSpec& s : sources) server.attach_source(s);
            server.wait_for_sources();
            install_signals();
            const auto deadline = std::chrono::steady_clock::now() + std::chrono::duration<double>(record_duration);
            while (!g_stop && std::chrono::steady_clock::now() < deadline) {
                std::this_thread::sleep_for(std::chrono::milliseconds(50));
            }
            server.stop_recording();
            server.stop();
            std::printf("recorded room %s to %s\n", record_room.c_str(), record_out.c_str());
            return 0;
        }
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const ParseError& e) {
        std::fprintf(stderr, "input error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
