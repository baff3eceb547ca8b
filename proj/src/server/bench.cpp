#include "mocap/server/bench.hpp"

#include "mocap/kinematics/forward_kinematics.hpp"
#include "mocap/server/client.hpp"
#include "mocap/server/pipeline.hpp"
#include "mocap/server/server.hpp"
#include "mocap/sources/replay.hpp"
#include "mocap/sources/scenario.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <thread>

namespace mocap::server {

namespace {

constexpr const char* kBenchRoom = "bench";

std::string camera_name(int c) { return "cam" + std::to_string(c); }

std::vector<std::vector<DetectionFrame>> bench_streams(const BenchOptions& opt) {
    std::vector<std::vector<DetectionFrame>> out;
    for (int c = 0; c < opt.cameras; ++c) {
        out.push_back(sources::generate(sources::mixed_scenario(camera_name(c), opt.persons, opt.duration, opt.rate,
                                                                opt.seed + static_cast<std::uint64_t>(c)))
                          .frames);
    }
    return out;
}

double order_stat(std::vector<double>& v, double q) {
    if (v.empty()) return 0.0;
    const auto k = static_cast<std::size_t>(std::ceil(q * static_cast<double>(v.size()))) - 1;
    std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(k), v.end());
    return v[k];
}

} // namespace

ComputeReport run_compute_bench(const ServerConfig& cfg, const BenchOptions& opt) {
    const auto streams = bench_streams(opt);
    std::vector<CameraPipeline> pipelines;
    for (int c = 0; c < opt.cameras; ++c) {
        pipelines.emplace_back(camera_name(c), cfg.tracker, cfg.smoothing, cfg.camera);
    }
    const kinematics::Skeleton& skel = kinematics::Skeleton::smpl_default();

    ComputeReport r;
    std::vector<double> cost_ms;
    double checksum = 0.0;
    const auto start = Clock::now();
    const std::size_t frames_per_camera = streams.empty() ? 0 : streams.front().size();
    for (std::size_t f = 0; f < frames_per_camera; ++f) {
        for (int c = 0; c < opt.cameras; ++c) {
            const DetectionFrame& frame = streams[static_cast<std::size_t>(c)][f];
            const auto t0 = Clock::now();
            const auto out = pipelines[static_cast<std::size_t>(c)].process(frame, t0);
            if (out) {
                for (const auto& [id, motion] : *out) {
                    checksum += kinematics::forward_kinematics(skel, motion).joint_positions[15].y();
                }
                r.emitted += out->size();
            }
            cost_ms.push_back(std::chrono::duration<double, std::milli>(Clock::now() - t0).count());
            ++r.frames;
            r.person_frames += frame.detections.size();
        }
    }
    r.wall_s = std::chrono::duration<double>(Clock::now() - start).count();
    if (!std::isfinite(checksum)) {
        std::fputs("bench: non-finite joint positions\n", stderr);
    }
    r.frames_per_s = r.wall_s > 0 ? static_cast<double>(r.frames) / r.wall_s : 0.0;
    r.person_frames_per_s = r.wall_s > 0 ? static_cast<double>(r.person_frames) / r.wall_s : 0.0;
    r.p50_ms = order_stat(cost_ms, 0.50);
    r.p95_ms = order_stat(cost_ms, 0.95);
    r.p99_ms = order_stat(cost_ms, 0.99);
    return r;
}

LatencyHistogram::Snapshot merged_end_to_end(const MetricsRegistry& metrics, const std::string& room) {
    LatencyHistogram::Snapshot merged;
    for (const CameraMetrics* m : metrics.cameras_in(room)) {
        merged.merge(m->end_to_end.snapshot());
    }
    return merged;
}

NetworkReport run_network_bench(const ServerConfig& cfg, const BenchOptions& opt) {
    ServerConfig server_cfg = cfg;
    server_cfg.port = 0;
    server_cfg.metrics_port = 0;
    server_cfg.metrics_interval_s = 0;
    server_cfg.sources.clear();
    Server server(server_cfg);
    server.start();

    const auto streams = bench_streams(opt);
    std::atomic<std::size_t> batches{0};
    std::vector<std::unique_ptr<RoomClient>> clients;
    for (int c = 0; c < opt.cameras; ++c) {
        auto client = std::make_unique<RoomClient>(server_cfg.host, server.port());
        room::JoinMsg req;
        req.room_id = kBenchRoom;
        req.display_name = "bench-" + camera_name(c);
        req.camera_id = camera_name(c);
        client->join(req);
        clients.push_back(std::move(client));
    }
    // Count batches from here on without buffering them.
    std::vector<std::thread> drains;
    std::atomic<bool> done{false};
    for (auto& client : clients) {
        drains.emplace_back([&, c = client.get()] {
            while (!done) {
                if (auto r = c->next(std::chrono::milliseconds(50))) {
                    batches += std::holds_alternative<room::FrameBatchMsg>(r->msg);
                }
            }
        });
    }

    NetworkReport report;
    std::atomic<std::size_t> sent{0};
    const auto start = Clock::now();
    std::vector<std::thread> senders;
    for (int c = 0; c < opt.cameras; ++c) {
        senders.emplace_back([&, c] {
            sources::deliver_paced(streams[static_cast<std::size_t>(c)], 1.0, [&](const DetectionFrame& f) {
                sent += clients[static_cast<std::size_t>(c)]->ingest(f);
                return true;
            });
        });
    }
    for (auto& t : senders) t.join();
    // Let the last samples reach a tick.
    std::this_thread::sleep_for(cfg.room.tick_interval() * 3);
    report.wall_s = std::chrono::duration<double>(Clock::now() - start).count();
    done = true;
    for (auto& t : drains) t.join();
    for (auto& client : clients) client->close();

    const auto h = merged_end_to_end(server.metrics(), kBenchRoom);
    server.stop();
    report.frames_sent = sent;
    report.batches_received = batches;
    report.latency_samples = h.count;
    report.p50_ms = h.quantile(0.50);
    report.p95_ms = h.quantile(0.95);
    report.p99_ms = h.quantile(0.99);
    report.max_ms = h.max_ms;
    return report;
}

std::string format_report(const ComputeReport& r) {
    char buf[512];
    std::snprintf(buf, sizeof buf,
                  "compute.frames %zu\ncompute.person_frames %zu\ncompute.emitted %zu\ncompute.wall_s %.3f\n"
                  "compute.frames_per_s %.1f\ncompute.person_frames_per_s %.1f\n"
                  "compute.frame_cost_p50_ms %.4f\ncompute.frame_cost_p95_ms %.4f\ncompute.frame_cost_p99_ms %.4f\n",
                  r.frames, r.person_frames, r.emitted, r.wall_s, r.frames_per_s, r.person_frames_per_s, r.p50_ms,
                  r.p95_ms, r.p99_ms);
    return buf;
}

std::string format_report(const NetworkReport& r) {
    char buf[512];
    std::snprintf(buf, sizeof buf,
                  "network.frames_sent %zu\nnetwork.batches_received %zu\nnetwork.latency_samples %zu\n"
                  "network.e2e_p50_ms %.3f\nnetwork.e2e_p95_ms %.3f\nnetwork.e2e_p99_ms %.3f\nnetwork.e2e_max_ms %.3f\n"
                  "network.wall_s %.3f\n",
                  r.frames_sent, r.batches_received, r.latency_samples, r.p50_ms, r.p95_ms, r.p99_ms, r.max_ms,
                  r.wall_s);
    return buf;
}

} // namespace mocap::server
