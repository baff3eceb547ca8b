#pragma once

#include "mocap/server/config.hpp"
#include "mocap/server/metrics.hpp"

#include <cstdint>
#include <string>

namespace mocap::server {

struct BenchOptions {
    int cameras = 1;
    int persons = 1;
    double duration = 10.0;  // s of generated motion per camera
    double rate = 30.0;      // Hz
    std::uint64_t seed = 1;
};

/// In-process pipeline (tracker, smoothing, FK) driven as fast as possible
/// on one thread.
struct ComputeReport {
    std::size_t frames = 0;
    std::size_t person_frames = 0;  // detections processed
    std::size_t emitted = 0;        // smoothed person samples produced
    double wall_s = 0.0;
    double frames_per_s = 0.0;
    double person_frames_per_s = 0.0;
    // Per-frame pipeline cost, exact order statistics.
    double p50_ms = 0.0;
    double p95_ms = 0.0;
    double p99_ms = 0.0;
};

ComputeReport run_compute_bench(const ServerConfig& cfg, const BenchOptions& opt);

/// Loopback run: one server, one client per camera sending INGEST in real
/// time; latency is detection receipt to batch enqueue as seen by the server.
struct NetworkReport {
    std::size_t frames_sent = 0;
    std::size_t batches_received = 0;  // summed over camera clients
    std::size_t latency_samples = 0;
    double p50_ms = 0.0;
    double p95_ms = 0.0;
    double p99_ms = 0.0;
    double max_ms = 0.0;
    double wall_s = 0.0;
};

NetworkReport run_network_bench(const ServerConfig& cfg, const BenchOptions& opt);

/// Merged end-to-end histogram across every camera of `room`.
LatencyHistogram::Snapshot merged_end_to_end(const MetricsRegistry& metrics, const std::string& room);

std::string format_report(const ComputeReport& r);
std::string format_report(const NetworkReport& r);

} // namespace mocap::server
