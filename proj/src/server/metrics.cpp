#include "mocap/server/metrics.hpp"

#include "mocap/core/record.hpp"

#include <algorithm>
#include <cmath>

namespace mocap::server {

std::size_t LatencyHistogram::bucket_of(double ms) {
    if (!(ms > kMinMs)) {
        return 0;
    }
    const double idx = std::ceil(std::log2(ms / kMinMs) * kBucketsPerDoubling);
    return std::min<std::size_t>(static_cast<std::size_t>(idx), kBuckets - 1);
}

double LatencyHistogram::upper_edge(std::size_t bucket) {
    if (bucket >= kBuckets - 1) {
        return INFINITY;
    }
    return kMinMs * std::exp2(static_cast<double>(bucket) / kBucketsPerDoubling);
}

void LatencyHistogram::record(double ms) {
    if (!(ms >= 0.0)) {
        ms = 0.0;
    }
    buckets_[bucket_of(ms)].fetch_add(1, std::memory_order_relaxed);
    count_.fetch_add(1, std::memory_order_relaxed);
    sum_us_.fetch_add(static_cast<std::uint64_t>(std::llround(ms * 1e3)), std::memory_order_relaxed);
    const auto ns = static_cast<std::uint64_t>(std::min(ms * 1e6, 1e18));
    std::uint64_t prev = max_ns_.load(std::memory_order_relaxed);
    while (ns > prev && !max_ns_.compare_exchange_weak(prev, ns, std::memory_order_relaxed)) {
    }
}

LatencyHistogram::Snapshot LatencyHistogram::snapshot() const {
    Snapshot s;
    for (std::size_t i = 0; i < kBuckets; ++i) {
        s.buckets[i] = buckets_[i].load(std::memory_order_relaxed);
        s.count += s.buckets[i];
    }
    s.sum_ms = static_cast<double>(sum_us_.load(std::memory_order_relaxed)) * 1e-3;
    s.max_ms = static_cast<double>(max_ns_.load(std::memory_order_relaxed)) * 1e-6;
    return s;
}

double LatencyHistogram::Snapshot::quantile(double q) const {
    if (count == 0) {
        return 0.0;
    }
    const auto rank = static_cast<std::uint64_t>(std::ceil(q * static_cast<double>(count)));
    std::uint64_t seen = 0;
    for (std::size_t i = 0; i < kBuckets; ++i) {
        seen += buckets[i];
        if (seen >= std::max<std::uint64_t>(rank, 1)) {
            return std::min(upper_edge(i), max_ms);
        }
    }
    return max_ms;
}

void LatencyHistogram::Snapshot::merge(const Snapshot& other) {
    count += other.count;
    sum_ms += other.sum_ms;
    max_ms = std::max(max_ms, other.max_ms);
    for (std::size_t i = 0; i < kBuckets; ++i) buckets[i] += other.buckets[i];
}

std::vector<const CameraMetrics*> MetricsRegistry::cameras_in(const std::string& room) const {
    std::lock_guard lock(mu_);
    std::vector<const CameraMetrics*> out;
    for (const auto& [key, m] : cameras_) {
        if (key.first == room) out.push_back(m.get());
    }
    return out;
}

CameraMetrics& MetricsRegistry::camera(const std::string& room, const std::string& camera_id) {
    std::lock_guard lock(mu_);
    auto& slot = cameras_[{room, camera_id}];
    if (!slot) {
        slot = std::make_unique<CameraMetrics>();
    }
    return *slot;
}

RoomMetrics& MetricsRegistry::room(const std::string& room) {
    std::lock_guard lock(mu_);
    auto& slot = rooms_[room];
    if (!slot) {
        slot = std::make_unique<RoomMetrics>();
    }
    return *slot;
}

void MetricsRegistry::set_rtt(const std::string& participant_id, double ms, bool healthy) {
    std::lock_guard lock(mu_);
    rtt_[participant_id] = {ms, healthy};
}

void MetricsRegistry::forget_participant(const std::string& participant_id) {
    std::lock_guard lock(mu_);
    rtt_.erase(participant_id);
}

namespace {

void put_histogram(std::map<std::string, double>& out, const std::string& prefix, const LatencyHistogram& h) {
    const auto s = h.snapshot();
    out[prefix + ".count"] = static_cast<double>(s.count);
    out[prefix + ".mean_ms"] = s.mean();
    out[prefix + ".p50_ms"] = s.quantile(0.50);
    out[prefix + ".p95_ms"] = s.quantile(0.95);
    out[prefix + ".p99_ms"] = s.quantile(0.99);
    out[prefix + ".max_ms"] = s.max_ms;
}

} // namespace

std::map<std::string, double> MetricsRegistry::values() const {
    std::lock_guard lock(mu_);
    std::map<std::string, double> out;
    for (const auto& [key, m] : cameras_) {
        const std::string p = "camera." + key.first + "." + key.second + ".";
        out[p + "frames_in"] = static_cast<double>(m->frames_in.load());
        out[p + "frames_processed"] = static_cast<double>(m->frames_processed.load());
        out[p + "frames_dropped"] = static_cast<double>(m->frames_dropped.load());
        out[p + "detections_in"] = static_cast<double>(m->detections_in.load());
        out[p + "detections_rejected"] = static_cast<double>(m->detections_rejected.load());
        out[p + "person_frames_emitted"] = static_cast<double>(m->person_frames_emitted.load());
        out[p + "tracks_active"] = static_cast<double>(m->tracks_active.load());
        put_histogram(out, p + "ingest_to_tracked", m->ingest_to_tracked);
        put_histogram(out, p + "tracked_to_smoothed", m->tracked_to_smoothed);
        put_histogram(out, p + "smoothed_to_enqueued", m->smoothed_to_enqueued);
        put_histogram(out, p + "end_to_end", m->end_to_end);
    }
    for (const auto& [name, m] : rooms_) {
        const std::string p = "room." + name + ".";
        out[p + "ticks"] = static_cast<double>(m->ticks.load());
        out[p + "batches_sent"] = static_cast<double>(m->batches_sent.load());
        out[p + "queue_drops"] = static_cast<double>(m->queue_drops.load());
        out[p + "evictions"] = static_cast<double>(m->evictions.load());
        out[p + "ingest_dropped"] = static_cast<double>(m->ingest_dropped.load());
        out[p + "ingest_rejected"] = static_cast<double>(m->ingest_rejected.load());
    }
    for (const auto& [id, rtt] : rtt_) {
        out["participant." + id + ".rtt_ms"] = rtt.first;
        out["participant." + id + ".healthy"] = rtt.second ? 1.0 : 0.0;
    }
    return out;
}

std::string MetricsRegistry::dump() const {
    std::string out;
    for (const auto& [key, v] : values()) {
        out += key;
        out.push_back(' ');
        append_number(out, std::isfinite(v) ? v : -1.0);
        out.push_back('\n');
    }
    return out;
}

} // namespace mocap::server
