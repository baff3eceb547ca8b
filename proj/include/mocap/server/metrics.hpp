#pragma once

#include <array>
#include <atomic>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

namespace mocap::server {

/// Lock-free latency histogram with geometric buckets (8 per doubling)
/// from 1 microsecond to several hours. Writers only increment atomics;
/// readers take a snapshot.
class LatencyHistogram {
public:
    static constexpr int kBucketsPerDoubling = 8;
    static constexpr double kMinMs = 1e-3;
    static constexpr std::size_t kBuckets = 8 * 34 + 2;  // plus underflow and overflow

    void record(double ms);

    struct Snapshot {
        std::uint64_t count = 0;
        double sum_ms = 0.0;
        double max_ms = 0.0;
        std::array<std::uint64_t, kBuckets> buckets{};
        /// Upper edge of the bucket holding the q-quantile (0 < q <= 1); an
        /// upper bound on the true quantile within one bucket width (9%).
        double quantile(double q) const;
        double mean() const { return count ? sum_ms / static_cast<double>(count) : 0.0; }
        void merge(const Snapshot& other);
    };
    Snapshot snapshot() const;

    static std::size_t bucket_of(double ms);
    static double upper_edge(std::size_t bucket);

private:
    std::array<std::atomic<std::uint64_t>, kBuckets> buckets_{};
    std::atomic<std::uint64_t> count_{0};
    std::atomic<std::uint64_t> sum_us_{0};
    std::atomic<std::uint64_t> max_ns_{0};
};

/// Counters for one camera pipeline. Per-frame stage histograms hold one
/// sample per processed frame; the enqueue histograms hold one sample per
/// person sample broadcast for the first time.
struct CameraMetrics {
    std::atomic<std::uint64_t> frames_in{0};
    std::atomic<std::uint64_t> frames_processed{0};
    std::atomic<std::uint64_t> frames_dropped{0};  // rejected before tracking
    std::atomic<std::uint64_t> detections_in{0};
    std::atomic<std::uint64_t> detections_rejected{0};
    std::atomic<std::uint64_t> person_frames_emitted{0};
    std::atomic<std::int64_t> tracks_active{0};
    LatencyHistogram ingest_to_tracked;
    LatencyHistogram tracked_to_smoothed;
    LatencyHistogram smoothed_to_enqueued;
    LatencyHistogram end_to_end;  // detection receipt to batch enqueue
};

struct RoomMetrics {
    std::atomic<std::uint64_t> ticks{0};
    std::atomic<std::uint64_t> batches_sent{0};
    std::atomic<std::uint64_t> queue_drops{0};
    std::atomic<std::uint64_t> evictions{0};
    std::atomic<std::uint64_t> ingest_dropped{0};   // person samples for cameras nobody owns
    std::atomic<std::uint64_t> ingest_rejected{0};  // INGEST frames for a camera the sender did not join with
};

/// Registry of all metric holders. Holders are created once and never
/// removed, so callers can keep the returned references.
class MetricsRegistry {
public:
    CameraMetrics& camera(const std::string& room, const std::string& camera_id);
    RoomMetrics& room(const std::string& room);
    std::vector<const CameraMetrics*> cameras_in(const std::string& room) const;
    void set_rtt(const std::string& participant_id, double ms, bool healthy);
    void forget_participant(const std::string& participant_id);

    /// Plain-text `key value` dump, one metric per line, sorted by key.
    std::string dump() const;
    /// Same content as a sorted map, for tests.
    std::map<std::string, double> values() const;

private:
    mutable std::mutex mu_;
    std::map<std::pair<std::string, std::string>, std::unique_ptr<CameraMetrics>> cameras_;
    std::map<std::string, std::unique_ptr<RoomMetrics>> rooms_;
    std::map<std::string, std::pair<double, bool>> rtt_;
};

} // namespace mocap::server
