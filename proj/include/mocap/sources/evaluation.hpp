#pragma once

#include "mocap/core/types.hpp"
#include "mocap/sources/scenario.hpp"

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

namespace mocap::sources {

/// Tracker output for one frame.
struct EmittedFrame {
    std::int64_t frame_index = 0;
    std::vector<std::pair<TrackId, Detection>> pairs;
};

struct TrackingReport {
    std::size_t ground_truth_total = 0;
    std::size_t matched = 0;
    std::size_t misses = 0;        // ground-truth persons with no emitted match
    std::size_t false_tracks = 0;  // emitted entries with no ground-truth match
    std::size_t id_switches = 0;   // changes of a person's matched track id
    double mean_translation_error = 0.0;  // meters, over all matches
    /// (frame_index, mean error in meters) for frames with at least one match.
    std::vector<std::pair<std::int64_t, double>> per_frame_error;

    friend bool operator==(const TrackingReport&, const TrackingReport&) = default;
};

inline constexpr double kMatchRadius = 0.5;  // m

/// Scores emitted tracks against ground truth. Emitted frames are aligned to
/// truth by frame_index (missing ones count as empty); within a frame entries
/// are matched by minimum-total translation distance, pairs beyond kMatchRadius discarded.
TrackingReport evaluate_tracking(std::span<const GroundTruthFrame> truth, std::span<const EmittedFrame> emitted);

struct JitterReport {
    double orient = 0.0;
    double pose = 0.0;
    double trans = 0.0;
};

/// Mean squared second finite difference (acceleration, units/s^2) per
/// channel group. The sample rate is taken from the first and last
/// timestamps. Throws std::invalid_argument for fewer than 3 frames.
JitterReport jitter_metric(std::span<const MotionFrame> frames);

} // namespace mocap::sources
