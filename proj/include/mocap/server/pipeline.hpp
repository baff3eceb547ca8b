#pragma once

#include "mocap/core/camera.hpp"
#include "mocap/core/types.hpp"
#include "mocap/server/metrics.hpp"
#include "mocap/smoothing/smoothing_bank.hpp"
#include "mocap/tracker/tracker.hpp"

#include <chrono>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace mocap::server {

using Clock = std::chrono::steady_clock;

/// Tracker plus one smoothing bank per live track for a single camera.
/// Not thread-safe; owned by that camera's executor.
class CameraPipeline {
public:
    CameraPipeline(std::string camera_id, const tracking::TrackerConfig& tracker, const smoothing::SmoothingParams& smooth,
                   const CameraIntrinsics& camera, CameraMetrics* metrics = nullptr);

    /// Tracks and smooths one frame. Returns the smoothed (track id, motion
    /// frame) pairs for tracks emitted this frame, or nullopt when the frame
    /// was rejected (out-of-order timestamp); either way the frame is counted.
    std::optional<std::vector<std::pair<TrackId, MotionFrame>>> process(const DetectionFrame& frame,
                                                                         Clock::time_point received);

    const std::string& camera_id() const { return camera_id_; }
    const tracking::Tracker& tracker() const { return tracker_; }
    std::size_t bank_count() const { return banks_.size(); }
    /// Raw tracker emissions of the last processed frame (before smoothing).
    const tracking::StepResult& last_step() const { return last_; }

private:
    std::string camera_id_;
    tracking::Tracker tracker_;
    smoothing::SmoothingParams smooth_params_;
    std::map<TrackId, smoothing::SmoothingBank> banks_;
    CameraMetrics* metrics_;
    tracking::StepResult last_;
};

} // namespace mocap::server
